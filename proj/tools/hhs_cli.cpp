// hhs CLI — batch interface: load or generate instances, run verifications
// and pipelines, emit machine-readable reports.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "hhs/combine.hpp"
#include "hhs/constructions.hpp"
#include "hhs/convexity.hpp"
#include "hhs/detail/parallel.hpp"
#include "hhs/json_io.hpp"
#include "hhs/paths.hpp"
#include "hhs/realization.hpp"
#include "hhs/verifier.hpp"

using namespace hhs;

namespace {

constexpr int EXIT_PASS = 0;
constexpr int EXIT_VERIFIED_FAILURE = 1;
constexpr int EXIT_INPUT_ERROR = 2;

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError("parse failure in " + path + ": " + e.what());
    }
    return j;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

HInstance load_instance(const std::string& path) {
    auto raw = instance_from_json(read_json_file(path));
    auto res = validate_instance(raw);
    if (!res.ok()) {
        std::string msg = "invalid instance " + path + ":";
        for (const auto& e : res.errors) msg += "\n  " + e;
        throw ParseError(msg);
    }
    return std::move(*res.instance);
}

std::vector<int> parse_ids(const std::string& csv) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        std::size_t next = csv.find(',', pos);
        if (next == std::string::npos) next = csv.size();
        out.push_back(std::stoi(csv.substr(pos, next - pos)));
        pos = next + 1;
    }
    return out;
}

void emit(const json& j, const std::string& report_path) {
    if (report_path.empty())
        std::cout << j.dump(2) << "\n";
    else
        write_json_file(report_path, j);
}

int cmd_verify(const std::string& path, const std::string& report_path, std::uint64_t seed) {
    auto h = load_instance(path);
    auto rep = verify_all(h);
    measure_theta_e(h, generate_tuple_corpus(h, 300, seed));
    emit(report_to_json(rep, h.consts, seed), report_path);
    return rep.all_passed ? EXIT_PASS : EXIT_VERIFIED_FAILURE;
}

int cmd_run(const std::string& task, const std::string& path, const std::string& points,
            int from, int to, int s, int s0, int theta, int x_arg, std::uint64_t seed,
            const std::string& mode, const std::string& report_path, const std::string& csv) {
    auto h = load_instance(path);
    json out;
    out["task"] = task;
    out["seed"] = seed;

    if (task == "realize") {
        verify_all(h);
        Tuple b = h.point_tuple(from);
        if (to >= 0) {  // blend: coordinates of `to` on even domains
            Tuple b2 = h.point_tuple(to);
            for (int u = 0; u < h.domain_count(); u += 2) b.coords[u] = b2.coords[u];
        }
        auto r = realize(h, b,
                         mode == "constructive" ? RealizeMode::Constructive : RealizeMode::Brute);
        out["x"] = r.x;
        out["deviation"] = r.deviation;
        out["consistency"] = consistency_threshold(h, b);
    } else if (task == "median") {
        auto ids = parse_ids(points);
        if (ids.size() != 3) throw ParseError("median needs --points a,b,c");
        auto m = coarse_median(h, ids[0], ids[1], ids[2]);
        out["median"] = m.m;
        out["deviation"] = m.deviation;
        out["center_consistency"] = m.center_consistency;
    } else if (task == "path") {
        verify_all(h);
        auto p = good_path(h, from, to);
        auto audit = audit_path(h, p);
        out["path"] = p.steps;
        out["step_bound"] = audit.step_bound;
        out["efficiency"] = audit.efficiency;
        out["overall_d"] = audit.overall_d;
        if (!csv.empty()) {
            std::ofstream f(csv);
            f << "domain,monotonicity_defect,unparam_d\n";
            for (int u = 0; u < h.domain_count(); ++u)
                f << h.domains[u].external_id << "," << audit.monotonicity_defect[u] << ","
                  << audit.unparam_d[u] << "\n";
        }
    } else if (task == "df-fit") {
        auto fit = fit_df_constants(h, s);
        json rows = json::array();
        for (auto& r : fit.frontier) rows.push_back({{"K", r.k}, {"C", r.c}});
        out["s"] = s;
        out["frontier"] = std::move(rows);
        out["s0_min"] = fit.s0_min;
        if (!csv.empty() && h.total.size() <= 2048) {
            std::ofstream f(csv);
            f << "x,y,d,sum\n";
            for (int x = 0; x < h.total.size(); ++x)
                for (int y = x + 1; y < h.total.size(); ++y)
                    f << x << "," << y << "," << h.total.dist(x, y) << ","
                      << threshold_sum(h, x, y, s) << "\n";
        }
    } else if (task == "df-cert") {
        verify_all(h);
        measure_theta_e(h, generate_tuple_corpus(h, 200, seed));
        int use_s0 = s0 > 0 ? s0 : df_certificate_s0_floor(h);
        auto cert = df_lower_certificate(h, from, to, use_s0);
        out["s0"] = use_s0;
        out["transverse_free"] = cert.transverse_free;
        out["bound_certified"] = cert.bound_certified;
        out["doors"] = cert.doors.size();
        out["checkpoints"] = cert.checkpoint_total;
        out["sum_s0"] = cert.sum_s0;
    } else if (task == "gate") {
        VertexSet y(parse_ids(points).begin(), parse_ids(points).end());
        std::sort(y.begin(), y.end());
        verify_all(h);
        measure_theta_e(h, generate_tuple_corpus(h, 200, seed));
        out["gate"] = gate(h, y, x_arg);
    } else if (task == "hull") {
        auto ids = parse_ids(points);
        VertexSet a(ids.begin(), ids.end());
        verify_all(h);
        measure_theta_e(h, generate_tuple_corpus(h, 200, seed));
        int use_theta = theta > 0 ? theta : hull_theta_floor(h);
        auto hull = finite_hull(h, a, use_theta);
        out["theta"] = use_theta;
        out["size"] = hull.members.size();
        out["members"] = hull.members;
    } else if (task == "rel-hull") {
        verify_all(h);
        measure_theta_e(h, generate_tuple_corpus(h, 200, seed));
        int use_theta = theta > 0 ? theta : hull_theta_floor(h);
        auto rh = relative_hull(h, from, to, use_theta);
        auto rep = verify_all(rh.instance);
        auto fit = fit_df_constants(rh.instance, 3);
        out["theta"] = use_theta;
        out["size"] = rh.members.size();
        out["hull_verified"] = rep.all_passed;
        out["df_c_at_k1"] = fit.row(1.0)->c;
        emit(out, report_path);
        return rep.all_passed ? EXIT_PASS : EXIT_VERIFIED_FAILURE;
    } else if (task == "poset") {
        verify_all(h);
        Tuple b = h.point_tuple(to);
        int use_theta = theta > 0 ? theta : 100 * std::max(1, h.consts.E);
        auto poset = relevance_poset(h, from, b, use_theta, h.consts.E,
                                     RelevanceSelector::MaxElements);
        auto coloring = chain_coloring(poset);
        out["elements"] = poset.elements;
        out["colors"] = coloring.colors;
        out["dichotomy"] = poset.dichotomy_holds;
    } else {
        throw ParseError("unknown task " + task);
    }
    emit(out, report_path);
    return EXIT_PASS;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hierarchical-structure toolkit"};
    app.require_subcommand(1);
    int jobs = 0;
    app.add_option("--jobs", jobs, "worker thread count (0 = hardware)");

    // verify
    std::string v_path, v_report;
    std::uint64_t v_seed = 1;
    auto* verify = app.add_subcommand("verify", "run the axiom verifier on an instance");
    verify->add_option("instance", v_path)->required();
    verify->add_option("--report", v_report);
    verify->add_option("--seed", v_seed);

    // run
    std::string r_task, r_path, r_points, r_mode = "brute", r_report, r_csv;
    int r_from = 0, r_to = -1, r_s = 1, r_s0 = 0, r_theta = 0, r_x = 0;
    std::uint64_t r_seed = 1;
    auto* run = app.add_subcommand("run", "run a pipeline task on an instance");
    run->add_option("task", r_task)->required();
    run->add_option("instance", r_path)->required();
    run->add_option("--points", r_points);
    run->add_option("--from", r_from);
    run->add_option("--to", r_to);
    run->add_option("--s", r_s);
    run->add_option("--s0", r_s0);
    run->add_option("--theta", r_theta);
    run->add_option("--x", r_x);
    run->add_option("--seed", r_seed);
    run->add_option("--mode", r_mode);
    run->add_option("--report", r_report);
    run->add_option("--csv", r_csv);

    // build
    std::string b_kind, b_out, b_a, b_b, b_base, b_peripherals, b_bundle, b_graph = "tree";
    std::string b_structures;
    int b_n = 20, b_m = 20, b_vertices = 2, b_sigma = 40, b_fiber = 12, b_side = 15,
        b_tail = 30;
    std::uint64_t b_seed = 1;
    std::string b_bundle_out;
    auto* build = app.add_subcommand("build", "generate an instance file");
    build->add_option("kind", b_kind)->required();
    build->add_option("--out", b_out);
    build->add_option("--a", b_a);
    build->add_option("--b", b_b);
    build->add_option("--base", b_base);
    build->add_option("--peripherals", b_peripherals);
    build->add_option("--structures", b_structures, "comma-separated per-peripheral instance files");
    build->add_option("--bundle", b_bundle);
    build->add_option("--bundle-out", b_bundle_out);
    build->add_option("--graph", b_graph);
    build->add_option("--n", b_n);
    build->add_option("--m", b_m);
    build->add_option("--seed", b_seed);
    build->add_option("--vertices", b_vertices);
    build->add_option("--sigma", b_sigma);
    build->add_option("--fiber", b_fiber);
    build->add_option("--side", b_side);
    build->add_option("--tail", b_tail);

    CLI11_PARSE(app, argc, argv);
    if (jobs > 0) detail::set_worker_count(jobs);

    try {
        if (app.got_subcommand(verify)) return cmd_verify(v_path, v_report, v_seed);
        if (app.got_subcommand(run))
            return cmd_run(r_task, r_path, r_points, r_from, r_to, r_s, r_s0, r_theta, r_x,
                           r_seed, r_mode, r_report, r_csv);

        // build
        if (b_kind == "complexity1") {
            MetricGraph g;
            if (b_graph == "tree") g = MetricGraph::random_tree(b_n, b_seed);
            else if (b_graph == "path") g = MetricGraph::path(b_n);
            else if (b_graph == "cycle") g = MetricGraph::cycle(b_n);
            else if (b_graph == "grid") g = MetricGraph::grid(b_n, b_m);
            else throw ParseError("unknown graph kind " + b_graph);
            write_json_file(b_out, instance_to_json(build_complexity_one(g)));
        } else if (b_kind == "product") {
            auto ha = load_instance(b_a);
            auto hb = load_instance(b_b);
            write_json_file(b_out, instance_to_json(build_product(ha, hb)));
        } else if (b_kind == "relative") {
            auto base = graph_from_json(read_json_file(b_base));
            auto pj = read_json_file(b_peripherals);
            std::vector<VertexSet> peripherals;
            for (const auto& p : pj) peripherals.push_back(p.get<VertexSet>());
            if (b_structures.empty()) {
                write_json_file(b_out, instance_to_json(build_relative(base, peripherals)));
            } else {
                std::vector<HInstance> owned;
                std::size_t pos = 0;
                while (pos < b_structures.size()) {
                    std::size_t nextp = b_structures.find(',', pos);
                    if (nextp == std::string::npos) nextp = b_structures.size();
                    owned.push_back(load_instance(b_structures.substr(pos, nextp - pos)));
                    pos = nextp + 1;
                }
                std::vector<const HInstance*> ptrs;
                for (auto& s2 : owned) ptrs.push_back(&s2);
                write_json_file(b_out, instance_to_json(build_relative(base, peripherals, ptrs)));
            }
        } else if (b_kind == "grid-tail") {
            auto gwt = grid_with_tail_example(b_side, b_tail);
            write_json_file(b_out, instance_to_json(gwt.relative));
        } else if (b_kind == "combine") {
            auto t = bundle_from_json(read_json_file(b_bundle));
            try {
                auto res = combine_tree(t);
                write_json_file(b_out, instance_to_json(res.instance));
            } catch (const CombineHypothesisError& e) {
                std::cerr << e.what() << "\n";
                return EXIT_VERIFIED_FAILURE;
            }
        } else if (b_kind == "flip-example") {
            FlipTreeParams params;
            for (int v = 1; v < b_vertices; ++v) params.tree_edges.push_back({v - 1, v});
            params.sigma_size = b_sigma;
            params.fiber = b_fiber;
            auto t = flip_tree_example(params);
            if (!b_bundle_out.empty()) write_json_file(b_bundle_out, bundle_to_json(t));
            if (!b_out.empty()) {
                auto res = combine_tree(t);
                write_json_file(b_out, instance_to_json(res.instance));
            }
        } else {
            throw ParseError("unknown build kind " + b_kind);
        }
        return EXIT_PASS;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return EXIT_INPUT_ERROR;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return EXIT_INPUT_ERROR;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return EXIT_VERIFIED_FAILURE;
    }
}
