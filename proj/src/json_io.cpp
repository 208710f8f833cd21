#include "hhs/json_io.hpp"

namespace hhs {

json graph_to_json(const MetricGraph& g) {
    json j;
    j["n"] = g.size();
    json edges = json::array();
    for (auto [a, b] : g.edges()) edges.push_back({a, b});
    j["edges"] = std::move(edges);
    return j;
}

MetricGraph graph_from_json(const json& j) {
    if (!j.is_object() || !j.contains("n") || !j.contains("edges"))
        throw ParseError("graph: expected {n, edges}");
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j["edges"]) {
        if (!e.is_array() || e.size() != 2) throw ParseError("graph: bad edge entry");
        edges.push_back({e[0].get<int>(), e[1].get<int>()});
    }
    try {
        return MetricGraph::from_edges(j["n"].get<int>(), edges);
    } catch (const StructuralError& err) {
        throw ParseError(std::string("graph: ") + err.what());
    }
}

json instance_to_json(const HInstance& h) {
    json j;
    j["total_space"] = graph_to_json(h.total);
    json domains = json::array();
    for (const auto& d : h.domains) {
        json dj;
        dj["id"] = d.external_id;
        dj["name"] = d.name;
        dj["graph"] = graph_to_json(d.space);
        dj["hyperbolic"] = d.hyperbolic;
        domains.push_back(std::move(dj));
    }
    j["domains"] = std::move(domains);
    json nesting = json::array();
    json orth = json::array();
    for (int u = 0; u < h.domain_count(); ++u)
        for (int v = 0; v < h.domain_count(); ++v) {
            if (u != v && h.rel.rel(u, v) == Rel::NestedIn)
                nesting.push_back({h.domains[u].external_id, h.domains[v].external_id});
            if (u < v && h.rel.orthogonal(u, v))
                orth.push_back({h.domains[u].external_id, h.domains[v].external_id});
        }
    j["nesting"] = std::move(nesting);
    j["orthogonality"] = std::move(orth);
    j["maximal"] = h.domain_count() ? h.domains[h.rel.maximal()].external_id : -1;
    json containers = json::array();
    for (auto& [key, w] : h.rel.container)
        containers.push_back({h.domains[key.first].external_id,
                              h.domains[key.second].external_id, h.domains[w].external_id});
    j["containers"] = std::move(containers);
    json pi = json::object();
    for (int u = 0; u < h.domain_count(); ++u)
        pi[std::to_string(h.domains[u].external_id)] = h.pi[u];
    j["pi"] = std::move(pi);
    json rset = json::array();
    for (auto& [key, s] : h.rho_set) {
        json r;
        r["from"] = h.domains[key.first].external_id;
        r["to"] = h.domains[key.second].external_id;
        r["set"] = s;
        rset.push_back(std::move(r));
    }
    j["rho_set"] = std::move(rset);
    json rmap = json::array();
    for (auto& [key, m] : h.rho_map) {
        json r;
        r["from"] = h.domains[key.first].external_id;
        r["to"] = h.domains[key.second].external_id;
        r["map"] = m;
        rmap.push_back(std::move(r));
    }
    j["rho_map"] = std::move(rmap);
    return j;
}

RawInstance instance_from_json(const json& j) {
    if (!j.is_object() || !j.contains("total_space"))
        throw ParseError("instance: expected an object with total_space");
    RawInstance raw;
    raw.total = graph_from_json(j["total_space"]);
    if (j.contains("domains"))
        for (const auto& dj : j["domains"]) {
            Domain d;
            if (!dj.contains("id") || !dj.contains("graph"))
                throw ParseError("instance: domain needs id and graph");
            d.external_id = dj["id"].get<int>();
            d.name = dj.value("name", std::string());
            d.space = graph_from_json(dj["graph"]);
            d.hyperbolic = dj.value("hyperbolic", true);
            raw.domains.push_back(std::move(d));
        }
    auto pairs = [&](const char* key) {
        std::vector<std::pair<int, int>> out;
        if (!j.contains(key)) return out;
        for (const auto& e : j[key]) {
            if (!e.is_array() || e.size() != 2) throw ParseError("instance: bad pair entry");
            out.push_back({e[0].get<int>(), e[1].get<int>()});
        }
        return out;
    };
    raw.nesting = pairs("nesting");
    raw.orthogonality = pairs("orthogonality");
    raw.maximal = j.value("maximal", -1);
    if (j.contains("containers"))
        for (const auto& e : j["containers"]) {
            if (!e.is_array() || e.size() != 3) throw ParseError("instance: bad container entry");
            raw.containers.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<int>()});
        }
    if (j.contains("pi"))
        for (auto it = j["pi"].begin(); it != j["pi"].end(); ++it) {
            int ext = std::stoi(it.key());
            std::vector<VertexSet> table;
            for (const auto& s : it.value()) table.push_back(s.get<VertexSet>());
            raw.pi[ext] = std::move(table);
        }
    if (j.contains("rho_set"))
        for (const auto& r : j["rho_set"])
            raw.rho_set.push_back(
                {r.at("from").get<int>(), r.at("to").get<int>(), r.at("set").get<VertexSet>()});
    if (j.contains("rho_map"))
        for (const auto& r : j["rho_map"]) {
            std::vector<VertexSet> m;
            for (const auto& s : r.at("map")) m.push_back(s.get<VertexSet>());
            raw.rho_map.push_back({r.at("from").get<int>(), r.at("to").get<int>(), std::move(m)});
        }
    return raw;
}

json bundle_to_json(const TreeOfHHS& t) {
    json j;
    j["tree"] = graph_to_json(t.tree);
    json te = json::array();
    for (auto [a, b] : t.tree_edges) te.push_back({a, b});
    j["tree_edges"] = std::move(te);
    json vi = json::object();
    for (std::size_t v = 0; v < t.vertex_instances.size(); ++v)
        vi[std::to_string(v)] = instance_to_json(t.vertex_instances[v]);
    j["vertex_instances"] = std::move(vi);
    json ei = json::object();
    for (std::size_t e = 0; e < t.edge_instances.size(); ++e)
        ei[std::to_string(e)] = instance_to_json(t.edge_instances[e]);
    j["edge_instances"] = std::move(ei);
    json maps = json::array();
    for (std::size_t e = 0; e < t.tree_edges.size(); ++e) {
        for (int side = 0; side < 2; ++side) {
            const Hieromorphism& f = side == 0 ? t.phi_minus[e] : t.phi_plus[e];
            const HInstance& src = t.edge_instances[e];
            const HInstance& dst =
                t.vertex_instances[side == 0 ? t.tree_edges[e].first : t.tree_edges[e].second];
            json m;
            m["edge"] = e;
            m["side"] = side == 0 ? "-" : "+";
            m["f"] = f.point_map;
            json fd = json::array();
            for (int u = 0; u < src.domain_count(); ++u)
                fd.push_back({src.domains[u].external_id,
                              dst.domains[f.domain_map[u]].external_id});
            m["f_dom"] = std::move(fd);
            json fs = json::object();
            for (int u = 0; u < src.domain_count(); ++u)
                fs[std::to_string(src.domains[u].external_id)] = f.star[u];
            m["f_star"] = std::move(fs);
            maps.push_back(std::move(m));
        }
    }
    j["edge_maps"] = std::move(maps);
    return j;
}

TreeOfHHS bundle_from_json(const json& j) {
    TreeOfHHS t;
    if (!j.contains("tree") || !j.contains("vertex_instances"))
        throw ParseError("bundle: expected tree and vertex_instances");
    t.tree = graph_from_json(j["tree"]);
    if (j.contains("tree_edges"))
        for (const auto& e : j["tree_edges"]) t.tree_edges.push_back({e[0], e[1]});
    else
        for (auto [a, b] : t.tree.edges()) t.tree_edges.push_back({a, b});

    auto load_instance = [](const json& ij) {
        auto res = validate_instance(instance_from_json(ij));
        if (!res.ok()) {
            std::string msg = "bundle: invalid instance:";
            for (auto& e : res.errors) msg += " " + e;
            throw ParseError(msg);
        }
        return std::move(*res.instance);
    };
    t.vertex_instances.resize(t.tree.size());
    for (auto it = j["vertex_instances"].begin(); it != j["vertex_instances"].end(); ++it)
        t.vertex_instances[std::stoi(it.key())] = load_instance(it.value());
    t.edge_instances.resize(t.tree_edges.size());
    if (j.contains("edge_instances"))
        for (auto it = j["edge_instances"].begin(); it != j["edge_instances"].end(); ++it)
            t.edge_instances[std::stoi(it.key())] = load_instance(it.value());

    t.phi_minus.resize(t.tree_edges.size());
    t.phi_plus.resize(t.tree_edges.size());
    if (j.contains("edge_maps"))
        for (const auto& m : j["edge_maps"]) {
            int e = m.at("edge").get<int>();
            bool minus = m.at("side").get<std::string>() == "-";
            Hieromorphism f;
            f.point_map = m.at("f").get<std::vector<int>>();
            const HInstance& src = t.edge_instances[e];
            const HInstance& dst =
                t.vertex_instances[minus ? t.tree_edges[e].first : t.tree_edges[e].second];
            auto ext_to_dense = [](const HInstance& h, int ext) {
                for (int u = 0; u < h.domain_count(); ++u)
                    if (h.domains[u].external_id == ext) return u;
                throw ParseError("bundle: unknown domain id " + std::to_string(ext));
            };
            f.domain_map.assign(src.domain_count(), -1);
            for (const auto& p : m.at("f_dom"))
                f.domain_map[ext_to_dense(src, p[0].get<int>())] =
                    ext_to_dense(dst, p[1].get<int>());
            f.star.resize(src.domain_count());
            for (auto it = m.at("f_star").begin(); it != m.at("f_star").end(); ++it)
                f.star[ext_to_dense(src, std::stoi(it.key()))] = it.value().get<std::vector<int>>();
            if (minus)
                t.phi_minus[e] = std::move(f);
            else
                t.phi_plus[e] = std::move(f);
        }
    t.rebind();
    return t;
}

json constants_to_json(const ConstantsReport& c) {
    json j;
    j["delta"] = c.delta;
    j["xi"] = c.xi;
    j["k_lip"] = c.k_lip;
    j["kappa0"] = c.kappa0;
    j["kappa1"] = c.kappa1;
    j["complexity_n"] = c.complexity_n;
    j["chi"] = c.chi;
    j["lambda"] = c.lambda;
    j["e_bgi"] = c.e_bgi;
    j["e_ll"] = c.e_ll;
    j["alpha"] = c.alpha;
    j["surjectivity_defect"] = c.surjectivity_defect;
    j["E"] = c.E;
    j["theta_u"] = c.theta_u;
    j["theta_e"] = c.theta_e;
    j["corpus_seed"] = c.corpus_seed;
    return j;
}

json report_to_json(const VerifyReport& rep, const ConstantsReport& consts,
                    std::uint64_t seed) {
    json j;
    json axioms = json::object();
    json witnesses = json::array();
    for (const auto& ax : rep.axioms) {
        json a;
        a["passed"] = ax.passed;
        json cs = json::object();
        for (auto& [k, v] : ax.constants) cs[k] = v;
        a["constants"] = std::move(cs);
        axioms[ax.name] = std::move(a);
        for (const auto& w : ax.witnesses) witnesses.push_back(ax.name + ": " + w);
    }
    j["axioms"] = std::move(axioms);
    j["witnesses"] = std::move(witnesses);
    j["constants"] = constants_to_json(consts);
    j["seed"] = seed;
    j["approximations"] = rep.approximations;
    j["all_passed"] = rep.all_passed;
    return j;
}

}  // namespace hhs
