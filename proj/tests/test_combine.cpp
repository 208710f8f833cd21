#include "doctest.h"
#include "hhs/combine.hpp"
#include "hhs/convexity.hpp"
#include "hhs/paths.hpp"
#include "hhs/realization.hpp"
#include "hhs/verifier.hpp"

using namespace hhs;

TEST_CASE("flip example generator shapes") {
    FlipTreeParams params;
    params.tree_edges = {{0, 1}};
    params.sigma_size = 20;
    params.fiber = 6;
    auto t = flip_tree_example(params);
    CHECK(t.vertex_instances.size() == 2);
    CHECK(t.edge_instances.size() == 1);
    CHECK(t.vertex_instances[0].total.size() == 20 * 6);
    CHECK(t.edge_instances[0].total.size() == 36);

    // the marked boundary teeth are isometrically embedded paths
    auto sig = comb_sigma(20, 1, 6);
    REQUIRE(sig.teeth.size() == 1);
    for (std::size_t i = 0; i + 1 < sig.teeth[0].size(); ++i)
        CHECK(sig.graph.dist(sig.teeth[0][i], sig.teeth[0][i + 1]) == 1);

    // boundary shorter than the fiber is rejected
    FlipTreeParams bad = params;
    bad.sigma_size = 5;
    CHECK_THROWS_AS(flip_tree_example(bad), std::invalid_argument);
}

TEST_CASE("flip edge maps are full structure-preserving hieromorphisms") {
    FlipTreeParams params;
    params.tree_edges = {{0, 1}};
    params.sigma_size = 20;
    params.fiber = 6;
    auto t = flip_tree_example(params);
    for (auto* f : {&t.phi_minus[0], &t.phi_plus[0]}) {
        auto rep = check_hieromorphism(*f);
        CHECK(rep.structural_ok);
        CHECK(rep.full);
        CHECK(rep.qi_constant < 30);
        CHECK(rep.projection_defect == 0);
    }
    // identity hieromorphism sanity
    auto id = identity_hieromorphism(t.vertex_instances[0]);
    auto rep = check_hieromorphism(id);
    CHECK(rep.structural_ok);
    CHECK(rep.full);
    CHECK(rep.qi_constant == 1);
    CHECK(rep.projection_defect == 0);
    CHECK(rep.rho_defect == 0);
}

TEST_CASE("fullness failure is detected") {
    // factor inclusion into a product misses the other factor's domains
    auto t0 = build_complexity_one(MetricGraph::path(6), "A");
    auto t1 = build_complexity_one(MetricGraph::path(6), "B");
    auto prod = build_product(t0, t1);
    Hieromorphism f;
    f.source = &t0;
    f.target = &prod;
    f.point_map.resize(6);
    for (int i = 0; i < 6; ++i) f.point_map[i] = i * 6;
    f.domain_map = {0};
    f.star = {{0, 1, 2, 3, 4, 5}};
    auto rep = check_hieromorphism(f);
    CHECK(rep.structural_ok);
    CHECK(rep.full);  // image domain 0 has only itself nested

    // mapping into the product top misses nested preimages
    Hieromorphism g = f;
    g.domain_map = {prod.rel.maximal()};
    std::vector<int> zeros(6, 0);
    g.star = {zeros};
    auto rep2 = check_hieromorphism(g);
    CHECK_FALSE(rep2.full);
    CHECK_FALSE(rep2.fullness_witnesses.empty());
}

TEST_CASE("single-vertex tree returns the vertex instance unchanged") {
    FlipTreeParams params;
    params.tree_edges = {};
    params.sigma_size = 20;
    params.fiber = 6;
    auto t = flip_tree_example(params);
    REQUIRE(t.vertex_instances.size() == 1);
    auto res = combine_tree(t);
    CHECK(res.instance.total.size() == t.vertex_instances[0].total.size());
    CHECK(res.class_count == t.vertex_instances[0].domain_count());
    auto rep = verify_all(res.instance);
    CHECK(rep.all_passed);
}

TEST_CASE("two-vertex flip tree combines and verifies") {
    FlipTreeParams params;
    params.tree_edges = {{0, 1}};
    params.sigma_size = 20;
    params.fiber = 6;
    auto t = flip_tree_example(params);
    auto res = combine_tree(t);
    CHECK(res.max_support_diameter <= 2);
    CHECK(res.class_count == 7);  // the two product lattices merge pairwise
    CHECK(res.instance.total.size() == 2 * 20 * 6);

    auto rep = verify_all(res.instance);
    CHECK(rep.all_passed);
    CHECK(res.instance.consts.E >= 1);

    // combined complexity stays within one of the vertex bound
    int vertex_chi = 0;
    for (auto& vi : t.vertex_instances) {
        verify_relations(vi);
        vertex_chi = std::max(vertex_chi, vi.consts.complexity_n);
    }
    CHECK(res.instance.consts.complexity_n <= vertex_chi + 1);

    auto fit = fit_df_constants(res.instance, 3);
    CHECK(fit.row(1.0) != nullptr);
    CHECK(fit.row(5.0)->c < 10000);  // finite constants

    // combined relations: partial order with unique maximum T
    const auto& rel = res.instance.rel;
    for (int u = 0; u < res.instance.domain_count(); ++u)
        CHECK(rel.nested(u, rel.maximal()));
}

TEST_CASE("two complexity-1 spaces glued along a quasiconvex subgraph") {
    // two trees glued along an embedded segment: edge space = path instance
    auto mk_tree = [](int n, std::uint64_t seed) {
        return build_complexity_one(MetricGraph::random_tree(n, seed), "Y");
    };
    TreeOfHHS t;
    t.tree = MetricGraph::path(2);
    t.tree_edges = {{0, 1}};
    // vertex spaces: paths of length 20 (trees with an obvious segment)
    t.vertex_instances.push_back(build_complexity_one(MetricGraph::path(20), "X0"));
    t.vertex_instances.push_back(build_complexity_one(MetricGraph::path(20), "X1"));
    t.edge_instances.push_back(build_complexity_one(MetricGraph::path(5), "E"));
    Hieromorphism fm, fp;
    fm.point_map = {3, 4, 5, 6, 7};
    fm.domain_map = {0};
    fm.star = {{3, 4, 5, 6, 7}};
    fp.point_map = {10, 11, 12, 13, 14};
    fp.domain_map = {0};
    fp.star = {{10, 11, 12, 13, 14}};
    t.phi_minus.push_back(fm);
    t.phi_plus.push_back(fp);
    t.rebind();
    (void)mk_tree;

    auto res = combine_tree(t);
    CHECK(res.class_count == 1);  // the two maxima merge
    auto rep = verify_all(res.instance);
    CHECK(rep.all_passed);
    // no orthogonality anywhere
    const auto& rel = res.instance.rel;
    for (int u = 0; u < res.instance.domain_count(); ++u)
        for (int v = 0; v < res.instance.domain_count(); ++v)
            CHECK_FALSE(rel.orthogonal(u, v));
}

TEST_CASE("three-vertex flip path: supports bounded by 2, hypothesis (4) holds") {
    FlipTreeParams params;
    params.tree_edges = {{0, 1}, {1, 2}};
    params.sigma_size = 20;
    params.fiber = 6;
    auto t = flip_tree_example(params);
    auto res = combine_tree(t);  // hypothesis checks inside
    CHECK(res.max_support_diameter <= 2);
    auto rep = verify_all(res.instance);
    CHECK(rep.all_passed);
}

TEST_CASE("gate tables are coarsely Lipschitz across the gluing") {
    FlipTreeParams params;
    params.tree_edges = {{0, 1}};
    params.sigma_size = 20;
    params.fiber = 6;
    auto t = flip_tree_example(params);
    auto res = combine_tree(t);
    // displacement of the vertex gate across total-space edges
    int worst = 0;
    for (auto [a, b] : res.instance.total.edges()) {
        auto vo = res.vertex_offset;
        auto vtx = [&](int x) {
            int v = 0;
            while (vo[v + 1] <= x) ++v;
            return v;
        };
        int va = vtx(a), vb = vtx(b);
        for (int target = 0; target < 2; ++target) {
            int ga = res.gates[va][target][a - vo[va]];
            int gb = res.gates[vb][target][b - vo[vb]];
            worst = std::max(worst,
                             t.vertex_instances[target].total.dist(ga, gb));
        }
    }
    CHECK(worst <= 2 * res.instance.consts.E + 2);
}

TEST_CASE("comparison maps carry projections with bounded defect") {
    FlipTreeParams params;
    params.tree_edges = {{0, 1}, {1, 2}};
    params.sigma_size = 20;
    params.fiber = 6;
    auto t = flip_tree_example(params);
    auto res = combine_tree(t);
    // the transport error is controlled by the edge maps' QI constants
    int qi = 1;
    for (std::size_t e = 0; e < t.tree_edges.size(); ++e) {
        qi = std::max(qi, check_hieromorphism(t.phi_minus[e]).qi_constant);
        qi = std::max(qi, check_hieromorphism(t.phi_plus[e]).qi_constant);
    }
    CHECK(res.comparison_defect <= 3 * qi + 4);
}

TEST_CASE("good paths across the flip gluing audit uniformly") {
    FlipTreeParams params;
    params.tree_edges = {{0, 1}};
    params.sigma_size = 20;
    params.fiber = 6;
    auto t = flip_tree_example(params);
    auto res = combine_tree(t);
    auto& h = res.instance;
    verify_all(h);
    measure_theta_e(h, generate_tuple_corpus(h, 150, 19));
    std::uint64_t seed = 17;
    auto rnd = [&](int m) {
        seed = seed * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<int>((seed >> 33) % static_cast<std::uint64_t>(m));
    };
    int uniform_d = 0;
    for (int i = 0; i < 24; ++i) {
        int x = rnd(h.total.size()), y = rnd(h.total.size());
        auto p = good_path(h, x, y);
        CHECK(p.steps.front() == x);
        CHECK(p.steps.back() == y);
        auto audit = audit_path(h, p);
        uniform_d = std::max(uniform_d, audit.overall_d);
        // subpaths inherit the constant (prefix, middle, suffix)
        if (p.steps.size() > 4) {
            for (int kind = 0; kind < 3; ++kind) {
                DiscretePath sub;
                std::size_t n = p.steps.size();
                if (kind == 0) sub.steps.assign(p.steps.begin(), p.steps.begin() + n / 2 + 1);
                if (kind == 1) sub.steps.assign(p.steps.begin() + n / 4, p.steps.begin() + 3 * n / 4 + 1);
                if (kind == 2) sub.steps.assign(p.steps.begin() + n / 2, p.steps.end());
                if (sub.steps.size() < 2) continue;
                auto sa = audit_path(h, sub);
                CHECK(sa.overall_d <= uniform_d + 1);
            }
        }
    }
    CHECK(uniform_d <= 32);
}

TEST_CASE("star-shaped flip trees combine with bounded supports") {
    FlipTreeParams params;
    params.tree_edges = {{0, 3}, {1, 3}, {2, 3}};  // three leaves around a center
    params.sigma_size = 26;  // center hosts three teeth of length 6
    params.fiber = 6;
    auto t = flip_tree_example(params);
    auto res = combine_tree(t);
    CHECK(res.max_support_diameter <= 2);
    auto rep = verify_all(res.instance);
    CHECK(rep.all_passed);
}

TEST_CASE("five-vertex flip paths still combine (supports grow with the path)") {
    FlipTreeParams params;
    params.tree_edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}};
    params.sigma_size = 20;
    params.fiber = 6;
    auto t = flip_tree_example(params);
    auto res = combine_tree(t);  // bounded supports exist on any finite tree
    CHECK(res.max_support_diameter <= 4);
    auto rep = verify_all(res.instance);
    CHECK(rep.all_passed);
    // six-vertex trees are out of contract
    FlipTreeParams big;
    big.tree_edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}};
    CHECK_THROWS_AS(flip_tree_example(big), std::invalid_argument);
}
