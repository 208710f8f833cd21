#include "doctest.h"
#include "hhs/metric_graph.hpp"

#include <algorithm>
#include <set>

using namespace hhs;

namespace {

// Independent slim-triangle oracle: explicit geodesic enumeration, every
// triple, every choice of the three sides.
int oracle_delta(const MetricGraph& g) {
    int n = g.size();
    int delta = 0;
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y)
            for (int z = y + 1; z < n; ++z) {
                auto gxy = g.enumerate_geodesics(x, y);
                auto gyz = g.enumerate_geodesics(y, z);
                auto gxz = g.enumerate_geodesics(x, z);
                auto side_slim = [&](const std::vector<int>& side, const std::vector<int>& o1,
                                     const std::vector<int>& o2) {
                    int worst = 0;
                    for (int v : side) {
                        int best = 1 << 29;
                        const auto& row = g.dist_row(v);
                        for (int w : o1) best = std::min(best, row[w]);
                        for (int w : o2) best = std::min(best, row[w]);
                        worst = std::max(worst, best);
                    }
                    return worst;
                };
                for (const auto& a : gxy)
                    for (const auto& b : gyz)
                        for (const auto& c : gxz) {
                            delta = std::max(delta, side_slim(a, b, c));
                            delta = std::max(delta, side_slim(b, a, c));
                            delta = std::max(delta, side_slim(c, a, b));
                        }
            }
    return delta;
}

// Independent quasiconvexity oracle: per pair, min over enumerated geodesics
// of the worst distance back to Y.
int oracle_quasiconvexity(const MetricGraph& g, const VertexSet& y) {
    auto dy = g.distances_to_set(y);
    int q = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
        for (std::size_t j = i + 1; j < y.size(); ++j) {
            int best = 1 << 29;
            for (const auto& geo : g.enumerate_geodesics(y[i], y[j])) {
                int worst = 0;
                for (int v : geo) worst = std::max(worst, dy[v]);
                best = std::min(best, worst);
            }
            q = std::max(q, best);
        }
    return q;
}

}  // namespace

TEST_CASE("distances: path, identity, grid corners") {
    auto p5 = MetricGraph::path(5);
    CHECK(p5.dist(0, 4) == 4);
    for (int v = 0; v < 5; ++v) CHECK(p5.dist(v, v) == 0);
    auto g = MetricGraph::grid(10, 10);
    CHECK(g.dist(0, 99) == 18);
}

TEST_CASE("structural errors") {
    CHECK_THROWS_AS(MetricGraph::from_edges(0, {}), StructuralError);
    CHECK_THROWS_AS(MetricGraph::from_edges(2, {{0, 0}}), StructuralError);
    CHECK_THROWS_AS(MetricGraph::from_edges(3, {{0, 1}, {1, 0}}), StructuralError);
    CHECK_THROWS_AS(MetricGraph::from_edges(4, {{0, 1}, {2, 3}}), StructuralError);
}

TEST_CASE("hyperbolicity: trees are 0, single vertex is 0") {
    CHECK(MetricGraph::single_vertex().delta_hyperbolicity().delta == 0);
    for (std::uint64_t seed : {1ull, 7ull, 23ull}) {
        auto t = MetricGraph::random_tree(30, seed);
        CHECK(t.delta_hyperbolicity().delta == 0);
    }
}

TEST_CASE("hyperbolicity of C_12 matches the enumeration oracle") {
    auto c12 = MetricGraph::cycle(12);
    int oracle = oracle_delta(c12);
    CHECK(oracle == 3);
    auto rep = c12.delta_hyperbolicity();
    CHECK(rep.delta == oracle);
    CHECK_FALSE(rep.approximated);
}

TEST_CASE("hyperbolicity agrees with oracle on small irregular graphs") {
    auto theta = MetricGraph::from_edges(
        8, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 5}, {5, 4}, {0, 6}, {6, 7}, {7, 4}});
    CHECK(theta.delta_hyperbolicity().delta == oracle_delta(theta));
    auto c5 = MetricGraph::cycle(5);
    CHECK(c5.delta_hyperbolicity().delta == oracle_delta(c5));
    auto g44 = MetricGraph::grid(4, 4);
    CHECK(g44.delta_hyperbolicity().delta == oracle_delta(g44));
}

TEST_CASE("quasiconvexity: whole graph and single vertex are 0") {
    auto c12 = MetricGraph::cycle(12);
    VertexSet all;
    for (int i = 0; i < 12; ++i) all.push_back(i);
    CHECK(c12.quasiconvexity_constant(all).q == 0);
    CHECK(c12.quasiconvexity_constant({3}).q == 0);
    CHECK_THROWS_AS(c12.quasiconvexity_constant({}), std::invalid_argument);
}

TEST_CASE("quasiconvexity of antipodal pair in C_12") {
    auto c12 = MetricGraph::cycle(12);
    VertexSet y{0, 6};
    int oracle = oracle_quasiconvexity(c12, y);
    CHECK(oracle == 3);
    CHECK(c12.quasiconvexity_constant(y).q == oracle);
}

TEST_CASE("quasiconvexity matches oracle and is monotone under adding a witness geodesic") {
    auto g = MetricGraph::grid(5, 5);
    VertexSet y{0, 24};
    int q = g.quasiconvexity_constant(y).q;
    CHECK(q == oracle_quasiconvexity(g, y));
    auto geo = g.lex_geodesic(0, 24);
    VertexSet y2 = y;
    y2.insert(y2.end(), geo.begin(), geo.end());
    std::sort(y2.begin(), y2.end());
    y2.erase(std::unique(y2.begin(), y2.end()), y2.end());
    CHECK(g.quasiconvexity_constant(y2).q <= q);
}

TEST_CASE("geodesic enumeration and counting") {
    auto c12 = MetricGraph::cycle(12);
    CHECK(c12.count_geodesics(0, 6) == 2);
    CHECK(c12.count_geodesics(0, 3) == 1);
    auto gs = c12.enumerate_geodesics(0, 6);
    REQUIRE(gs.size() == 2);
    CHECK(gs[0] < gs[1]);  // lexicographic order
    auto grid = MetricGraph::grid(5, 5);
    CHECK(grid.count_geodesics(0, 24) == 70);  // C(8,4)
    auto uni = grid.geodesic_union(0, 24);
    CHECK(uni.size() == 25);
}

TEST_CASE("unparameterized quasigeodesic constants") {
    auto p = MetricGraph::path(20);

    SUBCASE("exact geodesic in order gives 1") {
        std::vector<VertexSet> seq;
        for (int i = 0; i <= 12; ++i) seq.push_back({i});
        auto r = unparam_qg_constant(p, seq);
        REQUIRE(r.ok);
        CHECK(r.d == 1);
    }
    SUBCASE("constant sequence is degenerate but accepted") {
        std::vector<VertexSet> seq{{5}, {5}, {5}};
        auto r = unparam_qg_constant(p, seq);
        REQUIRE(r.ok);
        CHECK(r.d == 1);
    }
    SUBCASE("backtracks grow the constant") {
        auto with_backtrack = [&](int b) {
            std::vector<VertexSet> seq;
            for (int i = 0; i <= 8; ++i) seq.push_back({i});
            for (int i = 7; i >= 8 - b; --i) seq.push_back({i});
            for (int i = 8 - b + 1; i <= 14; ++i) seq.push_back({i});
            return seq;
        };
        auto r2 = unparam_qg_constant(p, with_backtrack(2));
        auto r5 = unparam_qg_constant(p, with_backtrack(5));
        REQUIRE(r2.ok);
        REQUIRE(r5.ok);
        CHECK(r2.d > 1);
        CHECK(r5.d > r2.d);
    }
    SUBCASE("witness search matches exhaustive enumeration on short sequences") {
        std::vector<std::vector<VertexSet>> cases = {
            {{0}, {1}, {2}, {3}, {4}, {5}},
            {{0}, {1}, {2}, {1}, {2}, {3}},
            {{0}, {2}, {4}, {6}, {8}},
            {{3}, {3}, {4}, {4}, {5}},
            {{0}, {1}, {0}, {1}, {2}, {3}},
        };
        for (const auto& seq : cases) {
            auto fast = unparam_qg_constant(p, seq, 16);
            auto slow = unparam_qg_exhaustive(p, seq, 16);
            REQUIRE(fast.ok == slow.ok);
            CHECK(fast.d == slow.d);
        }
    }
    SUBCASE("cap exceeded returns failure value") {
        std::vector<VertexSet> seq;
        for (int i = 0; i < 6; ++i) {
            seq.push_back({0});
            seq.push_back({19});
        }
        auto r = unparam_qg_constant(p, seq, 2);
        CHECK_FALSE(r.ok);
        CHECK(r.cap == 2);
    }
}

TEST_CASE("discrete path step bound") {
    auto p = MetricGraph::path(10);
    DiscretePath dp{{0, 2, 4, 5}};
    CHECK(dp.step_bound(p) == 2);
    CHECK(dp.length() == 3);
}

TEST_CASE("lex geodesic is a geodesic and lexicographically least") {
    auto g = MetricGraph::grid(4, 4);
    auto geo = g.lex_geodesic(0, 15);
    CHECK(static_cast<int>(geo.size()) == g.dist(0, 15) + 1);
    auto all = g.enumerate_geodesics(0, 15);
    CHECK(geo == all.front());
}
