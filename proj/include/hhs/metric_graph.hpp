// metric_graph.hpp — finite connected unit-edge graphs and their coarse geometry:
// exact distances, geodesic enumeration, slim-triangle hyperbolicity constants,
// quasiconvexity of vertex subsets, unparameterized quasigeodesic quality.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hhs {

using VertexSet = std::vector<int>;  // sorted, duplicate-free vertex ids

// Cap on per-pair geodesic enumeration; beyond it a deterministic canonical
// subset (the lexicographically smallest GEODESIC_CAP) is used and results
// carry an approximation flag.
inline constexpr std::size_t GEODESIC_CAP = 10000;

struct StructuralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class MetricGraph {
public:
    MetricGraph() = default;
    MetricGraph(const MetricGraph& o)
        : adj_(o.adj_), edges_(o.edges_), table_(o.table_), table_built_(o.table_built_) {}
    MetricGraph(MetricGraph&& o) noexcept
        : adj_(std::move(o.adj_)),
          edges_(std::move(o.edges_)),
          table_(std::move(o.table_)),
          table_built_(o.table_built_) {}
    MetricGraph& operator=(const MetricGraph& o) {
        if (this != &o) {
            adj_ = o.adj_;
            edges_ = o.edges_;
            table_ = o.table_;
            table_built_ = o.table_built_;
            row_cache_.clear();
            row_fifo_.clear();
        }
        return *this;
    }
    MetricGraph& operator=(MetricGraph&& o) noexcept {
        adj_ = std::move(o.adj_);
        edges_ = std::move(o.edges_);
        table_ = std::move(o.table_);
        table_built_ = o.table_built_;
        row_cache_.clear();
        row_fifo_.clear();
        return *this;
    }

    // Builds from an edge list; throws StructuralError when the graph is
    // empty, has loops/multi-edges, or is disconnected (the message names a
    // separating component pair).
    static MetricGraph from_edges(int n, const std::vector<std::pair<int, int>>& edges);

    static MetricGraph single_vertex();
    static MetricGraph path(int n);
    static MetricGraph cycle(int n);
    static MetricGraph grid(int rows, int cols);
    // Deterministic random tree: vertex i attaches to a pseudo-random earlier vertex.
    static MetricGraph random_tree(int n, std::uint64_t seed);
    // Cartesian product graph (L1 metric on pairs); vertex (a,b) has id a*|B|+b.
    static MetricGraph product(const MetricGraph& a, const MetricGraph& b);

    int size() const { return static_cast<int>(adj_.size()); }
    const std::vector<int>& neighbors(int v) const { return adj_[v]; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    bool is_tree() const { return edges_.size() + 1 == adj_.size(); }

    int dist(int u, int v) const;
    // BFS distances from src written into out (resized to size()).
    void bfs_into(int src, std::vector<int>& out) const;
    const std::vector<int>& dist_row(int u) const;  // cached row
    int diameter() const;
    int eccentricity(int v) const;

    // Minimum distance between nonempty vertex sets (Notation: min over pairs).
    int set_distance(const VertexSet& a, const VertexSet& b) const;
    int point_set_distance(int v, const VertexSet& a) const;
    int set_diameter(const VertexSet& a) const;

    // Union of all geodesics a->b: { v : d(a,v)+d(v,b) = d(a,b) }, sorted.
    VertexSet geodesic_union(int a, int b) const;
    // Lexicographically smallest geodesic vertex sequence a -> b.
    std::vector<int> lex_geodesic(int a, int b) const;
    // Number of distinct geodesics a->b, saturating at cap+1.
    std::size_t count_geodesics(int a, int b, std::size_t cap = GEODESIC_CAP) const;
    // Lexicographically smallest geodesics, at most cap of them.
    std::vector<std::vector<int>> enumerate_geodesics(int a, int b,
                                                      std::size_t cap = GEODESIC_CAP) const;

    // max over geodesics g: a->b (canonical capped subset when needed) of
    // d(v, g); used for worst-case slimness. `approx` is set when capped.
    int maximin_geodesic_distance(int a, int b, int v, bool* approx = nullptr) const;

    // Multi-source BFS distance field from a set.
    std::vector<int> distances_to_set(const VertexSet& s) const;

    // Closest vertices of `set` to v, smallest id first.
    int closest_in_set(int v, const VertexSet& set) const;

    struct HyperbolicityReport {
        int delta = 0;
        bool approximated = false;  // some pair exceeded the geodesic cap
    };
    // Minimal delta such that every geodesic triangle, over all (canonically
    // capped) geodesic representatives, is delta-slim.
    HyperbolicityReport delta_hyperbolicity() const;

    struct QuasiconvexityReport {
        int q = 0;
        bool approximated = false;
    };
    // Minimal q: for every pair of Y-points some geodesic between them stays
    // within q of Y (min over geodesic choice per pair, max over pairs).
    QuasiconvexityReport quasiconvexity_constant(const VertexSet& y) const;

private:
    std::vector<std::vector<int>> adj_;
    std::vector<std::pair<int, int>> edges_;

    // Full table for small graphs, FIFO row cache for large ones.
    void ensure_table() const;
    mutable std::vector<std::vector<int>> table_;
    mutable bool table_built_ = false;
    mutable std::map<int, std::vector<int>> row_cache_;
    mutable std::vector<int> row_fifo_;
    mutable std::mutex cache_mu_;
    std::size_t row_cache_budget() const;

    // min over geodesics a->b of max over path vertices of field[v]
    int minimax_over_geodesics(int a, int b, const std::vector<int>& field) const;
    friend struct GeodesicDag;
};

struct DiscretePath {
    std::vector<int> steps;  // vertex sequence in some MetricGraph

    int step_bound(const MetricGraph& g) const;  // max consecutive distance
    int length() const { return steps.empty() ? 0 : static_cast<int>(steps.size()) - 1; }
};

struct UnparamQGResult {
    bool ok = false;
    int d = 0;                   // the witnessed constant when ok
    int cap = 0;                 // the search cap when !ok
    std::vector<int> witness;    // anchor indices of the reparameterization
};

// Smallest D <= d_max such that seq is a (D,D)-unparameterized quasigeodesic,
// witnessed by a monotone anchor selection; failure carries the cap.
UnparamQGResult unparam_qg_constant(const MetricGraph& g,
                                    const std::vector<VertexSet>& seq, int d_max = 64);

// Test-oracle variant: exhaustive search over all anchor selections
// (exponential; only for short sequences).
UnparamQGResult unparam_qg_exhaustive(const MetricGraph& g,
                                      const std::vector<VertexSet>& seq, int d_max = 16);

}  // namespace hhs
