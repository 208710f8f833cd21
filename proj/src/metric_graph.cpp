#include "hhs/metric_graph.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <deque>
#include <set>
#include <thread>

#include "hhs/detail/parallel.hpp"

namespace hhs {

using detail::parallel_for;

namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

MetricGraph MetricGraph::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    if (n <= 0) throw StructuralError("graph must be nonempty");
    MetricGraph g;
    g.adj_.assign(n, {});
    std::set<std::pair<int, int>> seen;
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n || v >= n) throw StructuralError("edge endpoint out of range");
        if (u == v) throw StructuralError("loop edge at vertex " + std::to_string(u));
        auto key = std::minmax(u, v);
        if (!seen.insert({key.first, key.second}).second)
            throw StructuralError("multi-edge between " + std::to_string(u) + " and " +
                                  std::to_string(v));
    }
    for (auto [u, v] : seen) {
        g.adj_[u].push_back(v);
        g.adj_[v].push_back(u);
        g.edges_.emplace_back(u, v);
    }
    for (auto& nb : g.adj_) std::sort(nb.begin(), nb.end());

    // connectivity: BFS from 0, report a separating pair on failure
    std::vector<int> d;
    g.bfs_into(0, d);
    for (int v = 0; v < n; ++v) {
        if (d[v] < 0)
            throw StructuralError("graph disconnected: no path between components of 0 and " +
                                  std::to_string(v));
    }
    return g;
}

MetricGraph MetricGraph::single_vertex() { return from_edges(1, {}); }

MetricGraph MetricGraph::path(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return from_edges(n, e);
}

MetricGraph MetricGraph::cycle(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
    return from_edges(n, e);
}

MetricGraph MetricGraph::grid(int rows, int cols) {
    auto id = [cols](int r, int c) { return r * cols + c; };
    std::vector<std::pair<int, int>> e;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) e.emplace_back(id(r, c), id(r, c + 1));
            if (r + 1 < rows) e.emplace_back(id(r, c), id(r + 1, c));
        }
    return from_edges(rows * cols, e);
}

MetricGraph MetricGraph::random_tree(int n, std::uint64_t seed) {
    std::vector<std::pair<int, int>> e;
    std::uint64_t s = seed * 0x9e3779b97f4a7c15ULL + 1;
    for (int i = 1; i < n; ++i) {
        int p = static_cast<int>(splitmix64(s) % static_cast<std::uint64_t>(i));
        e.emplace_back(p, i);
    }
    return from_edges(n, e);
}

MetricGraph MetricGraph::product(const MetricGraph& a, const MetricGraph& b) {
    int nb = b.size();
    auto id = [nb](int x, int y) { return x * nb + y; };
    std::vector<std::pair<int, int>> e;
    for (int x = 0; x < a.size(); ++x)
        for (auto [u, v] : b.edges()) e.emplace_back(id(x, u), id(x, v));
    for (int y = 0; y < nb; ++y)
        for (auto [u, v] : a.edges()) e.emplace_back(id(u, y), id(v, y));
    return from_edges(a.size() * nb, e);
}

void MetricGraph::bfs_into(int src, std::vector<int>& out) const {
    out.assign(adj_.size(), -1);
    std::deque<int> q;
    out[src] = 0;
    q.push_back(src);
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        int du = out[u];
        for (int v : adj_[u]) {
            if (out[v] < 0) {
                out[v] = du + 1;
                q.push_back(v);
            }
        }
    }
}

std::size_t MetricGraph::row_cache_budget() const {
    std::size_t per_row = adj_.size() * sizeof(int);
    std::size_t budget = (128u << 20) / std::max<std::size_t>(per_row, 1);
    return std::max<std::size_t>(budget, 8);
}

void MetricGraph::ensure_table() const {
    if (table_built_) return;
    int n = size();
    table_.assign(n, {});
    parallel_for(n, [&](int i) { bfs_into(i, table_[i]); });
    table_built_ = true;
}

const std::vector<int>& MetricGraph::dist_row(int u) const {
    if (size() <= 2048) {
        ensure_table();
        return table_[u];
    }
    std::lock_guard<std::mutex> lk(cache_mu_);
    auto it = row_cache_.find(u);
    if (it != row_cache_.end()) return it->second;
    std::vector<int> row;
    bfs_into(u, row);
    if (row_fifo_.size() >= row_cache_budget()) {
        row_cache_.erase(row_fifo_.front());
        row_fifo_.erase(row_fifo_.begin());
    }
    row_fifo_.push_back(u);
    return row_cache_.emplace(u, std::move(row)).first->second;
}

int MetricGraph::dist(int u, int v) const { return dist_row(u)[v]; }

int MetricGraph::eccentricity(int v) const {
    const auto& row = dist_row(v);
    return *std::max_element(row.begin(), row.end());
}

int MetricGraph::diameter() const {
    int d = 0;
    for (int v = 0; v < size(); ++v) d = std::max(d, eccentricity(v));
    return d;
}

int MetricGraph::set_distance(const VertexSet& a, const VertexSet& b) const {
    if (a.empty() || b.empty()) throw std::invalid_argument("set_distance: empty set");
    int best = dist(a[0], b[0]);
    for (int u : a) {
        if (best == 0) return 0;
        const auto& row = dist_row(u);
        for (int v : b) best = std::min(best, row[v]);
    }
    return best;
}

int MetricGraph::point_set_distance(int v, const VertexSet& a) const {
    if (a.empty()) throw std::invalid_argument("point_set_distance: empty set");
    const auto& row = dist_row(v);
    int best = row[a[0]];
    for (int u : a) best = std::min(best, row[u]);
    return best;
}

int MetricGraph::set_diameter(const VertexSet& a) const {
    if (a.empty()) throw std::invalid_argument("set_diameter: empty set");
    int d = 0;
    for (int u : a) {
        const auto& row = dist_row(u);
        for (int v : a) d = std::max(d, row[v]);
    }
    return d;
}

VertexSet MetricGraph::geodesic_union(int a, int b) const {
    const auto& da = dist_row(a);
    const auto& db = dist_row(b);
    int d = da[b];
    VertexSet out;
    for (int v = 0; v < size(); ++v)
        if (da[v] + db[v] == d) out.push_back(v);
    return out;
}

std::vector<int> MetricGraph::lex_geodesic(int a, int b) const {
    const auto& db = dist_row(b);
    std::vector<int> seq{a};
    int cur = a;
    while (cur != b) {
        int next = -1;
        for (int w : adj_[cur]) {
            if (db[w] == db[cur] - 1) {
                next = w;
                break;  // neighbors sorted, first hit is smallest
            }
        }
        assert(next >= 0);
        seq.push_back(next);
        cur = next;
    }
    return seq;
}

std::size_t MetricGraph::count_geodesics(int a, int b, std::size_t cap) const {
    const auto& da = dist_row(a);
    const auto& db = dist_row(b);
    int d = da[b];
    // vertices on geodesics, ordered by distance from a
    std::vector<std::vector<int>> layers(d + 1);
    for (int v = 0; v < size(); ++v)
        if (da[v] + db[v] == d) layers[da[v]].push_back(v);
    std::vector<std::size_t> cnt(size(), 0);
    cnt[a] = 1;
    for (int l = 1; l <= d; ++l) {
        for (int v : layers[l]) {
            std::size_t c = 0;
            for (int w : adj_[v]) {
                if (da[w] + db[w] == d && da[w] == l - 1) {
                    c += cnt[w];
                    if (c > cap) {
                        c = cap + 1;
                        break;
                    }
                }
            }
            cnt[v] = c;
        }
    }
    return cnt[b];
}

std::vector<std::vector<int>> MetricGraph::enumerate_geodesics(int a, int b,
                                                               std::size_t cap) const {
    const auto& da = dist_row(a);
    const auto& db = dist_row(b);
    int d = da[b];
    std::vector<std::vector<int>> out;
    std::vector<int> cur{a};
    // DFS in lex order; neighbor lists are sorted so paths come out smallest first.
    std::vector<std::size_t> idx{0};
    while (!cur.empty()) {
        if (out.size() >= cap) break;
        int v = cur.back();
        if (v == b && static_cast<int>(cur.size()) == d + 1) {
            out.push_back(cur);
            cur.pop_back();
            idx.pop_back();
            continue;
        }
        bool advanced = false;
        auto& nb = adj_[v];
        for (std::size_t& i = idx.back(); i < nb.size(); ++i) {
            int w = nb[i];
            if (da[w] == da[v] + 1 && da[w] + db[w] == d) {
                ++i;
                cur.push_back(w);
                idx.push_back(0);
                advanced = true;
                break;
            }
        }
        if (!advanced) {
            cur.pop_back();
            idx.pop_back();
        }
    }
    return out;
}

int MetricGraph::maximin_geodesic_distance(int a, int b, int v, bool* approx) const {
    const auto& da = dist_row(a);
    const auto& db = dist_row(b);
    const auto& dv = dist_row(v);
    int d = da[b];
    if (approx) *approx = count_geodesics(a, b) > GEODESIC_CAP;
    // F(u) = max over geodesic prefixes a->u of min over vertices of dv;
    // process geodesic-union vertices by layer.
    std::vector<std::vector<int>> layers(d + 1);
    for (int u = 0; u < size(); ++u)
        if (da[u] + db[u] == d) layers[da[u]].push_back(u);
    std::vector<int> f(size(), -1);
    f[a] = dv[a];
    for (int l = 1; l <= d; ++l) {
        for (int u : layers[l]) {
            int best = -1;
            for (int w : adj_[u])
                if (da[w] + db[w] == d && da[w] == l - 1) best = std::max(best, f[w]);
            f[u] = std::min(dv[u], best);
        }
    }
    return f[b];
}

std::vector<int> MetricGraph::distances_to_set(const VertexSet& s) const {
    std::vector<int> d(size(), -1);
    std::deque<int> q;
    for (int v : s) {
        d[v] = 0;
        q.push_back(v);
    }
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (int w : adj_[u])
            if (d[w] < 0) {
                d[w] = d[u] + 1;
                q.push_back(w);
            }
    }
    return d;
}

int MetricGraph::closest_in_set(int v, const VertexSet& set) const {
    if (set.empty()) throw std::invalid_argument("closest_in_set: empty set");
    const auto& row = dist_row(v);
    int best = set[0];
    for (int u : set)
        if (row[u] < row[best]) best = u;
    return best;
}

int MetricGraph::minimax_over_geodesics(int a, int b, const std::vector<int>& field) const {
    const auto& da = dist_row(a);
    const auto& db = dist_row(b);
    int d = da[b];
    std::vector<std::vector<int>> layers(d + 1);
    for (int u = 0; u < size(); ++u)
        if (da[u] + db[u] == d) layers[da[u]].push_back(u);
    const int INF = 1 << 29;
    std::vector<int> f(size(), INF);
    f[a] = field[a];
    for (int l = 1; l <= d; ++l) {
        for (int u : layers[l]) {
            int best = INF;
            for (int w : adj_[u])
                if (da[w] + db[w] == d && da[w] == l - 1) best = std::min(best, f[w]);
            f[u] = std::max(field[u], best);
        }
    }
    return f[b];
}

MetricGraph::HyperbolicityReport MetricGraph::delta_hyperbolicity() const {
    HyperbolicityReport rep;
    int n = size();
    if (n <= 2 || is_tree()) return rep;
    ensure_table();

    // maximin table M[idx(a,b)][v] = max over geodesics a->b of d(v, geodesic)
    auto pidx = [n](int a, int b) {  // a < b
        return static_cast<std::size_t>(a) * n - static_cast<std::size_t>(a) * (a + 1) / 2 +
               (b - a - 1);
    };
    std::size_t npairs = static_cast<std::size_t>(n) * (n - 1) / 2;
    std::vector<std::int16_t> M(npairs * n);
    std::atomic<bool> approx{false};

    parallel_for(n, [&](int a) {
        const auto& da = table_[a];
        std::vector<int> f(n);
        std::vector<std::vector<int>> layers;
        for (int b = a + 1; b < n; ++b) {
            const auto& db = table_[b];
            int d = da[b];
            layers.assign(d + 1, {});
            for (int u = 0; u < n; ++u)
                if (da[u] + db[u] == d) layers[da[u]].push_back(u);
            if (count_geodesics(a, b) > GEODESIC_CAP) approx = true;
            std::int16_t* row = &M[pidx(a, b) * n];
            for (int v = 0; v < n; ++v) {
                const auto& dv = table_[v];
                f[a] = dv[a];
                for (int l = 1; l <= d; ++l)
                    for (int u : layers[l]) {
                        int best = -1;
                        for (int w : adj_[u])
                            if (da[w] + db[w] == d && da[w] == l - 1)
                                best = std::max(best, f[w]);
                        f[u] = std::min(dv[u], best);
                    }
                row[v] = static_cast<std::int16_t>(f[b]);
            }
        }
    });

    // delta = max over triples {x,y,z}, over v on some geodesic side, of the
    // distance from v to the worst-choice union of the other two sides.
    std::vector<int> best_per_x(n, 0);
    parallel_for(n, [&](int x) {
        int local = 0;
        const auto& dx = table_[x];
        for (int y = x + 1; y < n; ++y) {
            const auto& dy = table_[y];
            for (int z = y + 1; z < n; ++z) {
                const auto& dz = table_[z];
                // three side orientations
                for (int side = 0; side < 3; ++side) {
                    int a, b, c;
                    if (side == 0) a = x, b = y, c = z;
                    else if (side == 1) a = y, b = z, c = x;
                    else a = x, b = z, c = y;
                    const auto& da = table_[a];
                    const auto& db = table_[b];
                    int d = da[b];
                    const std::int16_t* m1 =
                        &M[pidx(std::min(b, c), std::max(b, c)) * n];  // side b-c
                    const std::int16_t* m2 =
                        &M[pidx(std::min(a, c), std::max(a, c)) * n];  // side a-c
                    for (int v = 0; v < n; ++v) {
                        if (da[v] + db[v] != d) continue;
                        // cheap upper bound: corners lie on the other sides
                        if (std::min({dx[v], dy[v], dz[v]}) <= local) continue;
                        int slim = std::min<int>(m1[v], m2[v]);
                        local = std::max(local, slim);
                    }
                }
            }
        }
        best_per_x[x] = local;
    });
    for (int x = 0; x < n; ++x) rep.delta = std::max(rep.delta, best_per_x[x]);
    rep.approximated = approx.load();
    return rep;
}

MetricGraph::QuasiconvexityReport MetricGraph::quasiconvexity_constant(const VertexSet& y) const {
    if (y.empty()) throw std::invalid_argument("quasiconvexity_constant: empty subset");
    QuasiconvexityReport rep;
    auto dy = distances_to_set(y);
    for (std::size_t i = 0; i < y.size(); ++i) {
        for (std::size_t j = i + 1; j < y.size(); ++j) {
            rep.q = std::max(rep.q, minimax_over_geodesics(y[i], y[j], dy));
            if (count_geodesics(y[i], y[j]) > GEODESIC_CAP) rep.approximated = true;
        }
    }
    return rep;
}

int DiscretePath::step_bound(const MetricGraph& g) const {
    int b = 0;
    for (std::size_t i = 0; i + 1 < steps.size(); ++i)
        b = std::max(b, g.dist(steps[i], steps[i + 1]));
    return b;
}

namespace {

int set_union_diam(const MetricGraph& g, const VertexSet& a, const VertexSet& b) {
    int d = std::max(g.set_diameter(a), g.set_diameter(b));
    for (int u : a) {
        const auto& row = g.dist_row(u);
        for (int v : b) d = std::max(d, row[v]);
    }
    return d;
}

bool anchors_admissible(const MetricGraph& g, const std::vector<VertexSet>& seq,
                        const std::vector<int>& anchors, int d) {
    int L = static_cast<int>(anchors.size()) - 1;
    for (int j = 0; j < L; ++j)
        if (set_union_diam(g, seq[anchors[j]], seq[anchors[j + 1]]) > d) return false;
    // skipped entries stay 2D-close to both bracketing anchors
    for (int j = 0; j < L; ++j)
        for (int t = anchors[j] + 1; t < anchors[j + 1]; ++t)
            if (g.set_distance(seq[t], seq[anchors[j]]) > 2 * d ||
                g.set_distance(seq[t], seq[anchors[j + 1]]) > 2 * d)
                return false;
    // quasigeodesic bounds over all anchor pairs
    for (int i = 0; i <= L; ++i)
        for (int j = i + 1; j <= L; ++j) {
            int dd = g.set_distance(seq[anchors[i]], seq[anchors[j]]);
            if (dd > d * (j - i) + d) return false;
            if (j - i > d * dd + d * d) return false;
        }
    return true;
}

}  // namespace

UnparamQGResult unparam_qg_constant(const MetricGraph& g, const std::vector<VertexSet>& seq,
                                    int d_max) {
    if (seq.empty()) throw std::invalid_argument("unparam_qg_constant: empty sequence");
    UnparamQGResult res;
    int ell = static_cast<int>(seq.size()) - 1;
    if (ell == 0) {
        res.ok = true;
        res.d = 1;
        res.witness = {0};
        return res;
    }
    for (int d = 1; d <= d_max; ++d) {
        // farthest-reach monotone witness
        std::vector<int> anchors{0};
        bool stuck = false;
        while (anchors.back() != ell) {
            int cur = anchors.back();
            int next = -1;
            for (int t = ell; t > cur; --t) {
                if (set_union_diam(g, seq[cur], seq[t]) <= d) {
                    next = t;
                    break;
                }
            }
            if (next < 0) {
                stuck = true;
                break;
            }
            anchors.push_back(next);
        }
        if (stuck) continue;
        if (anchors_admissible(g, seq, anchors, d)) {
            res.ok = true;
            res.d = d;
            res.witness = anchors;
            return res;
        }
    }
    res.ok = false;
    res.cap = d_max;
    return res;
}

UnparamQGResult unparam_qg_exhaustive(const MetricGraph& g, const std::vector<VertexSet>& seq,
                                      int d_max) {
    if (seq.empty()) throw std::invalid_argument("unparam_qg_exhaustive: empty sequence");
    UnparamQGResult res;
    int ell = static_cast<int>(seq.size()) - 1;
    if (ell == 0) {
        res.ok = true;
        res.d = 1;
        res.witness = {0};
        return res;
    }
    if (ell > 20) throw std::invalid_argument("unparam_qg_exhaustive: sequence too long");
    for (int d = 1; d <= d_max; ++d) {
        for (std::uint32_t mask = 0; mask < (1u << (ell - 1)); ++mask) {
            std::vector<int> anchors{0};
            for (int t = 1; t < ell; ++t)
                if (mask & (1u << (t - 1))) anchors.push_back(t);
            anchors.push_back(ell);
            if (anchors_admissible(g, seq, anchors, d)) {
                res.ok = true;
                res.d = d;
                res.witness = anchors;
                return res;
            }
        }
    }
    res.ok = false;
    res.cap = d_max;
    return res;
}

}  // namespace hhs
