#include "hhs/combine.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "hhs/convexity.hpp"

namespace hhs {

namespace {

struct UnionFind {
    std::vector<int> p;
    explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int a) { return p[a] == a ? a : p[a] = find(p[a]); }
    void unite(int a, int b) { p[find(a)] = find(b); }
};

// smallest-id quasi-inverse of a vertex map between graphs
std::vector<int> quasi_inverse(const MetricGraph& src, const MetricGraph& dst,
                               const std::vector<int>& f) {
    std::vector<int> inv(dst.size(), 0);
    for (int p = 0; p < dst.size(); ++p) {
        const auto& row = dst.dist_row(p);
        int best = 1 << 29, pick = 0;
        for (int q = 0; q < src.size(); ++q)
            if (row[f[q]] < best) {
                best = row[f[q]];
                pick = q;
            }
        inv[p] = pick;
    }
    return inv;
}

}  // namespace

CombineResult combine_tree(const TreeOfHHS& t) {
    const int k = t.tree.size();
    const int ne = static_cast<int>(t.tree_edges.size());
    CombineResult out;

    // ---- hypothesis checks -------------------------------------------------
    std::vector<HieromorphismReport> rep_minus(ne), rep_plus(ne);
    for (int e = 0; e < ne; ++e) {
        rep_minus[e] = check_hieromorphism(t.phi_minus[e]);
        rep_plus[e] = check_hieromorphism(t.phi_plus[e]);
        for (auto side : {0, 1}) {
            const auto& rep = side == 0 ? rep_minus[e] : rep_plus[e];
            if (!rep.structural_ok)
                throw CombineHypothesisError(
                    "structure-preserving edge maps",
                    "edge " + std::to_string(e) + ": " +
                        (rep.issues.empty() ? "structural failure" : rep.issues.front()));
            if (!rep.full)
                throw CombineHypothesisError(
                    "full edge hieromorphisms",
                    "edge " + std::to_string(e) + ": " + rep.fullness_witnesses.front());
        }
    }
    // hypothesis (4): images of maximal edge domains are orthogonal to nothing
    for (int e = 0; e < ne; ++e) {
        for (auto side : {0, 1}) {
            const Hieromorphism& f = side == 0 ? t.phi_minus[e] : t.phi_plus[e];
            const HInstance& xv = *f.target;
            DomainId se = f.source->rel.maximal();
            DomainId img = f.domain_map[se];
            for (int v = 0; v < xv.domain_count(); ++v)
                if (xv.rel.orthogonal(v, img))
                    throw CombineHypothesisError(
                        "maximal edge domains non-orthogonal",
                        "edge " + std::to_string(e) + " image orthogonal to domain " +
                            std::to_string(v));
        }
    }

    // ---- equivalence classes over vertex domains ---------------------------
    std::vector<int> dom_off(k + 1, 0);
    for (int v = 0; v < k; ++v) dom_off[v + 1] = dom_off[v] + t.vertex_instances[v].domain_count();
    UnionFind uf(dom_off[k]);
    for (int e = 0; e < ne; ++e) {
        auto [a, b] = t.tree_edges[e];
        for (int ue = 0; ue < t.edge_instances[e].domain_count(); ++ue)
            uf.unite(dom_off[a] + t.phi_minus[e].domain_map[ue],
                     dom_off[b] + t.phi_plus[e].domain_map[ue]);
    }
    std::map<int, int> root_to_class;
    std::vector<std::vector<std::pair<int, DomainId>>> members;  // per class
    for (int v = 0; v < k; ++v)
        for (int u = 0; u < t.vertex_instances[v].domain_count(); ++u) {
            int r = uf.find(dom_off[v] + u);
            auto it = root_to_class.find(r);
            if (it == root_to_class.end()) {
                root_to_class[r] = static_cast<int>(members.size());
                members.push_back({});
                it = root_to_class.find(r);
            }
            members[it->second].push_back({v, u});
        }
    int nc = static_cast<int>(members.size());
    out.class_count = nc;

    // no-cycle coherence: equivalent nested domains within a vertex are equal
    for (const auto& mem : members)
        for (std::size_t i = 0; i < mem.size(); ++i)
            for (std::size_t j = i + 1; j < mem.size(); ++j)
                if (mem[i].first == mem[j].first) {
                    const auto& rel = t.vertex_instances[mem[i].first].rel;
                    if (rel.nested(mem[i].second, mem[j].second) ||
                        rel.nested(mem[j].second, mem[i].second))
                        throw CombineHypothesisError(
                            "no-cycle coherence",
                            "vertex " + std::to_string(mem[i].first) +
                                " carries nested equivalent domains");
                }

    // representatives per (class, vertex); -1 when unsupported
    std::vector<std::vector<DomainId>> rep(nc, std::vector<DomainId>(k, -1));
    for (int c = 0; c < nc; ++c)
        for (auto [v, u] : members[c])
            if (rep[c][v] < 0 || u < rep[c][v]) rep[c][v] = u;

    // supports and favorites
    out.supports.resize(nc);
    for (int c = 0; c < nc; ++c)
        for (int v = 0; v < k; ++v)
            if (rep[c][v] >= 0) out.supports[c].push_back(v);
    for (int c = 0; c < nc; ++c) {
        int d = 0;
        for (int a : out.supports[c])
            for (int b : out.supports[c]) d = std::max(d, t.tree.dist(a, b));
        out.max_support_diameter = std::max(out.max_support_diameter, d);
        out.favorites.push_back({out.supports[c].front(), rep[c][out.supports[c].front()]});
    }
    for (int c = 0; c < nc; ++c) {
        out.class_members.push_back({});
        for (auto [v, u] : members[c]) {
            out.class_members[c].push_back(v);
            out.class_members[c].push_back(u);
        }
    }

    // ---- total space --------------------------------------------------------
    out.vertex_offset.assign(k + 1, 0);
    for (int v = 0; v < k; ++v)
        out.vertex_offset[v + 1] = out.vertex_offset[v] + t.vertex_instances[v].total.size();
    std::vector<std::pair<int, int>> edges;
    for (int v = 0; v < k; ++v)
        for (auto [a, b] : t.vertex_instances[v].total.edges())
            edges.push_back({out.vertex_offset[v] + a, out.vertex_offset[v] + b});
    for (int e = 0; e < ne; ++e) {
        auto [a, b] = t.tree_edges[e];
        for (int z = 0; z < t.edge_instances[e].total.size(); ++z)
            edges.push_back({out.vertex_offset[a] + t.phi_minus[e].point_map[z],
                             out.vertex_offset[b] + t.phi_plus[e].point_map[z]});
    }
    // gluing can duplicate edges; deduplicate
    std::set<std::pair<int, int>> dedup;
    for (auto [a, b] : edges) dedup.insert(std::minmax(a, b));
    MetricGraph total = MetricGraph::from_edges(
        out.vertex_offset[k], std::vector<std::pair<int, int>>(dedup.begin(), dedup.end()));
    auto vertex_of = [&](int x) {
        int v = static_cast<int>(std::upper_bound(out.vertex_offset.begin(),
                                                  out.vertex_offset.end(), x) -
                                 out.vertex_offset.begin()) - 1;
        return v;
    };

    // ---- per-edge step maps and vertex gates --------------------------------
    // step[e][0]: X_{e-} -> X_{e+}; step[e][1]: X_{e+} -> X_{e-}
    std::vector<std::array<std::vector<int>, 2>> step(ne);
    for (int e = 0; e < ne; ++e) {
        auto [a, b] = t.tree_edges[e];
        const HInstance& xa = t.vertex_instances[a];
        const HInstance& xb = t.vertex_instances[b];
        const auto& fm = t.phi_minus[e].point_map;
        const auto& fp = t.phi_plus[e].point_map;
        VertexSet img_a, img_b;
        std::map<int, int> inv_a, inv_b;  // image vertex -> smallest edge vertex
        for (int z = static_cast<int>(fm.size()) - 1; z >= 0; --z) {
            inv_a[fm[z]] = z;
            inv_b[fp[z]] = z;
        }
        for (auto& [p, q] : inv_a) img_a.push_back(p);
        for (auto& [p, q] : inv_b) img_b.push_back(p);
        auto gm_a = gate_map(xa, img_a);
        auto gm_b = gate_map(xb, img_b);
        step[e][0].resize(xa.total.size());
        for (int p = 0; p < xa.total.size(); ++p) step[e][0][p] = fp[inv_a.at(gm_a.gate[p])];
        step[e][1].resize(xb.total.size());
        for (int p = 0; p < xb.total.size(); ++p) step[e][1][p] = fm[inv_b.at(gm_b.gate[p])];
    }

    // tree adjacency with edge ids
    std::vector<std::vector<std::pair<int, int>>> adj(k);  // (neighbor, edge)
    for (int e = 0; e < ne; ++e) {
        adj[t.tree_edges[e].first].push_back({t.tree_edges[e].second, e});
        adj[t.tree_edges[e].second].push_back({t.tree_edges[e].first, e});
    }
    // gates[u][v]: X_u -> X_v along the tree geodesic
    out.gates.assign(k, std::vector<std::vector<int>>(k));
    for (int u = 0; u < k; ++u) {
        out.gates[u][u].resize(t.vertex_instances[u].total.size());
        std::iota(out.gates[u][u].begin(), out.gates[u][u].end(), 0);
        // BFS from u composing step maps
        std::vector<int> order{u};
        std::vector<bool> seen(k, false);
        seen[u] = true;
        for (std::size_t i = 0; i < order.size(); ++i) {
            int a = order[i];
            for (auto [b, e] : adj[a]) {
                if (seen[b]) continue;
                seen[b] = true;
                order.push_back(b);
                const auto& st = t.tree_edges[e].first == a ? step[e][0] : step[e][1];
                auto& g = out.gates[u][b];
                const auto& prev = out.gates[u][a];
                g.resize(prev.size());
                for (std::size_t p = 0; p < prev.size(); ++p) g[p] = st[prev[p]];
            }
        }
    }

    // ---- comparison maps ----------------------------------------------------
    // per class and vertex on its support: C W_v -> C W_{favorite}
    auto tree_path = [&](int from, int to) {
        // vertices of the tree geodesic from -> to
        std::vector<int> par(k, -1), pare(k, -1);
        std::vector<int> order{from};
        std::vector<bool> seen(k, false);
        seen[from] = true;
        for (std::size_t i = 0; i < order.size(); ++i)
            for (auto [b, e] : adj[order[i]])
                if (!seen[b]) {
                    seen[b] = true;
                    par[b] = order[i];
                    pare[b] = e;
                    order.push_back(b);
                }
        std::vector<std::pair<int, int>> path;  // (vertex, incoming edge)
        for (int cur = to; cur != from; cur = par[cur]) path.push_back({cur, pare[cur]});
        std::reverse(path.begin(), path.end());
        return path;
    };

    // comparison map for class c from vertex "from" to vertex "to"
    std::map<std::tuple<int, int, int>, std::vector<int>> comp_cache;
    std::function<const std::vector<int>&(int, int, int)> comparison =
        [&](int c, int from, int to) -> const std::vector<int>& {
        auto key = std::make_tuple(c, from, to);
        auto it = comp_cache.find(key);
        if (it != comp_cache.end()) return it->second;
        std::vector<int> m(t.vertex_instances[from].space(rep[c][from]).size());
        std::iota(m.begin(), m.end(), 0);
        int cur = from;
        for (auto [nxt, e] : tree_path(from, to)) {
            DomainId ua = rep[c][cur], ub = rep[c][nxt];
            bool fwd = t.tree_edges[e].first == cur;
            const Hieromorphism& fa = fwd ? t.phi_minus[e] : t.phi_plus[e];
            const Hieromorphism& fb = fwd ? t.phi_plus[e] : t.phi_minus[e];
            int ue = -1;
            for (int q = 0; q < t.edge_instances[e].domain_count(); ++q)
                if (fa.domain_map[q] == ua && fb.domain_map[q] == ub) ue = q;
            std::vector<int> stepm;
            const MetricGraph& ca = t.vertex_instances[cur].space(ua);
            if (ue >= 0) {
                auto inv = quasi_inverse(t.edge_instances[e].space(ue), ca, fa.star[ue]);
                stepm.resize(ca.size());
                for (int p = 0; p < ca.size(); ++p) stepm[p] = fb.star[ue][inv[p]];
            } else {
                // fallback through the gates: beta-based transport
                const HInstance& xa = t.vertex_instances[cur];
                const HInstance& xb = t.vertex_instances[nxt];
                stepm.resize(ca.size());
                const auto& g = out.gates[cur][nxt];
                for (int p = 0; p < ca.size(); ++p) {
                    int xp = 0;
                    int best = 1 << 29;
                    for (int x = 0; x < xa.total.size(); ++x) {
                        int d = ca.point_set_distance(p, xa.pi[ua][x]);
                        if (d < best) {
                            best = d;
                            xp = x;
                        }
                    }
                    stepm[p] = xb.pi[ub][g[xp]].front();
                }
            }
            std::vector<int> next(m.size());
            for (std::size_t p = 0; p < m.size(); ++p) next[p] = stepm[m[p]];
            m = std::move(next);
            cur = nxt;
        }
        return comp_cache.emplace(key, std::move(m)).first->second;
    };

    // measured comparison defect: c(beta_v(x)) vs beta_w(x) on sampled points
    for (int c = 0; c < nc; ++c) {
        const auto& supp = out.supports[c];
        if (supp.size() < 2) continue;
        auto [fv, fu] = out.favorites[c];
        for (int v : supp) {
            if (v == fv) continue;
            const auto& cm = comparison(c, v, fv);
            const HInstance& xv = t.vertex_instances[v];
            const HInstance& xf = t.vertex_instances[fv];
            for (int x = 0; x < total.size(); x += std::max(1, total.size() / 64)) {
                int lv = out.gates[vertex_of(x)][v][x - out.vertex_offset[vertex_of(x)]];
                int lf = out.gates[vertex_of(x)][fv][x - out.vertex_offset[vertex_of(x)]];
                int via = cm[xv.pi[rep[c][v]][lv].front()];
                int direct = xf.pi[rep[c][fv]][lf].front();
                out.comparison_defect = std::max(
                    out.comparison_defect, xf.space(rep[c][fv]).dist(via, direct));
            }
        }
    }

    // ---- combined raw instance ----------------------------------------------
    RawInstance raw;
    raw.total = total;
    // external ids: 0 = T, 1 + c = class c
    raw.domains.push_back({0, "T", t.tree, true});
    for (int c = 0; c < nc; ++c) {
        auto [fv, fu] = out.favorites[c];
        raw.domains.push_back({1 + c,
                               "[" + std::to_string(fv) + "." +
                                   t.vertex_instances[fv].domains[fu].name + "]",
                               t.vertex_instances[fv].space(fu),
                               t.vertex_instances[fv].domains[fu].hyperbolic});
        raw.nesting.push_back({1 + c, 0});
    }
    raw.maximal = 0;

    // combined relations: coherent across shared vertices
    std::vector<std::vector<Rel>> crel(nc, std::vector<Rel>(nc, Rel::Transverse));
    for (int c = 0; c < nc; ++c) crel[c][c] = Rel::Same;
    for (int c = 0; c < nc; ++c)
        for (int d = c + 1; d < nc; ++d) {
            bool nest_cd = false, nest_dc = false, orth = false;
            for (int v = 0; v < k; ++v) {
                if (rep[c][v] < 0 || rep[d][v] < 0) continue;
                const auto& r = t.vertex_instances[v].rel;
                if (r.strictly_nested(rep[c][v], rep[d][v])) nest_cd = true;
                if (r.strictly_nested(rep[d][v], rep[c][v])) nest_dc = true;
                if (r.orthogonal(rep[c][v], rep[d][v])) orth = true;
            }
            if ((nest_cd || nest_dc) && orth)
                throw CombineHypothesisError("relation coherence",
                                             "classes " + std::to_string(c) + "," +
                                                 std::to_string(d) + " both nested and orthogonal");
            if (nest_cd && nest_dc)
                throw CombineHypothesisError("relation coherence",
                                             "classes " + std::to_string(c) + "," +
                                                 std::to_string(d) + " nested both ways");
            if (nest_cd) {
                crel[c][d] = Rel::NestedIn;
                crel[d][c] = Rel::Contains;
            } else if (nest_dc) {
                crel[d][c] = Rel::NestedIn;
                crel[c][d] = Rel::Contains;
            } else if (orth) {
                crel[c][d] = Rel::Orthogonal;
                crel[d][c] = Rel::Orthogonal;
            }
        }
    for (int c = 0; c < nc; ++c)
        for (int d = 0; d < nc; ++d) {
            if (crel[c][d] == Rel::NestedIn) raw.nesting.push_back({1 + c, 1 + d});
            if (c < d && crel[c][d] == Rel::Orthogonal) raw.orthogonality.push_back({1 + c, 1 + d});
        }

    // containers lifted from vertex containers
    std::vector<int> class_of(dom_off[k]);
    for (int c = 0; c < nc; ++c)
        for (auto [v, u] : members[c]) class_of[dom_off[v] + u] = c;
    for (int v = 0; v < k; ++v) {
        const HInstance& xv = t.vertex_instances[v];
        for (auto& [key, w] : xv.rel.container) {
            int tc = class_of[dom_off[v] + key.first];
            int uc = class_of[dom_off[v] + key.second];
            int wc = class_of[dom_off[v] + w];
            raw.containers.push_back({1 + tc, 1 + uc, 1 + wc});
            if (key.first == xv.rel.maximal()) raw.containers.push_back({0, 1 + uc, 1 + wc});
        }
    }

    // projections: pi_T and the gate-composed class projections
    {
        std::vector<VertexSet> pit(total.size());
        for (int x = 0; x < total.size(); ++x) pit[x] = {vertex_of(x)};
        raw.pi[0] = std::move(pit);
    }
    for (int c = 0; c < nc; ++c) {
        auto [fv, fu] = out.favorites[c];
        std::vector<VertexSet> table(total.size());
        for (int x = 0; x < total.size(); ++x) {
            int v = vertex_of(x);
            int lf = out.gates[v][fv][x - out.vertex_offset[v]];
            table[x] = t.vertex_instances[fv].pi[fu][lf];
        }
        raw.pi[1 + c] = std::move(table);
    }

    // rho tables
    auto smallest_common_vertex = [&](int c, int d) -> int {
        for (int v = 0; v < k; ++v)
            if (rep[c][v] >= 0 && rep[d][v] >= 0) return v;
        return -1;
    };
    auto closest_supports = [&](int c, int d) {
        int bv = -1, bw = -1, bd = 1 << 29;
        for (int v : out.supports[c])
            for (int w : out.supports[d])
                if (t.tree.dist(v, w) < bd) {
                    bd = t.tree.dist(v, w);
                    bv = v;
                    bw = w;
                }
        return std::make_pair(bv, bw);
    };
    auto map_through = [&](int c, int from, const VertexSet& s) {
        auto [fv, fu] = out.favorites[c];
        const auto& cm = comparison(c, from, fv);
        std::set<int> acc;
        for (int p : s) acc.insert(cm[p]);
        return VertexSet(acc.begin(), acc.end());
    };

    for (int c = 0; c < nc; ++c) {
        // class vs T
        raw.rho_set.push_back({1 + c, 0, out.supports[c]});
        std::vector<VertexSet> m(k);
        for (int v = 0; v < k; ++v) {
            // canonical: the projection of the smallest vertex of X_v
            m[v] = raw.pi[1 + c][out.vertex_offset[v]];
        }
        raw.rho_map.push_back({0, 1 + c, std::move(m)});
    }
    for (int c = 0; c < nc; ++c)
        for (int d = 0; d < nc; ++d) {
            if (c == d) continue;
            if (crel[c][d] == Rel::NestedIn) {
                int v = -1;
                for (int vv = 0; vv < k; ++vv)
                    if (rep[c][vv] >= 0 && rep[d][vv] >= 0 &&
                        t.vertex_instances[vv].rel.strictly_nested(rep[c][vv], rep[d][vv])) {
                        v = vv;
                        break;
                    }
                const HInstance& xv = t.vertex_instances[v];
                raw.rho_set.push_back(
                    {1 + c, 1 + d, map_through(d, v, xv.rho(rep[c][v], rep[d][v]))});
                // downward map C[d] -> C[c]
                auto [dfv, dfu] = out.favorites[d];
                const auto& back = comparison(d, dfv, v);
                const auto& local = xv.rho_map.at({rep[d][v], rep[c][v]});
                std::vector<VertexSet> dm(t.vertex_instances[dfv].space(dfu).size());
                for (std::size_t p = 0; p < dm.size(); ++p)
                    dm[p] = map_through(c, v, local[back[p]]);
                raw.rho_map.push_back({1 + d, 1 + c, std::move(dm)});
            } else if (crel[c][d] == Rel::Transverse && c < d) {
                int v = smallest_common_vertex(c, d);
                if (v >= 0) {
                    const HInstance& xv = t.vertex_instances[v];
                    raw.rho_set.push_back(
                        {1 + c, 1 + d, map_through(d, v, xv.rho(rep[c][v], rep[d][v]))});
                    raw.rho_set.push_back(
                        {1 + d, 1 + c, map_through(c, v, xv.rho(rep[d][v], rep[c][v]))});
                } else {
                    auto [cv, dv] = closest_supports(c, d);
                    // first edge on the geodesic from cv toward dv, and back
                    auto path = tree_path(cv, dv);
                    int e1 = path.front().second;
                    auto pick_rho = [&](int side_vertex, int edge, int target_class) {
                        bool fwd = t.tree_edges[edge].first == side_vertex;
                        const Hieromorphism& f = fwd ? t.phi_minus[edge] : t.phi_plus[edge];
                        DomainId se = f.source->rel.maximal();
                        DomainId img = f.domain_map[se];
                        const HInstance& xv = t.vertex_instances[side_vertex];
                        DomainId tv = rep[target_class][side_vertex];
                        // rho of the edge image into the target representative
                        if (xv.rel.strictly_nested(img, tv) || xv.rel.transverse(img, tv))
                            return map_through(target_class, side_vertex, xv.rho(img, tv));
                        // otherwise fall back to the projection of the glue
                        return map_through(target_class, side_vertex,
                                           xv.pi[tv][0]);
                    };
                    raw.rho_set.push_back({1 + d, 1 + c, pick_rho(cv, e1, c)});
                    auto rpath = tree_path(dv, cv);
                    int e2 = rpath.front().second;
                    raw.rho_set.push_back({1 + c, 1 + d, pick_rho(dv, e2, d)});
                }
            }
        }

    auto res = validate_instance(raw);
    if (!res.ok()) {
        std::string msg = "combine_tree produced invalid instance:";
        for (auto& e : res.errors) msg += " " + e;
        throw std::logic_error(msg);
    }
    out.instance = std::move(*res.instance);
    return out;
}

}  // namespace hhs
