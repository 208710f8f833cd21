#include "hhs/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "hhs/detail/parallel.hpp"
#include "hhs/detail/projdist.hpp"

namespace hhs {

using detail::parallel_for;

AxiomResult& VerifyReport::add(const std::string& name) {
    axioms.push_back(AxiomResult{name, true, {}, {}});
    return axioms.back();
}

const AxiomResult* VerifyReport::find(const std::string& name) const {
    for (const auto& a : axioms)
        if (a.name == name) return &a;
    return nullptr;
}

namespace {

std::string dom_name(const HInstance& h, DomainId u) {
    return h.domains[u].name.empty() ? std::to_string(h.domains[u].external_id)
                                     : h.domains[u].name;
}

// domains whose associated space has more than one vertex
std::vector<DomainId> nontrivial_domains(const HInstance& h) {
    std::vector<DomainId> out;
    for (int u = 0; u < h.domain_count(); ++u)
        if (h.space(u).size() > 1) out.push_back(u);
    return out;
}

using detail::ProjDist;

// max clique in the given symmetric adjacency ("no transverse pair" graph)
int max_clique(const std::vector<std::vector<bool>>& adj) {
    int n = static_cast<int>(adj.size());
    int best = 0;
    std::vector<int> cur;
    std::vector<int> cand(n);
    for (int i = 0; i < n; ++i) cand[i] = i;
    // simple branch and bound, fine for the small index sets we handle
    std::function<void(std::vector<int>&)> rec = [&](std::vector<int>& cands) {
        if (cur.size() + cands.size() <= static_cast<std::size_t>(best)) return;
        if (cands.empty()) {
            best = std::max(best, static_cast<int>(cur.size()));
            return;
        }
        std::vector<int> rest = cands;
        while (!rest.empty()) {
            if (cur.size() + rest.size() <= static_cast<std::size_t>(best)) return;
            int v = rest.front();
            rest.erase(rest.begin());
            cur.push_back(v);
            std::vector<int> next;
            for (int w : rest)
                if (adj[v][w]) next.push_back(w);
            rec(next);
            cur.pop_back();
        }
    };
    rec(cand);
    return best;
}

}  // namespace

AxiomResult verify_relations(const HInstance& h) {
    AxiomResult res;
    res.name = "relations";
    const auto& rel = h.rel;
    int n = h.domain_count();

    if (n > 0) {
        // unique maximum
        for (int u = 0; u < n; ++u)
            if (!rel.nested(u, rel.maximal()))
                res.witnesses.push_back("domain " + dom_name(h, u) + " not nested in maximum");
        // orthogonality closure
        for (int v = 0; v < n; ++v)
            for (int w = 0; w < n; ++w)
                if (rel.strictly_nested(v, w))
                    for (int u = 0; u < n; ++u)
                        if (rel.orthogonal(w, u) && !rel.orthogonal(v, u))
                            res.witnesses.push_back("orthogonality not closed: " + dom_name(h, v) +
                                                    " in " + dom_name(h, w) + " perp " +
                                                    dom_name(h, u));
        // container axiom
        for (int t = 0; t < n; ++t) {
            for (int u = 0; u < n; ++u) {
                if (!rel.nested(u, t)) continue;
                std::vector<DomainId> partners;
                for (int v = 0; v < n; ++v)
                    if (rel.nested(v, t) && rel.orthogonal(v, u)) partners.push_back(v);
                if (partners.empty()) continue;
                auto it = rel.container.find({t, u});
                DomainId w = it == rel.container.end() ? -1 : it->second;
                auto covers = [&](DomainId cand) {
                    if (cand < 0 || cand == t || !rel.nested(cand, t)) return false;
                    for (int v : partners)
                        if (!rel.nested(v, cand)) return false;
                    return true;
                };
                if (!covers(w)) {
                    // search for a witness before failing
                    DomainId found = -1;
                    for (int cand = 0; cand < n && found < 0; ++cand)
                        if (covers(cand)) found = cand;
                    if (found < 0) {
                        res.passed = false;
                        res.witnesses.push_back("container missing for (" + dom_name(h, t) + "," +
                                                dom_name(h, u) + "), violating " +
                                                dom_name(h, partners.front()));
                    }
                }
            }
        }
    }

    // complexity: longest ⊑-chain
    int complexity = 0;
    {
        std::vector<int> depth(n, 0);
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return rel.proper_nested_in(a).size() < rel.proper_nested_in(b).size();
        });
        for (int u : order) {
            depth[u] = 1;
            for (int v : rel.proper_nested_in(u)) depth[u] = std::max(depth[u], depth[v] + 1);
            complexity = std::max(complexity, depth[u]);
        }
    }
    h.consts.complexity_n = complexity;

    // chi: largest family without a transverse pair
    int chi = 0;
    if (n > 0) {
        std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && !rel.transverse(i, j)) adj[i][j] = true;
        chi = max_clique(adj);
    }
    h.consts.chi = chi;

    res.passed = res.passed && res.witnesses.empty();
    res.constants = {{"complexity_n", complexity}, {"chi", chi}};
    return res;
}

AxiomResult verify_projection_bounds(const HInstance& h) {
    AxiomResult res;
    res.name = "projections";
    int xi = 0;
    for (int u = 0; u < h.domain_count(); ++u)
        for (int x = 0; x < h.total.size(); ++x)
            xi = std::max(xi, h.space(u).set_diameter(h.pi[u][x]));
    for (auto& [k, s] : h.rho_set) xi = std::max(xi, h.space(k.second).set_diameter(s));
    for (auto& [k, m] : h.rho_map)
        for (auto& s : m) xi = std::max(xi, h.space(k.second).set_diameter(s));

    int maxd = 0;
    auto nt = nontrivial_domains(h);
    for (auto [x, y] : h.total.edges())
        for (DomainId u : nt) maxd = std::max(maxd, h.d_point(u, x, y));
    int k_lip = std::max(1, (maxd + 1) / 2);

    // near-surjectivity diagnostic: how far C U can sit from the image
    int surj = 0;
    for (int u = 0; u < h.domain_count(); ++u) {
        std::set<int> img;
        for (int x = 0; x < h.total.size(); ++x)
            img.insert(h.pi[u][x].begin(), h.pi[u][x].end());
        auto field = h.space(u).distances_to_set(VertexSet(img.begin(), img.end()));
        for (int v : field) surj = std::max(surj, v);
    }

    h.consts.xi = xi;
    h.consts.k_lip = k_lip;
    h.consts.surjectivity_defect = surj;
    res.constants = {{"xi", xi}, {"k_lip", k_lip}, {"surjectivity_defect", surj}};
    return res;
}

AxiomResult verify_consistency(const HInstance& h) {
    AxiomResult res;
    res.name = "consistency";
    int n = h.domain_count();
    const auto& rel = h.rel;

    // eligible pairs for the two point inequalities
    std::vector<std::pair<DomainId, DomainId>> trans_pairs, nest_pairs;
    for (int v = 0; v < n; ++v)
        for (int w = 0; w < n; ++w) {
            if (v < w && rel.transverse(v, w)) trans_pairs.push_back({v, w});
            if (rel.strictly_nested(v, w)) nest_pairs.push_back({v, w});
        }

    std::vector<int> per_x(h.total.size(), 0);
    parallel_for(h.total.size(), [&](int x) {
        int k = 0;
        for (auto [v, w] : trans_pairs) {
            int a = h.d_point_set(w, x, h.rho(v, w));
            if (a == 0) continue;
            int b = h.d_point_set(v, x, h.rho(w, v));
            k = std::max(k, std::min(a, b));
        }
        for (auto [v, w] : nest_pairs) {
            int a = h.d_point_set(w, x, h.rho(v, w));
            if (a == 0) continue;
            VertexSet img = h.rho_down(w, v, h.pi[w][x]);
            int b = union_diameter(h.space(v), h.pi[v][x], img);
            k = std::max(k, std::min(a, b));
        }
        per_x[x] = k;
    });
    int kappa0 = 0;
    for (int v : per_x) kappa0 = std::max(kappa0, v);

    // third clause: U ⊑ V, (V ⊊ W) or (V ⋔ W and W not ⊥ U) → d_W(ρ^U_W, ρ^V_W) small
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            if (!rel.nested(u, v) || u == v) continue;
            for (int w = 0; w < n; ++w) {
                bool eligible = rel.strictly_nested(v, w) ||
                                (rel.transverse(v, w) && !rel.orthogonal(w, u));
                if (!eligible) continue;
                if (!rel.strictly_nested(u, w) && !rel.transverse(u, w)) continue;
                kappa0 = std::max(kappa0, h.space(w).set_distance(h.rho(u, w), h.rho(v, w)));
            }
        }

    // kappa1: rho-consistency over eligible triples
    int kappa1 = 0;
    auto rho_defined = [&](int a, int b) {
        return rel.strictly_nested(a, b) || rel.transverse(a, b);
    };
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            if (!rho_defined(u, v)) continue;
            for (int w = 0; w < n; ++w) {
                if (!rho_defined(u, w)) continue;
                if (rel.transverse(v, w)) {
                    int a = h.space(w).set_distance(h.rho(u, w), h.rho(v, w));
                    if (a == 0) continue;
                    int b = h.space(v).set_distance(h.rho(u, v), h.rho(w, v));
                    kappa1 = std::max(kappa1, std::min(a, b));
                } else if (rel.strictly_nested(v, w)) {
                    int a = h.space(w).set_distance(h.rho(u, w), h.rho(v, w));
                    if (a == 0) continue;
                    VertexSet img = h.rho_down(w, v, h.rho(u, w));
                    int b = union_diameter(h.space(v), h.rho(u, v), img);
                    kappa1 = std::max(kappa1, std::min(a, b));
                }
            }
        }

    h.consts.kappa0 = kappa0;
    h.consts.kappa1 = kappa1;
    res.constants = {{"kappa0", kappa0}, {"kappa1", kappa1}};
    return res;
}

AxiomResult verify_bgi(const HInstance& h) {
    AxiomResult res;
    res.name = "bounded_geodesic_image";
    int e = 0;
    bool approx = false;
    const auto& rel = h.rel;

    for (int v = 0; v < h.domain_count(); ++v) {
        for (int w = 0; w < h.domain_count(); ++w) {
            if (!rel.strictly_nested(v, w)) continue;
            const MetricGraph& cw = h.space(w);
            const MetricGraph& cv = h.space(v);
            const auto& rho_vw = h.rho(v, w);
            const auto& down = h.rho_map.at({w, v});
            auto drho = cw.distances_to_set(rho_vw);
            int nw = cw.size();

            // Per endpoint pair: the pair's exact contribution is
            //   max over geodesics g of min(min-dist(g, rho), image-diam(g)),
            // scanned downward from the maximin distance. A geodesic avoiding
            // N_t(rho) with image diameter >= t exists iff the restricted
            // geodesic DAG (vertices with drho >= t) connects, in DAG order,
            // two vertices with image gap >= t (or one vertex has a fat image).
            for (int a = 0; a < nw; ++a) {
                const auto& da = cw.dist_row(a);
                for (int b = a; b < nw; ++b) {
                    if (cw.count_geodesics(a, b) > GEODESIC_CAP) approx = true;
                    const auto& db = cw.dist_row(b);
                    int d = da[b];
                    std::vector<std::vector<int>> layers(d + 1);
                    for (int u2 = 0; u2 < nw; ++u2)
                        if (da[u2] + db[u2] == d) layers[da[u2]].push_back(u2);
                    std::vector<int> f(nw, -1);
                    f[a] = drho[a];
                    for (int l = 1; l <= d; ++l)
                        for (int u2 : layers[l]) {
                            int best = -1;
                            for (int nb : cw.neighbors(u2))
                                if (da[nb] + db[nb] == d && da[nb] == l - 1)
                                    best = std::max(best, f[nb]);
                            f[u2] = std::min(drho[u2], best);
                        }
                    int maximin = f[b];
                    if (maximin <= e) continue;  // all geodesics already enter N_e

                    for (int t = maximin; t > e; --t) {
                        if (drho[a] < t || drho[b] < t) continue;
                        auto restricted = [&](int u2) {
                            return da[u2] + db[u2] == d && drho[u2] >= t;
                        };
                        // forward-reachable from a and backward-reachable from b
                        // within the restricted DAG
                        std::vector<char> fa(nw, 0), bb(nw, 0);
                        {
                            std::vector<int> stack{a};
                            fa[a] = 1;
                            while (!stack.empty()) {
                                int curv = stack.back();
                                stack.pop_back();
                                for (int nb : cw.neighbors(curv))
                                    if (restricted(nb) && da[nb] == da[curv] + 1 && !fa[nb]) {
                                        fa[nb] = 1;
                                        stack.push_back(nb);
                                    }
                            }
                            stack = {b};
                            bb[b] = 1;
                            while (!stack.empty()) {
                                int curv = stack.back();
                                stack.pop_back();
                                for (int nb : cw.neighbors(curv))
                                    if (restricted(nb) && da[nb] == da[curv] - 1 && !bb[nb]) {
                                        bb[nb] = 1;
                                        stack.push_back(nb);
                                    }
                            }
                        }
                        std::vector<int> order;
                        for (int l = 0; l <= d; ++l)
                            for (int u2 : layers[l])
                                if (fa[u2] && bb[u2]) order.push_back(u2);
                        if (order.empty()) continue;
                        bool found = false;
                        for (int u2 : order)
                            if (cv.set_diameter(down[u2]) >= t) {
                                found = true;
                                break;
                            }
                        for (std::size_t i = 0; i < order.size() && !found; ++i) {
                            int p = order[i];
                            std::vector<int> stack{p};
                            std::set<int> seen{p};
                            while (!stack.empty() && !found) {
                                int curv = stack.back();
                                stack.pop_back();
                                if (curv != p && bb[curv] &&
                                    union_diameter(cv, down[p], down[curv]) >= t)
                                    found = true;
                                for (int nb : cw.neighbors(curv))
                                    if (restricted(nb) && da[nb] == da[curv] + 1 &&
                                        !seen.count(nb)) {
                                        seen.insert(nb);
                                        stack.push_back(nb);
                                    }
                            }
                        }
                        if (found) {
                            e = t;
                            break;
                        }
                    }
                }
            }
        }
    }

    // variant (7)': if some geodesic between point projections stays
    // (E+2delta)-far from rho^V_W then d_V(x,y) <= E; measured as the minimal
    // E' closing the scan, skipped on very large total spaces.
    int e_variant = 0;
    if (h.total.size() <= 4096) {
        int delta = h.consts.delta;
        for (int v = 0; v < h.domain_count(); ++v)
            for (int w = 0; w < h.domain_count(); ++w) {
                if (!rel.strictly_nested(v, w)) continue;
                const MetricGraph& cw = h.space(w);
                auto drho = cw.distances_to_set(h.rho(v, w));
                // maximin of drho over geodesics, cached per anchor pair
                std::map<std::pair<int, int>, int> mm_cache;
                auto maximin_rho = [&](int a, int b) {
                    auto key = std::minmax(a, b);
                    auto it = mm_cache.find({key.first, key.second});
                    if (it != mm_cache.end()) return it->second;
                    const auto& da = cw.dist_row(key.first);
                    const auto& db = cw.dist_row(key.second);
                    int d = da[key.second];
                    std::vector<std::vector<int>> layers(d + 1);
                    for (int u2 = 0; u2 < cw.size(); ++u2)
                        if (da[u2] + db[u2] == d) layers[da[u2]].push_back(u2);
                    std::vector<int> g(cw.size(), -1);
                    g[key.first] = drho[key.first];
                    for (int l = 1; l <= d; ++l)
                        for (int u2 : layers[l]) {
                            int best = -1;
                            for (int nb : cw.neighbors(u2))
                                if (da[nb] + db[nb] == d && da[nb] == l - 1)
                                    best = std::max(best, g[nb]);
                            g[u2] = std::min(drho[u2], best);
                        }
                    int m = g[key.second];
                    mm_cache[{key.first, key.second}] = m;
                    return m;
                };
                // a pair forbids E' exactly when E' < min(mm - 2delta, d_V(x,y)),
                // so the minimal admissible E' is the max of that quantity
                for (int x = 0; x < h.total.size(); ++x)
                    for (int y = x + 1; y < h.total.size(); ++y) {
                        int dv = h.d_point(v, x, y);
                        if (dv <= e_variant) continue;
                        int mm = maximin_rho(h.pi[w][x].front(), h.pi[w][y].front());
                        e_variant = std::max(e_variant, std::min(mm - 2 * delta, dv));
                    }
            }
    }

    e = std::max(e, e_variant);
    h.consts.e_bgi = e;
    if (approx) res.witnesses.push_back("geodesic cap exceeded on some pair (canonical subset)");
    res.constants = {{"e_bgi", e}};
    return res;
}

AxiomResult verify_large_links(const HInstance& h) {
    AxiomResult res;
    res.name = "large_links";
    int n = h.domain_count();
    const auto& rel = h.rel;
    int nx = h.total.size();

    // domains that can appear in a witness family: properly nested in something
    std::vector<DomainId> inner;
    for (int t = 0; t < n; ++t) {
        for (int w = 0; w < n; ++w)
            if (rel.strictly_nested(t, w)) {
                inner.push_back(t);
                break;
            }
    }
    // among inner domains, only those with nontrivial spaces have varying d_T
    std::vector<DomainId> var_inner;
    for (DomainId t : inner)
        if (h.space(t).size() > 1) var_inner.push_back(t);

    // parents: domains with proper subdomains
    std::vector<DomainId> parents;
    for (int w = 0; w < n; ++w)
        if (!rel.proper_nested_in(w).empty()) parents.push_back(w);

    auto lambda_for = [&](int e_ll) -> long long {
        // mask over var_inner: which are large; trivial-space inner domains are
        // large iff 0 >= e_ll, i.e. e_ll == 0
        int m = static_cast<int>(var_inner.size());
        if (m > 20) return -1;  // out of scope for mask approach
        bool trivial_large = (e_ll == 0);

        // per (parent, mask): canonical family = ⊑-maximal large subdomains
        std::vector<std::vector<std::vector<DomainId>>> fam(parents.size());
        for (std::size_t pi_ = 0; pi_ < parents.size(); ++pi_) {
            DomainId w = parents[pi_];
            fam[pi_].assign(std::size_t(1) << m, {});
            for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
                std::vector<DomainId> large;
                for (int i = 0; i < m; ++i)
                    if ((mask >> i) & 1) {
                        if (rel.strictly_nested(var_inner[i], w)) large.push_back(var_inner[i]);
                    }
                if (trivial_large)
                    for (DomainId t : inner)
                        if (h.space(t).size() == 1 && rel.strictly_nested(t, w))
                            large.push_back(t);
                std::vector<DomainId> maximal;
                for (DomainId t : large) {
                    bool dominated = false;
                    for (DomainId s : large)
                        if (s != t && rel.strictly_nested(t, s)) dominated = true;
                    if (!dominated) maximal.push_back(t);
                }
                fam[pi_][mask] = std::move(maximal);
            }
        }

        std::vector<ProjDist> pd(m);
        for (int i = 0; i < m; ++i) pd[i].init(h, var_inner[i]);
        std::vector<DomainId> nt_parents;
        for (DomainId w : parents)
            if (h.space(w).size() > 1) nt_parents.push_back(w);
        std::vector<ProjDist> pdw(nt_parents.size());
        for (std::size_t i = 0; i < nt_parents.size(); ++i) pdw[i].init(h, nt_parents[i]);

        std::vector<long long> per_x(nx, 1);
        parallel_for(nx, [&](int x) {
            long long need = 1;
            for (int y = x; y < nx; ++y) {
                std::uint32_t mask = 0;
                for (int i = 0; i < m; ++i)
                    if (pd[i](x, y) >= e_ll) mask |= (1u << i);
                for (std::size_t pi_ = 0; pi_ < parents.size(); ++pi_) {
                    const auto& family = fam[pi_][mask];
                    if (family.empty()) continue;
                    DomainId w = parents[pi_];
                    bool nt = h.space(w).size() > 1;
                    long long dw = 0;
                    if (nt) {
                        for (std::size_t q = 0; q < nt_parents.size(); ++q)
                            if (nt_parents[q] == w) {
                                dw = pdw[q](x, y);
                                break;
                            }
                    }
                    long long denom = dw + 1;
                    long long cnt = static_cast<long long>(family.size());
                    need = std::max(need, (cnt + denom - 1) / denom);
                    if (nt)
                        for (DomainId t : family) {
                            long long r = std::max(h.d_point_set(w, x, h.rho(t, w)),
                                                   h.d_point_set(w, y, h.rho(t, w)));
                            need = std::max(need, (r + denom - 1) / denom);
                        }
                }
            }
            per_x[x] = need;
        });
        long long lam = 1;
        for (long long v : per_x) lam = std::max(lam, v);
        return lam;
    };

    // lexicographic minimum, e_ll first: e_ll = 0 always admits a finite
    // lambda on a finite instance, so the minimum sits at e_ll = 0
    int e_ll = 0;
    long long lambda = lambda_for(0);
    if (lambda < 0) {
        // direct per-pair scan without the mask table
        std::vector<long long> per_x(nx, 1);
        parallel_for(nx, [&](int x) {
            long long need = 1;
            for (int y = 0; y < nx; ++y) {
                for (DomainId w : parents) {
                    std::vector<DomainId> large;
                    for (DomainId t : inner)
                        if (rel.strictly_nested(t, w) && h.d_point(t, x, y) >= e_ll)
                            large.push_back(t);
                    std::vector<DomainId> maximal;
                    for (DomainId t : large) {
                        bool dom = false;
                        for (DomainId s : large)
                            if (s != t && rel.strictly_nested(t, s)) dom = true;
                        if (!dom) maximal.push_back(t);
                    }
                    if (maximal.empty()) continue;
                    long long dw = h.space(w).size() > 1 ? h.d_point(w, x, y) : 0;
                    long long denom = dw + 1;
                    need = std::max(need, (static_cast<long long>(maximal.size()) + denom - 1) /
                                              denom);
                    if (h.space(w).size() > 1)
                        for (DomainId t : maximal) {
                            long long r = h.d_point_set(w, x, h.rho(t, w));
                            need = std::max(need, (r + denom - 1) / denom);
                        }
                }
            }
            per_x[x] = need;
        });
        lambda = 1;
        for (long long v : per_x) lambda = std::max(lambda, v);
    }
    h.consts.e_ll = e_ll;
    h.consts.lambda = static_cast<int>(lambda);
    res.constants = {{"e_ll", e_ll}, {"lambda", lambda}};
    return res;
}

AxiomResult verify_partial_realization(const HInstance& h) {
    AxiomResult res;
    res.name = "partial_realization";
    int n = h.domain_count();
    const auto& rel = h.rel;
    int nx = h.total.size();

    // enumerate pairwise-orthogonal families
    std::vector<std::vector<DomainId>> families;
    std::vector<DomainId> cur;
    std::function<void(int)> rec = [&](int start) {
        if (!cur.empty()) families.push_back(cur);
        for (int v = start; v < n; ++v) {
            bool ok = true;
            for (DomainId u : cur)
                if (!rel.orthogonal(u, v)) ok = false;
            if (!ok) continue;
            cur.push_back(v);
            rec(v + 1);
            cur.pop_back();
        }
    };
    rec(0);

    // projection images per domain
    std::vector<VertexSet> image(n);
    for (int u = 0; u < n; ++u) {
        std::set<int> img;
        for (int x = 0; x < nx; ++x) img.insert(h.pi[u][x].begin(), h.pi[u][x].end());
        image[u] = VertexSet(img.begin(), img.end());
    }

    int alpha = 0;
    bool sampled = false;

    for (const auto& fam : families) {
        // extra(x): rho conditions for this family
        std::vector<std::pair<DomainId, DomainId>> rho_conds;  // (V_j, V) pairs
        for (DomainId vj : fam)
            for (int v = 0; v < n; ++v) {
                if (v == vj) continue;
                if (rel.strictly_nested(vj, v) || rel.transverse(vj, v))
                    rho_conds.push_back({vj, v});
            }
        std::vector<int> extra(nx, 0);
        parallel_for(nx, [&](int x) {
            int e = 0;
            for (auto [vj, v] : rho_conds) e = std::max(e, h.d_point_set(v, x, h.rho(vj, v)));
            extra[x] = e;
        });

        // combination count
        std::size_t combos = 1;
        bool overflow = false;
        for (DomainId vj : fam) {
            combos *= image[vj].size();
            if (combos > PARTIAL_REALIZATION_EXHAUSTIVE_CAP * 8) {
                overflow = true;
                break;
            }
        }
        std::size_t stride = 1;
        if (overflow || combos > PARTIAL_REALIZATION_EXHAUSTIVE_CAP) {
            stride = overflow ? 997 : (combos + PARTIAL_REALIZATION_EXHAUSTIVE_CAP - 1) /
                                          PARTIAL_REALIZATION_EXHAUSTIVE_CAP;
            sampled = true;
        }

        // dedupe the search space by the family-restricted projection profile
        std::map<std::vector<VertexSet>, int> profile_min_extra;
        for (int x = 0; x < nx; ++x) {
            std::vector<VertexSet> key;
            key.reserve(fam.size());
            for (DomainId vj : fam) key.push_back(h.pi[vj][x]);
            auto it = profile_min_extra.find(key);
            if (it == profile_min_extra.end() || extra[x] < it->second)
                profile_min_extra[key] = extra[x];
        }
        std::vector<std::pair<std::vector<VertexSet>, int>> profiles(profile_min_extra.begin(),
                                                                     profile_min_extra.end());

        // iterate choices in lexicographic order with the chosen stride
        std::vector<std::size_t> sizes;
        for (DomainId vj : fam) sizes.push_back(image[vj].size());
        std::size_t total = 1;
        for (auto s : sizes) total *= s;

        std::vector<std::size_t> combo_idx;
        for (std::size_t ci = 0; ci < total; ci += stride) combo_idx.push_back(ci);
        std::vector<int> combo_best(combo_idx.size(), 0);
        parallel_for(static_cast<int>(combo_idx.size()), [&](int k) {
            std::size_t rem = combo_idx[k];
            std::vector<int> choice(fam.size());
            for (std::size_t j = 0; j < fam.size(); ++j) {
                choice[j] = image[fam[j]][rem % sizes[j]];
                rem /= sizes[j];
            }
            int best = 1 << 29;
            {  // fast path: a singleton profile matching the choice exactly
                std::vector<VertexSet> key;
                key.reserve(fam.size());
                for (int c : choice) key.push_back({c});
                auto it = profile_min_extra.find(key);
                if (it != profile_min_extra.end()) best = it->second;
            }
            if (best > 0)
                for (const auto& [key, ext] : profiles) {
                    int m = ext;
                    for (std::size_t j = 0; j < fam.size() && m < best; ++j)
                        m = std::max(m, h.space(fam[j]).point_set_distance(choice[j], key[j]));
                    best = std::min(best, m);
                    if (best == 0) break;
                }
            combo_best[k] = best;
        });
        for (int b : combo_best) alpha = std::max(alpha, b);
    }

    if (sampled) {
        res.witnesses.push_back("partial realization sampled (cap " +
                                std::to_string(PARTIAL_REALIZATION_EXHAUSTIVE_CAP) + ")");
    }
    h.consts.alpha = alpha;
    res.constants = {{"alpha", alpha}};
    return res;
}

AxiomResult verify_uniqueness(const HInstance& h) {
    AxiomResult res;
    res.name = "uniqueness";
    int nx = h.total.size();
    auto nt = nontrivial_domains(h);

    std::vector<ProjDist> pd(nt.size());
    for (std::size_t i = 0; i < nt.size(); ++i) pd[i].init(h, nt[i]);

    int workers = detail::worker_count();
    std::vector<std::vector<int>> buckets(workers);  // bucket[m] = max d_X seen
    std::atomic<int> widx{0};
    {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                auto& bucket = buckets[w];
                bucket.assign(64, -1);
                std::vector<int> row;
                for (;;) {
                    int x = widx.fetch_add(1);
                    if (x >= nx) return;
                    h.total.bfs_into(x, row);
                    for (int y = x + 1; y < nx; ++y) {
                        int m = 0;
                        for (const auto& f : pd) m = std::max(m, f(x, y));
                        if (m >= static_cast<int>(bucket.size())) bucket.resize(m + 1, -1);
                        bucket[m] = std::max(bucket[m], row[y]);
                    }
                }
            });
        for (auto& t : pool) t.join();
    }
    int kmax = 0;
    for (int w = 0; w < workers; ++w)
        for (std::size_t m = 0; m < buckets[w].size(); ++m)
            if (buckets[w][m] >= 0) kmax = std::max(kmax, static_cast<int>(m));
    std::vector<int> theta(kmax + 1, 0);
    for (int w = 0; w < workers; ++w)
        for (std::size_t m = 0; m < buckets[w].size() && m <= static_cast<std::size_t>(kmax); ++m)
            theta[m] = std::max(theta[m], std::max(0, buckets[w][m]));
    for (int k = 1; k <= kmax; ++k) theta[k] = std::max(theta[k], theta[k - 1]);

    h.consts.theta_u = theta;
    res.constants = {{"kappa_max", kmax}, {"theta_u_max", theta.empty() ? 0 : theta.back()}};
    return res;
}

VerifyReport verify_all(const HInstance& h) {
    VerifyReport rep;

    // hyperbolicity of flagged domains
    {
        auto& ax = rep.add("hyperbolic_spaces");
        int delta = 0;
        bool approx = false;
        for (int u = 0; u < h.domain_count(); ++u) {
            if (!h.domains[u].hyperbolic) continue;
            auto r = h.space(u).delta_hyperbolicity();
            delta = std::max(delta, r.delta);
            approx = approx || r.approximated;
        }
        h.consts.delta = delta;
        ax.constants = {{"delta", delta}};
        if (approx) {
            rep.approximated = true;
            rep.approximations.push_back("delta: geodesic cap exceeded, canonical subset used");
        }
    }

    rep.axioms.push_back(verify_relations(h));
    rep.axioms.push_back(verify_projection_bounds(h));
    rep.axioms.push_back(verify_consistency(h));
    rep.axioms.push_back(verify_bgi(h));
    rep.axioms.push_back(verify_large_links(h));
    rep.axioms.push_back(verify_partial_realization(h));
    rep.axioms.push_back(verify_uniqueness(h));

    auto& c = h.consts;
    c.E = std::max({c.xi, c.kappa0, c.delta, c.k_lip, c.alpha, c.e_bgi, c.e_ll, 1});
    for (auto& ax : rep.axioms) {
        if (!ax.passed) rep.all_passed = false;
        for (auto& w : ax.witnesses)
            if (w.find("sampled") != std::string::npos || w.find("cap") != std::string::npos) {
                rep.approximated = true;
                rep.approximations.push_back(ax.name + ": " + w);
            }
    }
    return rep;
}

std::vector<std::string> check_pair_consistency_lemma(const HInstance& h) {
    std::vector<std::string> bad;
    int nx = h.total.size();
    int e = std::max(1, h.consts.E);
    const auto& rel = h.rel;
    for (int v = 0; v < h.domain_count(); ++v)
        for (int w = v + 1; w < h.domain_count(); ++w) {
            if (!rel.transverse(v, w)) continue;
            for (int x = 0; x < nx; ++x)
                for (int y = 0; y < nx; ++y) {
                    if (h.d_point(v, x, y) <= 10 * e || h.d_point(w, x, y) <= 10 * e) continue;
                    bool ok1 = h.d_point_set(v, x, h.rho(w, v)) <= e &&
                               h.d_point_set(w, y, h.rho(v, w)) <= e;
                    bool ok2 = h.d_point_set(w, x, h.rho(v, w)) <= e &&
                               h.d_point_set(v, y, h.rho(w, v)) <= e;
                    if (!ok1 && !ok2)
                        bad.push_back("pair lemma fails: domains " + dom_name(h, v) + "," +
                                      dom_name(h, w) + " points " + std::to_string(x) + "," +
                                      std::to_string(y));
                }
        }
    return bad;
}

std::vector<std::string> check_not_far_from_both(const HInstance& h) {
    std::vector<std::string> bad;
    int nx = h.total.size();
    int e = std::max(1, h.consts.E);
    const auto& rel = h.rel;
    for (int v = 0; v < h.domain_count(); ++v)
        for (int w = v + 1; w < h.domain_count(); ++w) {
            if (!rel.transverse(v, w)) continue;
            for (int x = 0; x < nx; ++x)
                for (int y = 0; y < nx; ++y) {
                    if (h.d_point(v, x, y) <= 10 * e || h.d_point(w, x, y) <= 10 * e) continue;
                    for (int z = 0; z < nx; ++z) {
                        bool okv = std::min(h.d_point(v, z, x), h.d_point(v, z, y)) <= 10 * e;
                        bool okw = std::min(h.d_point(w, z, x), h.d_point(w, z, y)) <= 10 * e;
                        if (!okv && !okw)
                            bad.push_back("corollary fails at z=" + std::to_string(z));
                    }
                }
        }
    return bad;
}

std::vector<int> passing_large_projections_up(const HInstance& h, const std::vector<int>& cs) {
    // for each C: the minimal N such that any N distinct S_i ⊑ V with
    // d_{S_i}(x,y) >= E forces some S ⊒ some S_i with d_S(x,y) >= C.
    std::vector<int> out;
    int e = std::max(1, h.consts.E);
    int nx = h.total.size();
    const auto& rel = h.rel;
    for (int c : cs) {
        int worst = 0;  // largest family seen with no witness
        for (int v = 0; v < h.domain_count(); ++v) {
            for (int x = 0; x < nx; ++x)
                for (int y = x + 1; y < nx; ++y) {
                    std::vector<DomainId> big;
                    for (DomainId s : rel.nested_in(v))
                        if (h.d_point(s, x, y) >= e) big.push_back(s);
                    if (big.empty()) continue;
                    bool witness = false;
                    for (DomainId s0 : big) {
                        for (int s = 0; s < h.domain_count(); ++s)
                            if (rel.nested(s, v) && rel.strictly_nested(s0, s) &&
                                h.d_point(s, x, y) >= c) {
                                witness = true;
                                break;
                            }
                        if (witness) break;
                    }
                    if (!witness) worst = std::max(worst, static_cast<int>(big.size()));
                }
        }
        out.push_back(worst + 1);
    }
    return out;
}

}  // namespace hhs
