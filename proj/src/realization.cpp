#include "hhs/realization.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "hhs/detail/parallel.hpp"

namespace hhs {

int consistency_threshold(const HInstance& h, const Tuple& b) {
    h.check_tuple(b);
    const auto& rel = h.rel;
    int n = h.domain_count();
    int kappa = 0;
    for (int v = 0; v < n; ++v)
        for (int w = 0; w < n; ++w) {
            if (v == w) continue;
            if (v < w && rel.transverse(v, w)) {
                int a = h.space(w).set_distance(b.coords[w], h.rho(v, w));
                if (a == 0) continue;
                int c = h.space(v).set_distance(b.coords[v], h.rho(w, v));
                kappa = std::max(kappa, std::min(a, c));
            }
            if (rel.strictly_nested(v, w)) {
                int a = h.space(w).set_distance(b.coords[w], h.rho(v, w));
                if (a == 0) continue;
                VertexSet img = h.rho_down(w, v, b.coords[w]);
                int c = union_diameter(h.space(v), b.coords[v], img);
                kappa = std::max(kappa, std::min(a, c));
            }
        }
    return kappa;
}

int tuple_deviation(const HInstance& h, const Tuple& b, int x) {
    int m = 0;
    for (int u = 0; u < h.domain_count(); ++u)
        m = std::max(m, h.space(u).set_distance(b.coords[u], h.pi[u][x]));
    return m;
}

namespace {

int brute_realize(const HInstance& h, const Tuple& b, int* out_dev) {
    int best_x = 0, best = 1 << 29;
    for (int x = 0; x < h.total.size(); ++x) {
        int m = 0;
        for (int u = 0; u < h.domain_count() && m < best; ++u)
            m = std::max(m, h.space(u).set_distance(b.coords[u], h.pi[u][x]));
        if (m < best) {
            best = m;
            best_x = x;
        }
    }
    *out_dev = best;
    return best_x;
}

}  // namespace

int check_partial_realization_point(const HInstance& h, const std::vector<DomainId>& family,
                                    const Tuple& b, int x) {
    for (std::size_t i = 0; i < family.size(); ++i)
        for (std::size_t j = i + 1; j < family.size(); ++j)
            if (!h.rel.orthogonal(family[i], family[j]))
                throw std::invalid_argument("partial realization family must be pairwise orthogonal");
    int theta = 0;
    for (DomainId vj : family) {
        theta = std::max(theta, h.space(vj).set_distance(b.coords[vj], h.pi[vj][x]));
        for (int v = 0; v < h.domain_count(); ++v) {
            if (v == vj) continue;
            if (h.rel.strictly_nested(vj, v))
                theta = std::max(theta, h.d_point_set(v, x, h.rho(vj, v)));
            if (h.rel.transverse(vj, v))
                theta = std::max(theta, h.d_point_set(v, x, h.rho(vj, v)));
        }
    }
    return theta;
}

namespace {

// partial realization point for the family: minimal theta, ties broken by
// the smaller overall deviation, then the smaller id
int best_partial_realization_point(const HInstance& h, const std::vector<DomainId>& family,
                                   const Tuple& b) {
    int best_x = -1, best = 1 << 29, best_dev = 1 << 29;
    for (int x = 0; x < h.total.size(); ++x) {
        int t = check_partial_realization_point(h, family, b, x);
        if (t > best) continue;
        int dev = t < best ? tuple_deviation(h, b, x) : tuple_deviation(h, b, x);
        if (t < best || dev < best_dev) {
            best = t;
            best_dev = dev;
            best_x = x;
        }
    }
    return best_x;
}

struct ConstructiveState {
    const HInstance& h;
    const Tuple& b;
    int E, kappa, kappa_exact, alpha;
    long long c0;
    int iterations = 0;
    int budget;

    ConstructiveState(const HInstance& hh, const Tuple& bb) : h(hh), b(bb) {
        E = std::max(1, h.consts.E);
        kappa_exact = consistency_threshold(h, b);
        kappa = std::max(1, kappa_exact);
        alpha = std::max(1, h.consts.alpha);
        // The level induction only needs C large enough that coordinates
        // within C are "coarsely equal"; the instance-scaled 2E+kappa keeps
        // the extension engaged at desk scale (the growth factor below still
        // guarantees termination).
        c0 = 2LL * E + kappa;
        budget = std::max(8, 2 * h.consts.complexity_n * std::max(1, h.domain_count()));
    }

    // worst deviation over W nested in v among sampled x
    long long worst_under(int v, int x) const {
        long long m = 0;
        for (DomainId w : h.rel.nested_in(v))
            m = std::max<long long>(m, h.space(w).set_distance(b.coords[w], h.pi[w][x]));
        return m;
    }

    std::vector<DomainId> claim_single(DomainId v) {
        if (++iterations > budget) throw RealizeBudgetExceeded({v});
        if (h.level(v) == 1) return {v};

        // if every point matching b on C V already matches on everything
        // below V, the family {V} suffices
        bool good = true;
        for (int x = 0; x < h.total.size() && good; ++x) {
            if (h.space(v).set_distance(b.coords[v], h.pi[v][x]) > E) continue;
            if (worst_under(v, x) > c0) good = false;
        }
        if (good) return {v};

        std::vector<DomainId> family;  // totally orthogonal, inside S_V
        const long long c = c0;
        for (;;) {
            if (++iterations > budget) throw RealizeBudgetExceeded(family);
            // a partial realization point witnessing that the family is not
            // yet c-good
            int x0 = -1;
            long long x0_bad = -1;
            for (int x = 0; x < h.total.size(); ++x) {
                if (check_partial_realization_point(h, family, b, x) > E) continue;
                long long w = worst_under(v, x);
                if (w > c && (x0 < 0 || w > x0_bad)) {
                    x0 = x;
                    x0_bad = w;
                }
            }
            if (x0 < 0) break;  // family is c-good

            // maximal large-deviation subdomains (proper, as the level drops)
            std::vector<DomainId> vmax;
            for (DomainId w : h.rel.nested_in(v)) {
                if (w == v) continue;
                if (h.space(w).set_distance(b.coords[w], h.pi[w][x0]) <= c) continue;
                bool dominated = false;
                for (DomainId s : h.rel.nested_in(v)) {
                    if (s == v || s == w || !h.rel.strictly_nested(w, s)) continue;
                    if (h.space(s).set_distance(b.coords[s], h.pi[s][x0]) > c) dominated = true;
                }
                if (!dominated) vmax.push_back(w);
            }
            if (vmax.empty()) break;  // only V itself is off; nothing to extend with

            // keep the ⪯-maximal ones (transverse pairs are comparable); the
            // cutoff is the tuple's own consistency threshold, which keeps the
            // orientation sharp at desk scale
            long long cutoff = kappa_exact;
            auto pre = [&](DomainId a, DomainId bb2) {  // a ⪯ bb2
                if (a == bb2) return true;
                if (!h.rel.transverse(a, bb2)) return false;
                return h.space(a).set_distance(h.rho(bb2, a), b.coords[a]) <= cutoff;
            };
            std::vector<DomainId> vprime;
            for (DomainId a : vmax) {
                bool maximal = true;
                for (DomainId bb2 : vmax)
                    if (a != bb2 && pre(a, bb2) && !pre(bb2, a)) maximal = false;
                if (maximal) vprime.push_back(a);
            }
            // antisymmetry can degrade at the working cutoff, leaving
            // mutually comparable "maximal" elements; keep a pairwise
            // orthogonal subfamily (smallest ids first)
            {
                std::vector<DomainId> filtered;
                for (DomainId a : vprime) {
                    bool ok = true;
                    for (DomainId bb2 : filtered)
                        if (!h.rel.orthogonal(a, bb2)) ok = false;
                    if (ok) filtered.push_back(a);
                }
                vprime = std::move(filtered);
            }

            std::vector<DomainId> extension;
            for (DomainId w : vprime) {
                auto part = claim_single(w);
                extension.insert(extension.end(), part.begin(), part.end());
            }
            // merge, dropping older members that clash with the extension
            std::vector<DomainId> merged = extension;
            for (DomainId old : family) {
                bool ok = true;
                for (DomainId nw : extension)
                    if (old == nw || !h.rel.orthogonal(old, nw)) ok = false;
                if (ok) merged.push_back(old);
            }
            std::sort(merged.begin(), merged.end());
            merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
            if (merged == family) break;  // no progress; accept current family
            family = std::move(merged);
        }
        if (family.empty()) return {v};
        return family;
    }
};

}  // namespace

RealizeResult realize(const HInstance& h, const Tuple& b, RealizeMode mode) {
    h.check_tuple(b);
    RealizeResult res;
    if (mode == RealizeMode::Brute) {
        res.x = brute_realize(h, b, &res.deviation);
        return res;
    }
    if (h.domain_count() == 0) {
        res.x = 0;
        return res;
    }
    ConstructiveState st(h, b);
    res.support = st.claim_single(h.rel.maximal());
    res.iterations = st.iterations;
    res.x = best_partial_realization_point(h, res.support, b);
    res.deviation = tuple_deviation(h, b, res.x);
    // the level induction also admits the trivial family {S}; keep whichever
    // partial realization point approximates the tuple better
    int x_triv = best_partial_realization_point(h, {h.rel.maximal()}, b);
    int dev_triv = tuple_deviation(h, b, x_triv);
    if (dev_triv < res.deviation) {
        res.support = {h.rel.maximal()};
        res.x = x_triv;
        res.deviation = dev_triv;
    }
    return res;
}

Tuple center_tuple(const HInstance& h, int x, int y, int z) {
    Tuple b;
    b.coords.resize(h.domain_count());
    for (int w = 0; w < h.domain_count(); ++w) {
        const MetricGraph& cw = h.space(w);
        int a = h.pi[w][x].front(), c = h.pi[w][y].front(), d = h.pi[w][z].front();
        auto s1 = cw.geodesic_union(a, c);
        auto s2 = cw.geodesic_union(c, d);
        auto s3 = cw.geodesic_union(a, d);
        int best_v = 0, best = 1 << 29;
        for (int v = 0; v < cw.size(); ++v) {
            const auto& row = cw.dist_row(v);
            auto dist_to = [&](const VertexSet& s) {
                int m = 1 << 29;
                for (int u : s) m = std::min(m, row[u]);
                return m;
            };
            int m = std::max({dist_to(s1), dist_to(s2), dist_to(s3)});
            if (m < best) {
                best = m;
                best_v = v;
            }
        }
        b.coords[w] = {best_v};
    }
    return b;
}

RelevancePoset relevance_poset(const HInstance& h, int x, const Tuple& b, int theta, int kappa,
                               RelevanceSelector sel, DomainId u, int ell) {
    h.check_tuple(b);
    int e = std::max(1, h.consts.E);
    int bound = 100 * std::max(kappa, e);
    if (theta < bound)
        throw std::invalid_argument("relevance_poset: theta below 100*max(kappa,E) = " +
                                    std::to_string(bound));

    std::vector<DomainId> rel;
    for (int v = 0; v < h.domain_count(); ++v)
        if (h.space(v).set_distance(h.pi[v][x], b.coords[v]) > theta) rel.push_back(v);

    RelevancePoset out;
    out.theta = theta;
    out.kappa = kappa;
    if (sel == RelevanceSelector::MaxElements) {
        for (DomainId v : rel) {
            bool maximal = true;
            for (DomainId w : rel)
                if (w != v && h.rel.strictly_nested(v, w)) maximal = false;
            if (maximal) out.elements.push_back(v);
        }
    } else {
        if (u < 0) u = h.rel.maximal();
        auto slice = h.level_slice(u, ell);
        for (DomainId v : rel)
            if (std::find(slice.begin(), slice.end(), v) != slice.end())
                out.elements.push_back(v);
    }

    int m = static_cast<int>(out.elements.size());
    out.le.assign(m, std::vector<bool>(m, false));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            DomainId a = out.elements[i], c = out.elements[j];
            if (i == j) {
                out.le[i][j] = true;
                continue;
            }
            if (h.rel.transverse(a, c) &&
                h.space(a).set_distance(h.rho(c, a), b.coords[a]) <= kappa)
                out.le[i][j] = true;
        }

    // dichotomy: comparable or orthogonal
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            if (out.le[i][j] || out.le[j][i]) continue;
            if (!h.rel.orthogonal(out.elements[i], out.elements[j])) {
                out.dichotomy_holds = false;
                out.witnesses.push_back("elements " + std::to_string(out.elements[i]) + "," +
                                        std::to_string(out.elements[j]) +
                                        " neither comparable nor orthogonal");
            }
        }
    return out;
}

ChainColoring chain_coloring(const RelevancePoset& poset) {
    int n = static_cast<int>(poset.elements.size());
    ChainColoring out;
    out.color.assign(n, -1);
    if (n == 0) return out;

    // minimum chain cover via bipartite matching on the strict order
    std::vector<std::vector<int>> succ(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && poset.le[i][j]) succ[i].push_back(j);

    std::vector<int> match_to(n, -1), match_from(n, -1);
    std::function<bool(int, std::vector<bool>&)> try_kuhn = [&](int v, std::vector<bool>& used) {
        for (int to : succ[v]) {
            if (used[to]) continue;
            used[to] = true;
            if (match_to[to] < 0 || try_kuhn(match_to[to], used)) {
                match_to[to] = v;
                match_from[v] = to;
                return true;
            }
        }
        return false;
    };
    for (int v = 0; v < n; ++v) {
        std::vector<bool> used(n, false);
        try_kuhn(v, used);
    }

    // chains: start at elements that are not matched as targets
    int color = 0;
    for (int i = 0; i < n; ++i) {
        if (match_to[i] >= 0) continue;
        int cur = i;
        while (cur >= 0) {
            out.color[cur] = color;
            cur = match_from[cur];
        }
        ++color;
    }
    out.colors = color;
    return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

TupleCorpus generate_tuple_corpus(const HInstance& h, int count, std::uint64_t seed,
                                  int perturb_radius) {
    TupleCorpus corpus;
    corpus.seed = seed;
    std::uint64_t s = seed * 0x9e3779b97f4a7c15ULL + 0x51ULL;
    int nx = h.total.size();
    auto rnd = [&](int m) { return static_cast<int>(splitmix64(s) % static_cast<std::uint64_t>(m)); };
    for (int i = 0; i < count; ++i) {
        int fam = i % 3;
        if (fam == 0) {
            corpus.tuples.push_back(h.point_tuple(rnd(nx)));
        } else if (fam == 1) {
            corpus.tuples.push_back(center_tuple(h, rnd(nx), rnd(nx), rnd(nx)));
        } else {
            Tuple b = h.point_tuple(rnd(nx));
            for (int u = 0; u < h.domain_count(); ++u) {
                const MetricGraph& cu = h.space(u);
                int base = b.coords[u][rnd(static_cast<int>(b.coords[u].size()))];
                // walk at most perturb_radius unit steps
                int cur = base;
                int steps = rnd(perturb_radius + 1);
                for (int t = 0; t < steps; ++t) {
                    const auto& nb = cu.neighbors(cur);
                    if (nb.empty()) break;
                    cur = nb[rnd(static_cast<int>(nb.size()))];
                }
                b.coords[u] = {cur};
            }
            corpus.tuples.push_back(std::move(b));
        }
        corpus.family.push_back(fam);
    }
    return corpus;
}

void measure_theta_e(const HInstance& h, const TupleCorpus& corpus) {
    int n = static_cast<int>(corpus.tuples.size());
    std::vector<int> kappas(n), devs(n);
    detail::parallel_for(n, [&](int i) {
        kappas[i] = consistency_threshold(h, corpus.tuples[i]);
        int dev;
        brute_realize(h, corpus.tuples[i], &dev);
        devs[i] = dev;
    });
    int kmax = 0;
    for (int k : kappas) kmax = std::max(kmax, k);
    std::vector<int> table(kmax + 1, 0);
    for (int i = 0; i < n; ++i) table[kappas[i]] = std::max(table[kappas[i]], devs[i]);
    for (int k = 1; k <= kmax; ++k) table[k] = std::max(table[k], table[k - 1]);
    h.consts.theta_e = table;
    h.consts.corpus_seed = corpus.seed;
}

}  // namespace hhs
