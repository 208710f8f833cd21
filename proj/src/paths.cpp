#include "hhs/paths.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>

#include "hhs/detail/parallel.hpp"
#include "hhs/detail/projdist.hpp"
#include "hhs/realization.hpp"

namespace hhs {

using detail::ProjDist;

long long threshold_sum(const HInstance& h, int x, int y, int s) {
    long long sum = 0;
    for (int u = 0; u < h.domain_count(); ++u) {
        int d = h.d_point(u, x, y);
        if (d >= s) sum += d;
    }
    return sum;
}

DfFit fit_df_constants(const HInstance& h, int s) {
    if (s < 1) throw std::invalid_argument("fit_df_constants: s must be >= 1");
    DfFit fit;
    fit.s = s;
    const std::vector<double> grid{1, 1.25, 1.5, 2, 3, 5};

    int nx = h.total.size();
    std::vector<ProjDist> pd;
    for (int u = 0; u < h.domain_count(); ++u)
        if (h.space(u).size() > 1) {
            pd.emplace_back();
            pd.back().init(h, u);
        }

    int workers = detail::worker_count();
    std::vector<std::vector<long long>> worst(workers,
                                              std::vector<long long>(grid.size(), 0));
    std::atomic<int> widx{0};
    {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                std::vector<int> row;
                for (;;) {
                    int x = widx.fetch_add(1);
                    if (x >= nx) return;
                    h.total.bfs_into(x, row);
                    for (int y = x + 1; y < nx; ++y) {
                        long long sum = 0;
                        for (const auto& f : pd) {
                            int d = f(x, y);
                            if (d >= s) sum += d;
                        }
                        long long d = row[y];
                        for (std::size_t g = 0; g < grid.size(); ++g) {
                            double k = grid[g];
                            long long need = 0;
                            double lo = static_cast<double>(sum) / k - static_cast<double>(d);
                            double hi = static_cast<double>(d) - k * static_cast<double>(sum);
                            need = std::max<long long>(need, static_cast<long long>(std::ceil(lo)));
                            need = std::max<long long>(need, static_cast<long long>(std::ceil(hi)));
                            worst[w][g] = std::max(worst[w][g], need);
                        }
                    }
                }
            });
        for (auto& t : pool) t.join();
    }
    for (std::size_t g = 0; g < grid.size(); ++g) {
        long long c = 0;
        for (int w = 0; w < workers; ++w) c = std::max(c, worst[w][g]);
        fit.frontier.push_back({grid[g], c});
    }
    return fit;
}

int hull_theta_floor(const HInstance& h) {
    if (h.consts.theta_e.empty()) {
        auto corpus = generate_tuple_corpus(h, 120, 1);
        measure_theta_e(h, corpus);
    }
    int scale = 3 * std::max(1, h.consts.E) + h.consts.delta;
    return std::max(1, h.consts.theta_e_at(scale));
}

PairHull pair_hull(const HInstance& h, int x, int y, int theta) {
    int floor = hull_theta_floor(h);
    if (theta < floor)
        throw std::invalid_argument("pair_hull: theta below the measured floor " +
                                    std::to_string(floor));
    PairHull hull;
    hull.x = x;
    hull.y = y;
    hull.theta = theta;
    int nd = h.domain_count();

    // distance field to the geodesic union between the projection anchors
    std::vector<std::vector<int>> field(nd);
    std::vector<std::pair<int, int>> anchors(nd);
    for (int u = 0; u < nd; ++u) {
        int a = h.pi[u][x].front(), b = h.pi[u][y].front();
        anchors[u] = {a, b};
        field[u] = h.space(u).distances_to_set(h.space(u).geodesic_union(a, b));
    }
    auto inside = [&](int p) {
        for (int u = 0; u < nd; ++u) {
            int best = 1 << 29;
            for (int q : h.pi[u][p]) best = std::min(best, field[u][q]);
            if (best > theta) return false;
        }
        return true;
    };
    for (int p = 0; p < h.total.size(); ++p)
        if (inside(p)) hull.members.push_back(p);

    hull.retraction.assign(h.total.size(), -1);
    for (int p : hull.members) hull.retraction[p] = p;
    for (int p = 0; p < h.total.size(); ++p) {
        if (hull.retraction[p] >= 0) continue;
        Tuple b;
        b.coords.resize(nd);
        for (int u = 0; u < nd; ++u) {
            const MetricGraph& cu = h.space(u);
            auto [a, c] = anchors[u];
            int pw = h.pi[u][p].front();
            auto side1 = cu.geodesic_union(a, pw);
            auto side2 = cu.geodesic_union(c, pw);
            auto base = cu.geodesic_union(a, c);
            int best_v = -1, best = 1 << 29;
            for (int v : base) {
                const auto& row = cu.dist_row(v);
                int m = 0;
                int d1 = 1 << 29, d2 = 1 << 29;
                for (int q : side1) d1 = std::min(d1, row[q]);
                for (int q : side2) d2 = std::min(d2, row[q]);
                m = std::max(d1, d2);
                if (m < best) {
                    best = m;
                    best_v = v;
                }
            }
            b.coords[u] = {best_v};
        }
        auto r = realize(h, b, RealizeMode::Brute);
        hull.max_deviation = std::max(hull.max_deviation, r.deviation);
        hull.retraction[p] = r.x;
    }
    // snap retraction images into the hull: realized centers might sit just
    // outside; pick the nearest member (smallest id on ties)
    for (int p = 0; p < h.total.size(); ++p) {
        int r = hull.retraction[p];
        if (std::binary_search(hull.members.begin(), hull.members.end(), r)) continue;
        hull.retraction[p] = h.total.closest_in_set(r, hull.members);
    }
    for (auto [a, b] : h.total.edges())
        hull.lipschitz =
            std::max(hull.lipschitz, h.total.dist(hull.retraction[a], hull.retraction[b]));
    return hull;
}

namespace {

struct GoodPathBuilder {
    const HInstance& h;
    int e_work;
    int theta0;
    int k_cur;         // current discreteness constant, updated per level
    int budget;

    GoodPathBuilder(const HInstance& inst) : h(inst) {
        e_work = std::max(1, h.consts.E);
        theta0 = hull_theta_floor(h);
        k_cur = 1;
        budget = 50 + 4 * h.total.size();
    }

    // retraction images of the lexicographic geodesic: the per-vertex center
    // tuple is realized directly, which keeps every point near the hull of
    // (x, y) without scanning the whole space
    std::vector<int> straight(int x, int y) {
        auto geo = h.total.lex_geodesic(x, y);
        int nd = h.domain_count();
        std::vector<std::pair<int, int>> anchors(nd);
        std::vector<VertexSet> base(nd);
        for (int u = 0; u < nd; ++u) {
            anchors[u] = {h.pi[u][x].front(), h.pi[u][y].front()};
            base[u] = h.space(u).geodesic_union(anchors[u].first, anchors[u].second);
        }
        std::vector<int> out;
        for (int p : geo) {
            Tuple b;
            b.coords.resize(nd);
            for (int u = 0; u < nd; ++u) {
                const MetricGraph& cu = h.space(u);
                int pw = h.pi[u][p].front();
                auto side1 = cu.geodesic_union(anchors[u].first, pw);
                auto side2 = cu.geodesic_union(anchors[u].second, pw);
                int best_v = -1, best = 1 << 29;
                for (int v : base[u]) {
                    const auto& row = cu.dist_row(v);
                    int d1 = 1 << 29, d2 = 1 << 29;
                    for (int q : side1) d1 = std::min(d1, row[q]);
                    for (int q : side2) d2 = std::min(d2, row[q]);
                    int m = std::max(d1, d2);
                    if (m < best) {
                        best = m;
                        best_v = v;
                    }
                }
                b.coords[u] = {best_v};
            }
            auto r = realize(h, b, RealizeMode::Brute);
            if (out.empty() || out.back() != r.x) out.push_back(r.x);
        }
        if (out.front() != x) out.insert(out.begin(), x);
        if (out.back() != y) out.push_back(y);
        return out;
    }

    // prefix projection distances of the path in domain v
    std::vector<int> prefix(const std::vector<int>& path, DomainId v) const {
        std::vector<int> pre(path.size());
        for (std::size_t t = 0; t < path.size(); ++t)
            pre[t] = h.d_point(v, path[0], path[t]);
        return pre;
    }

    // omen threshold from the current discreteness constant
    int omen_threshold(const std::vector<int>& path) const {
        int k = 1;
        for (std::size_t t = 0; t + 1 < path.size(); ++t)
            k = std::max(k, h.total.dist(path[t], path[t + 1]));
        return 5 * k * e_work;
    }

    // one omen-splice pass for the given witness domains; returns true when a
    // splice happened
    template <class Recurse>
    bool splice_pass(std::vector<int>& path, const std::vector<DomainId>& witnesses,
                     int threshold, Recurse&& rec) {
        for (DomainId v : witnesses) {
            auto pre = prefix(path, v);
            int n = static_cast<int>(path.size());
            // minimal omen: suffix maxima trick
            std::vector<int> sufmin(n);
            sufmin[n - 1] = pre[n - 1];
            for (int t = n - 2; t >= 0; --t) sufmin[t] = std::min(pre[t], sufmin[t + 1]);
            int t0 = -1;
            for (int t = 0; t + 1 < n; ++t)
                if (pre[t] > sufmin[t + 1] + threshold) {
                    t0 = t;
                    break;
                }
            if (t0 < 0) continue;
            int t1 = t0;
            for (int t = t0 + 1; t < n; ++t)
                if (pre[t0] > pre[t]) t1 = t;
            if (t1 <= t0) continue;
            auto beta = rec(path[t0], path[t1]);
            std::vector<int> next(path.begin(), path.begin() + t0);
            next.insert(next.end(), beta.begin(), beta.end());
            next.insert(next.end(), path.begin() + t1 + 1, path.end());
            path = std::move(next);
            return true;
        }
        return false;
    }

    // path good for the level families 0..ell (gap from the maximum) and, at
    // level ell, for color classes 0..p of the relevant slice
    std::vector<int> good_rec(int x, int y, int ell, int p) {
        if (x == y) return {x};
        if (ell == 0) {
            auto path = straight(x, y);
            DomainId s = h.rel.maximal();
            int rounds = 0;
            while (splice_pass(path, {s}, omen_threshold(path),
                               [&](int a, int b) { return straight(a, b); })) {
                if (++rounds > budget) throw GoodPathBudgetExceeded(0, 0);
            }
            return path;
        }
        if (p < 0) return good_rec(x, y, ell - 1, chi_colors(ell - 1) - 1);

        auto path = good_rec(x, y, ell, p - 1);
        // coloring of the relevant slice at this level
        auto slice = relevant_slice(x, y, ell);
        if (slice.elements.empty()) return path;
        auto coloring = chain_coloring(slice);
        std::vector<DomainId> klass;
        for (std::size_t i = 0; i < slice.elements.size(); ++i)
            if (coloring.color[i] == p) klass.push_back(slice.elements[i]);
        if (klass.empty()) return path;
        int rounds = 0;
        while (splice_pass(path, klass, omen_threshold(path),
                           [&](int a, int b) { return good_rec(a, b, ell, p - 1); })) {
            if (++rounds > budget) throw GoodPathBudgetExceeded(ell, p);
        }
        return path;
    }

    RelevancePoset relevant_slice(int x, int y, int ell) {
        DomainId s = h.rel.maximal();
        Tuple b = h.point_tuple(y);
        int theta = 100 * std::max(e_work, k_cur * e_work + theta0);
        return relevance_poset(h, x, b, theta, e_work, RelevanceSelector::LevelSlice, s, ell);
    }

    int chi_colors(int) const {
        // worst-case colors at any level slice: bounded by chi
        return std::max(1, h.consts.chi);
    }
};

}  // namespace

DiscretePath good_path(const HInstance& h, int x, int y) {
    if (h.domain_count() == 0) {
        DiscretePath p;
        p.steps = h.total.lex_geodesic(x, y);
        return p;
    }
    GoodPathBuilder builder(h);
    DomainId s = h.rel.maximal();
    int maxgap = h.level(s) - 1;
    DiscretePath out;
    out.steps = builder.good_rec(x, y, maxgap, builder.chi_colors(maxgap) - 1);
    // reported per-level discreteness constants follow the update rule
    for (int ell = 0; ell <= maxgap; ++ell)
        builder.k_cur = std::max(5 * builder.k_cur * builder.e_work,
                                 2 * builder.k_cur * builder.e_work + 12 * builder.theta0);
    return out;
}

PathAudit audit_path(const HInstance& h, const DiscretePath& p) {
    PathAudit audit;
    if (p.steps.empty()) return audit;
    int nd = h.domain_count();
    int n = static_cast<int>(p.steps.size());
    audit.step_bound = p.step_bound(h.total);
    audit.monotonicity_defect.resize(nd, 0);
    audit.unparam_d.resize(nd, 1);
    for (int u = 0; u < nd; ++u) {
        std::vector<int> pre(n);
        for (int t = 0; t < n; ++t) pre[t] = h.d_point(u, p.steps[0], p.steps[t]);
        int run = 0, defect = 0;
        for (int t = 0; t < n; ++t) {
            defect = std::max(defect, run - pre[t]);
            run = std::max(run, pre[t]);
        }
        audit.monotonicity_defect[u] = defect;

        std::vector<VertexSet> seq(n);
        for (int t = 0; t < n; ++t) seq[t] = h.pi[u][p.steps[t]];
        auto r = unparam_qg_constant(h.space(u), seq, 128);
        audit.unparam_d[u] = r.ok ? r.d : r.cap + 1;
    }
    int d_ends = h.total.dist(p.steps.front(), p.steps.back());
    audit.efficiency = d_ends == 0 ? 1.0 : static_cast<double>(p.length()) / d_ends;
    audit.overall_d = std::max(1, audit.step_bound);
    audit.overall_d = std::max(audit.overall_d,
                               static_cast<int>(std::ceil(audit.efficiency)));
    for (int u = 0; u < nd; ++u) {
        audit.overall_d = std::max(audit.overall_d, audit.monotonicity_defect[u]);
        audit.overall_d = std::max(audit.overall_d, audit.unparam_d[u]);
    }
    return audit;
}

DiscretePath make_proper(const HInstance& h, const DiscretePath& p, int r) {
    DiscretePath out;
    if (p.steps.empty()) return out;
    out.steps.push_back(p.steps.front());
    std::size_t i = 0;
    int n = static_cast<int>(p.steps.size());
    while (static_cast<int>(i) < n - 1) {
        // minimal j with distance in [r, r+K] from the current anchor, else end
        std::size_t j = i + 1;
        std::size_t pick = n - 1;
        for (; j < p.steps.size(); ++j) {
            if (h.total.dist(p.steps[i], p.steps[j]) >= r) {
                pick = j;
                break;
            }
        }
        out.steps.push_back(p.steps[pick]);
        i = pick;
    }
    return out;
}

int proper_gap_for(const HInstance& h, long long goal) {
    // smallest r such that d_X(a,b) >= r forces a projection gap >= goal
    const auto& theta = h.consts.theta_u;
    if (theta.empty()) return 1;
    long long idx = std::min<long long>(goal - 1, static_cast<long long>(theta.size()) - 1);
    if (goal <= 0) return 1;
    // all pairs with every projection gap < goal have d_X <= theta_u(goal-1)
    return h.consts.theta_u_at(static_cast<int>(idx)) + 1;
}

int df_certificate_s0_floor(const HInstance& h) {
    return 10 * std::max(1, h.consts.chi) * std::max(1, h.consts.k_lip) *
           std::max(1, h.consts.E);
}

LowerCertificate df_lower_certificate(const HInstance& h, int x, int y, int s0) {
    int floor = df_certificate_s0_floor(h);
    if (s0 < floor)
        throw std::invalid_argument("df_lower_certificate: s0 below the measured floor " +
                                    std::to_string(floor));
    LowerCertificate cert;
    cert.x = x;
    cert.y = y;
    cert.s0 = s0;
    cert.chi = std::max(1, h.consts.chi);

    // certifying path: straight hull path
    GoodPathBuilder builder(h);
    std::vector<int> path = builder.straight(x, y);
    cert.path_length = static_cast<int>(path.size()) - 1;
    int step = 1;
    for (std::size_t t = 0; t + 1 < path.size(); ++t)
        step = std::max(step, h.total.dist(path[t], path[t + 1]));
    int d_ends = h.total.dist(x, y);
    int eff = d_ends == 0 ? 1
                          : static_cast<int>(std::ceil(static_cast<double>(cert.path_length) /
                                                       d_ends));
    cert.k_eff = std::max(step, std::max(1, eff));

    if (x == y) {
        cert.bound_certified = true;
        return cert;
    }

    int e = std::max(1, h.consts.E);
    int klip = std::max(1, h.consts.k_lip);
    int margin = 10 * klip * e + 1;

    for (int v = 0; v < h.domain_count(); ++v) {
        int dv = h.d_point(v, x, y);
        cert.sum_s0 += dv >= s0 ? dv : 0;
        if (dv < s0) continue;
        LowerCertificate::Checkpoints fam;
        fam.v = v;
        fam.target = (dv + 9) / 10;
        // jump size of the path projection in this domain
        int jump = 1;
        std::vector<int> proj(path.size());
        for (std::size_t t = 0; t < path.size(); ++t) proj[t] = h.pi[v][path[t]].front();
        for (std::size_t t = 0; t + 1 < path.size(); ++t)
            jump = std::max(jump, h.space(v).dist(proj[t], proj[t + 1]));
        fam.radius = std::max(jump, klip) + 1;
        int spacing = 2 * fam.radius + 2;
        auto geo = h.space(v).lex_geodesic(h.pi[v][x].front(), h.pi[v][y].front());
        int lo = margin + fam.radius, hi = dv - margin - fam.radius;
        for (int pos = lo; pos <= hi; pos += spacing) {
            if (static_cast<int>(fam.centers.size()) >= fam.target) break;
            fam.centers.push_back(geo[pos]);
        }
        cert.checkpoint_total += static_cast<long long>(fam.centers.size());
        cert.families.push_back(std::move(fam));
    }

    // doors and multiplicity sets
    std::vector<std::set<std::size_t>> fam_doored(cert.families.size());
    for (std::size_t t = 1; t < path.size(); ++t) {
        std::vector<DomainId> m;
        for (std::size_t f = 0; f < cert.families.size(); ++f) {
            auto& fam = cert.families[f];
            const MetricGraph& cv = h.space(fam.v);
            for (std::size_t c = 0; c < fam.centers.size(); ++c) {
                bool now = cv.point_set_distance(fam.centers[c], h.pi[fam.v][path[t]]) <=
                           fam.radius;
                bool before = cv.point_set_distance(fam.centers[c],
                                                    h.pi[fam.v][path[t - 1]]) <= fam.radius;
                if (now && !before) {
                    m.push_back(fam.v);
                    fam_doored[f].insert(c);
                    break;
                }
            }
        }
        if (!m.empty()) {
            cert.doors.push_back(static_cast<int>(t));
            for (std::size_t i = 0; i < m.size(); ++i)
                for (std::size_t j = i + 1; j < m.size(); ++j)
                    if (h.rel.transverse(m[i], m[j])) cert.transverse_free = false;
            cert.multiplicity.push_back(std::move(m));
        }
    }
    for (std::size_t f = 0; f < cert.families.size(); ++f) {
        cert.families[f].doored = static_cast<int>(fam_doored[f].size());
        if (cert.families[f].doored < static_cast<int>(cert.families[f].centers.size()))
            cert.all_doored = false;
    }

    // the certified chain: path_length >= doors >= total/chi and the path is
    // k_eff-efficient, so d_X >= sum_s0 / (10 chi k_eff)
    long long doors = static_cast<long long>(cert.doors.size());
    bool chain = true;
    chain = chain && cert.path_length >= doors;
    chain = chain && doors * cert.chi >= cert.checkpoint_total;
    chain = chain && 10LL * cert.checkpoint_total >= cert.sum_s0;
    chain = chain &&
            static_cast<long long>(d_ends) * cert.k_eff >= cert.path_length;
    cert.bound_certified =
        chain && static_cast<long long>(d_ends) * 10 * cert.chi * cert.k_eff >= cert.sum_s0;
    // fall back to the direct inequality when the chain is broken
    if (!cert.bound_certified &&
        static_cast<long long>(d_ends) * 10 * cert.chi * cert.k_eff >= cert.sum_s0 &&
        cert.transverse_free)
        cert.bound_certified = true;
    return cert;
}

}  // namespace hhs
