#include "hhs/convexity.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "hhs/paths.hpp"

namespace hhs {

namespace {

VertexSet projection_image(const HInstance& h, DomainId u, const VertexSet& y) {
    std::set<int> acc;
    for (int v : y) acc.insert(h.pi[u][v].begin(), h.pi[u][v].end());
    return VertexSet(acc.begin(), acc.end());
}

std::uint64_t splitmix64(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

HqProfile hq_profile(const HInstance& h, const VertexSet& y) {
    if (y.empty()) throw std::invalid_argument("hq_profile: empty subset");
    HqProfile out;
    int nd = h.domain_count();
    std::vector<std::vector<int>> field(nd);  // distance to pi_U(Y) in C U
    for (int u = 0; u < nd; ++u) {
        auto img = projection_image(h, u, y);
        auto q = h.space(u).quasiconvexity_constant(img);
        out.k0 = std::max(out.k0, q.q);
        out.approximated = out.approximated || q.approximated;
        field[u] = h.space(u).distances_to_set(img);
    }
    auto dy = h.total.distances_to_set(y);
    int kmax = 0;
    std::vector<std::pair<int, int>> mx(h.total.size());  // (max proj gap, d_X)
    for (int x = 0; x < h.total.size(); ++x) {
        int m = 0;
        for (int u = 0; u < nd; ++u) {
            int best = 1 << 29;
            for (int q : h.pi[u][x]) best = std::min(best, field[u][q]);
            m = std::max(m, best);
        }
        mx[x] = {m, dy[x]};
        kmax = std::max(kmax, m);
    }
    out.k.assign(kmax + 1, 0);
    for (auto [m, d] : mx) out.k[m] = std::max(out.k[m], d);
    for (int k = 1; k <= kmax; ++k) out.k[k] = std::max(out.k[k], out.k[k - 1]);
    return out;
}

GateMap gate_map(const HInstance& h, const VertexSet& y) {
    if (y.empty()) throw std::invalid_argument("gate_map: empty subset");
    GateMap out;
    out.target = y;
    int nd = h.domain_count();
    std::vector<VertexSet> img(nd);
    std::vector<std::vector<int>> field(nd);
    for (int u = 0; u < nd; ++u) {
        img[u] = projection_image(h, u, y);
        field[u] = h.space(u).distances_to_set(img[u]);
    }
    out.gate.assign(h.total.size(), -1);
    for (int x = 0; x < h.total.size(); ++x) {
        if (std::binary_search(y.begin(), y.end(), x)) {
            out.gate[x] = x;
            continue;
        }
        Tuple b;
        b.coords.resize(nd);
        for (int u = 0; u < nd; ++u) {
            // closest points of the projected set to pi_U(x)
            const MetricGraph& cu = h.space(u);
            int best = 1 << 29;
            for (int p : img[u]) best = std::min(best, cu.point_set_distance(p, h.pi[u][x]));
            VertexSet nearest;
            for (int p : img[u])
                if (cu.point_set_distance(p, h.pi[u][x]) == best) nearest.push_back(p);
            b.coords[u] = nearest;
        }
        auto r = realize(h, b, RealizeMode::Brute);
        int snapped = h.total.closest_in_set(r.x, y);
        out.snap_max = std::max(out.snap_max, h.total.dist(r.x, snapped));
        out.gate[x] = snapped;
    }
    for (auto [a, b] : h.total.edges())
        out.lipschitz = std::max(out.lipschitz, h.total.dist(out.gate[a], out.gate[b]));
    return out;
}

int gate(const HInstance& h, const VertexSet& y, int x) {
    if (y.empty()) throw std::invalid_argument("gate: empty subset");
    if (std::binary_search(y.begin(), y.end(), x)) return x;
    int nd = h.domain_count();
    Tuple b;
    b.coords.resize(nd);
    for (int u = 0; u < nd; ++u) {
        auto img = projection_image(h, u, y);
        const MetricGraph& cu = h.space(u);
        int best = 1 << 29;
        for (int p : img) best = std::min(best, cu.point_set_distance(p, h.pi[u][x]));
        VertexSet nearest;
        for (int p : img)
            if (cu.point_set_distance(p, h.pi[u][x]) == best) nearest.push_back(p);
        b.coords[u] = nearest;
    }
    auto r = realize(h, b, RealizeMode::Brute);
    return h.total.closest_in_set(r.x, y);
}

HInstance substructure(const HInstance& h, const VertexSet& y_in) {
    if (y_in.empty()) throw std::invalid_argument("substructure: empty subset");
    VertexSet y = y_in;
    std::sort(y.begin(), y.end());
    y.erase(std::unique(y.begin(), y.end()), y.end());
    auto profile = hq_profile(h, y);
    int repair_bound = std::max(profile.at(profile.k.empty() ? 0 : static_cast<int>(profile.k.size()) - 1),
                                profile.k0) + 1;

    // re-connect along lexicographic geodesics between nearest components
    for (;;) {
        // split into components of the induced graph
        std::map<int, int> pos;
        for (std::size_t i = 0; i < y.size(); ++i) pos[y[i]] = static_cast<int>(i);
        std::vector<int> comp(y.size(), -1);
        int ncomp = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (comp[i] >= 0) continue;
            std::vector<int> stack{static_cast<int>(i)};
            comp[i] = ncomp;
            while (!stack.empty()) {
                int c = stack.back();
                stack.pop_back();
                for (int nb : h.total.neighbors(y[c]))
                    if (pos.count(nb) && comp[pos[nb]] < 0) {
                        comp[pos[nb]] = ncomp;
                        stack.push_back(pos[nb]);
                    }
            }
            ++ncomp;
        }
        if (ncomp == 1) break;
        // closest pair across the first component boundary
        int best_a = -1, best_b = -1, best_d = 1 << 29;
        for (std::size_t i = 0; i < y.size(); ++i)
            for (std::size_t j = 0; j < y.size(); ++j) {
                if (comp[i] == comp[j]) continue;
                int d = h.total.dist(y[i], y[j]);
                if (d < best_d) {
                    best_d = d;
                    best_a = y[i];
                    best_b = y[j];
                }
            }
        auto geo = h.total.lex_geodesic(best_a, best_b);
        auto dy = h.total.distances_to_set(y);
        for (int v : geo) {
            if (dy[v] > repair_bound)
                throw std::invalid_argument(
                    "substructure: subset not repairable within its k-profile");
            y.push_back(v);
        }
        std::sort(y.begin(), y.end());
        y.erase(std::unique(y.begin(), y.end()), y.end());
    }

    // induced graph, reindexed
    std::map<int, int> idx;
    for (std::size_t i = 0; i < y.size(); ++i) idx[y[i]] = static_cast<int>(i);
    std::vector<std::pair<int, int>> edges;
    for (auto [a, b] : h.total.edges())
        if (idx.count(a) && idx.count(b)) edges.push_back({idx[a], idx[b]});

    RawInstance raw;
    raw.total = MetricGraph::from_edges(static_cast<int>(y.size()), edges);
    int nd = h.domain_count();
    for (int u = 0; u < nd; ++u)
        raw.domains.push_back({h.domains[u].external_id, h.domains[u].name, h.space(u),
                               h.domains[u].hyperbolic});
    raw.maximal = h.domains[h.rel.maximal()].external_id;
    auto ext = [&](int u) { return h.domains[u].external_id; };
    for (int u = 0; u < nd; ++u)
        for (int v = 0; v < nd; ++v) {
            if (u != v && h.rel.rel(u, v) == Rel::NestedIn) raw.nesting.push_back({ext(u), ext(v)});
            if (u < v && h.rel.orthogonal(u, v)) raw.orthogonality.push_back({ext(u), ext(v)});
        }
    for (auto& [key, w] : h.rel.container)
        raw.containers.push_back({ext(key.first), ext(key.second), ext(w)});

    // retractions onto the projected subset
    std::vector<VertexSet> img(nd);
    for (int u = 0; u < nd; ++u) img[u] = projection_image(h, u, y);
    auto retract = [&](DomainId u, const VertexSet& s) {
        const MetricGraph& cu = h.space(u);
        std::set<int> acc;
        for (int p : s) {
            int best = 1 << 29;
            for (int q : img[u]) best = std::min(best, cu.dist(p, q));
            for (int q : img[u])
                if (cu.dist(p, q) == best) acc.insert(q);
        }
        return VertexSet(acc.begin(), acc.end());
    };

    for (int u = 0; u < nd; ++u) {
        std::vector<VertexSet> table(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) table[i] = retract(u, h.pi[u][y[i]]);
        raw.pi[ext(u)] = std::move(table);
    }
    for (auto& [key, s] : h.rho_set)
        raw.rho_set.push_back({ext(key.first), ext(key.second), retract(key.second, s)});
    for (auto& [key, m] : h.rho_map) {
        std::vector<VertexSet> table(m.size());
        for (std::size_t p = 0; p < m.size(); ++p) table[p] = retract(key.second, m[p]);
        raw.rho_map.push_back({ext(key.first), ext(key.second), std::move(table)});
    }

    auto res = validate_instance(raw);
    if (!res.ok()) {
        std::string msg = "substructure produced invalid instance:";
        for (auto& e : res.errors) msg += " " + e;
        throw std::logic_error(msg);
    }
    return std::move(*res.instance);
}

ProductRegion product_region(const HInstance& h, DomainId u) {
    if (u < 0 || u >= h.domain_count()) throw std::invalid_argument("product_region: unknown id");
    ProductRegion out;
    out.base = u;
    auto nested = h.rel.nested_in(u);
    auto orth = h.rel.orthogonal_to(u);
    int nd = h.domain_count();

    // deduped nested / orthogonal profiles over the total space
    std::set<std::vector<VertexSet>> fset, eset;
    for (int x = 0; x < h.total.size(); ++x) {
        std::vector<VertexSet> f, e;
        for (DomainId v : nested) f.push_back(h.pi[v][x]);
        for (DomainId v : orth) e.push_back(h.pi[v][x]);
        fset.insert(f);
        eset.insert(e);
    }
    std::vector<std::vector<VertexSet>> fs(fset.begin(), fset.end());
    std::vector<std::vector<VertexSet>> es(eset.begin(), eset.end());

    auto combined = [&](const std::vector<VertexSet>& f, const std::vector<VertexSet>& e) {
        Tuple b;
        b.coords.resize(nd);
        for (std::size_t i = 0; i < nested.size(); ++i) b.coords[nested[i]] = f[i];
        for (std::size_t i = 0; i < orth.size(); ++i) b.coords[orth[i]] = e[i];
        for (int v = 0; v < nd; ++v) {
            if (!b.coords[v].empty()) continue;
            b.coords[v] = h.rho(u, v);  // U properly nested in V or transverse
        }
        return b;
    };

    std::set<int> pset, fpts, epts;
    const std::size_t cap = 40000;
    std::size_t combos = fs.size() * es.size();
    std::size_t stride = combos > cap ? combos / cap + 1 : 1;
    std::size_t count = 0;
    for (const auto& f : fs)
        for (const auto& e : es) {
            if (count++ % stride) continue;
            auto r = realize(h, combined(f, e), RealizeMode::Brute);
            pset.insert(r.x);
        }
    for (const auto& f : fs) pset.insert(realize(h, combined(f, es.front()), RealizeMode::Brute).x);
    for (const auto& f : fs) fpts.insert(realize(h, combined(f, es.front()), RealizeMode::Brute).x);
    for (const auto& e : es) epts.insert(realize(h, combined(fs.front(), e), RealizeMode::Brute).x);
    out.p_u = VertexSet(pset.begin(), pset.end());
    out.f_points = VertexSet(fpts.begin(), fpts.end());
    out.e_points = VertexSet(epts.begin(), epts.end());

    // gate per the coordinate recipe: keep nested and orthogonal coordinates,
    // rho elsewhere
    out.gate.assign(h.total.size(), -1);
    for (int x = 0; x < h.total.size(); ++x) {
        Tuple b;
        b.coords.resize(nd);
        for (DomainId v : nested) b.coords[v] = h.pi[v][x];
        for (DomainId v : orth) b.coords[v] = h.pi[v][x];
        for (int v = 0; v < nd; ++v)
            if (b.coords[v].empty()) b.coords[v] = h.rho(u, v);
        auto r = realize(h, b, RealizeMode::Brute);
        out.gate[x] = h.total.closest_in_set(r.x, out.p_u);
    }
    return out;
}

FiniteHull finite_hull(const HInstance& h, const VertexSet& a, int theta) {
    if (a.empty() || a.size() > 6)
        throw std::invalid_argument("finite_hull: set must have 1..6 points");
    int floor = hull_theta_floor(h);
    if (theta < floor)
        throw std::invalid_argument("finite_hull: theta below the measured floor " +
                                    std::to_string(floor));
    FiniteHull out;
    out.theta = theta;
    int nd = h.domain_count();
    std::vector<std::vector<int>> field(nd);
    for (int u = 0; u < nd; ++u) {
        auto s = projection_image(h, u, a);
        // union of all geodesics between pairs of projected points
        std::set<int> hull;
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = i; j < s.size(); ++j) {
                auto uni = h.space(u).geodesic_union(s[i], s[j]);
                hull.insert(uni.begin(), uni.end());
            }
        field[u] = h.space(u).distances_to_set(VertexSet(hull.begin(), hull.end()));
    }
    for (int p = 0; p < h.total.size(); ++p) {
        bool in = true;
        for (int u = 0; u < nd && in; ++u) {
            int best = 1 << 29;
            for (int q : h.pi[u][p]) best = std::min(best, field[u][q]);
            if (best > theta) in = false;
        }
        if (in) out.members.push_back(p);
    }
    auto gm = gate_map(h, out.members);
    out.retraction = std::move(gm.gate);
    for (int p : out.members) out.retraction[p] = p;
    return out;
}

MedianResult coarse_median(const HInstance& h, int x, int y, int z) {
    MedianResult res;
    if (x == y) {  // degenerate medians snap to the repeated point
        res.m = x;
        return res;
    }
    auto b = center_tuple(h, x, y, z);
    res.center_consistency = consistency_threshold(h, b);
    auto r = realize(h, b, RealizeMode::Brute);
    res.m = r.x;
    res.deviation = r.deviation;
    return res;
}

std::pair<int, long long> measure_triples(const HInstance& h, int samples, std::uint64_t seed) {
    std::uint64_t s = seed * 0x9e3779b97f4a7c15ULL + 0x7eULL;
    int nx = h.total.size();
    auto rnd = [&](int m) { return static_cast<int>(splitmix64(s) % static_cast<std::uint64_t>(m)); };
    // deterministic nearby perturbation
    auto perturb = [&](int v, int radius) {
        int cur = v;
        int steps = rnd(radius + 1);
        for (int t = 0; t < steps; ++t) {
            const auto& nb = h.total.neighbors(cur);
            cur = nb[rnd(static_cast<int>(nb.size()))];
        }
        return cur;
    };
    std::vector<long long> lhs, delta;
    for (int i = 0; i < samples; ++i) {
        int a = rnd(nx), b = rnd(nx), c = rnd(nx);
        int a2 = perturb(a, 3), b2 = perturb(b, 3), c2 = perturb(c, 3);
        auto m1 = coarse_median(h, a, b, c);
        auto m2 = coarse_median(h, a2, b2, c2);
        lhs.push_back(h.total.dist(m1.m, m2.m));
        delta.push_back(h.total.dist(a, a2) + h.total.dist(b, b2) + h.total.dist(c, c2));
    }
    auto h0_for = [&](int kappa) {
        long long worst = 0;
        for (std::size_t i = 0; i < lhs.size(); ++i)
            worst = std::max(worst, lhs[i] - kappa * delta[i]);
        return std::max<long long>(worst, 0);
    };
    long long floor_h0 = h0_for(8);
    for (int kappa = 1; kappa <= 8; ++kappa)
        if (h0_for(kappa) == floor_h0) return {kappa, floor_h0};
    return {8, floor_h0};
}

int measure_mu_convexity(const HInstance& h, const VertexSet& y, int samples,
                         std::uint64_t seed) {
    std::uint64_t s = seed * 0x9e3779b97f4a7c15ULL + 0xabULL;
    auto rnd = [&](int m) { return static_cast<int>(splitmix64(s) % static_cast<std::uint64_t>(m)); };
    auto dy = h.total.distances_to_set(y);
    int mu = 0;
    for (int i = 0; i < samples; ++i) {
        int a = y[rnd(static_cast<int>(y.size()))];
        int b = y[rnd(static_cast<int>(y.size()))];
        int x = rnd(h.total.size());
        auto m = coarse_median(h, a, b, x);
        mu = std::max(mu, dy[m.m]);
    }
    return mu;
}

RelativeHull relative_hull(const HInstance& h, int x, int y, int theta) {
    if (h.hhs_mode())
        throw std::invalid_argument(
            "relative_hull: instance must be in relatively-hierarchically-hyperbolic mode");
    if (x < 0 || y < 0 || x >= h.total.size() || y >= h.total.size())
        throw std::invalid_argument("relative_hull: vertex out of range");
    int floor = hull_theta_floor(h);
    if (theta < floor)
        throw std::invalid_argument("relative_hull: theta below the measured floor " +
                                    std::to_string(floor));
    RelativeHull out;
    out.theta = theta;
    int nd = h.domain_count();

    // fixed geodesics and retractions
    std::vector<std::vector<int>> gamma(nd);       // vertex sequence
    std::vector<std::vector<int>> to_pos(nd);      // C U vertex -> position on gamma
    for (int u = 0; u < nd; ++u) {
        int a = h.pi[u][x].front(), b = h.pi[u][y].front();
        gamma[u] = h.space(u).lex_geodesic(a, b);
        const MetricGraph& cu = h.space(u);
        to_pos[u].assign(cu.size(), 0);
        if (h.domains[u].hyperbolic) {
            // closest-point projection, earliest position on ties
            for (int p = 0; p < cu.size(); ++p) {
                const auto& row = cu.dist_row(p);
                int best = 1 << 29, pos = 0;
                for (std::size_t t = 0; t < gamma[u].size(); ++t)
                    if (row[gamma[u][t]] < best) {
                        best = row[gamma[u][t]];
                        pos = static_cast<int>(t);
                    }
                to_pos[u][p] = pos;
            }
        } else {
            // arclength cutoff from the x-end
            const auto& row = cu.dist_row(a);
            int len = static_cast<int>(gamma[u].size()) - 1;
            for (int p = 0; p < cu.size(); ++p) to_pos[u][p] = std::min(row[p], len);
        }
    }

    // membership
    std::vector<std::vector<int>> gfield(nd);
    for (int u = 0; u < nd; ++u) {
        VertexSet g(gamma[u].begin(), gamma[u].end());
        std::sort(g.begin(), g.end());
        g.erase(std::unique(g.begin(), g.end()), g.end());
        gfield[u] = h.space(u).distances_to_set(g);
    }
    for (int p = 0; p < h.total.size(); ++p) {
        bool in = true;
        for (int u = 0; u < nd && in; ++u) {
            int best = 1 << 29;
            for (int q : h.pi[u][p]) best = std::min(best, gfield[u][q]);
            if (best > theta) in = false;
        }
        if (in) out.members.push_back(p);
    }

    // induced graph restricted to the component of x
    std::map<int, int> idx;
    for (std::size_t i = 0; i < out.members.size(); ++i) idx[out.members[i]] = static_cast<int>(i);
    {
        std::vector<int> comp(out.members.size(), -1);
        std::vector<int> stack{idx.at(x)};
        comp[idx.at(x)] = 0;
        while (!stack.empty()) {
            int c = stack.back();
            stack.pop_back();
            for (int nb : h.total.neighbors(out.members[c]))
                if (idx.count(nb) && comp[idx[nb]] < 0) {
                    comp[idx[nb]] = 0;
                    stack.push_back(idx[nb]);
                }
        }
        if (!idx.count(y) || comp[idx.at(y)] != 0)
            throw std::invalid_argument("relative_hull: hull disconnects the endpoints");
        VertexSet kept;
        for (std::size_t i = 0; i < out.members.size(); ++i)
            if (comp[i] == 0) kept.push_back(out.members[i]);
        out.members = std::move(kept);
        idx.clear();
        for (std::size_t i = 0; i < out.members.size(); ++i)
            idx[out.members[i]] = static_cast<int>(i);
    }

    std::vector<std::pair<int, int>> edges;
    for (auto [a, b] : h.total.edges())
        if (idx.count(a) && idx.count(b)) edges.push_back({idx[a], idx[b]});

    RawInstance raw;
    raw.total = MetricGraph::from_edges(static_cast<int>(out.members.size()), edges);
    auto ext = [&](int u) { return h.domains[u].external_id; };
    for (int u = 0; u < nd; ++u)
        raw.domains.push_back({ext(u), h.domains[u].name,
                               MetricGraph::path(static_cast<int>(gamma[u].size())), true});
    raw.maximal = ext(h.rel.maximal());
    for (int u = 0; u < nd; ++u)
        for (int v = 0; v < nd; ++v) {
            if (u != v && h.rel.rel(u, v) == Rel::NestedIn) raw.nesting.push_back({ext(u), ext(v)});
            if (u < v && h.rel.orthogonal(u, v)) raw.orthogonality.push_back({ext(u), ext(v)});
        }
    for (auto& [key, w] : h.rel.container)
        raw.containers.push_back({ext(key.first), ext(key.second), ext(w)});

    auto positions = [&](DomainId u, const VertexSet& s) {
        std::set<int> acc;
        for (int p : s) acc.insert(to_pos[u][p]);
        return VertexSet(acc.begin(), acc.end());
    };
    for (int u = 0; u < nd; ++u) {
        std::vector<VertexSet> table(out.members.size());
        for (std::size_t i = 0; i < out.members.size(); ++i)
            table[i] = positions(u, h.pi[u][out.members[i]]);
        raw.pi[ext(u)] = std::move(table);
    }
    for (auto& [key, s] : h.rho_set)
        raw.rho_set.push_back({ext(key.first), ext(key.second), positions(key.second, s)});
    for (auto& [key, m] : h.rho_map) {
        // reindex the downward map along gamma of the outer domain
        DomainId w = key.first, v = key.second;
        std::vector<VertexSet> table(gamma[w].size());
        for (std::size_t t = 0; t < gamma[w].size(); ++t)
            table[t] = positions(v, m[gamma[w][t]]);
        raw.rho_map.push_back({ext(w), ext(v), std::move(table)});
    }

    auto res = validate_instance(raw);
    if (!res.ok()) {
        std::string msg = "relative_hull produced invalid instance:";
        for (auto& e : res.errors) msg += " " + e;
        throw std::logic_error(msg);
    }
    out.instance = std::move(*res.instance);

    // gate: realize the cutoff tuple inside the hull instance
    out.gate.assign(h.total.size(), -1);
    for (int p = 0; p < h.total.size(); ++p) {
        if (idx.count(p)) {
            out.gate[p] = p;
            continue;
        }
        Tuple t;
        t.coords.resize(nd);
        for (int u = 0; u < nd; ++u) t.coords[u] = positions(u, h.pi[u][p]);
        auto r = realize(out.instance, t, RealizeMode::Brute);
        out.gate[p] = out.members[r.x];
    }
    return out;
}

}  // namespace hhs
