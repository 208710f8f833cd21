#include "hhs/constructions.hpp"

#include "hhs/convexity.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace hhs {

namespace {

HInstance must_validate(RawInstance raw, const char* what) {
    auto res = validate_instance(raw);
    if (!res.ok()) {
        std::string msg = std::string(what) + " produced invalid instance:";
        for (const auto& e : res.errors) msg += " " + e;
        throw std::logic_error(msg);
    }
    return std::move(*res.instance);
}

}  // namespace

HInstance build_complexity_one(const MetricGraph& g, const std::string& name) {
    RawInstance raw;
    raw.total = g;
    raw.domains.push_back({0, name, g, true});
    raw.maximal = 0;
    std::vector<VertexSet> id(g.size());
    for (int v = 0; v < g.size(); ++v) id[v] = {v};
    raw.pi[0] = id;
    return must_validate(std::move(raw), "build_complexity_one");
}

HInstance normalize(const HInstance& h) {
    RawInstance raw;
    raw.total = h.total;
    int nd = h.domain_count();
    std::vector<std::vector<int>> keep(nd);   // kept vertices, sorted
    std::vector<std::vector<int>> remap(nd);  // old -> new (-1 dropped)
    int removed_total = 0;
    for (int u = 0; u < nd; ++u) {
        std::set<int> img;
        for (int x = 0; x < h.total.size(); ++x)
            img.insert(h.pi[u][x].begin(), h.pi[u][x].end());
        // grow a thickening radius until the induced restriction is connected
        const MetricGraph& cu = h.space(u);
        auto field = cu.distances_to_set(VertexSet(img.begin(), img.end()));
        for (int r = 0;; ++r) {
            std::vector<int> kept;
            for (int v = 0; v < cu.size(); ++v)
                if (field[v] <= r) kept.push_back(v);
            std::map<int, int> pos;
            for (std::size_t i = 0; i < kept.size(); ++i) pos[kept[i]] = static_cast<int>(i);
            std::vector<std::pair<int, int>> edges;
            for (auto [a, b] : cu.edges())
                if (pos.count(a) && pos.count(b)) edges.push_back({pos[a], pos[b]});
            try {
                MetricGraph g = MetricGraph::from_edges(static_cast<int>(kept.size()), edges);
                keep[u] = kept;
                remap[u].assign(cu.size(), -1);
                for (std::size_t i = 0; i < kept.size(); ++i)
                    remap[u][kept[i]] = static_cast<int>(i);
                raw.domains.push_back({h.domains[u].external_id, h.domains[u].name, std::move(g),
                                       h.domains[u].hyperbolic});
                removed_total += cu.size() - static_cast<int>(kept.size());
                break;
            } catch (const StructuralError&) {
                continue;  // thicken further
            }
        }
    }
    auto ext = [&](int u) { return h.domains[u].external_id; };
    raw.maximal = nd ? ext(h.rel.maximal()) : -1;
    for (int u = 0; u < nd; ++u)
        for (int v = 0; v < nd; ++v) {
            if (u != v && h.rel.rel(u, v) == Rel::NestedIn) raw.nesting.push_back({ext(u), ext(v)});
            if (u < v && h.rel.orthogonal(u, v)) raw.orthogonality.push_back({ext(u), ext(v)});
        }
    for (auto& [key, w] : h.rel.container)
        raw.containers.push_back({ext(key.first), ext(key.second), ext(w)});
    auto rewrite = [&](DomainId u, const VertexSet& s) {
        std::set<int> acc;
        for (int p : s) {
            if (remap[u][p] >= 0) {
                acc.insert(remap[u][p]);
            } else {  // snap dropped values to the nearest kept vertex
                const auto& row = h.space(u).dist_row(p);
                int best = 1 << 29, pick = 0;
                for (int q : keep[u])
                    if (row[q] < best) {
                        best = row[q];
                        pick = remap[u][q];
                    }
                acc.insert(pick);
            }
        }
        return VertexSet(acc.begin(), acc.end());
    };
    for (int u = 0; u < nd; ++u) {
        std::vector<VertexSet> table(h.total.size());
        for (int x = 0; x < h.total.size(); ++x) table[x] = rewrite(u, h.pi[u][x]);
        raw.pi[ext(u)] = std::move(table);
    }
    for (auto& [key, s] : h.rho_set)
        raw.rho_set.push_back({ext(key.first), ext(key.second), rewrite(key.second, s)});
    for (auto& [key, m] : h.rho_map) {
        std::vector<VertexSet> table;
        for (int p : keep[key.first]) table.push_back(rewrite(key.second, m[p]));
        raw.rho_map.push_back({ext(key.first), ext(key.second), std::move(table)});
    }
    auto out = must_validate(std::move(raw), "normalize");
    out.consts.notes.push_back("normalize removed " + std::to_string(removed_total) +
                               " unreachable domain vertices");
    return out;
}

HInstance build_product(const HInstance& h0, const HInstance& h1) {
    const int n0 = h0.domain_count(), n1 = h1.domain_count();
    const int nx1 = h1.total.size();
    RawInstance raw;
    raw.total = MetricGraph::product(h0.total, h1.total);

    // external ids: factor0 domains, factor1 domains, S, U0, U1, V_U per
    // factor domain
    const int S = n0 + n1, U0 = S + 1, U1 = S + 2;
    auto VU = [&](int ext) { return S + 3 + ext; };
    const int ndom = 2 * (n0 + n1) + 3;
    auto point = MetricGraph::single_vertex();

    for (int u = 0; u < n0; ++u)
        raw.domains.push_back(
            {u, "L." + h0.domains[u].name, h0.space(u), h0.domains[u].hyperbolic});
    for (int u = 0; u < n1; ++u)
        raw.domains.push_back(
            {n0 + u, "R." + h1.domains[u].name, h1.space(u), h1.domains[u].hyperbolic});
    raw.domains.push_back({S, "S", point, true});
    raw.domains.push_back({U0, "U0", point, true});
    raw.domains.push_back({U1, "U1", point, true});
    for (int u = 0; u < n0 + n1; ++u)
        raw.domains.push_back({VU(u), "V." + raw.domains[u].name, point, true});
    raw.maximal = S;

    auto side = [&](int ext) { return ext < n0 ? 0 : (ext < n0 + n1 ? 1 : -1); };
    auto local = [&](int ext) { return ext < n0 ? ext : ext - n0; };
    auto lrel = [&](int a, int b) {
        const Relations& r = side(a) == 0 ? h0.rel : h1.rel;
        return r.rel(local(a), local(b));
    };
    auto is_old = [&](int e) { return e < n0 + n1; };

    // full relation table for the product lattice
    auto rel_of = [&](int a, int b) -> Rel {
        if (a == b) return Rel::Same;
        auto nested_new = [&](int x, int y) -> bool {  // x properly nested in y
            if (y == S && x != S) return true;
            if (!is_old(x)) return false;
            if (y == (side(x) == 0 ? U0 : U1)) return true;
            if (y >= S + 3) {
                int u = y - (S + 3);
                if (side(x) != side(u)) return true;
                if (x != u && lrel(x, u) == Rel::Orthogonal) return true;
                return false;
            }
            if (is_old(y) && side(x) == side(y)) return lrel(x, y) == Rel::NestedIn;
            return false;
        };
        if (nested_new(a, b)) return Rel::NestedIn;
        if (nested_new(b, a)) return Rel::Contains;
        if (is_old(a) && is_old(b)) {
            if (side(a) != side(b)) return Rel::Orthogonal;
            return lrel(a, b);
        }
        if ((a == U0 && b == U1) || (a == U1 && b == U0)) return Rel::Orthogonal;
        if (is_old(a) && (b == U0 || b == U1) && side(a) != (b == U0 ? 0 : 1))
            return Rel::Orthogonal;
        if (is_old(b) && (a == U0 || a == U1) && side(b) != (a == U0 ? 0 : 1))
            return Rel::Orthogonal;
        return Rel::Transverse;
    };

    for (int a = 0; a < ndom; ++a)
        for (int b = 0; b < ndom; ++b) {
            if (a == b) continue;
            Rel r = rel_of(a, b);
            if (r == Rel::NestedIn) raw.nesting.push_back({a, b});
            if (r == Rel::Orthogonal && a < b) raw.orthogonality.push_back({a, b});
        }

    // containers
    for (int a = 0; a < n0 + n1; ++a) {
        bool local_partner = false;
        for (int b = 0; b < n0 + n1; ++b)
            if (side(a) == side(b) && a != b && lrel(a, b) == Rel::Orthogonal)
                local_partner = true;
        raw.containers.push_back({S, a, local_partner ? VU(a) : (side(a) == 0 ? U1 : U0)});
    }
    raw.containers.push_back({S, U0, U1});
    raw.containers.push_back({S, U1, U0});
    for (int sidei = 0; sidei < 2; ++sidei) {
        const HInstance& h = sidei == 0 ? h0 : h1;
        int base = sidei == 0 ? 0 : n0;
        for (auto& [key, w] : h.rel.container) {
            raw.containers.push_back({base + key.first, base + key.second, base + w});
            if (key.first == h.rel.maximal())
                raw.containers.push_back({sidei == 0 ? U0 : U1, base + key.second, base + w});
        }
    }

    // projections: factor coordinates for old domains, the point for new ones
    auto xid = [&](int a, int b) { return a * nx1 + b; };
    for (int u = 0; u < n0 + n1; ++u) {
        std::vector<VertexSet> table(raw.total.size());
        for (int a = 0; a < h0.total.size(); ++a)
            for (int b = 0; b < nx1; ++b)
                table[xid(a, b)] = side(u) == 0 ? h0.pi[local(u)][a] : h1.pi[local(u)][b];
        raw.pi[u] = std::move(table);
    }
    std::vector<VertexSet> zero(raw.total.size(), VertexSet{0});
    for (int u = n0 + n1; u < ndom; ++u) raw.pi[u] = zero;

    // rho tables: factor tables inherited; pairs touching a new point domain
    // project to the point; downward maps out of new domains are basepoint
    // projections (total-space vertex 0)
    auto base_proj = [&](int ext) {
        return side(ext) == 0 ? h0.pi[local(ext)][0] : h1.pi[local(ext)][0];
    };
    for (int sidei = 0; sidei < 2; ++sidei) {
        const HInstance& h = sidei == 0 ? h0 : h1;
        int base = sidei == 0 ? 0 : n0;
        for (auto& [key, s] : h.rho_set)
            raw.rho_set.push_back({base + key.first, base + key.second, s});
        for (auto& [key, m] : h.rho_map)
            raw.rho_map.push_back({base + key.first, base + key.second, m});
    }
    for (int a = 0; a < ndom; ++a)
        for (int b = 0; b < ndom; ++b) {
            if (a == b) continue;
            if (is_old(a) && is_old(b) && side(a) == side(b)) continue;  // inherited
            Rel r = rel_of(a, b);
            if (r == Rel::NestedIn || r == Rel::Transverse)
                raw.rho_set.push_back(
                    {a, b, is_old(b) ? base_proj(b) : VertexSet{0}});
            if (r == Rel::NestedIn) {
                std::vector<VertexSet> m(raw.domains[b].space.size(),
                                         is_old(a) ? base_proj(a) : VertexSet{0});
                raw.rho_map.push_back({b, a, std::move(m)});
            }
        }

    return must_validate(std::move(raw), "build_product");
}

HInstance build_relative(const MetricGraph& x, const std::vector<VertexSet>& peripherals,
                         const std::vector<const HInstance*>& structures) {
    std::set<int> seen;
    for (const auto& p : peripherals) {
        if (p.empty()) throw std::invalid_argument("build_relative: empty peripheral");
        for (int v : p) {
            if (v < 0 || v >= x.size())
                throw std::invalid_argument("build_relative: peripheral vertex out of range");
            if (!seen.insert(v).second)
                throw std::invalid_argument("build_relative: overlapping peripherals");
        }
    }
    if (!structures.empty() && structures.size() != peripherals.size())
        throw std::invalid_argument("build_relative: structure count mismatch");

    const int n = x.size();
    const int k = static_cast<int>(peripherals.size());
    if (k == 0) return build_complexity_one(x);

    std::vector<std::pair<int, int>> edges = x.edges();
    for (int i = 0; i < k; ++i)
        for (int v : peripherals[i]) edges.push_back({v, n + i});
    MetricGraph cone = MetricGraph::from_edges(n + k, edges);

    std::vector<MetricGraph> pgraph(k);
    std::vector<std::map<int, int>> pindex(k);
    for (int i = 0; i < k; ++i) {
        VertexSet p = peripherals[i];
        std::sort(p.begin(), p.end());
        for (std::size_t j = 0; j < p.size(); ++j) pindex[i][p[j]] = static_cast<int>(j);
        std::vector<std::pair<int, int>> pe;
        for (auto [a, b] : x.edges())
            if (pindex[i].count(a) && pindex[i].count(b))
                pe.push_back({pindex[i][a], pindex[i][b]});
        pgraph[i] = MetricGraph::from_edges(static_cast<int>(p.size()), pe);
    }

    auto gate_point = [&](int i, int v) {
        const auto& row = x.dist_row(v);
        int best = 1 << 29;
        for (int u : peripherals[i]) best = std::min(best, row[u]);
        VertexSet out;
        for (int u : peripherals[i])
            if (row[u] == best) out.push_back(pindex[i].at(u));
        std::sort(out.begin(), out.end());
        return out;
    };
    auto gate_set = [&](int i, const VertexSet& s) {
        std::set<int> acc;
        for (int v : s) {
            auto g = gate_point(i, v);
            acc.insert(g.begin(), g.end());
        }
        return VertexSet(acc.begin(), acc.end());
    };

    RawInstance raw;
    raw.total = x;

    if (structures.empty()) {
        raw.domains.push_back({0, "S^", cone, true});
        for (int i = 0; i < k; ++i)
            raw.domains.push_back({1 + i, "P" + std::to_string(i), pgraph[i], false});
        raw.maximal = 0;
        for (int i = 0; i < k; ++i) raw.nesting.push_back({1 + i, 0});

        std::vector<VertexSet> pis(n);
        for (int v = 0; v < n; ++v) pis[v] = {v};
        raw.pi[0] = pis;
        for (int i = 0; i < k; ++i) {
            std::vector<VertexSet> pp(n);
            for (int v = 0; v < n; ++v) pp[v] = gate_point(i, v);
            raw.pi[1 + i] = std::move(pp);
        }
        for (int i = 0; i < k; ++i) {
            raw.rho_set.push_back({1 + i, 0, {n + i}});
            for (int j = 0; j < k; ++j)
                if (j != i) raw.rho_set.push_back({1 + i, 1 + j, gate_set(j, peripherals[i])});
            std::vector<VertexSet> m(cone.size());
            for (int v = 0; v < n; ++v) m[v] = gate_point(i, v);
            for (int j = 0; j < k; ++j) {
                if (j == i) {
                    int anchor = *std::min_element(peripherals[i].begin(), peripherals[i].end());
                    m[n + j] = {pindex[i].at(anchor)};
                } else {
                    m[n + j] = gate_set(i, peripherals[j]);
                }
            }
            raw.rho_map.push_back({0, 1 + i, std::move(m)});
        }
        return must_validate(std::move(raw), "build_relative");
    }

    // full composition with per-peripheral structures behind the gates
    std::vector<int> base(k + 1, 1);
    for (int i = 0; i < k; ++i) {
        if (structures[i]->total.size() != static_cast<int>(peripherals[i].size()))
            throw std::invalid_argument("build_relative: structure size mismatch");
        base[i + 1] = base[i] + structures[i]->domain_count();
    }
    raw.domains.push_back({0, "S^", cone, true});
    for (int i = 0; i < k; ++i) {
        const HInstance& hp = *structures[i];
        for (int u = 0; u < hp.domain_count(); ++u) {
            raw.domains.push_back({base[i] + u,
                                   "P" + std::to_string(i) + "." + hp.domains[u].name,
                                   hp.space(u), hp.domains[u].hyperbolic});
            raw.nesting.push_back({base[i] + u, 0});
        }
        for (int u = 0; u < hp.domain_count(); ++u)
            for (int v = 0; v < hp.domain_count(); ++v) {
                if (u != v && hp.rel.rel(u, v) == Rel::NestedIn)
                    raw.nesting.push_back({base[i] + u, base[i] + v});
                if (u < v && hp.rel.orthogonal(u, v))
                    raw.orthogonality.push_back({base[i] + u, base[i] + v});
            }
        for (auto& [key, w] : hp.rel.container) {
            raw.containers.push_back({base[i] + key.first, base[i] + key.second, base[i] + w});
            if (key.first == hp.rel.maximal())
                raw.containers.push_back({0, base[i] + key.second, base[i] + w});
        }
    }
    raw.maximal = 0;

    std::vector<VertexSet> pis(n);
    for (int v = 0; v < n; ++v) pis[v] = {v};
    raw.pi[0] = pis;
    std::vector<std::vector<VertexSet>> gate_cache(k, std::vector<VertexSet>(n));
    for (int i = 0; i < k; ++i)
        for (int v = 0; v < n; ++v) gate_cache[i][v] = gate_point(i, v);
    for (int i = 0; i < k; ++i) {
        const HInstance& hp = *structures[i];
        for (int u = 0; u < hp.domain_count(); ++u) {
            std::vector<VertexSet> table(n);
            for (int v = 0; v < n; ++v) {
                std::set<int> acc;
                for (int g : gate_cache[i][v]) acc.insert(hp.pi[u][g].begin(), hp.pi[u][g].end());
                table[v] = VertexSet(acc.begin(), acc.end());
            }
            raw.pi[base[i] + u] = std::move(table);
        }
    }

    for (int i = 0; i < k; ++i) {
        const HInstance& hp = *structures[i];
        auto pi_of_gate = [&](const HInstance& h, int u, const VertexSet& local_gate) {
            std::set<int> acc;
            for (int g : local_gate) acc.insert(h.pi[u][g].begin(), h.pi[u][g].end());
            return VertexSet(acc.begin(), acc.end());
        };
        for (int u = 0; u < hp.domain_count(); ++u) {
            int ue = base[i] + u;
            raw.rho_set.push_back({ue, 0, {n + i}});
            std::vector<VertexSet> m(cone.size());
            for (int v = 0; v < n; ++v) m[v] = raw.pi[ue][v];
            for (int j = 0; j < k; ++j) {
                if (j == i) {
                    int anchor = *std::min_element(peripherals[i].begin(), peripherals[i].end());
                    m[n + j] = raw.pi[ue][anchor];
                } else {
                    m[n + j] = pi_of_gate(hp, u, gate_set(i, peripherals[j]));
                }
            }
            raw.rho_map.push_back({0, ue, std::move(m)});
            for (int j = 0; j < k; ++j) {
                if (j == i) continue;
                const HInstance& hq = *structures[j];
                auto g = gate_set(j, peripherals[i]);
                for (int w = 0; w < hq.domain_count(); ++w)
                    raw.rho_set.push_back({ue, base[j] + w, pi_of_gate(hq, w, g)});
            }
        }
        for (auto& [key, s] : hp.rho_set)
            raw.rho_set.push_back({base[i] + key.first, base[i] + key.second, s});
        for (auto& [key, m2] : hp.rho_map)
            raw.rho_map.push_back({base[i] + key.first, base[i] + key.second, m2});
    }

    return must_validate(std::move(raw), "build_relative");
}

GridWithTail grid_with_tail_example(int grid_side, int tail_length) {
    GridWithTail out;
    int g = grid_side * grid_side;
    int interior = tail_length - 1;
    int n = 2 * g + interior;
    std::vector<std::pair<int, int>> edges;
    auto gid = [&](int block, int r, int c) { return block * g + r * grid_side + c; };
    for (int block = 0; block < 2; ++block)
        for (int r = 0; r < grid_side; ++r)
            for (int c = 0; c < grid_side; ++c) {
                if (c + 1 < grid_side) edges.push_back({gid(block, r, c), gid(block, r, c + 1)});
                if (r + 1 < grid_side) edges.push_back({gid(block, r, c), gid(block, r + 1, c)});
            }
    int a_corner = gid(0, grid_side - 1, grid_side - 1);
    int b_corner = gid(1, 0, 0);
    if (interior == 0) {
        edges.push_back({a_corner, b_corner});
    } else {
        edges.push_back({a_corner, 2 * g});
        for (int t = 0; t + 1 < interior; ++t) edges.push_back({2 * g + t, 2 * g + t + 1});
        edges.push_back({2 * g + interior - 1, b_corner});
    }
    out.base = MetricGraph::from_edges(n, edges);
    for (int v = 0; v < g; ++v) out.grid_a.push_back(v);
    for (int v = g; v < 2 * g; ++v) out.grid_b.push_back(v);
    out.relative = build_relative(out.base, {out.grid_a, out.grid_b});
    return out;
}

int measure_qi_constant(const MetricGraph& a, const MetricGraph& b, const std::vector<int>& m) {
    int xi = 1;
    for (int u = 0; u < a.size(); ++u) {
        const auto& ra = a.dist_row(u);
        const auto& rb = b.dist_row(m[u]);
        for (int v = u + 1; v < a.size(); ++v) {
            int d = ra[v], dd = rb[m[v]];
            while (dd > xi * d + xi || d > xi * dd + xi * xi) ++xi;
        }
    }
    VertexSet image;
    for (int u = 0; u < a.size(); ++u) image.push_back(m[u]);
    std::sort(image.begin(), image.end());
    image.erase(std::unique(image.begin(), image.end()), image.end());
    auto dimg = b.distances_to_set(image);
    for (int v = 0; v < b.size(); ++v) xi = std::max(xi, dimg[v]);
    return xi;
}

Hieromorphism identity_hieromorphism(const HInstance& h) {
    Hieromorphism f;
    f.source = &h;
    f.target = &h;
    f.point_map.resize(h.total.size());
    for (int v = 0; v < h.total.size(); ++v) f.point_map[v] = v;
    f.domain_map.resize(h.domain_count());
    f.star.resize(h.domain_count());
    for (int u = 0; u < h.domain_count(); ++u) {
        f.domain_map[u] = u;
        f.star[u].resize(h.space(u).size());
        for (int v = 0; v < h.space(u).size(); ++v) f.star[u][v] = v;
    }
    return f;
}

HieromorphismReport check_hieromorphism(const Hieromorphism& f) {
    HieromorphismReport rep;
    const HInstance& src = *f.source;
    const HInstance& dst = *f.target;
    int ns = src.domain_count();

    std::set<DomainId> seen;
    for (int u = 0; u < ns; ++u) {
        if (f.domain_map[u] < 0 || f.domain_map[u] >= dst.domain_count()) {
            rep.structural_ok = false;
            rep.issues.push_back("domain map out of range at " + std::to_string(u));
            return rep;
        }
        if (!seen.insert(f.domain_map[u]).second) {
            rep.structural_ok = false;
            rep.issues.push_back("domain map not injective at " + std::to_string(u));
        }
    }
    for (int u = 0; u < ns; ++u)
        for (int v = 0; v < ns; ++v) {
            if (u == v) continue;
            if (src.rel.rel(u, v) != dst.rel.rel(f.domain_map[u], f.domain_map[v])) {
                rep.structural_ok = false;
                rep.issues.push_back("relation not preserved on (" + std::to_string(u) + "," +
                                     std::to_string(v) + ")");
            }
        }
    if (!rep.structural_ok) return rep;

    for (int u = 0; u < ns; ++u)
        rep.qi_constant =
            std::max(rep.qi_constant,
                     measure_qi_constant(src.space(u), dst.space(f.domain_map[u]), f.star[u]));

    for (int u = 0; u < ns; ++u) {
        DomainId ud = f.domain_map[u];
        for (int x = 0; x < src.total.size(); ++x) {
            VertexSet mapped;
            for (int p : src.pi[u][x]) mapped.push_back(f.star[u][p]);
            std::sort(mapped.begin(), mapped.end());
            mapped.erase(std::unique(mapped.begin(), mapped.end()), mapped.end());
            rep.projection_defect =
                std::max(rep.projection_defect,
                         union_diameter(dst.space(ud), mapped, dst.pi[ud][f.point_map[x]]));
        }
    }

    for (int u = 0; u < ns; ++u)
        for (int v = 0; v < ns; ++v) {
            if (u == v) continue;
            DomainId ud = f.domain_map[u], vd = f.domain_map[v];
            if (src.rel.strictly_nested(u, v) || src.rel.transverse(u, v)) {
                VertexSet mapped;
                for (int p : src.rho(u, v)) mapped.push_back(f.star[v][p]);
                std::sort(mapped.begin(), mapped.end());
                mapped.erase(std::unique(mapped.begin(), mapped.end()), mapped.end());
                rep.rho_defect = std::max(
                    rep.rho_defect, union_diameter(dst.space(vd), mapped, dst.rho(ud, vd)));
            }
            if (src.rel.strictly_nested(v, u)) {
                const auto& msrc = src.rho_map.at({u, v});
                const auto& mdst = dst.rho_map.at({ud, vd});
                for (int p = 0; p < src.space(u).size(); ++p) {
                    VertexSet mapped;
                    for (int q : msrc[p]) mapped.push_back(f.star[v][q]);
                    std::sort(mapped.begin(), mapped.end());
                    mapped.erase(std::unique(mapped.begin(), mapped.end()), mapped.end());
                    rep.rho_defect =
                        std::max(rep.rho_defect,
                                 union_diameter(dst.space(vd), mapped, mdst[f.star[u][p]]));
                }
            }
        }

    for (int u = 0; u < ns; ++u) {
        DomainId ud = f.domain_map[u];
        for (int vd = 0; vd < dst.domain_count(); ++vd) {
            if (!dst.rel.nested(vd, ud)) continue;
            bool has = false;
            for (int v = 0; v < ns; ++v)
                if (src.rel.nested(v, u) && f.domain_map[v] == vd) has = true;
            if (!has) {
                rep.full = false;
                rep.fullness_witnesses.push_back("no nested preimage of target domain " +
                                                 std::to_string(vd) + " under image of " +
                                                 std::to_string(u));
            }
        }
    }

    VertexSet image;
    for (int x = 0; x < src.total.size(); ++x) image.push_back(f.point_map[x]);
    std::sort(image.begin(), image.end());
    image.erase(std::unique(image.begin(), image.end()), image.end());
    auto profile = hq_profile(dst, image);
    rep.image_k0 = profile.k0;
    rep.image_k = profile.k;
    return rep;
}

void TreeOfHHS::rebind() {
    for (std::size_t e = 0; e < tree_edges.size(); ++e) {
        phi_minus[e].source = &edge_instances[e];
        phi_minus[e].target = &vertex_instances[tree_edges[e].first];
        phi_plus[e].source = &edge_instances[e];
        phi_plus[e].target = &vertex_instances[tree_edges[e].second];
    }
}

CombSigma comb_sigma(int total_size, int teeth_count, int tooth_length) {
    int spine = total_size - teeth_count * tooth_length;
    if (spine < std::max(1, teeth_count))
        throw std::invalid_argument("comb_sigma: teeth do not fit on the spine");
    CombSigma out;
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < spine; ++i) edges.push_back({i, i + 1});
    for (int t = 0; t < teeth_count; ++t) {
        int anchor = teeth_count == 1 ? 0 : t * (spine - 1) / (teeth_count - 1);
        int start = spine + t * tooth_length;
        edges.push_back({anchor, start});
        std::vector<int> tooth{start};
        for (int j = 1; j < tooth_length; ++j) {
            edges.push_back({start + j - 1, start + j});
            tooth.push_back(start + j);
        }
        out.teeth.push_back(std::move(tooth));
    }
    out.graph = MetricGraph::from_edges(total_size, edges);
    return out;
}

TreeOfHHS flip_tree_example(const FlipTreeParams& params) {
    int k = 0;
    for (auto [a, b] : params.tree_edges) k = std::max({k, a + 1, b + 1});
    if (k == 0) k = 1;
    if (k > 5) throw std::invalid_argument("flip_tree_example: at most 5 vertices");
    if (params.fiber < 2) throw std::invalid_argument("flip_tree_example: fiber too short");

    TreeOfHHS t;
    t.tree =
        k == 1 ? MetricGraph::single_vertex() : MetricGraph::from_edges(k, params.tree_edges);
    t.tree_edges = params.tree_edges;

    std::vector<std::vector<int>> incident(k);
    for (std::size_t e = 0; e < params.tree_edges.size(); ++e) {
        incident[params.tree_edges[e].first].push_back(static_cast<int>(e));
        incident[params.tree_edges[e].second].push_back(static_cast<int>(e));
    }

    std::vector<CombSigma> sigmas;
    for (int v = 0; v < k; ++v) {
        int teeth = std::max(1, static_cast<int>(incident[v].size()));
        if (params.sigma_size < teeth * params.fiber + std::max(1, teeth))
            throw std::invalid_argument(
                "flip_tree_example: boundary subpath shorter than the matched fiber");
        sigmas.push_back(comb_sigma(params.sigma_size, teeth, params.fiber));
        auto sigma_inst =
            build_complexity_one(sigmas[v].graph, "Sigma" + std::to_string(v));
        auto fiber_inst =
            build_complexity_one(MetricGraph::path(params.fiber), "R" + std::to_string(v));
        t.vertex_instances.push_back(build_product(sigma_inst, fiber_inst));
    }

    for (std::size_t e = 0; e < params.tree_edges.size(); ++e) {
        auto bnd = build_complexity_one(MetricGraph::path(params.fiber), "bd" + std::to_string(e));
        auto fib = build_complexity_one(MetricGraph::path(params.fiber), "fb" + std::to_string(e));
        t.edge_instances.push_back(build_product(bnd, fib));
    }

    // product domain layout: 0 = left factor, 1 = right factor, 2 = S,
    // 3 = U0, 4 = U1, 5 = V.left, 6 = V.right
    auto tooth_of = [&](int v, int e) {
        for (std::size_t i = 0; i < incident[v].size(); ++i)
            if (incident[v][i] == e) return static_cast<int>(i);
        return -1;
    };
    const int fiber = params.fiber;
    for (std::size_t e = 0; e < params.tree_edges.size(); ++e) {
        auto [vm, vp] = params.tree_edges[e];
        const auto& toothm = sigmas[vm].teeth[tooth_of(vm, static_cast<int>(e))];
        const auto& toothp = sigmas[vp].teeth[tooth_of(vp, static_cast<int>(e))];

        Hieromorphism fm;  // boundary path embeds into Sigma_{vm}
        fm.point_map.resize(fiber * fiber);
        for (int i = 0; i < fiber; ++i)
            for (int j = 0; j < fiber; ++j) fm.point_map[i * fiber + j] = toothm[i] * fiber + j;
        fm.domain_map = {0, 1, 2, 3, 4, 5, 6};
        fm.star.resize(7);
        fm.star[0].resize(fiber);
        for (int i = 0; i < fiber; ++i) fm.star[0][i] = toothm[i];
        fm.star[1].resize(fiber);
        for (int j = 0; j < fiber; ++j) fm.star[1][j] = j;
        for (int u = 2; u < 7; ++u) fm.star[u] = {0};
        t.phi_minus.push_back(std::move(fm));

        Hieromorphism fp;  // the flip: boundary -> fiber of vp, fiber -> Sigma of vp
        fp.point_map.resize(fiber * fiber);
        for (int i = 0; i < fiber; ++i)
            for (int j = 0; j < fiber; ++j) fp.point_map[i * fiber + j] = toothp[j] * fiber + i;
        fp.domain_map = {1, 0, 2, 4, 3, 6, 5};
        fp.star.resize(7);
        fp.star[0].resize(fiber);
        for (int i = 0; i < fiber; ++i) fp.star[0][i] = i;
        fp.star[1].resize(fiber);
        for (int j = 0; j < fiber; ++j) fp.star[1][j] = toothp[j];
        for (int u = 2; u < 7; ++u) fp.star[u] = {0};
        t.phi_plus.push_back(std::move(fp));
    }
    t.rebind();
    return t;
}

}  // namespace hhs
