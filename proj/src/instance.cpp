#include "hhs/instance.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace hhs {

std::vector<DomainId> Relations::nested_in(DomainId w) const {
    std::vector<DomainId> out;
    for (int v = 0; v < n_; ++v)
        if (nested(v, w)) out.push_back(v);
    return out;
}

std::vector<DomainId> Relations::proper_nested_in(DomainId w) const {
    std::vector<DomainId> out;
    for (int v = 0; v < n_; ++v)
        if (strictly_nested(v, w)) out.push_back(v);
    return out;
}

std::vector<DomainId> Relations::orthogonal_to(DomainId u) const {
    std::vector<DomainId> out;
    for (int v = 0; v < n_; ++v)
        if (orthogonal(u, v)) out.push_back(v);
    return out;
}

bool HInstance::hhs_mode() const {
    for (const auto& d : domains)
        if (!d.hyperbolic) return false;
    return true;
}

const VertexSet& HInstance::rho(DomainId u, DomainId v) const {
    auto it = rho_set.find({u, v});
    if (it == rho_set.end())
        throw std::invalid_argument("rho set undefined for pair (" + std::to_string(u) + "," +
                                    std::to_string(v) + ")");
    return it->second;
}

VertexSet HInstance::rho_down(DomainId w, DomainId v, const VertexSet& p) const {
    auto it = rho_map.find({w, v});
    if (it == rho_map.end())
        throw std::invalid_argument("rho map undefined for pair (" + std::to_string(w) + "," +
                                    std::to_string(v) + ")");
    std::set<int> acc;
    for (int q : p) acc.insert(it->second[q].begin(), it->second[q].end());
    return VertexSet(acc.begin(), acc.end());
}

Tuple HInstance::point_tuple(int x) const {
    Tuple b;
    b.coords.reserve(domains.size());
    for (int u = 0; u < domain_count(); ++u) b.coords.push_back(pi[u][x]);
    return b;
}

void HInstance::check_tuple(const Tuple& b) const {
    if (static_cast<int>(b.coords.size()) != domain_count())
        throw std::invalid_argument("tuple must have one coordinate per domain");
    for (int u = 0; u < domain_count(); ++u) {
        if (b.coords[u].empty()) throw std::invalid_argument("tuple coordinate empty");
        for (int v : b.coords[u])
            if (v < 0 || v >= space(u).size())
                throw std::invalid_argument("tuple coordinate out of range");
    }
}

void HInstance::build_levels() const {
    if (!level_cache_.empty() || domains.empty()) return;
    int n = domain_count();
    level_cache_.assign(n, 0);
    // process domains in order of increasing number of proper subdomains
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::vector<int> subs(n, 0);
    for (int i = 0; i < n; ++i) subs[i] = static_cast<int>(rel.proper_nested_in(i).size());
    std::sort(order.begin(), order.end(), [&](int a, int b) { return subs[a] < subs[b]; });
    for (int u : order) {
        int lvl = 1;
        for (int v : rel.proper_nested_in(u)) lvl = std::max(lvl, level_cache_[v] + 1);
        level_cache_[u] = lvl;
    }
}

int HInstance::level(DomainId u) const {
    if (u < 0 || u >= domain_count()) throw std::invalid_argument("level: unknown domain id");
    build_levels();
    return level_cache_[u];
}

std::vector<DomainId> HInstance::level_family(DomainId u, int ell) const {
    int lu = level(u);
    std::vector<DomainId> out;
    for (int v = 0; v < domain_count(); ++v)
        if (rel.nested(v, u) && lu - level(v) <= ell) out.push_back(v);
    return out;
}

std::vector<DomainId> HInstance::level_slice(DomainId u, int ell) const {
    int lu = level(u);
    std::vector<DomainId> out;
    for (int v = 0; v < domain_count(); ++v)
        if (rel.nested(v, u) && lu - level(v) == ell) out.push_back(v);
    return out;
}

int union_diameter(const MetricGraph& g, const VertexSet& a, const VertexSet& b) {
    int d = std::max(g.set_diameter(a), g.set_diameter(b));
    for (int u : a) {
        const auto& row = g.dist_row(u);
        for (int v : b) d = std::max(d, row[v]);
    }
    return d;
}

ValidationResult validate_instance(const RawInstance& raw) {
    ValidationResult res;
    auto fail = [&](const std::string& msg) { res.errors.push_back(msg); };

    // unique external ids; canonical order = sorted external id
    std::vector<int> ext;
    for (const auto& d : raw.domains) ext.push_back(d.external_id);
    std::vector<int> sorted_ext = ext;
    std::sort(sorted_ext.begin(), sorted_ext.end());
    if (std::adjacent_find(sorted_ext.begin(), sorted_ext.end()) != sorted_ext.end())
        fail("duplicate domain ids");
    std::map<int, int> dense;  // external -> dense
    for (std::size_t i = 0; i < sorted_ext.size(); ++i) dense[sorted_ext[i]] = static_cast<int>(i);

    int n = static_cast<int>(raw.domains.size());
    if (n == 0) {
        // complexity-0 instance: bounded X with empty index set
        if (!res.errors.empty()) return res;
        HInstance inst;
        inst.total = raw.total;
        inst.rel = Relations(0, -1);
        res.instance = std::move(inst);
        return res;
    }

    auto look = [&](int e) -> int {
        auto it = dense.find(e);
        return it == dense.end() ? -1 : it->second;
    };

    if (raw.maximal < 0 || look(raw.maximal) < 0) {
        fail("maximal domain id missing or unknown");
        return res;
    }
    DomainId maximal = look(raw.maximal);

    Relations rel(n, maximal);
    // nesting edges + reflexive-transitive closure
    for (auto [a, b] : raw.nesting) {
        int u = look(a), v = look(b);
        if (u < 0 || v < 0) {
            fail("nesting references unknown domain id");
            continue;
        }
        if (u != v) rel.at(u, v) = Rel::NestedIn;
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (i != k && rel.rel(i, k) == Rel::NestedIn)
                for (int j = 0; j < n; ++j)
                    if (j != k && j != i && rel.rel(k, j) == Rel::NestedIn)
                        rel.at(i, j) = Rel::NestedIn;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rel.rel(i, j) == Rel::NestedIn && rel.rel(j, i) == Rel::NestedIn)
                fail("nesting has a cycle through domains " + std::to_string(sorted_ext[i]) +
                     " and " + std::to_string(sorted_ext[j]));
    if (!res.errors.empty()) return res;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (rel.rel(j, i) == Rel::NestedIn) rel.at(i, j) = Rel::Contains;
    for (int i = 0; i < n; ++i)
        if (!rel.nested(i, maximal))
            fail("domain " + std::to_string(sorted_ext[i]) + " not nested in declared maximum");

    // orthogonality: symmetric, anti-reflexive, exclusive with nesting
    for (auto [a, b] : raw.orthogonality) {
        int u = look(a), v = look(b);
        if (u < 0 || v < 0) {
            fail("orthogonality references unknown domain id");
            continue;
        }
        if (u == v) {
            fail("orthogonality must be anti-reflexive (domain " + std::to_string(a) + ")");
            continue;
        }
        if (rel.rel(u, v) == Rel::NestedIn || rel.rel(u, v) == Rel::Contains) {
            fail("orthogonal comparable pair (" + std::to_string(a) + "," + std::to_string(b) +
                 ")");
            continue;
        }
        rel.at(u, v) = Rel::Orthogonal;
        rel.at(v, u) = Rel::Orthogonal;
    }
    // closure: V ⊑ W and W ⊥ U implies V ⊥ U
    for (int v = 0; v < n; ++v)
        for (int w = 0; w < n; ++w)
            if (rel.strictly_nested(v, w))
                for (int u = 0; u < n; ++u)
                    if (rel.orthogonal(w, u) && !rel.orthogonal(v, u))
                        fail("orthogonality not closed under nesting: " +
                             std::to_string(sorted_ext[v]) + " ⊑ " + std::to_string(sorted_ext[w]) +
                             " ⊥ " + std::to_string(sorted_ext[u]));

    // containers well-formed
    for (auto [t, u, w] : raw.containers) {
        int ti = look(t), ui = look(u), wi = look(w);
        if (ti < 0 || ui < 0 || wi < 0) {
            fail("container references unknown domain id");
            continue;
        }
        if (!rel.nested(ui, ti) || !rel.nested(wi, ti) || wi == ti)
            fail("container entry (" + std::to_string(t) + "," + std::to_string(u) + "," +
                 std::to_string(w) + ") malformed");
        else
            rel.container[{ti, ui}] = wi;
    }

    // domains in canonical order
    std::vector<Domain> domains(n);
    for (const auto& d : raw.domains) domains[dense[d.external_id]] = d;

    // hyperbolic flags: false allowed only on ⊑-minimal domains
    for (int u = 0; u < n; ++u) {
        if (!domains[u].hyperbolic && !rel.proper_nested_in(u).empty())
            fail("non-hyperbolic flag on non-minimal domain " + std::to_string(sorted_ext[u]));
    }

    // projections: one per domain, each x mapped to a nonempty in-range set
    std::vector<std::vector<VertexSet>> pi(n);
    for (int u = 0; u < n; ++u) {
        auto it = raw.pi.find(sorted_ext[u]);
        if (it == raw.pi.end()) {
            fail("projection table missing for domain " + std::to_string(sorted_ext[u]));
            continue;
        }
        if (static_cast<int>(it->second.size()) != raw.total.size()) {
            fail("projection table for domain " + std::to_string(sorted_ext[u]) +
                 " has wrong length");
            continue;
        }
        pi[u] = it->second;
        for (auto& s : pi[u]) {
            if (s.empty()) fail("empty projection value in domain " + std::to_string(sorted_ext[u]));
            for (int v : s)
                if (v < 0 || v >= domains[u].space.size())
                    fail("projection value out of range in domain " +
                         std::to_string(sorted_ext[u]));
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
        }
    }
    if (!res.errors.empty()) return res;

    // required rho coverage
    std::set<std::pair<int, int>> need_set, need_map;
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            if (u == v) continue;
            if (rel.strictly_nested(u, v)) {
                need_set.insert({u, v});
                need_map.insert({v, u});
            } else if (rel.transverse(u, v)) {
                need_set.insert({u, v});
            }
        }
    std::map<std::pair<DomainId, DomainId>, VertexSet> rho_sets;
    for (auto& [f, t, s] : raw.rho_set) {
        int u = look(f), v = look(t);
        if (u < 0 || v < 0) {
            fail("rho_set references unknown domain id");
            continue;
        }
        if (!need_set.count({u, v})) {
            fail("rho_set given for non-required pair (" + std::to_string(f) + "," +
                 std::to_string(t) + ")");
            continue;
        }
        VertexSet ss = s;
        std::sort(ss.begin(), ss.end());
        ss.erase(std::unique(ss.begin(), ss.end()), ss.end());
        if (ss.empty()) fail("rho_set empty for pair");
        for (int x : ss)
            if (x < 0 || x >= domains[v].space.size()) fail("rho_set value out of range");
        rho_sets[{u, v}] = std::move(ss);
    }
    for (auto [u, v] : need_set)
        if (!rho_sets.count({u, v}))
            fail("rho_set missing for pair (" + std::to_string(sorted_ext[u]) + "," +
                 std::to_string(sorted_ext[v]) + ")");

    std::map<std::pair<DomainId, DomainId>, std::vector<VertexSet>> rho_maps;
    for (auto& [f, t, m] : raw.rho_map) {
        int w = look(f), v = look(t);
        if (w < 0 || v < 0) {
            fail("rho_map references unknown domain id");
            continue;
        }
        if (!need_map.count({w, v})) {
            fail("rho_map given for non-required pair (" + std::to_string(f) + "," +
                 std::to_string(t) + ")");
            continue;
        }
        if (static_cast<int>(m.size()) != domains[w].space.size()) {
            fail("rho_map for pair (" + std::to_string(f) + "," + std::to_string(t) +
                 ") has wrong length");
            continue;
        }
        auto mm = m;
        for (auto& s : mm) {
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
            if (s.empty()) fail("rho_map value empty");
            for (int x : s)
                if (x < 0 || x >= domains[v].space.size()) fail("rho_map value out of range");
        }
        rho_maps[{w, v}] = std::move(mm);
    }
    for (auto [w, v] : need_map)
        if (!rho_maps.count({w, v}))
            fail("rho_map missing for pair (" + std::to_string(sorted_ext[w]) + "," +
                 std::to_string(sorted_ext[v]) + ")");

    if (!res.errors.empty()) return res;

    HInstance inst;
    inst.total = raw.total;
    inst.domains = std::move(domains);
    inst.rel = std::move(rel);
    inst.pi = std::move(pi);
    inst.rho_set = std::move(rho_sets);
    inst.rho_map = std::move(rho_maps);

    // measured projection-diameter bound
    int xi = 0;
    for (int u = 0; u < inst.domain_count(); ++u)
        for (int x = 0; x < inst.total.size(); ++x)
            xi = std::max(xi, inst.space(u).set_diameter(inst.pi[u][x]));
    for (auto& [k, s] : inst.rho_set) xi = std::max(xi, inst.space(k.second).set_diameter(s));
    for (auto& [k, m] : inst.rho_map)
        for (auto& s : m) xi = std::max(xi, inst.space(k.second).set_diameter(s));
    inst.consts.xi = xi;

    res.instance = std::move(inst);
    return res;
}

}  // namespace hhs
