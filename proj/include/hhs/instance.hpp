// instance.hpp — the data model for a hierarchical (possibly hierarchically
// hyperbolic) structure on a finite graph: index set with nesting /
// orthogonality / transversality, one graph per domain, projection tables,
// relative-projection tables, and the measured constants report.
#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "hhs/metric_graph.hpp"

namespace hhs {

using DomainId = int;  // dense internal index into HInstance::domains

enum class Rel : std::uint8_t {
    Same,
    NestedIn,   // a properly nested in b
    Contains,   // b properly nested in a
    Orthogonal,
    Transverse,
};

struct Domain {
    int external_id = 0;
    std::string name;
    MetricGraph space;  // C U
    bool hyperbolic = true;
};

class Relations {
public:
    Relations() = default;
    Relations(int n, DomainId maximal) : n_(n), maximal_(maximal), rel_(std::size_t(n) * n, Rel::Transverse) {
        for (int i = 0; i < n; ++i) at(i, i) = Rel::Same;
    }

    int count() const { return n_; }
    DomainId maximal() const { return maximal_; }
    Rel rel(DomainId a, DomainId b) const { return rel_[std::size_t(a) * n_ + b]; }
    Rel& at(DomainId a, DomainId b) { return rel_[std::size_t(a) * n_ + b]; }

    bool nested(DomainId a, DomainId b) const {  // a ⊑ b (reflexive)
        return a == b || rel(a, b) == Rel::NestedIn;
    }
    bool strictly_nested(DomainId a, DomainId b) const { return rel(a, b) == Rel::NestedIn; }
    bool orthogonal(DomainId a, DomainId b) const { return rel(a, b) == Rel::Orthogonal; }
    bool transverse(DomainId a, DomainId b) const { return rel(a, b) == Rel::Transverse && a != b; }

    std::vector<DomainId> nested_in(DomainId w) const;    // 𝔖_W, includes w
    std::vector<DomainId> proper_nested_in(DomainId w) const;
    std::vector<DomainId> orthogonal_to(DomainId u) const;

    // container witnesses for the orthogonality axiom: (T, U) -> W
    std::map<std::pair<DomainId, DomainId>, DomainId> container;

private:
    int n_ = 0;
    DomainId maximal_ = -1;
    std::vector<Rel> rel_;
};

// A candidate coordinate vector: one nonempty bounded vertex set per domain.
struct Tuple {
    std::vector<VertexSet> coords;  // indexed by DomainId
};

struct ConstantsReport {
    int delta = 0;        // max over hyperbolic-flagged domains
    int xi = 0;           // max diameter of any pi_U(x) or rho set
    int k_lip = 1;        // coarse-Lipschitz constant of the projections
    int kappa0 = 0;       // consistency constant for point tuples
    int kappa1 = 0;       // rho-consistency constant
    int complexity_n = 0; // longest ⊑-chain
    int chi = 0;          // largest family with no transverse pair
    int lambda = 1;       // large links multiplier
    int e_bgi = 0;        // bounded geodesic image constant
    int e_ll = 0;         // large links threshold
    int alpha = 0;        // partial realization constant
    int surjectivity_defect = 0;  // max distance of a C U vertex from pi_U(X)
    int E = 0;            // working constant: max of the above as in the axioms
    std::vector<int> theta_u;  // uniqueness profile, index = kappa
    std::vector<int> theta_e;  // realization profile, index = kappa (filled by realization)
    std::uint64_t corpus_seed = 0;
    bool approximated = false;      // some internal enumeration hit its cap
    std::vector<std::string> notes;

    int theta_u_at(int kappa) const {
        if (theta_u.empty()) return 0;
        if (kappa < 0) kappa = 0;
        if (kappa >= static_cast<int>(theta_u.size())) return theta_u.back();
        return theta_u[kappa];
    }
    int theta_e_at(int kappa) const {
        if (theta_e.empty()) return 0;
        if (kappa < 0) kappa = 0;
        if (kappa >= static_cast<int>(theta_e.size())) return theta_e.back();
        return theta_e[kappa];
    }
};

class HInstance {
public:
    MetricGraph total;            // X
    std::vector<Domain> domains;  // C U per domain
    Relations rel;
    // pi[U][x] = nonempty bounded vertex set in C U
    std::vector<std::vector<VertexSet>> pi;
    // rho_set[(U,V)] for U ⊊ V or U ⋔ V: bounded set in C V
    std::map<std::pair<DomainId, DomainId>, VertexSet> rho_set;
    // rho_map[(W,V)] for V ⊊ W: per-C W-vertex bounded set in C V
    std::map<std::pair<DomainId, DomainId>, std::vector<VertexSet>> rho_map;

    int domain_count() const { return static_cast<int>(domains.size()); }
    const MetricGraph& space(DomainId u) const { return domains[u].space; }
    const VertexSet& proj(DomainId u, int x) const { return pi[u][x]; }

    bool hhs_mode() const;  // every domain flagged hyperbolic

    // d_U(x, y) between projections of total-space vertices (set min distance)
    int d_point(DomainId u, int x, int y) const { return space(u).set_distance(pi[u][x], pi[u][y]); }
    int d_point_set(DomainId u, int x, const VertexSet& s) const {
        return space(u).set_distance(pi[u][x], s);
    }

    const VertexSet& rho(DomainId u, DomainId v) const;  // the set ρ^U_V
    // downward map ρ^W_V evaluated on a set in C W
    VertexSet rho_down(DomainId w, DomainId v, const VertexSet& p) const;

    Tuple point_tuple(int x) const;
    // verifies Tuple shape: coordinate for every domain, nonempty, in range
    void check_tuple(const Tuple& b) const;

    int level(DomainId u) const;  // 1 for ⊑-minimal, else 1 + max child level
    // 𝔖_U^ℓ: V ⊑ U with level(U) - level(V) <= ell
    std::vector<DomainId> level_family(DomainId u, int ell) const;
    // 𝔗_U^ℓ: V ⊑ U with level(U) - level(V) == ell
    std::vector<DomainId> level_slice(DomainId u, int ell) const;

    // measured constants (filled by the verifier / realization passes)
    mutable ConstantsReport consts;

private:
    mutable std::vector<int> level_cache_;
    void build_levels() const;
};

// Raw (pre-validation) instance data, mirroring the JSON schema.
struct RawInstance {
    MetricGraph total;
    std::vector<Domain> domains;              // external ids arbitrary but unique
    std::vector<std::pair<int, int>> nesting; // pairs (v, w): v ⊑ w, external ids
    std::vector<std::pair<int, int>> orthogonality;
    int maximal = -1;                          // external id
    std::vector<std::array<int, 3>> containers;  // (T, U, W) external ids
    std::map<int, std::vector<VertexSet>> pi;    // external id -> per-x sets
    std::vector<std::tuple<int, int, VertexSet>> rho_set;          // from, to, set
    std::vector<std::tuple<int, int, std::vector<VertexSet>>> rho_map;  // from, to, map
};

struct ValidationResult {
    std::optional<HInstance> instance;
    std::vector<std::string> errors;
    bool ok() const { return errors.empty() && instance.has_value(); }
};

// Checks every type invariant (partial order, unique maximum, orthogonality
// closure and exclusivity, projection shape, rho coverage, hyperbolic-flag
// pattern), materializes the derived transversality relation, and fixes the
// canonical domain ordering. No partial instance escapes on error.
ValidationResult validate_instance(const RawInstance& raw);

// diam of the union of two vertex sets in g
int union_diameter(const MetricGraph& g, const VertexSet& a, const VertexSet& b);

}  // namespace hhs
