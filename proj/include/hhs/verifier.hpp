// verifier.hpp — decides whether an HInstance satisfies each axiom of the
// hierarchically hyperbolic space definition, returning measured minimal
// constants or concrete counterexample witnesses.
#pragma once

#include <string>
#include <vector>

#include "hhs/instance.hpp"

namespace hhs {

// Fixed fallback thresholds, recorded in every report.
inline constexpr std::size_t PARTIAL_REALIZATION_EXHAUSTIVE_CAP = 1000000;

struct AxiomResult {
    std::string name;
    bool passed = true;
    std::vector<std::string> witnesses;
    std::vector<std::pair<std::string, long long>> constants;
};

struct VerifyReport {
    std::vector<AxiomResult> axioms;
    bool all_passed = true;
    bool approximated = false;
    std::vector<std::string> approximations;

    AxiomResult& add(const std::string& name);
    const AxiomResult* find(const std::string& name) const;
};

// Partial order + unique maximum, orthogonality closure, container axiom
// (witness searched when not declared), finite complexity, chi.
// Fills consts.complexity_n and consts.chi.
AxiomResult verify_relations(const HInstance& h);

// xi = max projection/rho diameter; k_lip = minimal K with every projection
// (K,K)-coarsely Lipschitz over adjacent total-space pairs (floored at 1).
AxiomResult verify_projection_bounds(const HInstance& h);

// kappa0 = minimal point-tuple consistency constant (both inequalities plus
// the nested-pair rho coherence clause); kappa1 = rho-consistency constant.
AxiomResult verify_consistency(const HInstance& h);

// Minimal E for bounded geodesic image, worst case over all geodesics of each
// C W (exact over the geodesic DAG), plus the endpoint variant.
AxiomResult verify_bgi(const HInstance& h);

// Minimal (e_ll, lambda), lexicographic e_ll first, for the canonical witness
// family of ⊑-maximal large-projection subdomains.
AxiomResult verify_large_links(const HInstance& h);

// Minimal alpha realizing every pairwise-orthogonal family choice; exhaustive
// when the combination count is small, deterministic stratified sampling
// (flagged) otherwise.
AxiomResult verify_partial_realization(const HInstance& h);

// theta_u table: theta_u[kappa] = max d_X(x,y) over pairs whose projections
// all agree within kappa.
AxiomResult verify_uniqueness(const HInstance& h);

// Runs all axiom checks, assembles the ConstantsReport (E = max of the
// measured constants as the axioms demand), stores it in h.consts.
VerifyReport verify_all(const HInstance& h);

// Toolbox-lemma scans used by property tests (exhaustive on the instance):
// "consistency for pairs of points" configuration; returns offending pairs.
std::vector<std::string> check_pair_consistency_lemma(const HInstance& h);
// corollary: every z is 10E-close to {x,y} in one of the two transverse domains
std::vector<std::string> check_not_far_from_both(const HInstance& h);
// passing large projections up: minimal family size N(C) forcing a witness
// with d_S(x,y) >= C; the result is indexed by C values requested
std::vector<int> passing_large_projections_up(const HInstance& h, const std::vector<int>& cs);

}  // namespace hhs
