// realization.hpp — consistent tuples and their realization points: a brute
// argmin oracle, the constructive level induction, partial realization
// checking, the relevance partial order and its chain coloring.
#pragma once

#include <cstdint>

#include "hhs/instance.hpp"

namespace hhs {

// minimal kappa for which the tuple satisfies both consistency inequalities
int consistency_threshold(const HInstance& h, const Tuple& b);

// worst-coordinate deviation of x from b
int tuple_deviation(const HInstance& h, const Tuple& b, int x);

enum class RealizeMode { Brute, Constructive };

struct RealizeResult {
    int x = -1;
    int deviation = 0;
    int iterations = 0;       // constructive extension steps
    std::vector<DomainId> support;  // final totally-orthogonal family (constructive)
};

struct RealizeBudgetExceeded : std::runtime_error {
    std::vector<DomainId> partial_family;
    explicit RealizeBudgetExceeded(std::vector<DomainId> fam)
        : std::runtime_error("constructive realization exceeded its iteration budget"),
          partial_family(std::move(fam)) {}
};

// Brute mode finds the vertex minimizing the worst coordinate deviation (ties
// to the smallest id); constructive mode runs the level induction, extending
// a totally orthogonal family through maximal large-deviation subdomains, and
// answers with a partial realization point of the final family.
RealizeResult realize(const HInstance& h, const Tuple& b, RealizeMode mode);

// minimal theta for which x is a theta-partial realization point for the
// pairwise-orthogonal family; throws on a non-orthogonal family
int check_partial_realization_point(const HInstance& h, const std::vector<DomainId>& family,
                                    const Tuple& b, int x);

// triangle-center tuple of (x, y, z): smallest-id vertex minimizing the worst
// distance to the three geodesic-union sides in each C W
Tuple center_tuple(const HInstance& h, int x, int y, int z);

enum class RelevanceSelector { MaxElements, LevelSlice };

struct RelevancePoset {
    std::vector<DomainId> elements;       // the selected pairwise-incomparable family
    std::vector<std::vector<bool>> le;    // le[i][j]: elements[i] ⪯ elements[j]
    int theta = 0;
    int kappa = 0;
    bool dichotomy_holds = true;          // comparable-or-orthogonal verified
    std::vector<std::string> witnesses;
};

// Rel(x, b, theta) restricted either to its ⊑-maximal elements or to the
// level slice 𝔗_U^ell; theta must be at least 100 max(kappa, E).
RelevancePoset relevance_poset(const HInstance& h, int x, const Tuple& b, int theta, int kappa,
                               RelevanceSelector sel, DomainId u = -1, int ell = 0);

struct ChainColoring {
    std::vector<int> color;  // per poset element
    int colors = 0;
};

// Minimum chain cover used as colors (Dilworth via lexicographic augmenting
// paths): elements sharing a color are ⪯-comparable, hence transverse.
ChainColoring chain_coloring(const RelevancePoset& poset);

// Tuple corpus for measuring realization constants: point tuples, median
// tuples, and radius-perturbed point tuples; labels index the three families.
struct TupleCorpus {
    std::vector<Tuple> tuples;
    std::vector<int> family;  // 0 = point, 1 = median, 2 = perturbed
    std::uint64_t seed = 0;
};
TupleCorpus generate_tuple_corpus(const HInstance& h, int count, std::uint64_t seed,
                                  int perturb_radius = 2);

// Measures theta_e as a cumulative table over observed consistency thresholds
// and stores it (with the corpus seed) in h.consts.
void measure_theta_e(const HInstance& h, const TupleCorpus& corpus);

}  // namespace hhs
