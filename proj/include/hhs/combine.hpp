// combine.hpp — the tree-of-structures combination: equivalence classes of
// domains across edge maps, supports and favorites, vertex gates, comparison
// maps, and the assembled combined instance.
#pragma once

#include "hhs/constructions.hpp"

namespace hhs {

struct CombineHypothesisError : std::runtime_error {
    std::string hypothesis;
    CombineHypothesisError(std::string hyp, const std::string& witness)
        : std::runtime_error("combination hypothesis failed (" + hyp + "): " + witness),
          hypothesis(std::move(hyp)) {}
};

struct CombineResult {
    HInstance instance;

    // bookkeeping
    int class_count = 0;
    int max_support_diameter = 0;
    std::vector<int> vertex_offset;                    // X_v base in the total space
    std::vector<std::vector<int>> class_members;       // per class: (vertex, domain) flattened
    std::vector<std::pair<int, DomainId>> favorites;   // per class: favorite (vertex, domain)
    std::vector<VertexSet> supports;                   // per class: tree vertices
    // gate tables between vertex spaces: gate[u][v] maps X_u -> X_v
    std::vector<std::vector<std::vector<int>>> gates;
    int comparison_defect = 0;  // worst distance between c(beta_v) and beta_w
};

// Checks the combination hypotheses (full structure-preserving edge maps,
// no-cycle coherence, hypothesis (4) on maximal edge domains), then assembles
// the combined instance. Throws CombineHypothesisError naming the failed
// hypothesis and witness.
CombineResult combine_tree(const TreeOfHHS& t);

}  // namespace hhs
