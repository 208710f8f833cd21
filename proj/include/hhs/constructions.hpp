// constructions.hpp — builders that produce HInstances: complexity-1 spaces,
// products, relative (coned-off) structures, hieromorphism checking, trees of
// structures and the flip-tree example generator.
#pragma once

#include "hhs/instance.hpp"

namespace hhs {

// Single-domain structure: C S = G, projections are identity singletons.
HInstance build_complexity_one(const MetricGraph& g, const std::string& name = "S");

// Normalization pass: restricts each C U to the smallest connected thickening
// of pi_U(X) and rewrites every table accordingly; records the removed vertex
// counts in the result's notes.
HInstance normalize(const HInstance& h);

// Product structure on X0 x X1: factor domains, a point-space top S, factor
// containers U0/U1, and a point-space V_U per factor domain; cross-factor
// domains are orthogonal, U0 ⊥ U1, and the V_U are pairwise transverse.
HInstance build_product(const HInstance& h0, const HInstance& h1);

// Relative structure on X with disjoint connected peripheral subgraphs.
// Without per-peripheral structures the result is a hierarchical-space-mode
// instance (peripheral domains unflagged); with structures, each peripheral's
// index set is grafted in with projections composed through the gate.
HInstance build_relative(const MetricGraph& x, const std::vector<VertexSet>& peripherals,
                         const std::vector<const HInstance*>& structures = {});

// The grid-with-tail corpus instance: two grids joined by a tail path,
// peripherals = the grids. Returns the relative instance plus the layout.
struct GridWithTail {
    MetricGraph base;
    VertexSet grid_a, grid_b;
    HInstance relative;  // hierarchical-space mode
};
GridWithTail grid_with_tail_example(int grid_side = 15, int tail_length = 30);

// Structure-preserving map between instances.
struct Hieromorphism {
    const HInstance* source = nullptr;
    const HInstance* target = nullptr;
    std::vector<int> point_map;                    // X -> X'
    std::vector<DomainId> domain_map;              // per source domain, dense ids
    std::vector<std::vector<int>> star;            // per source domain: C U -> C U'
};

struct HieromorphismReport {
    bool structural_ok = true;          // injective, relation-preserving domain map
    std::vector<std::string> issues;
    int qi_constant = 1;                // max measured (xi,xi)-QI constant of the star maps
    int projection_defect = 0;          // pi' f vs f* pi
    int rho_defect = 0;                 // rho' vs f* rho on both diagram shapes
    bool full = true;                   // every V' nested in an image has a nested preimage
    std::vector<std::string> fullness_witnesses;
    int image_k0 = 0;                   // quasiconvexity constant of the image projections
    std::vector<int> image_k;           // realization-closedness profile of the image
};

HieromorphismReport check_hieromorphism(const Hieromorphism& f);

// identity hieromorphism on an instance (test / composition convenience)
Hieromorphism identity_hieromorphism(const HInstance& h);

// measured quasi-isometry constant of a vertex map between graphs
int measure_qi_constant(const MetricGraph& a, const MetricGraph& b, const std::vector<int>& m);

struct TreeOfHHS {
    MetricGraph tree;
    std::vector<std::pair<int, int>> tree_edges;   // oriented: (minus, plus)
    std::vector<HInstance> vertex_instances;
    std::vector<HInstance> edge_instances;
    std::vector<Hieromorphism> phi_minus;          // X_e -> X_{e-}
    std::vector<Hieromorphism> phi_plus;           // X_e -> X_{e+}

    void rebind();  // fix internal source/target pointers after moves
};

struct FlipTreeParams {
    std::vector<std::pair<int, int>> tree_edges;  // on vertices 0..k-1, k <= 5
    int sigma_size = 40;                          // vertex count of each Sigma_v
    int fiber = 12;                               // vertex count of each R_v
};

// Flip gluing: vertex spaces Sigma_v x R_v, edge spaces boundary x fiber,
// edge maps send the boundary path to the neighbor's fiber and vice versa.
TreeOfHHS flip_tree_example(const FlipTreeParams& params);

// Layout helper shared with tests: the comb graph Sigma with one marked
// boundary path (tooth) per incident edge.
struct CombSigma {
    MetricGraph graph;
    std::vector<std::vector<int>> teeth;  // per tooth: vertex ids in path order
};
CombSigma comb_sigma(int total_size, int teeth_count, int tooth_length);

}  // namespace hhs
