// convexity.hpp — hierarchical quasiconvexity, gates, induced substructures,
// standard product regions, hulls of finite sets, coarse medians, and
// relatively hierarchically hyperbolic hulls of pairs.
#pragma once

#include "hhs/instance.hpp"
#include "hhs/realization.hpp"

namespace hhs {

struct HqProfile {
    int k0 = 0;            // worst quasiconvexity constant of the projections
    std::vector<int> k;    // k[kappa] = max d_X(x, Y) over kappa-close points
    bool approximated = false;

    int at(int kappa) const {
        if (k.empty()) return 0;
        if (kappa < 0) kappa = 0;
        if (kappa >= static_cast<int>(k.size())) return k.back();
        return k[kappa];
    }
};
HqProfile hq_profile(const HInstance& h, const VertexSet& y);

struct GateMap {
    VertexSet target;
    std::vector<int> gate;  // per X-vertex
    int lipschitz = 0;      // max gate displacement across X-edges
    int snap_max = 0;       // max distance from the realized point to the snap
};
GateMap gate_map(const HInstance& h, const VertexSet& y);
int gate(const HInstance& h, const VertexSet& y, int x);

// induced structure on a hierarchically quasiconvex subset; the subset is
// re-connected along lexicographic geodesics when the snap disconnects it
HInstance substructure(const HInstance& h, const VertexSet& y);

struct ProductRegion {
    DomainId base = -1;
    VertexSet f_points;  // realized nested-tuple points
    VertexSet e_points;  // realized orthogonal-tuple points
    VertexSet p_u;       // image of the combined realization
    std::vector<int> gate;
};
ProductRegion product_region(const HInstance& h, DomainId u);

struct FiniteHull {
    VertexSet members;
    std::vector<int> retraction;
    int theta = 0;
};
// hull of a finite set (|A| <= 6) with the gate retraction
FiniteHull finite_hull(const HInstance& h, const VertexSet& a, int theta);

struct MedianResult {
    int m = -1;
    int deviation = 0;
    int center_consistency = 0;  // consistency threshold of the center tuple
};
MedianResult coarse_median(const HInstance& h, int x, int y, int z);

// measured (kappa, h0) for the coarse-median Triples condition over a
// deterministic sample of perturbed triples
std::pair<int, long long> measure_triples(const HInstance& h, int samples, std::uint64_t seed);

// measured mu-convexity of a subset: max distance of medians m(y, y', x) back
// to Y over a deterministic sample
int measure_mu_convexity(const HInstance& h, const VertexSet& y, int samples,
                         std::uint64_t seed);

struct RelativeHull {
    VertexSet members;      // M_theta(x, y) as total-space vertices
    HInstance instance;     // HHS-mode structure on the hull
    std::vector<int> gate;  // X-vertex -> member (total-space id)
    int theta = 0;
};
// hull of a pair in a relatively hierarchically hyperbolic instance: fixed
// lexicographic geodesics, closest-point or arclength-cutoff retractions
RelativeHull relative_hull(const HInstance& h, int x, int y, int theta);

}  // namespace hhs
