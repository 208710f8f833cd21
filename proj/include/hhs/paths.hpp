// paths.hpp — hierarchy paths (construction and audit), hulls of pairs, and
// the distance formula with upper- and lower-bound certificates.
#pragma once

#include "hhs/instance.hpp"

namespace hhs {

// sum over domains of the s-thresholded projection distances
long long threshold_sum(const HInstance& h, int x, int y, int s);

struct DfRow {
    double k = 1;
    long long c = 0;
};

struct DfFit {
    int s = 1;
    int s0_min = 1;  // minimal threshold admitting a finite fit (always 1 here)
    std::vector<DfRow> frontier;  // per K in the fixed grid {1,1.25,1.5,2,3,5}
    const DfRow* row(double k) const {
        for (auto& r : frontier)
            if (r.k == k) return &r;
        return nullptr;
    }
};

// minimal integer C per grid K with (1/K) Sigma - C <= d <= K Sigma + C over
// all vertex pairs
DfFit fit_df_constants(const HInstance& h, int s);

struct PairHull {
    int x = 0, y = 0, theta = 0;
    VertexSet members;
    std::vector<int> retraction;  // X-vertex -> hull vertex, identity on the hull
    int lipschitz = 0;            // max retraction displacement across X-edges
    int max_deviation = 0;        // worst realization deviation of the center tuples
};

// theta floor for hulls: the measured realization deviation at the
// triangle-center consistency scale (measures a default corpus if needed)
int hull_theta_floor(const HInstance& h);

// H_theta(x,y) with the realized-center retraction
PairHull pair_hull(const HInstance& h, int x, int y, int theta);

// a discrete path from x to y built by omen-splicing per level and color;
// projections become coarsely monotone in every domain
DiscretePath good_path(const HInstance& h, int x, int y);

struct GoodPathBudgetExceeded : std::runtime_error {
    int level, color;
    GoodPathBudgetExceeded(int l, int c)
        : std::runtime_error("good_path splice budget exceeded at level " + std::to_string(l) +
                             " color " + std::to_string(c)),
          level(l),
          color(c) {}
};

struct PathAudit {
    std::vector<int> monotonicity_defect;  // per domain: minimal L
    std::vector<int> unparam_d;            // per domain: unparameterized QG constant
    int step_bound = 0;
    double efficiency = 1.0;  // |path| / d_X(endpoints)
    int overall_d = 1;        // the hierarchy-path constant D
};
PathAudit audit_path(const HInstance& h, const DiscretePath& p);

// (r,K)-proper subsample of a path: consecutive steps in [r, r+K]
DiscretePath make_proper(const HInstance& h, const DiscretePath& p, int r);

// minimal r such that any pair at total-space distance >= r projects at
// distance >= goal somewhere (from the uniqueness profile)
int proper_gap_for(const HInstance& h, long long goal);

struct LowerCertificate {
    int x = 0, y = 0, s0 = 0;
    struct Checkpoints {
        DomainId v = -1;
        std::vector<int> centers;  // C V vertices along the chosen geodesic
        int radius = 0;
        int target = 0;   // requested count, ceil(d_V / 10)
        int doored = 0;   // checkpoints actually crossed by the path
    };
    std::vector<Checkpoints> families;
    std::vector<int> doors;                            // path indices
    std::vector<std::vector<DomainId>> multiplicity;   // M(j) per door
    bool transverse_free = true;
    bool all_doored = true;
    long long checkpoint_total = 0;
    long long sum_s0 = 0;
    int path_length = 0;
    int k_eff = 1;  // efficiency/discreteness constant of the certifying path
    int chi = 1;
    // the certified chain: d_X(x,y) * 10 * chi * k_eff >= sum_s0
    bool bound_certified = false;
};

// measured analogue of the 10^3 KE threshold floor
int df_certificate_s0_floor(const HInstance& h);

LowerCertificate df_lower_certificate(const HInstance& h, int x, int y, int s0);

}  // namespace hhs
