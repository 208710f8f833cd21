#pragma once

#include "hhs/instance.hpp"

namespace hhs::detail {

// fast projection-distance evaluator: anchor arrays when every projection set
// is a singleton (the common case), set-distance fallback otherwise
struct ProjDist {
    const HInstance* h = nullptr;
    DomainId u = -1;
    std::vector<int> anchor;

    void init(const HInstance& inst, DomainId dom) {
        h = &inst;
        u = dom;
        bool singleton = true;
        for (const auto& s : inst.pi[dom])
            if (s.size() != 1) {
                singleton = false;
                break;
            }
        if (singleton) {
            anchor.resize(inst.total.size());
            for (int x = 0; x < inst.total.size(); ++x) anchor[x] = inst.pi[dom][x][0];
        }
    }
    int operator()(int x, int y) const {
        if (!anchor.empty()) return h->space(u).dist(anchor[x], anchor[y]);
        return h->d_point(u, x, y);
    }
};

}  // namespace hhs::detail
