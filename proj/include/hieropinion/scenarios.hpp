#ifndef HIEROPINION_SCENARIOS_HPP
#define HIEROPINION_SCENARIOS_HPP

#include "hieropinion/model.hpp"

namespace hieropinion {

// Built-in three-level benchmark: levels h = 0, 0.4, 1 holding 20%, 70%
// and 10% of the population, opinions initially uniform per level. With
// `stubborn` set, levels carry stubborn fractions 0.5, 0.3, 0.8; stubborn
// agents start from the same distribution as their level.
inline ModelConfig benchmark_config(double p, bool stubborn,
                                    std::int64_t agents = 10000, double gamma = 0.01) {
    ModelConfig cfg;
    cfg.p = p;
    cfg.gamma = gamma;
    cfg.agents = agents;

    const double hs[3] = {0.0, 0.4, 1.0};
    const double fracs[3] = {0.2, 0.7, 0.1};
    const double stub[3] = {0.5, 0.3, 0.8};
    const OpinionDist dists[3] = {OpinionDist::uniform(-0.9, -0.7),
                                  OpinionDist::uniform(-0.5, 0.5),
                                  OpinionDist::uniform(0.8, 1.0)};
    for (int i = 0; i < 3; ++i) {
        LevelSpec lv;
        lv.h = hs[i];
        lv.fraction = fracs[i];
        lv.stubborn_fraction = stubborn ? stub[i] : 0.0;
        lv.ns_initial = dists[i];
        lv.s_initial = dists[i];
        cfg.levels.push_back(lv);
    }
    return cfg;
}

} // namespace hieropinion

#endif
