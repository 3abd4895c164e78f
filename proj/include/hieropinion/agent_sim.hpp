#ifndef HIEROPINION_AGENT_SIM_HPP
#define HIEROPINION_AGENT_SIM_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hieropinion/model.hpp"
#include "hieropinion/rng.hpp"
#include "hieropinion/timeseries.hpp"

namespace hieropinion::sim {

struct SimSchedule {
    double t_end = 0.0;        // horizon, in model time t or grazing time tau
    double record_every = 1.0;
    bool rescale_time = false; // when set, times are tau = gamma * t
};

struct LevelStats {
    double mean_ns = std::numeric_limits<double>::quiet_NaN();
    double var_ns = std::numeric_limits<double>::quiet_NaN();
    double support_ns = std::numeric_limits<double>::quiet_NaN();
    double mean_all = 0.0;
    std::int64_t count_ns = 0;
    std::int64_t count_s = 0;
};

inline std::vector<LevelStats> level_stats(const Population& pop) {
    const std::size_t n_levels = pop.config.levels.size();
    std::vector<LevelStats> stats(n_levels);
    std::vector<double> sum(n_levels, 0.0), sumsq(n_levels, 0.0);
    std::vector<double> lo(n_levels, 2.0), hi(n_levels, -2.0);
    double total = 0.0;

    for (const Agent& ag : pop.agents) {
        total += ag.w;
        if (ag.stubborn) {
            ++stats[std::size_t(ag.level)].count_s;
            continue;
        }
        auto lv = std::size_t(ag.level);
        ++stats[lv].count_ns;
        sum[lv] += ag.w;
        sumsq[lv] += ag.w * ag.w;
        lo[lv] = std::min(lo[lv], ag.w);
        hi[lv] = std::max(hi[lv], ag.w);
    }
    const double mean_all = total / double(pop.agents.size());
    for (std::size_t lv = 0; lv < n_levels; ++lv) {
        stats[lv].mean_all = mean_all;
        if (stats[lv].count_ns == 0) continue; // mean_ns stays NaN
        const double n = double(stats[lv].count_ns);
        const double m = sum[lv] / n;
        stats[lv].mean_ns = m;
        stats[lv].var_ns = std::max(0.0, sumsq[lv] / n - m * m);
        stats[lv].support_ns = hi[lv] - lo[lv];
    }
    return stats;
}

// One interaction between a uniformly drawn unordered pair. Both agents
// update from the pre-encounter opinions; the clock advances by 1/n, so
// each agent takes part in ~2 encounters per unit of model time.
inline void encounter(Population& pop, Xoshiro256& rng) {
    const std::size_t n = pop.agents.size();
    if (n < 2) throw std::invalid_argument("encounter: need at least 2 agents");
    std::size_t i = rng.below(n);
    std::size_t j = rng.below(n - 1);
    if (j >= i) ++j;

    Agent& a = pop.agents[i];
    Agent& b = pop.agents[j];
    const double wa = a.w, wb = b.w;
    const double ha = pop.config.levels[std::size_t(a.level)].h;
    const double hb = pop.config.levels[std::size_t(b.level)].h;
    const double p = pop.config.p, gamma = pop.config.gamma;
    const double ua = rng.uniform01();
    const double ub = rng.uniform01();
    a.w = interact(wa, wb, ha, hb, a.stubborn, p, gamma, ua);
    b.w = interact(wb, wa, hb, ha, b.stubborn, p, gamma, ub);
    pop.clock += 1.0 / double(n);
}

inline TimeSeries run(Population& pop, const SimSchedule& sched, Xoshiro256& rng) {
    const double scale = sched.rescale_time ? pop.config.gamma : 1.0;
    TimeSeries ts;
    ts.level_h.reserve(pop.config.levels.size());
    for (const LevelSpec& lv : pop.config.levels) ts.level_h.push_back(lv.h);

    const std::size_t n_levels = pop.config.levels.size();
    std::vector<double> m_ns(n_levels), v_ns(n_levels), s_ns(n_levels);
    auto record = [&]() {
        const std::vector<LevelStats> stats = level_stats(pop);
        for (std::size_t lv = 0; lv < n_levels; ++lv) {
            m_ns[lv] = stats[lv].mean_ns;
            v_ns[lv] = stats[lv].var_ns;
            s_ns[lv] = stats[lv].support_ns;
        }
        ts.append_row(pop.clock * scale, m_ns, v_ns, s_ns, stats[0].mean_all);
    };

    record();
    double next_record = sched.record_every;
    while (pop.clock * scale < sched.t_end) {
        encounter(pop, rng);
        if (pop.clock * scale >= next_record || pop.clock * scale >= sched.t_end) {
            record();
            while (next_record <= pop.clock * scale) next_record += sched.record_every;
        }
    }
    return ts;
}

} // namespace hieropinion::sim

#endif
