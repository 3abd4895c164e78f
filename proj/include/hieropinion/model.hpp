#ifndef HIEROPINION_MODEL_HPP
#define HIEROPINION_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "hieropinion/rng.hpp"

namespace hieropinion {

// ---------------------------------------------------------------------------
// Initial opinion distributions on [-1,1].

enum class DistKind { Uniform, Point, Quantiles };

struct OpinionDist {
    DistKind kind = DistKind::Point;
    double a = 0.0, b = 0.0;     // uniform bounds
    double x = 0.0;              // point mass location
    std::vector<double> q;       // non-decreasing quantile values

    static OpinionDist uniform(double a, double b) {
        OpinionDist d;
        d.kind = DistKind::Uniform;
        d.a = a;
        d.b = b;
        return d;
    }
    static OpinionDist point(double x) {
        OpinionDist d;
        d.kind = DistKind::Point;
        d.x = x;
        return d;
    }
    static OpinionDist quantile_list(std::vector<double> values) {
        OpinionDist d;
        d.kind = DistKind::Quantiles;
        d.q = std::move(values);
        return d;
    }

    double mean() const {
        switch (kind) {
        case DistKind::Uniform: return 0.5 * (a + b);
        case DistKind::Point: return x;
        case DistKind::Quantiles: {
            double s = 0.0;
            for (double v : q) s += v;
            return q.empty() ? 0.0 : s / double(q.size());
        }
        }
        return 0.0;
    }

    // Generalized inverse CDF evaluated at r in (0,1). A stored quantile
    // list is read as values at midpoints (j-1/2)/L and interpolated
    // linearly, constant beyond the end nodes.
    double quantile(double r) const {
        switch (kind) {
        case DistKind::Uniform: return a + (b - a) * r;
        case DistKind::Point: return x;
        case DistKind::Quantiles: {
            const std::size_t L = q.size();
            if (L == 1) return q[0];
            const double pos = r * double(L) - 0.5;
            if (pos <= 0.0) return q.front();
            if (pos >= double(L - 1)) return q.back();
            const auto j = std::size_t(pos);
            const double frac = pos - double(j);
            return q[j] + frac * (q[j + 1] - q[j]);
        }
        }
        return 0.0;
    }
};

// ---------------------------------------------------------------------------
// Model configuration.

struct LevelSpec {
    double h = 0.0;                 // hierarchy value in [0,1]
    double fraction = 0.0;          // share of the population at this level
    double stubborn_fraction = 0.0; // share of stubborn agents within the level
    OpinionDist ns_initial;
    OpinionDist s_initial;
};

struct ModelConfig {
    double p = 0.0;      // probability a lower-ranked agent convinces a higher-ranked one
    double gamma = 0.01; // interaction strength
    std::vector<LevelSpec> levels; // strictly increasing in h
    std::int64_t agents = 0;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

namespace detail {

inline bool dist_valid(const OpinionDist& d, std::string& why) {
    switch (d.kind) {
    case DistKind::Uniform:
        if (!(-1.0 <= d.a && d.a <= d.b && d.b <= 1.0)) {
            why = "uniform bounds must satisfy -1 <= a <= b <= 1";
            return false;
        }
        return true;
    case DistKind::Point:
        if (!(-1.0 <= d.x && d.x <= 1.0)) {
            why = "point mass must lie in [-1,1]";
            return false;
        }
        return true;
    case DistKind::Quantiles:
        if (d.q.empty()) {
            why = "quantile list must have length >= 1";
            return false;
        }
        if (!std::is_sorted(d.q.begin(), d.q.end())) {
            why = "quantile list must be non-decreasing";
            return false;
        }
        if (d.q.front() < -1.0 || d.q.back() > 1.0) {
            why = "quantile entries must lie in [-1,1]";
            return false;
        }
        return true;
    }
    why = "unknown distribution kind";
    return false;
}

} // namespace detail

inline ValidationReport validate(const ModelConfig& cfg) {
    ValidationReport rep;
    auto bad = [&rep](std::string msg) { rep.violations.push_back(std::move(msg)); };

    if (!(cfg.p >= 0.0 && cfg.p <= 1.0)) bad("p must lie in [0,1]");
    if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) bad("gamma must lie in (0,1)");
    if (cfg.agents < 1) bad("agents must be a positive integer");
    if (cfg.levels.empty()) {
        bad("at least one hierarchy level is required");
        return rep;
    }

    double frac_sum = 0.0;
    for (std::size_t i = 0; i < cfg.levels.size(); ++i) {
        const LevelSpec& lv = cfg.levels[i];
        const std::string tag = "level " + std::to_string(i) + ": ";
        if (!(lv.h >= 0.0 && lv.h <= 1.0)) bad(tag + "h must lie in [0,1]");
        if (!(lv.fraction >= 0.0 && lv.fraction <= 1.0)) bad(tag + "fraction must lie in [0,1]");
        if (!(lv.stubborn_fraction >= 0.0 && lv.stubborn_fraction <= 1.0))
            bad(tag + "stubborn_fraction must lie in [0,1]");
        if (i > 0 && !(cfg.levels[i - 1].h < lv.h)) bad("levels not strictly increasing in h");
        std::string why;
        if (!detail::dist_valid(lv.ns_initial, why)) bad(tag + "ns_initial: " + why);
        if (!detail::dist_valid(lv.s_initial, why)) bad(tag + "s_initial: " + why);
        frac_sum += lv.fraction;
    }
    if (std::abs(frac_sum - 1.0) > 1e-12)
        bad("fractions sum to " + std::to_string(frac_sum) + " != 1");
    if (!(cfg.levels.back().fraction > 0.0)) bad("top level must have fraction > 0");
    return rep;
}

// ---------------------------------------------------------------------------
// Splitting of the level distribution into stubborn / non-stubborn parts.

struct SplitWeights {
    double alpha = 0.0;          // global stubborn fraction
    std::vector<double> f0S;     // level distribution within the stubborn population
    std::vector<double> f0NS;    // ... within the non-stubborn population
    std::vector<double> f0_tail; // f0([h_i,1])
    std::vector<double> f0S_tail;
    std::vector<double> f0NS_tail;
    std::vector<double> mS0;     // initial stubborn mean per level
    bool stubborn_unused = false; // alpha == 0: f0S entries are zero placeholders
    bool ns_unused = false;       // alpha == 1: f0NS entries are zero placeholders
};

inline SplitWeights derive_splitting(const ModelConfig& cfg) {
    const std::size_t n = cfg.levels.size();
    SplitWeights sw;
    sw.f0S.resize(n);
    sw.f0NS.resize(n);
    sw.f0_tail.resize(n);
    sw.f0S_tail.resize(n);
    sw.f0NS_tail.resize(n);
    sw.mS0.resize(n);

    for (std::size_t i = 0; i < n; ++i)
        sw.alpha += cfg.levels[i].stubborn_fraction * cfg.levels[i].fraction;
    sw.stubborn_unused = sw.alpha == 0.0;
    sw.ns_unused = sw.alpha == 1.0;

    for (std::size_t i = 0; i < n; ++i) {
        const LevelSpec& lv = cfg.levels[i];
        sw.f0S[i] = sw.stubborn_unused ? 0.0 : lv.stubborn_fraction * lv.fraction / sw.alpha;
        sw.f0NS[i] = sw.ns_unused ? 0.0 : (1.0 - lv.stubborn_fraction) * lv.fraction / (1.0 - sw.alpha);
        sw.mS0[i] = lv.s_initial.mean();
    }
    double t = 0.0, tS = 0.0, tNS = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        t += cfg.levels[i].fraction;
        tS += sw.f0S[i];
        tNS += sw.f0NS[i];
        sw.f0_tail[i] = t;
        sw.f0S_tail[i] = tS;
        sw.f0NS_tail[i] = tNS;
    }
    return sw;
}

// Initial mean opinion of each level's non-stubborn population.
inline std::vector<double> initial_ns_means(const ModelConfig& cfg) {
    std::vector<double> m(cfg.levels.size());
    for (std::size_t i = 0; i < cfg.levels.size(); ++i)
        m[i] = cfg.levels[i].ns_initial.mean();
    return m;
}

// ---------------------------------------------------------------------------
// Microscopic interaction rule. An influencer of higher or equal rank
// always convinces; a lower-ranked one convinces with probability p
// (decided by the supplied uniform draw u).

inline double interact(double w, double w_star, double h, double h_star,
                       bool stubborn, double p, double gamma, double u) {
    if (stubborn) return w;
    if (h_star >= h || u < p) return w + gamma * (w_star - w);
    return w;
}

// ---------------------------------------------------------------------------
// Population construction.

struct Agent {
    double w = 0.0;
    std::int32_t level = 0;
    bool stubborn = false;
};

struct Population {
    std::vector<Agent> agents;
    ModelConfig config;
    double clock = 0.0; // model time t
};

enum class InitMode {
    Sample,        // i.i.d. draws from the initial distributions
    ExactQuantiles // opinions at equally spaced quantiles, removes sampling noise
};

namespace detail {

// Largest-remainder apportionment of `total` into integer counts.
inline std::vector<std::int64_t> apportion(const std::vector<double>& fractions,
                                           std::int64_t total) {
    const std::size_t n = fractions.size();
    std::vector<std::int64_t> counts(n);
    std::vector<std::pair<double, std::size_t>> remainders(n);
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double exact = fractions[i] * double(total);
        counts[i] = std::int64_t(std::floor(exact));
        remainders[i] = {exact - double(counts[i]), i};
        assigned += counts[i];
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::int64_t k = 0; k < total - assigned; ++k)
        ++counts[remainders[std::size_t(k) % n].second];
    return counts;
}

} // namespace detail

inline Population build_population(const ModelConfig& cfg, std::uint64_t seed,
                                   InitMode mode = InitMode::Sample) {
    const ValidationReport rep = validate(cfg);
    if (!rep.ok())
        throw std::invalid_argument("build_population: invalid config: " + rep.violations.front());

    std::vector<double> fractions;
    fractions.reserve(cfg.levels.size());
    for (const LevelSpec& lv : cfg.levels) fractions.push_back(lv.fraction);
    const std::vector<std::int64_t> sizes = detail::apportion(fractions, cfg.agents);

    for (std::size_t i = 0; i < sizes.size(); ++i)
        if (sizes[i] == 0 && cfg.levels[i].fraction > 0.0)
            throw std::invalid_argument("build_population: level " + std::to_string(i) +
                                        " received 0 agents; increase the population size");

    Population pop;
    pop.config = cfg;
    pop.agents.reserve(std::size_t(cfg.agents));
    Xoshiro256 rng(seed);

    auto emit_group = [&](const OpinionDist& dist, std::int64_t count,
                          std::int32_t level, bool stubborn) {
        for (std::int64_t k = 0; k < count; ++k) {
            double r = mode == InitMode::ExactQuantiles
                           ? (double(k) + 0.5) / double(count)
                           : rng.uniform01();
            Agent ag;
            ag.w = dist.quantile(r);
            ag.level = level;
            ag.stubborn = stubborn;
            pop.agents.push_back(ag);
        }
    };

    for (std::size_t i = 0; i < cfg.levels.size(); ++i) {
        const LevelSpec& lv = cfg.levels[i];
        const std::int64_t n_stub = std::llround(lv.stubborn_fraction * double(sizes[i]));
        emit_group(lv.s_initial, n_stub, std::int32_t(i), true);
        emit_group(lv.ns_initial, sizes[i] - n_stub, std::int32_t(i), false);
    }
    return pop;
}

} // namespace hieropinion

#endif
