#ifndef HIEROPINION_CONSENSUS_HPP
#define HIEROPINION_CONSENSUS_HPP

#include <stdexcept>
#include <vector>

#include "hieropinion/meanfield.hpp"
#include "hieropinion/model.hpp"

namespace hieropinion::consensus {

enum class Regime { P0, PPositiveAlphaPositive, P1Alpha0, P1AlphaPositive, Unsolved };

inline const char* regime_name(Regime r) {
    switch (r) {
    case Regime::P0: return "P0";
    case Regime::PPositiveAlphaPositive: return "P_POSITIVE_ALPHA_POSITIVE";
    case Regime::P1Alpha0: return "P1_ALPHA0";
    case Regime::P1AlphaPositive: return "P1_ALPHA_POSITIVE";
    case Regime::Unsolved: return "UNSOLVED";
    }
    return "UNSOLVED";
}

struct ConsensusResult {
    Regime regime = Regime::Unsolved;
    std::vector<double> m_inf_ns;    // empty when unsolved
    std::vector<double> m_inf_mixed; // whole-level limits, empty when unsolved
};

// Pure-hierarchy limits (p = 0): the top level keeps its stubborn mean
// (or its whole-level initial mean if the top has no stubborn agents),
// then a downward recursion mixes each level with everything above it.
inline std::vector<double> limit_p0(const SplitWeights& sw,
                                    const std::vector<double>& m0_ns) {
    const std::size_t n = m0_ns.size();
    std::vector<double> m_inf(n);

    const std::size_t top = n - 1;
    if (sw.alpha > 0.0 && sw.f0S[top] > 0.0) {
        m_inf[top] = sw.mS0[top];
    } else {
        // whole-level initial mean of the top level
        const double mass_s = sw.alpha * sw.f0S[top];
        const double mass_ns = (1.0 - sw.alpha) * sw.f0NS[top];
        m_inf[top] = (mass_s * sw.mS0[top] + mass_ns * m0_ns[top]) / (mass_s + mass_ns);
    }

    for (std::size_t i = top; i-- > 0;) {
        double num = 0.0;
        for (std::size_t j = i + 1; j < n; ++j)
            num += (1.0 - sw.alpha) * sw.f0NS[j] * m_inf[j];
        for (std::size_t j = i; j < n; ++j)
            num += sw.alpha * sw.f0S[j] * sw.mS0[j];
        const double den =
            sw.alpha * sw.f0S_tail[i] + (1.0 - sw.alpha) * sw.f0NS_tail[i + 1];
        m_inf[i] = num / den;
    }
    return m_inf;
}

// p in (0,1), alpha > 0: the limit is the equilibrium of the mean system.
inline std::vector<double> limit_p_positive(const ModelConfig& cfg) {
    return meanfield::equilibrium(meanfield::build_system(cfg));
}

// p = 1: hierarchy is irrelevant; everyone converges to the initial whole-
// population mean (alpha = 0) or to the stubborn mean (alpha > 0).
inline double limit_p1(const SplitWeights& sw, const std::vector<double>& m0_ns) {
    double m = 0.0;
    if (sw.alpha > 0.0) {
        for (std::size_t j = 0; j < sw.f0S.size(); ++j) m += sw.f0S[j] * sw.mS0[j];
    } else {
        for (std::size_t j = 0; j < m0_ns.size(); ++j)
            m += sw.f0NS[j] * m0_ns[j]; // f0NS == f0 when alpha = 0
    }
    return m;
}

inline ConsensusResult consensus_limits(const ModelConfig& cfg) {
    const SplitWeights sw = derive_splitting(cfg);
    const std::vector<double> m0_ns = initial_ns_means(cfg);
    const std::size_t n = cfg.levels.size();

    ConsensusResult res;
    if (cfg.p == 0.0) {
        res.regime = Regime::P0;
        res.m_inf_ns = limit_p0(sw, m0_ns);
    } else if (cfg.p == 1.0) {
        res.regime = sw.alpha > 0.0 ? Regime::P1AlphaPositive : Regime::P1Alpha0;
        res.m_inf_ns.assign(n, limit_p1(sw, m0_ns));
    } else if (sw.alpha > 0.0) {
        res.regime = Regime::PPositiveAlphaPositive;
        res.m_inf_ns = limit_p_positive(cfg);
    } else {
        res.regime = Regime::Unsolved;
        return res;
    }

    res.m_inf_mixed.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ai = cfg.levels[i].stubborn_fraction;
        res.m_inf_mixed[i] = ai * sw.mS0[i] + (1.0 - ai) * res.m_inf_ns[i];
    }
    return res;
}

} // namespace hieropinion::consensus

#endif
