#ifndef HIEROPINION_MEANFIELD_HPP
#define HIEROPINION_MEANFIELD_HPP

#include <cmath>
#include <vector>

#include "hieropinion/linalg.hpp"
#include "hieropinion/model.hpp"
#include "hieropinion/timeseries.hpp"

namespace hieropinion::meanfield {

// Linear system X' = A X + B for the per-level non-stubborn mean opinions,
// in grazing time.
struct MeanFieldSystem {
    SquareMatrix A;
    std::vector<double> B;
    SplitWeights split;
    double p = 0.0;
};

inline MeanFieldSystem build_system(const ModelConfig& cfg) {
    const std::size_t n = cfg.levels.size();
    MeanFieldSystem sys;
    sys.split = derive_splitting(cfg);
    sys.p = cfg.p;
    sys.A = SquareMatrix(n);
    sys.B.assign(n, 0.0);

    const SplitWeights& sw = sys.split;
    const double p = cfg.p;
    const double one_minus_alpha = 1.0 - sw.alpha;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double gate = p + (1.0 - p) * (j >= i ? 1.0 : 0.0);
            if (i == j)
                sys.A(i, j) = one_minus_alpha * sw.f0NS[i] - (p + (1.0 - p) * sw.f0_tail[i]);
            else
                sys.A(i, j) = one_minus_alpha * gate * sw.f0NS[j];
            sys.B[i] += sw.alpha * sw.mS0[j] * gate * sw.f0S[j];
        }
    }
    return sys;
}

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;

    const std::vector<double>& final_state() const { return states.back(); }
};

inline Trajectory integrate(const MeanFieldSystem& sys, std::vector<double> m0,
                            double t_end, double dt) {
    const std::size_t n = sys.B.size();
    auto deriv = [&sys, n](const std::vector<double>& x, std::vector<double>& out) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = sys.B[i];
            for (std::size_t j = 0; j < n; ++j) s += sys.A(i, j) * x[j];
            out[i] = s;
        }
    };

    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(m0);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    const auto full_steps = std::size_t(std::floor(t_end / dt + 1e-9));
    double t = 0.0;
    for (std::size_t s = 0; s < full_steps; ++s) {
        rk4_step(m0, dt, deriv, k1, k2, k3, k4, tmp);
        t = double(s + 1) * dt;
        traj.times.push_back(t);
        traj.states.push_back(m0);
    }
    if (t_end - t > 1e-12) {
        rk4_step(m0, t_end - t, deriv, k1, k2, k3, k4, tmp);
        traj.times.push_back(t_end);
        traj.states.push_back(m0);
    }
    return traj;
}

// Asymptotic means -A^{-1} B. Refuses (SingularSystem) when A has a pivot
// below tolerance, which happens e.g. for alpha = 0.
inline std::vector<double> equilibrium(const MeanFieldSystem& sys) {
    std::vector<double> rhs(sys.B.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -sys.B[i];
    return solve_gaussian(sys.A, rhs);
}

// Residual of the row-sum identity
//   A_ii + sum_{j != i} A_ij = -p alpha - (1-p) alpha f0S([h_i,1]).
inline std::vector<double> spectrum_bound_check(const MeanFieldSystem& sys) {
    const std::size_t n = sys.B.size();
    std::vector<double> res(n);
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += sys.A(i, j);
        const double expected =
            -sys.p * sys.split.alpha - (1.0 - sys.p) * sys.split.alpha * sys.split.f0S_tail[i];
        res[i] = row - expected;
    }
    return res;
}

// Whole-population mean implied by the per-level non-stubborn means.
inline double population_mean(const SplitWeights& sw, const std::vector<double>& m_ns) {
    double m = 0.0;
    for (std::size_t j = 0; j < m_ns.size(); ++j)
        m += sw.alpha * sw.f0S[j] * sw.mS0[j] + (1.0 - sw.alpha) * sw.f0NS[j] * m_ns[j];
    return m;
}

inline TimeSeries to_timeseries(const MeanFieldSystem& sys, const Trajectory& traj,
                                const ModelConfig& cfg) {
    TimeSeries ts;
    for (const LevelSpec& lv : cfg.levels) ts.level_h.push_back(lv.h);
    const std::size_t n = ts.level_h.size();
    const std::vector<double> zeros(n, 0.0);
    for (std::size_t t = 0; t < traj.times.size(); ++t)
        ts.append_row(traj.times[t], traj.states[t], zeros, zeros,
                      population_mean(sys.split, traj.states[t]));
    return ts;
}

} // namespace hieropinion::meanfield

#endif
