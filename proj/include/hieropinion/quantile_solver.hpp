#ifndef HIEROPINION_QUANTILE_SOLVER_HPP
#define HIEROPINION_QUANTILE_SOLVER_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hieropinion/model.hpp"
#include "hieropinion/timeseries.hpp"

namespace hieropinion::quantile {

struct MonotonicityViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Quantile (generalized inverse CDF) representation of the non-stubborn
// opinion distribution of each level, on the midpoint grid r_k = (k-1/2)/M.
struct QuantileState {
    std::vector<std::vector<double>> X; // per level, non-decreasing, length M
    double tau = 0.0;
    SplitWeights split;
    double p = 0.0;
    std::vector<double> level_h;
};

inline std::vector<double> init_quantiles(const OpinionDist& dist, int M) {
    if (M < 2) throw std::invalid_argument("init_quantiles: M must be >= 2");
    std::vector<double> x(std::size_t(M), 0.0);
    for (int k = 0; k < M; ++k) x[std::size_t(k)] = dist.quantile((double(k) + 0.5) / double(M));
    return x;
}

inline QuantileState make_state(const ModelConfig& cfg, int M) {
    QuantileState st;
    st.split = derive_splitting(cfg);
    st.p = cfg.p;
    for (const LevelSpec& lv : cfg.levels) {
        st.level_h.push_back(lv.h);
        st.X.push_back(init_quantiles(lv.ns_initial, M));
    }
    return st;
}

namespace detail {

inline double level_mean(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / double(x.size());
}

} // namespace detail

struct DriftCoeffs {
    double m = 0.0;               // whole-population mean
    std::vector<double> b_tail;   // f0([h_i,1]) * b_i
    std::vector<double> rate;     // p + (1-p) f0([h_i,1])
};

// Drift ingredients of the transport system evaluated from the per-level
// means. Stubborn distributions enter through their means only.
inline DriftCoeffs drift_from_means(const SplitWeights& sw, double p,
                                    const std::vector<double>& means) {
    const std::size_t n = means.size();
    DriftCoeffs dc;
    dc.b_tail.assign(n, 0.0);
    dc.rate.assign(n, 0.0);
    double acc = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        acc += sw.alpha * sw.f0S[i] * sw.mS0[i] + (1.0 - sw.alpha) * sw.f0NS[i] * means[i];
        dc.b_tail[i] = acc;
        dc.rate[i] = p + (1.0 - p) * sw.f0_tail[i];
    }
    dc.m = acc; // tail from the lowest level covers everyone
    return dc;
}

inline DriftCoeffs drift_coefficients(const QuantileState& st) {
    std::vector<double> means(st.X.size());
    for (std::size_t i = 0; i < st.X.size(); ++i) means[i] = detail::level_mean(st.X[i]);
    return drift_from_means(st.split, st.p, means);
}

// One RK4 step of  dX_{i,k}/dtau = p (m - X) + (1-p) (b_tail_i - f0_tail_i X).
//
// The drift is affine with the same slope -rate_i for every quantile of a
// level, so the RK4 update splits exactly into an RK4 update of the level
// means (which drive m and b) and a scalar contraction of the deviations
// from the mean by the RK4 stability polynomial at z = -rate_i * dtau.
// This keeps the contraction of widths accurate in relative terms even
// when the support has shrunk to ~1e-9.
inline void step(QuantileState& st, double dtau) {
    if (!(dtau > 0.0)) throw std::invalid_argument("step: dtau must be positive");
    const std::size_t n = st.X.size();

    std::vector<double> mu(n);
    for (std::size_t i = 0; i < n; ++i) mu[i] = detail::level_mean(st.X[i]);

    auto mean_deriv = [&st](const std::vector<double>& m, std::vector<double>& out) {
        const DriftCoeffs dc = drift_from_means(st.split, st.p, m);
        for (std::size_t i = 0; i < m.size(); ++i)
            out[i] = st.p * (dc.m - m[i]) +
                     (1.0 - st.p) * (dc.b_tail[i] - st.split.f0_tail[i] * m[i]);
    };

    // RK4 on the means
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n), mu_new = mu;
    mean_deriv(mu_new, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = mu[i] + 0.5 * dtau * k1[i];
    mean_deriv(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = mu[i] + 0.5 * dtau * k2[i];
    mean_deriv(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = mu[i] + dtau * k3[i];
    mean_deriv(tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
        mu_new[i] = mu[i] + dtau / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    for (std::size_t i = 0; i < n; ++i) {
        const double z = -(st.p + (1.0 - st.p) * st.split.f0_tail[i]) * dtau;
        const double factor = 1.0 + z * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)));
        std::vector<double>& x = st.X[i];
        for (double& v : x) v = mu_new[i] + factor * (v - mu[i]);
        for (std::size_t k = 1; k < x.size(); ++k)
            if (x[k] < x[k - 1] - 1e-12)
                throw MonotonicityViolation("quantile step: level " + std::to_string(i) +
                                            " lost monotonicity; reduce dtau");
    }
    st.tau += dtau;
}

inline TimeSeries integrate(QuantileState st, double tau_end, double dtau,
                            double record_every) {
    if (!(dtau <= record_every && record_every <= tau_end) && tau_end > 0.0)
        throw std::invalid_argument("integrate: need dtau <= record_every <= tau_end");

    TimeSeries ts;
    ts.level_h = st.level_h;
    const std::size_t n = st.X.size();
    std::vector<double> m_ns(n), v_ns(n), s_ns(n);
    auto record = [&]() {
        for (std::size_t i = 0; i < n; ++i) {
            const std::vector<double>& x = st.X[i];
            const double mean = detail::level_mean(x);
            double sq = 0.0;
            for (double v : x) sq += (v - mean) * (v - mean);
            m_ns[i] = mean;
            v_ns[i] = sq / double(x.size());
            s_ns[i] = x.back() - x.front();
        }
        ts.append_row(st.tau, m_ns, v_ns, s_ns, drift_coefficients(st).m);
    };

    record();
    if (tau_end <= 0.0) return ts;
    const auto steps_per_record = std::size_t(std::llround(record_every / dtau));
    const auto records = std::size_t(std::ceil(tau_end / record_every - 1e-9));
    for (std::size_t r = 0; r < records; ++r) {
        const double target = std::min(double(r + 1) * record_every, tau_end);
        for (std::size_t s = 0; s < steps_per_record && st.tau < target - 0.5 * dtau; ++s)
            step(st, dtau);
        if (st.tau < target - 1e-12) step(st, target - st.tau);
        record();
    }
    return ts;
}

} // namespace hieropinion::quantile

#endif
