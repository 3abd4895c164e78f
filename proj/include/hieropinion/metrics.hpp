#ifndef HIEROPINION_METRICS_HPP
#define HIEROPINION_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace hieropinion::metrics {

struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Weighted atoms on [-1,1], sorted by position. Empty weight vector means
// uniform weights.
struct EmpiricalDist {
    std::vector<double> x;
    std::vector<double> w;

    static EmpiricalDist from_samples(std::vector<double> samples) {
        std::sort(samples.begin(), samples.end());
        EmpiricalDist d;
        d.x = std::move(samples);
        return d;
    }
    static EmpiricalDist weighted(std::vector<double> positions, std::vector<double> weights) {
        if (positions.size() != weights.size())
            throw std::invalid_argument("EmpiricalDist: size mismatch");
        std::vector<std::size_t> order(positions.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return positions[a] < positions[b]; });
        EmpiricalDist d;
        for (std::size_t i : order) {
            d.x.push_back(positions[i]);
            d.w.push_back(weights[i]);
        }
        return d;
    }

    double weight(std::size_t i) const {
        return w.empty() ? 1.0 / double(x.size()) : w[i];
    }
};

// 1D Wasserstein-1 distance: integral over r in [0,1] of the gap between
// the two quantile functions, evaluated exactly on the merged weight grid.
inline double w1(const EmpiricalDist& a, const EmpiricalDist& b) {
    if (a.x.empty() || b.x.empty()) throw std::invalid_argument("w1: empty distribution");
    std::size_t ia = 0, ib = 0;
    double ca = a.weight(0), cb = b.weight(0); // cumulative weight at current atoms
    double r = 0.0, total = 0.0;
    while (ia < a.x.size() && ib < b.x.size()) {
        const double next = std::min(ca, cb);
        total += (next - r) * std::abs(a.x[ia] - b.x[ib]);
        r = next;
        if (ca <= next + 1e-15 && ia + 1 <= a.x.size()) {
            ++ia;
            if (ia < a.x.size()) ca += a.weight(ia);
        }
        if (cb <= next + 1e-15 && ib + 1 <= b.x.size()) {
            ++ib;
            if (ib < b.x.size()) cb += b.weight(ib);
        }
    }
    return total;
}

// Transport cost to a point mass: weighted mean absolute deviation.
inline double w1_to_delta(const EmpiricalDist& a, double c) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.x.size(); ++i) s += a.weight(i) * std::abs(a.x[i] - c);
    return s;
}

inline double support_width(const EmpiricalDist& a) {
    if (a.x.empty()) return 0.0;
    return a.x.back() - a.x.front();
}

struct DecayFit {
    double lambda = 0.0;
    double r2 = 0.0;
};

// Least-squares slope of log(width) against time; lambda = -slope.
// Widths at or below 1e-14 are dropped before taking logs.
inline DecayFit fit_decay_rate(const std::vector<double>& times,
                               const std::vector<double>& widths) {
    if (times.size() != widths.size())
        throw std::invalid_argument("fit_decay_rate: size mismatch");
    std::vector<double> t, y;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (widths[i] > 1e-14) {
            t.push_back(times[i]);
            y.push_back(std::log(widths[i]));
        }
    }
    if (t.size() < 3) throw InsufficientData("fit_decay_rate: fewer than 3 usable points");

    const double n = double(t.size());
    double st = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        st += t[i];
        sy += y[i];
    }
    const double tbar = st / n, ybar = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        sxx += (t[i] - tbar) * (t[i] - tbar);
        sxy += (t[i] - tbar) * (y[i] - ybar);
        syy += (y[i] - ybar) * (y[i] - ybar);
    }
    if (sxx == 0.0) throw InsufficientData("fit_decay_rate: times not distinct");
    const double slope = sxy / sxx;

    DecayFit fit;
    fit.lambda = -slope;
    if (syy < 1e-30) {
        fit.r2 = 1.0; // constant widths: the flat fit is exact
    } else {
        double ss_res = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double pred = ybar + slope * (t[i] - tbar);
            ss_res += (y[i] - pred) * (y[i] - pred);
        }
        fit.r2 = 1.0 - ss_res / syy;
    }
    return fit;
}

} // namespace hieropinion::metrics

#endif
