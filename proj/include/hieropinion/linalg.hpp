#ifndef HIEROPINION_LINALG_HPP
#define HIEROPINION_LINALG_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace hieropinion {

struct SquareMatrix {
    std::size_t n = 0;
    std::vector<double> a; // row-major

    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n_) : n(n_), a(n_ * n_, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

struct SingularSystem : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gaussian elimination with partial pivoting. The systems here are tiny
// (one row per hierarchy level), so no factorization caching is needed.
inline std::vector<double> solve_gaussian(SquareMatrix A, std::vector<double> b,
                                          double pivot_tol = 1e-12) {
    const std::size_t n = A.n;
    if (b.size() != n) throw std::invalid_argument("solve_gaussian: size mismatch");

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A(r, col)) > std::abs(A(piv, col))) piv = r;
        if (std::abs(A(piv, col)) < pivot_tol)
            throw SingularSystem("solve_gaussian: pivot below tolerance");
        if (piv != col) {
            for (std::size_t c = col; c < n; ++c) std::swap(A(piv, c), A(col, c));
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = A(r, col) / A(col, col);
            if (factor == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) A(r, c) -= factor * A(col, c);
            b[r] -= factor * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
        x[i] = s / A(i, i);
    }
    return x;
}

// One classical RK4 step of x' = deriv(x), in place. `deriv(in, out)`
// must not alias its arguments.
template <typename Deriv>
void rk4_step(std::vector<double>& x, double dt, Deriv&& deriv,
              std::vector<double>& k1, std::vector<double>& k2,
              std::vector<double>& k3, std::vector<double>& k4,
              std::vector<double>& tmp) {
    const std::size_t n = x.size();
    deriv(x, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
    deriv(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
    deriv(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
    deriv(tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
        x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

} // namespace hieropinion

#endif
