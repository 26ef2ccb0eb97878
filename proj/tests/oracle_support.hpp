#pragma once

// Test-side reference computations. Written against the defining formulas, not the
// library code paths they check.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle_support {

inline constexpr double pi = std::numbers::pi;

struct Medium1d {
    double gamma, beta, mu, p_max, a0;
};

inline Medium1d medium_a() { return {0.75, 0.5, 1.0, 1.0, 1.0}; }
inline Medium1d medium_b() { return {0.5, 0.75, 1.0, 1.0, 1.0}; }

// Covariance of the rescaled field on a periodic 1-d grid of n points and side L:
// sum over modes k != 0, |k| < n/2 of S_eps(q)/L e^{-g_eps(q)|t|} cos(q x).
inline double mode_sum_covariance(const Medium1d& m, double eps, double alpha, double L, int n, double t, double x) {
    const double kappa = 2 * m.beta / (2 * m.beta + m.gamma - 1);
    double s = 0.0;
    for (int k = -n / 2 + 1; k < n / 2; ++k) {
        if (k == 0) continue;
        const double q = 2 * pi * k / L;
        const double p = std::pow(eps, alpha) * std::abs(q);
        if (p > m.p_max) continue;
        const double dens = std::pow(eps, 2 - 2 * kappa + alpha) * m.a0 * std::pow(p, -(2 * m.gamma - 1));
        const double gap = std::pow(eps, 2 * alpha * m.beta - kappa) * m.mu * std::pow(std::abs(q), 2 * m.beta);
        s += dens / L * std::exp(-gap * std::abs(t)) * std::cos(q * x);
    }
    return s;
}

// Direct O(n^2) DFT, X_k = sum_j x_j e^{-2 pi i jk/n}.
inline std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x, int sign = -1) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            s += x[j] * std::polar(1.0, sign * 2 * pi * static_cast<double>((j * k) % n) / static_cast<double>(n));
        out[k] = s;
    }
    return out;
}

// Gaussian packet transform, 1-d.
inline std::complex<double> gaussian_ft(double sigma, double center, double amplitude, double xi) {
    return amplitude * sigma * std::sqrt(2 * pi) * std::exp(-0.5 * sigma * sigma * xi * xi) *
           std::polar(1.0, -xi * center);
}

inline double double_factorial(int n) {
    double r = 1.0;
    for (int k = n; k > 1; k -= 2) r *= k;
    return r;
}

// fBm covariance (scale/2)(t^{2H} + s^{2H} - |t-s|^{2H}).
inline double fbm_cov(double scale, double H, double s, double t) {
    return 0.5 * scale * (std::pow(t, 2 * H) + std::pow(s, 2 * H) - std::pow(std::abs(t - s), 2 * H));
}

}  // namespace oracle_support
