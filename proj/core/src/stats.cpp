#include "schrolab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace schrolab::stats {

ComplexMean complex_mean(std::span<const std::complex<double>> z) {
    ComplexMean r;
    r.n = z.size();
    if (z.empty()) return r;
    // shifted by the first sample so constant input is reproduced exactly
    const std::complex<double> z0 = z.front();
    std::complex<double> s = 0.0;
    for (const auto& v : z) s += v - z0;
    r.mean = z0 + s / static_cast<double>(z.size());
    if (z.size() > 1) {
        double ss = 0.0;
        for (const auto& v : z) ss += std::norm(v - r.mean);
        r.stderr_ = std::sqrt(ss / static_cast<double>(z.size() - 1) / static_cast<double>(z.size()));
    }
    return r;
}

RealMean real_mean(std::span<const double> x) {
    RealMean r;
    r.n = x.size();
    if (x.empty()) return r;
    const double x0 = x.front();
    double s = 0.0;
    for (double v : x) s += v - x0;
    r.mean = x0 + s / static_cast<double>(x.size());
    if (x.size() > 1) r.stderr_ = std::sqrt(sample_variance(x) / static_cast<double>(x.size()));
    return r;
}

double sample_variance(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double x0 = x.front();
    double m = 0.0;
    for (double v : x) m += v - x0;
    m = x0 + m / static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
}

double variance_stderr(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    if (x.size() < 4) return 0.0;
    double m = 0.0;
    for (double v : x) m += v;
    m /= n;
    double m2 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d2 = (v - m) * (v - m);
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= n;
    m4 /= n;
    return std::sqrt(std::max(0.0, (m4 - (n - 3.0) / (n - 1.0) * m2 * m2) / n));
}

double ks_statistic_normal(std::span<const double> x, double mean, double variance) {
    if (x.empty()) throw std::invalid_argument("ks_statistic_normal: empty sample");
    if (!(variance > 0.0)) throw std::invalid_argument("ks_statistic_normal: variance must be positive");
    std::vector<double> s(x.begin(), x.end());
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    const double sd = std::sqrt(variance);
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = 0.5 * std::erfc(-(s[i] - mean) / (sd * std::numbers::sqrt2));
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double kolmogorov_cdf(double lambda) {
    if (lambda <= 0.0) return 0.0;
    if (lambda < 1.0) {
        // Jacobi theta form converges fast for small lambda.
        const double c = std::sqrt(2.0 * std::numbers::pi) / lambda;
        double s = 0.0;
        for (int k = 1; k < 50; ++k) {
            const double e = (2 * k - 1) * (2 * k - 1) * std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
            s += std::exp(-e);
        }
        return c * s;
    }
    double s = 0.0;
    for (int k = 1; k < 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 == 1 ? term : -term);
        if (term < 1e-18) break;
    }
    return 1.0 - 2.0 * s;
}

double ks_critical_value(std::size_t n, double alpha) {
    if (n == 0) throw std::invalid_argument("ks_critical_value: n must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("ks_critical_value: alpha in (0,1)");
    // Solve kolmogorov_cdf(lambda) = 1 - alpha by bisection.
    double lo = 0.2, hi = 4.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (kolmogorov_cdf(mid) < 1.0 - alpha ? lo : hi) = mid;
    }
    const double lambda = 0.5 * (lo + hi);
    const double rn = std::sqrt(static_cast<double>(n));
    return lambda / (rn + 0.12 + 0.11 / rn);
}

}  // namespace schrolab::stats
