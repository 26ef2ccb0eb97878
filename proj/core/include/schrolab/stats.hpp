#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace schrolab::stats {

struct ComplexMean {
    std::complex<double> mean;
    double stderr_ = 0.0;  // sqrt(sum |z - mean|^2 / (n-1)) / sqrt(n)
    std::size_t n = 0;
};

ComplexMean complex_mean(std::span<const std::complex<double>> z);

struct RealMean {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

RealMean real_mean(std::span<const double> x);

// Unbiased sample variance.
double sample_variance(std::span<const double> x);

// Standard error of the unbiased sample variance, from the fourth central moment.
double variance_stderr(std::span<const double> x);

// Two-sided one-sample Kolmogorov-Smirnov statistic against N(mean, variance).
double ks_statistic_normal(std::span<const double> x, double mean, double variance);

// Asymptotic Kolmogorov distribution: P(sqrt(n) D_n <= lambda).
double kolmogorov_cdf(double lambda);

// Critical value of D_n at significance level alpha, with Stephens' small-n correction.
double ks_critical_value(std::size_t n, double alpha);

}  // namespace schrolab::stats
