#pragma once

#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "schrolab/medium.hpp"

namespace schrolab {

class NoPredictionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Surface measure of the unit sphere in R^d (2, 2 pi, 4 pi).
double sphere_area(int d);

// K1 = int_{R^d} exp(-mu |p|^{2 beta}) |p|^{-(2 gamma + d - 2)} dp, closed form.
double k1(const MediumSpec& spec);
// Same integral by adaptive quadrature of the radial integrand (verification route).
double k1_quadrature(const MediumSpec& spec);

// K2(lambda, xi) = (2 pi)^-d int exp(-mu |p|^{2 beta}) |p|^{-(2 gamma + d - 2)} exp(i p.xi lambda^{1 - 1/(2 beta)}) dp.
double k2(const MediumSpec& spec, double lambda, std::span<const double> xi);
// Radial form G(r) with K2(lambda, xi) = G(|xi| lambda^{1 - 1/(2 beta)}).
double k2_radial(const MediumSpec& spec, double r);

// Chebyshev interpolant of k2_radial on [0, r_max] for repeated evaluation.
class K2Table {
public:
    K2Table(const MediumSpec& spec, double r_max, int nodes = 96);
    double operator()(double r) const;
    double r_max() const noexcept { return r_max_; }

private:
    double r_max_;
    std::vector<double> coeffs_;
};

// int_{[0,t]^2} |s - u|^{-a} ds du = 2 t^{2-a} / ((1-a)(2-a)).
double pair_kernel_mass(double a, double t);

// D = a(0) K1 kappa^2 / ((2 pi)^d (2 - kappa)).
double big_d(const MediumSpec& spec);

// D(t, xi) = a(0) int_{[0,1]^2} |s-u|^{-a} K2(|s-u| t, xi) ds du. Requires beta > 1/2.
// D(t, 0) = D for every t.
double big_d_txi(const MediumSpec& spec, double t, std::span<const double> xi);

// Limit-law moment E[ psi^M conj(psi)^N ] for the given regime.
std::complex<double> predict_moment(const MediumSpec& spec, const Regime& regime, int M, int N, double t,
                                    std::span<const double> xi, std::complex<double> phi0_hat);

struct MomentPrediction {
    int M = 0;
    int N = 0;
    std::optional<std::complex<double>> value;
    std::string note;  // reason when value is empty
};

struct TheoryPrediction {
    Regime regime;
    ScalingExponents exps;
    double k1 = 0.0;
    double D = 0.0;
    std::optional<double> D_txi;
    std::optional<double> phase_variance;  // limit variance of the random phase, regimes iii and iv
    std::vector<MomentPrediction> moments;
};

TheoryPrediction predict(const MediumSpec& spec, double alpha, double t, std::span<const double> xi,
                         std::complex<double> phi0_hat, std::span<const std::pair<int, int>> pairs);

}  // namespace schrolab
