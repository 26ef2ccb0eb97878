#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "schrolab/fft.hpp"
#include "schrolab/medium.hpp"
#include "schrolab/rng.hpp"
#include "schrolab/solver.hpp"

namespace schrolab {

// Centered Gaussian process with Var X_t = scale t^{2H}.
struct FbmLaw {
    double hurst = 0.5;
    double scale = 1.0;
};

FbmLaw fbm_law(const MediumSpec& spec);  // H = 1/kappa, scale = D

struct FbmPaths {
    std::vector<double> times;   // times[0] = 0, then the requested grid
    std::size_t n_paths = 0;
    std::vector<double> values;  // n_paths x times.size(), row major; values at t = 0 are 0

    double at(std::size_t path, std::size_t time_index) const { return values[path * times.size() + time_index]; }
};

FbmPaths sample_fbm(const FbmLaw& law, std::span<const double> grid, std::size_t n_paths, std::uint64_t seed);
FbmPaths sample_fbm(const MediumSpec& spec, std::span<const double> grid, std::size_t n_paths, std::uint64_t seed);

// i.i.d. N(0, variance) phases.
std::vector<double> sample_phase(double variance, std::size_t n, std::uint64_t seed);
// Regime iii law: variance D t^{2/kappa}.
std::vector<double> sample_phase(const MediumSpec& spec, double t, std::size_t n, std::uint64_t seed);

// Transition of an OU component X (rate g, stationary variance v) together with its time
// integral I over a step h: X' = e X + s11 z1,  I' = I + m X + s21 z1 + s22 z2.
struct OuIntegralStep {
    double e = 1.0, m = 0.0, s11 = 0.0, s21 = 0.0, s22 = 0.0;
};
OuIntegralStep ou_integral_step(double g, double v, double h);
// Var of int_0^t X ds for a stationary OU component.
double ou_integral_variance(double g, double v, double t);

struct CriticalSamplerConfig {
    double period = 64.0;        // period of the uniform band (spacing 2 pi / period)
    double band_max = 256.0;     // uniform band upper wavenumber
    double tail_max = 1.0e6;     // largest tail mode
    double infrared_min = 1.0e-8;
    int nodes_per_decade = 16;   // log-spaced bands
    int first_uniform_index = 4;
    int substeps = 1;
    double window_sigmas = 8.0;  // spatial quadrature window half width in packet widths
};

// Spectral OU synthesis of the critical limit field (d = 1). Each sample draws a stationary
// mode set, advances values and time integrals exactly to t, and evaluates
// psi_bar = int phi0(x) e^{-i xi x} e^{-i Theta(t,x)} dx on the window.
class CriticalLimitSampler {
public:
    CriticalLimitSampler(const MediumSpec& spec, const InitialPacket& packet, double xi, double t,
                         CriticalSamplerConfig cfg = {});

    std::complex<double> sample(std::uint64_t seed, std::uint64_t index);
    std::vector<std::complex<double>> sample_many(std::size_t n, std::uint64_t seed);

    // Quadrature of phi0(x) e^{-i xi x} e^{-i theta(x)} over the window.
    std::complex<double> functional(std::span<const double> theta) const;

    // Var Theta(t, x) of the truncated mode set (exact, no sampling).
    double theta_variance() const;
    // Covariance of W-dot at (lag, 0) of the truncated mode set.
    double wdot_covariance(double lag) const;

    // Draw the stationary mode state and return W-dot and Theta at the window center after
    // advancing `lag` (used for covariance checks).
    struct Probe {
        double wdot0 = 0.0, wdot_lag = 0.0, theta_lag = 0.0;
    };
    Probe probe_center(std::uint64_t seed, std::uint64_t index, double lag);

    std::span<const double> window_x() const noexcept { return window_x_; }
    std::size_t mode_count() const noexcept { return log_p_.size() + uniform_k_.size(); }

private:
    struct State;
    void draw(State& s, const RngStream& rng) const;
    void advance(State& s, const RngStream& rng, std::uint64_t row, double h) const;
    void theta_on_window(const State& s, std::vector<double>& out);

    MediumSpec spec_;
    InitialPacket packet_;
    double xi_;
    double t_;
    CriticalSamplerConfig cfg_;
    // log-spaced modes (infrared and tail): real cos/sin pairs
    std::vector<double> log_p_, log_var_, log_rate_;
    // uniform band: complex modes at k dp
    std::vector<int> uniform_k_;
    std::vector<double> uniform_var_, uniform_rate_;  // variance of each real component
    std::size_t n_fft_ = 0;
    double dx_ = 0.0;
    Dft dft_;
    std::vector<std::size_t> window_idx_;
    std::vector<double> window_x_;
    std::vector<std::complex<double>> window_weight_;  // phi0(x) e^{-i xi x} dx
    std::vector<double> cos_tab_, sin_tab_;            // log modes x window
    std::vector<std::complex<double>> fft_buf_;
    std::vector<double> theta_buf_;
};

std::complex<double> sample_critical_limit(const MediumSpec& spec, const InitialPacket& packet, double xi, double t,
                                           std::uint64_t seed, const CriticalSamplerConfig& cfg = {});

}  // namespace schrolab
