#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "schrolab/fft.hpp"
#include "schrolab/medium.hpp"
#include "schrolab/randfield.hpp"

namespace schrolab {

// phi0(x) = A exp(-|x - c|^2 / (2 sigma^2)),  phi0_hat(xi) = A (sigma sqrt(2 pi))^d exp(-sigma^2 |xi|^2 / 2 - i xi.c).
struct InitialPacket {
    double sigma = 1.0;
    std::vector<double> center{0.0};
    double amplitude = 1.0;

    void validate(int d) const;
    double value(std::span<const double> x) const;
    std::complex<double> fourier(std::span<const double> xi) const;
    double l1_norm() const;  // A (sigma sqrt(2 pi))^d
};

// Wave on a periodic grid. Coefficients are kept in the interaction picture:
// psi_k = phi_hat_k exp(+i c |xi_k|^2 t / 2), with phi_hat_k = dx^d sum_j phi(x_j) e^{-i xi_k.x_j}
// and c = eps^(2 alpha - kappa) the dispersion coefficient.
class WaveState {
public:
    WaveState(GridSpec grid, double dispersion, std::vector<std::complex<double>> psi, double time);

    const GridSpec& grid() const noexcept { return grid_; }
    double dispersion() const noexcept { return c_; }
    double time() const noexcept { return time_; }
    std::span<const std::complex<double>> compensated() const noexcept { return psi_; }
    std::vector<std::complex<double>> fourier() const;  // phi_hat at the current time
    double mass() const noexcept;                        // sum |phi_hat_k|^2

private:
    friend class StrangStepper;
    GridSpec grid_;
    double c_;
    std::vector<std::complex<double>> psi_;
    double time_;
};

WaveState init_wave(const InitialPacket& packet, const GridSpec& grid, double dispersion);

// Probe frequency aligned with a grid mode.
struct Probe {
    std::vector<double> xi;
    std::size_t flat = 0;
};

Probe make_probe(const GridSpec& grid, std::span<const double> xi);

// psi_eps(t, xi) = phi_hat(t, xi) exp(i c |xi|^2 t / 2) for each probe.
std::vector<std::complex<double>> compensated_probe(const WaveState& wave, std::span<const Probe> probes);

// One Strang step K(dt/2) P(dt) K(dt/2). The field may live on a grid that is an integer
// multiple of the wave grid (same dx); the wave sees the central window.
class StrangStepper {
public:
    StrangStepper(const GridSpec& wave_grid, const GridSpec& field_grid);

    // pre: field.time() == wave.time() + dt/2 (relative 1e-12)
    void step(WaveState& wave, const FieldState& field, double dt);
    // Potential already sampled on the wave grid (for tests and non-random potentials).
    void step_with_potential(WaveState& wave, std::span<const double> potential, double dt);

    const GridSpec& field_grid() const noexcept { return field_grid_; }

private:
    GridSpec wave_grid_;
    GridSpec field_grid_;
    Dft dft_;
    FieldEvaluator field_eval_;
    std::vector<std::size_t> window_;  // wave point -> field point
    std::vector<double> half_k2_;      // |xi_k|^2 / 2
    std::vector<double> sign_;
    std::vector<std::complex<double>> buf_;
    std::vector<double> field_values_;
    std::vector<double> potential_;
};

struct DtRule {
    double dt_max = 0.01;
    double c_potential = 0.1;   // dt <= c / ||V_eps||_inf
    double c_dispersion = 0.1;  // dt <= c eps^(kappa - 2 alpha) / |xi_max|^2
    double c_rate = 1.0;        // dt <= c / max OU rate
};

struct RealizationSetup {
    MediumSpec medium = medium_a();
    double eps = 0.1;
    double alpha = 1.0;
    GridSpec wave_grid{};
    int field_oversize = 1;
    InitialPacket packet{};
    std::vector<std::vector<double>> probes;
    std::vector<double> times;  // recording times, strictly increasing, >= 0
    DtRule dt_rule{};
    std::uint64_t master_seed = 0;
};

struct ProbeRecord {
    std::size_t realization = 0;
    std::vector<double> times;
    std::vector<std::complex<double>> values;  // times.size() x probes, row major
    double mass_initial = 0.0;
    double mass_final = 0.0;
    std::size_t steps = 0;

    std::complex<double> at(std::size_t time_index, std::size_t probe) const {
        return values[time_index * (values.size() / times.size()) + probe];
    }
};

// Owns the per-thread solver state; the effective medium is shared.
class RealizationRunner {
public:
    explicit RealizationRunner(const RealizationSetup& setup);
    RealizationRunner(const RealizationSetup& setup, std::shared_ptr<const EffectiveMedium> medium);

    ProbeRecord run(std::size_t realization);

    double step_size() const noexcept { return dt_; }
    const EffectiveMedium& medium() const noexcept { return *medium_; }
    std::span<const Probe> probes() const noexcept { return probes_; }

private:
    RealizationSetup setup_;
    std::shared_ptr<const EffectiveMedium> medium_;
    StrangStepper stepper_;
    std::vector<Probe> probes_;
    double dispersion_;
    double dt_;
};

GridSpec field_grid_for(const GridSpec& wave_grid, int oversize);
std::shared_ptr<const EffectiveMedium> make_effective_medium(const RealizationSetup& setup);
double choose_dt(const RealizationSetup& setup, const EffectiveMedium& medium);

ProbeRecord run_realization(const RealizationSetup& setup, std::size_t realization);

}  // namespace schrolab
