#include "schrolab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace schrolab {

void InitialPacket::validate(int d) const {
    if (!(sigma > 0.0)) throw std::invalid_argument("packet: sigma must be positive");
    if (static_cast<int>(center.size()) != d) throw std::invalid_argument("packet: center has wrong dimension");
    if (!std::isfinite(amplitude)) throw std::invalid_argument("packet: amplitude must be finite");
}

double InitialPacket::value(std::span<const double> x) const {
    double r2 = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
    return amplitude * std::exp(-r2 / (2.0 * sigma * sigma));
}

std::complex<double> InitialPacket::fourier(std::span<const double> xi) const {
    double k2 = 0.0, kc = 0.0;
    for (std::size_t a = 0; a < xi.size(); ++a) {
        k2 += xi[a] * xi[a];
        kc += xi[a] * center[a];
    }
    const double mag = amplitude * std::pow(sigma * std::sqrt(2.0 * std::numbers::pi), static_cast<double>(xi.size())) *
                       std::exp(-0.5 * sigma * sigma * k2);
    return std::polar(mag, -kc);
}

double InitialPacket::l1_norm() const {
    return std::abs(amplitude) * std::pow(sigma * std::sqrt(2.0 * std::numbers::pi), static_cast<double>(center.size()));
}

WaveState::WaveState(GridSpec grid, double dispersion, std::vector<std::complex<double>> psi, double time)
    : grid_(grid), c_(dispersion), psi_(std::move(psi)), time_(time) {
    if (psi_.size() != grid_.size()) throw std::invalid_argument("WaveState: coefficient count mismatch");
}

std::vector<std::complex<double>> WaveState::fourier() const {
    std::vector<std::complex<double>> out(psi_.size());
    for (std::size_t i = 0; i < psi_.size(); ++i)
        out[i] = psi_[i] * std::polar(1.0, -0.5 * c_ * grid_.wavenumber_sq(i) * time_);
    return out;
}

double WaveState::mass() const noexcept {
    double s = 0.0;
    for (const auto& z : psi_) s += std::norm(z);
    return s;
}

WaveState init_wave(const InitialPacket& packet, const GridSpec& grid, double dispersion) {
    grid.validate();
    packet.validate(grid.d);
    if (grid.length < 12.0 * packet.sigma) throw std::invalid_argument("init_wave: domain must be at least 12 sigma wide");
    const std::size_t n = grid.n;
    const double L = grid.length, dx = grid.dx();
    // Periodized Gaussian factorizes over axes.
    std::vector<std::vector<double>> prof(grid.d, std::vector<double>(n));
    for (int a = 0; a < grid.d; ++a) {
        for (std::size_t j = 0; j < n; ++j) {
            const double x = -0.5 * L + static_cast<double>(j) * dx;
            double s = 0.0;
            for (int m = -2; m <= 2; ++m) {
                const double y = x + m * L - packet.center[a];
                s += std::exp(-y * y / (2.0 * packet.sigma * packet.sigma));
            }
            prof[a][j] = s;
        }
    }
    std::vector<std::complex<double>> data(grid.size());
    for (std::size_t flat = 0; flat < data.size(); ++flat) {
        std::size_t rem = flat;
        double v = packet.amplitude;
        for (int a = grid.d - 1; a >= 0; --a) {
            v *= prof[a][rem % n];
            rem /= n;
        }
        data[flat] = v;
    }
    Dft dft(grid.d, n);
    dft.forward(data);
    const double vol = std::pow(dx, grid.d);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] *= vol * grid.origin_sign(i);
    return WaveState(grid, dispersion, std::move(data), 0.0);
}

Probe make_probe(const GridSpec& grid, std::span<const double> xi) {
    if (static_cast<int>(xi.size()) != grid.d) throw std::invalid_argument("probe: wrong dimension");
    const double dk = grid.dk();
    std::size_t flat = 0;
    for (int a = 0; a < grid.d; ++a) {
        const double m = xi[a] / dk;
        if (std::abs(m - std::round(m)) > 1e-9 * std::max(1.0, std::abs(m)))
            throw std::invalid_argument("probe: frequency is not a grid mode (multiple of 2 pi / L)");
        const long k = std::lround(m);
        if (std::abs(k) >= static_cast<long>(grid.n / 2)) throw std::invalid_argument("probe: frequency beyond Nyquist");
        const std::size_t j = k >= 0 ? static_cast<std::size_t>(k) : static_cast<std::size_t>(k + static_cast<long>(grid.n));
        flat = flat * grid.n + j;
    }
    return {std::vector<double>(xi.begin(), xi.end()), flat};
}

std::vector<std::complex<double>> compensated_probe(const WaveState& wave, std::span<const Probe> probes) {
    std::vector<std::complex<double>> out;
    out.reserve(probes.size());
    const auto psi = wave.compensated();
    for (const auto& p : probes) {
        if (p.flat >= psi.size()) throw std::out_of_range("compensated_probe: probe outside grid");
        out.push_back(psi[p.flat]);
    }
    return out;
}

GridSpec field_grid_for(const GridSpec& wave_grid, int oversize) {
    if (oversize < 1) throw std::invalid_argument("field_oversize must be >= 1");
    return {wave_grid.d, wave_grid.n * static_cast<std::size_t>(oversize), wave_grid.length * oversize};
}

StrangStepper::StrangStepper(const GridSpec& wave_grid, const GridSpec& field_grid)
    : wave_grid_(wave_grid),
      field_grid_(field_grid),
      dft_(wave_grid.d, wave_grid.n),
      field_eval_(field_grid),
      buf_(wave_grid.size()),
      potential_(wave_grid.size()) {
    wave_grid.validate();
    field_grid.validate();
    if (field_grid.d != wave_grid.d) throw std::invalid_argument("StrangStepper: dimension mismatch");
    if (field_grid.n % wave_grid.n != 0 ||
        std::abs(field_grid.dx() - wave_grid.dx()) > 1e-12 * wave_grid.dx())
        throw std::invalid_argument("StrangStepper: field grid must be an integer multiple of the wave grid");
    const std::size_t off = (field_grid.n - wave_grid.n) / 2;
    window_.resize(wave_grid.size());
    for (std::size_t flat = 0; flat < window_.size(); ++flat) {
        std::size_t rem = flat, out = 0, mul = 1;
        for (int a = wave_grid.d - 1; a >= 0; --a) {
            out += (rem % wave_grid.n + off) * mul;
            rem /= wave_grid.n;
            mul *= field_grid.n;
        }
        window_[flat] = out;
    }
    half_k2_.resize(wave_grid.size());
    sign_.resize(wave_grid.size());
    for (std::size_t i = 0; i < half_k2_.size(); ++i) {
        half_k2_[i] = 0.5 * wave_grid.wavenumber_sq(i);
        sign_[i] = wave_grid.origin_sign(i);
    }
}

void StrangStepper::step(WaveState& wave, const FieldState& field, double dt) {
    const double want = wave.time() + 0.5 * dt;
    if (std::abs(field.time() - want) > 1e-12 * std::max(1.0, std::abs(want)))
        throw std::invalid_argument("strang step: field must be sampled at the step midpoint");
    field_eval_(field, field_values_);
    for (std::size_t j = 0; j < potential_.size(); ++j) potential_[j] = field_values_[window_[j]];
    step_with_potential(wave, potential_, dt);
}

void StrangStepper::step_with_potential(WaveState& wave, std::span<const double> potential, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("strang step: dt must be positive");
    if (potential.size() != buf_.size()) throw std::invalid_argument("strang step: potential size mismatch");
    if (wave.grid().n != wave_grid_.n || wave.grid().d != wave_grid_.d)
        throw std::invalid_argument("strang step: wave grid mismatch");
    const double t_mid = wave.time() + 0.5 * dt;
    const double c = wave.dispersion();
    auto& psi = wave.psi_;
    // psi -> phi_hat(t_mid): the two half kinetic steps are absorbed into the picture change.
    for (std::size_t i = 0; i < buf_.size(); ++i)
        buf_[i] = sign_[i] * psi[i] * std::polar(1.0, -c * half_k2_[i] * t_mid);
    dft_.inverse(buf_);
    for (std::size_t j = 0; j < buf_.size(); ++j) buf_[j] *= std::polar(1.0, -potential[j] * dt);
    dft_.forward(buf_);
    const double inv_n = 1.0 / static_cast<double>(buf_.size());
    for (std::size_t i = 0; i < buf_.size(); ++i)
        psi[i] = sign_[i] * inv_n * buf_[i] * std::polar(1.0, c * half_k2_[i] * t_mid);
    wave.time_ += dt;
}

std::shared_ptr<const EffectiveMedium> make_effective_medium(const RealizationSetup& s) {
    return std::make_shared<const EffectiveMedium>(
        rescaled_medium(s.medium, s.eps, s.alpha, field_grid_for(s.wave_grid, s.field_oversize)));
}

double choose_dt(const RealizationSetup& s, const EffectiveMedium& m) {
    const auto ex = exponents(s.medium);
    double dt = s.dt_rule.dt_max;
    if (!(dt > 0.0)) throw std::invalid_argument("dt rule: dt_max must be positive");
    const double vinf = 5.0 * std::sqrt(m.total_variance);
    if (vinf > 0.0) dt = std::min(dt, s.dt_rule.c_potential / vinf);
    double xi_max = 0.0;
    for (const auto& p : s.probes) {
        double r = 0.0;
        for (double v : p) r += v * v;
        xi_max = std::max(xi_max, std::sqrt(r));
    }
    if (xi_max > 0.0) dt = std::min(dt, s.dt_rule.c_dispersion * std::pow(s.eps, ex.kappa - 2.0 * s.alpha) / (xi_max * xi_max));
    if (m.max_gap > 0.0) dt = std::min(dt, s.dt_rule.c_rate / m.max_gap);
    return dt;
}

RealizationRunner::RealizationRunner(const RealizationSetup& setup)
    : RealizationRunner(setup, make_effective_medium(setup)) {}

RealizationRunner::RealizationRunner(const RealizationSetup& setup, std::shared_ptr<const EffectiveMedium> medium)
    : setup_(setup),
      medium_(std::move(medium)),
      stepper_(setup.wave_grid, field_grid_for(setup.wave_grid, setup.field_oversize)) {
    if (setup.times.empty()) throw std::invalid_argument("realization: no recording times");
    for (std::size_t i = 0; i < setup.times.size(); ++i) {
        if (!(setup.times[i] >= 0.0)) throw std::invalid_argument("realization: times must be non-negative");
        if (i > 0 && !(setup.times[i] > setup.times[i - 1]))
            throw std::invalid_argument("realization: times must be strictly increasing");
    }
    if (setup.probes.empty()) throw std::invalid_argument("realization: no probes");
    for (const auto& xi : setup.probes) probes_.push_back(make_probe(setup.wave_grid, xi));
    const auto ex = exponents(setup.medium);
    dispersion_ = std::pow(setup.eps, 2.0 * setup.alpha - ex.kappa);
    dt_ = choose_dt(setup, *medium_);
}

ProbeRecord RealizationRunner::run(std::size_t realization) {
    ProbeRecord rec;
    rec.realization = realization;
    rec.times = setup_.times;
    rec.values.reserve(setup_.times.size() * probes_.size());
    WaveState wave = init_wave(setup_.packet, setup_.wave_grid, dispersion_);
    rec.mass_initial = wave.mass();
    FieldState field = draw_stationary(medium_, RngStream(setup_.master_seed, realization, StreamPurpose::FieldStep));
    for (double t_rec : setup_.times) {
        const double span = t_rec - wave.time();
        if (span > 0.0) {
            const auto n_steps = static_cast<std::size_t>(std::ceil(span / dt_ - 1e-9));
            const double h = span / static_cast<double>(n_steps);
            for (std::size_t s = 0; s < n_steps; ++s) {
                field.advance(wave.time() + 0.5 * h - field.time());
                stepper_.step(wave, field, h);
                ++rec.steps;
            }
        }
        const auto v = compensated_probe(wave, probes_);
        rec.values.insert(rec.values.end(), v.begin(), v.end());
    }
    rec.mass_final = wave.mass();
    return rec;
}

ProbeRecord run_realization(const RealizationSetup& setup, std::size_t realization) {
    RealizationRunner runner(setup);
    return runner.run(realization);
}

}  // namespace schrolab
