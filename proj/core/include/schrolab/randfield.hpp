#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "schrolab/fft.hpp"
#include "schrolab/medium.hpp"
#include "schrolab/rng.hpp"

namespace schrolab {

// Periodic cube [-L/2, L/2)^d with n points per axis; x_j = -L/2 + j L/n.
struct GridSpec {
    int d = 1;
    std::size_t n = 256;
    double length = 40.0;

    void validate() const;  // throws on n not a power of two or n < 8, L <= 0, d outside 1..3
    std::size_t size() const noexcept;
    double dx() const noexcept { return length / static_cast<double>(n); }
    double dk() const noexcept;  // 2 pi / L

    // Signed integer wave index of a flat mode index along every axis (last axis fastest).
    void mode_index(std::size_t flat, int* k) const noexcept;
    std::size_t negated(std::size_t flat) const noexcept;
    // True for the zero mode and modes with any component at the Nyquist index n/2.
    bool is_excluded(std::size_t flat) const noexcept;
    // (-1)^(k_1 + ... + k_d): phase of e^{i q.x_0} at the grid origin x_0 = -L/2.
    double origin_sign(std::size_t flat) const noexcept;
    double wavenumber_sq(std::size_t flat) const noexcept;
};

enum class Provenance { Physical, Rescaled };

struct EffectiveMedium {
    GridSpec grid;
    Provenance provenance = Provenance::Physical;
    double eps = 1.0;
    double alpha = 0.0;
    std::vector<double> density;    // S(q); 0 on excluded modes
    std::vector<double> gap;        // g(q); 0 on the zero mode
    std::vector<double> variance;   // E|c_q|^2 = S(q) / L^d
    std::vector<std::size_t> representatives;  // one flat index per Hermitian pair with nonzero variance
    double total_variance = 0.0;    // sum of variance = Var V(t,x) on this grid
    double max_gap = 0.0;           // over modes with nonzero variance
};

EffectiveMedium physical_medium(const MediumSpec& spec, const GridSpec& grid);
EffectiveMedium rescaled_medium(const MediumSpec& spec, double eps, double alpha, const GridSpec& grid);

// Real field V(t, x) = sum_q c_q e^{i q.x} with c_{-q} = conj(c_q); each pair is an
// exact OU process with rate g(q) and stationary variance E|c_q|^2.
class FieldState {
public:
    FieldState(std::shared_ptr<const EffectiveMedium> medium, RngStream stream, double t0 = 0.0);

    const EffectiveMedium& medium() const noexcept { return *medium_; }
    std::span<const std::complex<double>> modes() const noexcept { return modes_; }
    std::span<std::complex<double>> modes_mut() noexcept { return modes_; }
    double time() const noexcept { return time_; }
    std::uint64_t steps_taken() const noexcept { return steps_; }

    // Exact OU transition over dt >= 0.
    void advance(double dt);

private:
    std::shared_ptr<const EffectiveMedium> medium_;
    std::vector<std::complex<double>> modes_;
    double time_;
    RngStream stream_;
    std::uint64_t steps_ = 0;
    double cached_dt_ = -1.0;
    std::vector<double> decay_, kick_;
};

FieldState draw_stationary(std::shared_ptr<const EffectiveMedium> medium, RngStream stream, double t0 = 0.0);

// Evaluates V on the grid points of the field's grid.
class FieldEvaluator {
public:
    explicit FieldEvaluator(const GridSpec& grid);
    // Writes V(t, x_j); returns max |Im| of the transform (roundoff indicator).
    double operator()(const FieldState& field, std::vector<double>& out);

private:
    GridSpec grid_;
    Dft dft_;
    std::vector<std::complex<double>> scratch_;
};

struct CovarianceLag {
    double t = 0.0;
    std::vector<double> x;  // must be integer multiples of dx on every axis
};

struct CovarianceEstimate {
    CovarianceLag lag;
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::size_t n_samples = 0;
};

// Per sample: spatial average of V(t, y + x) V(0, y); then mean and SE over samples.
std::vector<CovarianceEstimate> empirical_covariance(std::shared_ptr<const EffectiveMedium> medium,
                                                     std::size_t n_samples, std::span<const CovarianceLag> lags,
                                                     std::uint64_t master_seed);

}  // namespace schrolab
