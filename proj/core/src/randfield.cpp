#include "schrolab/randfield.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "schrolab/stats.hpp"

namespace schrolab {

void GridSpec::validate() const {
    if (d < 1 || d > 3) throw std::invalid_argument("grid: d must be 1, 2 or 3");
    if (n < 8 || (n & (n - 1)) != 0) throw std::invalid_argument("grid: n must be a power of two, at least 8");
    if (!(length > 0.0) || !std::isfinite(length)) throw std::invalid_argument("grid: length must be positive");
}

std::size_t GridSpec::size() const noexcept {
    std::size_t s = 1;
    for (int i = 0; i < d; ++i) s *= n;
    return s;
}

double GridSpec::dk() const noexcept { return 2.0 * std::numbers::pi / length; }

void GridSpec::mode_index(std::size_t flat, int* k) const noexcept {
    for (int a = d - 1; a >= 0; --a) {
        const std::size_t j = flat % n;
        flat /= n;
        k[a] = j < n / 2 ? static_cast<int>(j) : static_cast<int>(j) - static_cast<int>(n);
    }
}

std::size_t GridSpec::negated(std::size_t flat) const noexcept {
    std::size_t out = 0, mul = 1;
    for (int a = 0; a < d; ++a) {
        const std::size_t j = flat % n;
        flat /= n;
        out += ((n - j) % n) * mul;
        mul *= n;
    }
    return out;
}

bool GridSpec::is_excluded(std::size_t flat) const noexcept {
    bool all_zero = true;
    for (int a = 0; a < d; ++a) {
        const std::size_t j = flat % n;
        flat /= n;
        if (j == n / 2) return true;
        if (j != 0) all_zero = false;
    }
    return all_zero;
}

double GridSpec::origin_sign(std::size_t flat) const noexcept {
    int k[3];
    mode_index(flat, k);
    int s = 0;
    for (int a = 0; a < d; ++a) s += k[a];
    return (s % 2 == 0) ? 1.0 : -1.0;
}

double GridSpec::wavenumber_sq(std::size_t flat) const noexcept {
    int k[3];
    mode_index(flat, k);
    const double h = dk();
    double s = 0.0;
    for (int a = 0; a < d; ++a) s += (h * k[a]) * (h * k[a]);
    return s;
}

namespace {

template <class DensityFn, class GapFn>
EffectiveMedium build(const GridSpec& grid, Provenance prov, double eps, double alpha, DensityFn density,
                      GapFn gap) {
    grid.validate();
    EffectiveMedium m;
    m.grid = grid;
    m.provenance = prov;
    m.eps = eps;
    m.alpha = alpha;
    const std::size_t N = grid.size();
    m.density.assign(N, 0.0);
    m.gap.assign(N, 0.0);
    m.variance.assign(N, 0.0);
    const double vol = std::pow(grid.length, grid.d);
    for (std::size_t i = 0; i < N; ++i) {
        const double q = std::sqrt(grid.wavenumber_sq(i));
        if (q == 0.0) continue;
        m.gap[i] = gap(q);
        if (grid.is_excluded(i)) continue;
        m.density[i] = density(q);
        m.variance[i] = m.density[i] / vol;
    }
    for (std::size_t i = 0; i < N; ++i) {
        if (m.variance[i] <= 0.0) continue;
        m.total_variance += m.variance[i];
        m.max_gap = std::max(m.max_gap, m.gap[i]);
        if (i < grid.negated(i)) m.representatives.push_back(i);
    }
    return m;
}

}  // namespace

EffectiveMedium physical_medium(const MediumSpec& spec, const GridSpec& grid) {
    if (grid.d != spec.d()) throw std::invalid_argument("physical_medium: grid and medium dimensions differ");
    const double sing = 2.0 * spec.gamma() + spec.d() - 2.0;
    const double two_b = 2.0 * spec.beta();
    const double mu = spec.mu();
    const Cutoff cut = spec.cutoff();
    return build(
        grid, Provenance::Physical, 1.0, 0.0, [&](double q) { return cut(q) / std::pow(q, sing); },
        [&](double q) { return mu * std::pow(q, two_b); });
}

EffectiveMedium rescaled_medium(const MediumSpec& spec, double eps, double alpha, const GridSpec& grid) {
    if (grid.d != spec.d()) throw std::invalid_argument("rescaled_medium: grid and medium dimensions differ");
    if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("rescaled_medium: eps must lie in (0,1]");
    if (!(alpha > 0.0)) throw std::invalid_argument("rescaled_medium: alpha must be positive");
    const auto ex = exponents(spec);
    const int d = spec.d();
    const double sing = 2.0 * spec.gamma() + d - 2.0;
    const double two_b = 2.0 * spec.beta();
    const double mu = spec.mu();
    const Cutoff cut = spec.cutoff();
    // At alpha = alpha_c both exponents vanish; use exactly 1 so the critical gap is bit-identical.
    const double e_gap = 2.0 * alpha * spec.beta() - ex.kappa;
    const double e_amp = 2.0 - 2.0 * ex.kappa + alpha * d;
    const bool critical = classify_regime(spec, alpha).label == RegimeLabel::Critical;
    const double gap_pre = critical ? 1.0 : std::pow(eps, e_gap);
    const double amp_pre = std::pow(eps, e_amp);
    const double ea = std::pow(eps, alpha);
    return build(
        grid, Provenance::Rescaled, eps, alpha,
        [&](double q) {
            const double p = ea * q;
            return amp_pre * cut(p) / std::pow(p, sing);
        },
        [&](double q) { return gap_pre * (mu * std::pow(q, two_b)); });
}

FieldState::FieldState(std::shared_ptr<const EffectiveMedium> medium, RngStream stream, double t0)
    : medium_(std::move(medium)), time_(t0), stream_(stream) {
    if (!medium_) throw std::invalid_argument("FieldState: null medium");
    modes_.assign(medium_->grid.size(), {0.0, 0.0});
}

FieldState draw_stationary(std::shared_ptr<const EffectiveMedium> medium, RngStream stream, double t0) {
    FieldState f(std::move(medium), stream, t0);
    const auto& m = f.medium();
    auto modes = f.modes_mut();
    // Row 0 is reserved for the initial draw; advance() uses rows 1, 2, ...
    for (std::size_t r = 0; r < m.representatives.size(); ++r) {
        const std::size_t i = m.representatives[r];
        const std::complex<double> z = std::sqrt(m.variance[i]) * stream.complex_normal(0, i);
        modes[i] = z;
        modes[m.grid.negated(i)] = std::conj(z);
    }
    return f;
}

void FieldState::advance(double dt) {
    if (!(dt >= 0.0)) throw std::invalid_argument("FieldState::advance: dt must be non-negative");
    if (dt == 0.0) return;
    const auto& m = *medium_;
    if (dt != cached_dt_) {
        decay_.resize(m.representatives.size());
        kick_.resize(m.representatives.size());
        for (std::size_t r = 0; r < m.representatives.size(); ++r) {
            const std::size_t i = m.representatives[r];
            const double x = m.gap[i] * dt;
            decay_[r] = std::exp(-x);
            kick_[r] = std::sqrt(m.variance[i] * -std::expm1(-2.0 * x));
        }
        cached_dt_ = dt;
    }
    ++steps_;
    for (std::size_t r = 0; r < m.representatives.size(); ++r) {
        const std::size_t i = m.representatives[r];
        const std::complex<double> z = decay_[r] * modes_[i] + kick_[r] * stream_.complex_normal(steps_, i);
        modes_[i] = z;
        modes_[m.grid.negated(i)] = std::conj(z);
    }
    time_ += dt;
}

FieldEvaluator::FieldEvaluator(const GridSpec& grid) : grid_(grid), dft_(grid.d, grid.n), scratch_(grid.size()) {
    grid.validate();
}

double FieldEvaluator::operator()(const FieldState& field, std::vector<double>& out) {
    const auto& g = field.medium().grid;
    if (g.n != grid_.n || g.d != grid_.d) throw std::invalid_argument("FieldEvaluator: grid mismatch");
    const auto modes = field.modes();
    const auto& reps = field.medium().representatives;
    std::fill(scratch_.begin(), scratch_.end(), std::complex<double>{0.0, 0.0});
    for (std::size_t i : reps) {
        const double s = g.origin_sign(i);
        scratch_[i] = s * modes[i];
        const std::size_t j = g.negated(i);
        scratch_[j] = s * modes[j];
    }
    dft_.inverse(scratch_);
    out.resize(scratch_.size());
    double max_im = 0.0;
    for (std::size_t j = 0; j < scratch_.size(); ++j) {
        out[j] = scratch_[j].real();
        max_im = std::max(max_im, std::abs(scratch_[j].imag()));
    }
    return max_im;
}

std::vector<CovarianceEstimate> empirical_covariance(std::shared_ptr<const EffectiveMedium> medium,
                                                     std::size_t n_samples, std::span<const CovarianceLag> lags,
                                                     std::uint64_t master_seed) {
    if (!medium) throw std::invalid_argument("empirical_covariance: null medium");
    if (n_samples < 2) throw std::invalid_argument("empirical_covariance: need at least 2 samples");
    const GridSpec& g = medium->grid;
    const double dx = g.dx();
    std::vector<std::vector<long>> shifts;
    for (const auto& lag : lags) {
        if (!(lag.t >= 0.0)) throw std::invalid_argument("empirical_covariance: lag time must be non-negative");
        if (static_cast<int>(lag.x.size()) != g.d) throw std::invalid_argument("empirical_covariance: lag dimension");
        std::vector<long> s(g.d);
        for (int a = 0; a < g.d; ++a) {
            const double m = lag.x[a] / dx;
            if (std::abs(m - std::round(m)) > 1e-9 * std::max(1.0, std::abs(m)))
                throw std::invalid_argument("empirical_covariance: spatial lag must be a multiple of dx");
            s[a] = std::lround(m);
        }
        shifts.push_back(std::move(s));
    }
    std::vector<double> times;
    for (const auto& lag : lags) times.push_back(lag.t);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    const std::size_t N = g.size();
    const long n = static_cast<long>(g.n);
    auto shifted = [&](std::size_t flat, const std::vector<long>& s) {
        std::size_t out = 0, mul = 1;
        std::size_t rem = flat;
        std::vector<long> idx(g.d);
        for (int a = g.d - 1; a >= 0; --a) {
            idx[a] = static_cast<long>(rem % g.n);
            rem /= g.n;
        }
        for (int a = g.d - 1; a >= 0; --a) {
            out += static_cast<std::size_t>(((idx[a] + s[a]) % n + n) % n) * mul;
            mul *= g.n;
        }
        return out;
    };
    std::vector<std::vector<std::size_t>> shift_maps;
    for (const auto& s : shifts) {
        std::vector<std::size_t> map(N);
        for (std::size_t j = 0; j < N; ++j) map[j] = shifted(j, s);
        shift_maps.push_back(std::move(map));
    }

    std::vector<std::vector<double>> per_sample(lags.size(), std::vector<double>(n_samples));
    FieldEvaluator eval(g);
    std::vector<double> v0, vt;
    for (std::size_t s = 0; s < n_samples; ++s) {
        FieldState f = draw_stationary(medium, RngStream(master_seed, s, StreamPurpose::FieldInit));
        eval(f, v0);
        for (double t : times) {
            f.advance(t - f.time());
            eval(f, vt);
            for (std::size_t l = 0; l < lags.size(); ++l) {
                if (lags[l].t != t) continue;
                double acc = 0.0;
                const auto& map = shift_maps[l];
                for (std::size_t j = 0; j < N; ++j) acc += vt[map[j]] * v0[j];
                per_sample[l][s] = acc / static_cast<double>(N);
            }
        }
    }
    std::vector<CovarianceEstimate> out;
    for (std::size_t l = 0; l < lags.size(); ++l) {
        const auto r = stats::real_mean(per_sample[l]);
        out.push_back({lags[l], r.mean, r.stderr_, n_samples});
    }
    return out;
}

}  // namespace schrolab
