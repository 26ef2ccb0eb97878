#include "schrolab/limitlaw.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "schrolab/quadrature.hpp"
#include "schrolab/theory.hpp"

namespace schrolab {

FbmLaw fbm_law(const MediumSpec& spec) { return {exponents(spec).hurst, big_d(spec)}; }

FbmPaths sample_fbm(const FbmLaw& law, std::span<const double> grid, std::size_t n_paths, std::uint64_t seed) {
    if (!(law.hurst > 0.0 && law.hurst < 1.0)) throw std::invalid_argument("fbm: Hurst index must lie in (0,1)");
    if (!(law.scale >= 0.0)) throw std::invalid_argument("fbm: scale must be non-negative");
    if (grid.empty()) throw std::invalid_argument("fbm: empty time grid");
    if (grid.size() > 4096) throw std::invalid_argument("fbm: at most 4096 grid points");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0)) throw std::invalid_argument("fbm: grid must start after 0");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw std::invalid_argument("fbm: grid must be increasing");
    }
    const std::size_t m = grid.size();
    FbmPaths out;
    out.times.push_back(0.0);
    out.times.insert(out.times.end(), grid.begin(), grid.end());
    out.n_paths = n_paths;
    out.values.assign(n_paths * (m + 1), 0.0);
    if (law.scale == 0.0) return out;

    const double h2 = 2.0 * law.hurst;
    Eigen::MatrixXd C(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            C(i, j) = 0.5 * law.scale *
                      (std::pow(grid[i], h2) + std::pow(grid[j], h2) - std::pow(std::abs(grid[i] - grid[j]), h2));
    Eigen::LLT<Eigen::MatrixXd> llt(C);
    double jitter = 1e-12 * C.trace() / static_cast<double>(m);
    for (int attempt = 0; llt.info() != Eigen::Success; ++attempt) {
        if (attempt == 3) throw std::runtime_error("fbm: covariance is not positive definite after jitter");
        llt.compute(C + jitter * Eigen::MatrixXd::Identity(m, m));
        jitter *= 100.0;
    }
    const Eigen::MatrixXd L = llt.matrixL();
    Eigen::VectorXd z(m), x(m);
    for (std::size_t p = 0; p < n_paths; ++p) {
        SequentialRng rng(RngStream(seed, p, StreamPurpose::Fbm));
        for (std::size_t i = 0; i < m; ++i) z(i) = rng.normal();
        x.noalias() = L.triangularView<Eigen::Lower>() * z;
        for (std::size_t i = 0; i < m; ++i) out.values[p * (m + 1) + i + 1] = x(i);
    }
    return out;
}

FbmPaths sample_fbm(const MediumSpec& spec, std::span<const double> grid, std::size_t n_paths, std::uint64_t seed) {
    return sample_fbm(fbm_law(spec), grid, n_paths, seed);
}

std::vector<double> sample_phase(double variance, std::size_t n, std::uint64_t seed) {
    if (!(variance >= 0.0)) throw std::invalid_argument("sample_phase: variance must be non-negative");
    const RngStream rng(seed, 0, StreamPurpose::LimitPhase);
    const double sd = std::sqrt(variance);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = sd * rng.normal_pair(i, 0)[0];
    return out;
}

std::vector<double> sample_phase(const MediumSpec& spec, double t, std::size_t n, std::uint64_t seed) {
    if (!(t > 0.0)) throw std::invalid_argument("sample_phase: t must be positive");
    return sample_phase(big_d(spec) * std::pow(t, 2.0 / exponents(spec).kappa), n, seed);
}

namespace {

// 2x - 3 + 4 e^{-x} - e^{-2x}
double integral_remainder(double x) {
    if (x < 0.1) {
        double term = x * x, s = 0.0;
        double fact = 2.0;
        for (int n = 3; n <= 14; ++n) {
            term *= -x;
            fact *= n;
            s += (4.0 - std::ldexp(1.0, n)) * term / fact;
        }
        return s;
    }
    return 2.0 * x - 3.0 + 4.0 * std::exp(-x) - std::exp(-2.0 * x);
}

// x - 1 + e^{-x}
double drift_remainder(double x) {
    if (x < 1e-3) return x * x * (0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0);
    return x + std::expm1(-x);
}

}  // namespace

OuIntegralStep ou_integral_step(double g, double v, double h) {
    if (!(g > 0.0) || !(h > 0.0) || !(v >= 0.0)) throw std::invalid_argument("ou_integral_step: bad arguments");
    const double x = g * h;
    const double em1 = std::expm1(-x);
    OuIntegralStep s;
    s.e = std::exp(-x);
    s.m = -em1 / g;
    const double v11 = -std::expm1(-2.0 * x);
    const double v12 = em1 * em1 / g;
    const double v22 = integral_remainder(x) / (g * g);
    s.s11 = std::sqrt(v * v11);
    s.s21 = s.s11 > 0.0 ? v * v12 / s.s11 : 0.0;
    s.s22 = std::sqrt(std::max(0.0, v * v22 - s.s21 * s.s21));
    return s;
}

double ou_integral_variance(double g, double v, double t) { return 2.0 * v * drift_remainder(g * t) / (g * g); }

struct CriticalLimitSampler::State {
    std::vector<double> xa, xb, ia, ib;                // log modes
    std::vector<std::complex<double>> xu, iu;          // uniform band
};

namespace {

void log_band(double p_lo, double p_hi, int nodes_per_decade, std::vector<double>& p, std::vector<double>& w) {
    if (!(p_hi > p_lo)) return;
    const int per_panel = std::max(2, nodes_per_decade / 2);
    const int panels = std::max(1, static_cast<int>(std::ceil(2.0 * std::log10(p_hi / p_lo))));
    const auto& gl = quad::gauss_legendre01(per_panel);
    const double u0 = std::log(p_lo), du = (std::log(p_hi) - u0) / panels;
    for (int k = 0; k < panels; ++k)
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double pk = std::exp(u0 + du * (k + gl.nodes[i]));
            p.push_back(pk);
            w.push_back(pk * du * gl.weights[i]);
        }
}

}  // namespace

CriticalLimitSampler::CriticalLimitSampler(const MediumSpec& spec, const InitialPacket& packet, double xi, double t,
                                           CriticalSamplerConfig cfg)
    : spec_(spec), packet_(packet), xi_(xi), t_(t), cfg_(cfg), dft_(1, 2) {
    if (spec.d() != 1) throw std::invalid_argument("critical sampler: only d = 1 is implemented");
    packet.validate(1);
    if (!(t > 0.0)) throw std::invalid_argument("critical sampler: t must be positive");
    if (cfg.substeps < 1) throw std::invalid_argument("critical sampler: substeps must be >= 1");
    if (!(cfg.period > 0.0) || !(cfg.band_max > 0.0) || !(cfg.tail_max >= cfg.band_max) || !(cfg.infrared_min > 0.0))
        throw std::invalid_argument("critical sampler: bad mode set");
    const double half_window = cfg.window_sigmas * packet.sigma;
    if (std::abs(packet.center[0]) + half_window > 0.25 * cfg.period)
        throw std::invalid_argument("critical sampler: packet window must fit in a quarter of the period");

    const double a0 = spec.cutoff().amplitude_at_zero;
    const double sing = 2.0 * spec.gamma() - 1.0;
    auto density = [&](double p) { return a0 * std::pow(p, -sing); };
    auto rate = [&](double p) { return spec.mu() * std::pow(p, 2.0 * spec.beta()); };

    const double dp = 2.0 * std::numbers::pi / cfg.period;
    const int k_lo = cfg.first_uniform_index;
    const int k_hi = static_cast<int>(std::floor(cfg.band_max / dp));
    if (k_hi <= k_lo) throw std::invalid_argument("critical sampler: uniform band is empty");
    n_fft_ = 16;
    while (n_fft_ / 2 <= static_cast<std::size_t>(k_hi)) n_fft_ *= 2;
    dx_ = cfg.period / static_cast<double>(n_fft_);
    dft_ = Dft(1, n_fft_);
    fft_buf_.resize(n_fft_);

    for (int k = k_lo; k <= k_hi; ++k) {
        const double p = k * dp;
        uniform_k_.push_back(k);
        uniform_var_.push_back(density(p) * dp / (4.0 * std::numbers::pi));
        uniform_rate_.push_back(rate(p));
    }
    std::vector<double> w;
    log_band(cfg.infrared_min, (k_lo - 0.5) * dp, cfg.nodes_per_decade, log_p_, w);
    log_band((k_hi + 0.5) * dp, cfg.tail_max, cfg.nodes_per_decade, log_p_, w);
    for (std::size_t j = 0; j < log_p_.size(); ++j) {
        log_var_.push_back(density(log_p_[j]) * w[j] / std::numbers::pi);
        log_rate_.push_back(rate(log_p_[j]));
    }

    for (std::size_t j = 0; j < n_fft_; ++j) {
        const double x = -0.5 * cfg.period + static_cast<double>(j) * dx_;
        if (std::abs(x - packet.center[0]) <= half_window) {
            window_idx_.push_back(j);
            window_x_.push_back(x);
            const double xv[1] = {x};
            window_weight_.push_back(packet.value(xv) * std::polar(dx_, -xi * x));
        }
    }
    const std::size_t nw = window_x_.size();
    cos_tab_.resize(log_p_.size() * nw);
    sin_tab_.resize(log_p_.size() * nw);
    for (std::size_t j = 0; j < log_p_.size(); ++j)
        for (std::size_t i = 0; i < nw; ++i) {
            cos_tab_[j * nw + i] = std::cos(log_p_[j] * window_x_[i]);
            sin_tab_[j * nw + i] = std::sin(log_p_[j] * window_x_[i]);
        }
    theta_buf_.resize(nw);
}

void CriticalLimitSampler::draw(State& s, const RngStream& rng) const {
    const std::size_t nl = log_p_.size(), nu = uniform_k_.size();
    s.xa.resize(nl);
    s.xb.resize(nl);
    s.ia.assign(nl, 0.0);
    s.ib.assign(nl, 0.0);
    s.xu.resize(nu);
    s.iu.assign(nu, {0.0, 0.0});
    for (std::size_t j = 0; j < nl; ++j) {
        const double sd = std::sqrt(log_var_[j]);
        const auto z = rng.normal_pair(0, j);
        s.xa[j] = sd * z[0];
        s.xb[j] = sd * z[1];
    }
    for (std::size_t u = 0; u < nu; ++u) {
        const double sd = std::sqrt(uniform_var_[u]);
        const auto z = rng.normal_pair(0, nl + u);
        s.xu[u] = {sd * z[0], sd * z[1]};
    }
}

void CriticalLimitSampler::advance(State& s, const RngStream& rng, std::uint64_t row, double h) const {
    const std::size_t nl = log_p_.size(), nu = uniform_k_.size();
    auto move = [](const OuIntegralStep& st, double& x, double& i, double z1, double z2) {
        i += st.m * x + st.s21 * z1 + st.s22 * z2;
        x = st.e * x + st.s11 * z1;
    };
    for (std::size_t j = 0; j < nl; ++j) {
        const auto st = ou_integral_step(log_rate_[j], log_var_[j], h);
        const auto za = rng.normal_pair(row, 2 * j);
        const auto zb = rng.normal_pair(row, 2 * j + 1);
        move(st, s.xa[j], s.ia[j], za[0], za[1]);
        move(st, s.xb[j], s.ib[j], zb[0], zb[1]);
    }
    for (std::size_t u = 0; u < nu; ++u) {
        const auto st = ou_integral_step(uniform_rate_[u], uniform_var_[u], h);
        const auto zr = rng.normal_pair(row, 2 * (nl + u));
        const auto zi = rng.normal_pair(row, 2 * (nl + u) + 1);
        double xr = s.xu[u].real(), xi = s.xu[u].imag(), ir = s.iu[u].real(), ii = s.iu[u].imag();
        move(st, xr, ir, zr[0], zr[1]);
        move(st, xi, ii, zi[0], zi[1]);
        s.xu[u] = {xr, xi};
        s.iu[u] = {ir, ii};
    }
}

void CriticalLimitSampler::theta_on_window(const State& s, std::vector<double>& out) {
    std::fill(fft_buf_.begin(), fft_buf_.end(), std::complex<double>{0.0, 0.0});
    for (std::size_t u = 0; u < uniform_k_.size(); ++u) {
        const std::size_t k = static_cast<std::size_t>(uniform_k_[u]);
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        fft_buf_[k] = sign * s.iu[u];
        fft_buf_[n_fft_ - k] = sign * std::conj(s.iu[u]);
    }
    dft_.inverse(fft_buf_);
    const std::size_t nw = window_idx_.size();
    out.resize(nw);
    for (std::size_t i = 0; i < nw; ++i) out[i] = fft_buf_[window_idx_[i]].real();
    for (std::size_t j = 0; j < log_p_.size(); ++j) {
        const double a = s.ia[j], b = s.ib[j];
        const double* c = &cos_tab_[j * nw];
        const double* sn = &sin_tab_[j * nw];
        for (std::size_t i = 0; i < nw; ++i) out[i] += a * c[i] + b * sn[i];
    }
}

std::complex<double> CriticalLimitSampler::functional(std::span<const double> theta) const {
    if (theta.size() != window_weight_.size()) throw std::invalid_argument("functional: window size mismatch");
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) acc += window_weight_[i] * std::polar(1.0, -theta[i]);
    return acc;
}

std::complex<double> CriticalLimitSampler::sample(std::uint64_t seed, std::uint64_t index) {
    State s;
    const RngStream rng(seed, index, StreamPurpose::LimitField);
    draw(s, rng);
    const double h = t_ / cfg_.substeps;
    for (int k = 0; k < cfg_.substeps; ++k) advance(s, rng, static_cast<std::uint64_t>(k) + 1, h);
    theta_on_window(s, theta_buf_);
    return functional(theta_buf_);
}

std::vector<std::complex<double>> CriticalLimitSampler::sample_many(std::size_t n, std::uint64_t seed) {
    std::vector<std::complex<double>> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = sample(seed, i);
    return out;
}

double CriticalLimitSampler::theta_variance() const {
    double v = 0.0;
    for (std::size_t j = 0; j < log_p_.size(); ++j) v += ou_integral_variance(log_rate_[j], log_var_[j], t_);
    for (std::size_t u = 0; u < uniform_k_.size(); ++u)
        v += 4.0 * ou_integral_variance(uniform_rate_[u], uniform_var_[u], t_);
    return v;
}

double CriticalLimitSampler::wdot_covariance(double lag) const {
    double v = 0.0;
    for (std::size_t j = 0; j < log_p_.size(); ++j) v += log_var_[j] * std::exp(-log_rate_[j] * lag);
    for (std::size_t u = 0; u < uniform_k_.size(); ++u) v += 4.0 * uniform_var_[u] * std::exp(-uniform_rate_[u] * lag);
    return v;
}

CriticalLimitSampler::Probe CriticalLimitSampler::probe_center(std::uint64_t seed, std::uint64_t index, double lag) {
    if (!(lag > 0.0)) throw std::invalid_argument("probe_center: lag must be positive");
    State s;
    const RngStream rng(seed, index, StreamPurpose::LimitField);
    draw(s, rng);
    // W-dot at x = 0 (cos terms only)
    auto wdot = [&](const State& st) {
        double w = 0.0;
        for (std::size_t j = 0; j < log_p_.size(); ++j) w += st.xa[j];
        for (std::size_t u = 0; u < uniform_k_.size(); ++u) w += 2.0 * st.xu[u].real();
        return w;
    };
    auto theta0 = [&](const State& st) {
        double w = 0.0;
        for (std::size_t j = 0; j < log_p_.size(); ++j) w += st.ia[j];
        for (std::size_t u = 0; u < uniform_k_.size(); ++u) w += 2.0 * st.iu[u].real();
        return w;
    };
    Probe p;
    p.wdot0 = wdot(s);
    advance(s, rng, 1, lag);
    p.wdot_lag = wdot(s);
    p.theta_lag = theta0(s);
    return p;
}

std::complex<double> sample_critical_limit(const MediumSpec& spec, const InitialPacket& packet, double xi, double t,
                                           std::uint64_t seed, const CriticalSamplerConfig& cfg) {
    CriticalLimitSampler s(spec, packet, xi, t, cfg);
    return s.sample(seed, 0);
}

}  // namespace schrolab
