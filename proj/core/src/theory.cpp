#include "schrolab/theory.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>

#include "schrolab/quadrature.hpp"

namespace schrolab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double kernel(int d, double x) {
    switch (d) {
        case 1: return std::cos(x);
        case 2: return std::cyl_bessel_j(0.0, x);
        default: return x == 0.0 ? 1.0 : std::sin(x) / x;
    }
}

double norm(std::span<const double> xi) {
    double s = 0.0;
    for (double v : xi) s += v * v;
    return std::sqrt(s);
}

void check_xi(const MediumSpec& spec, std::span<const double> xi) {
    if (static_cast<int>(xi.size()) != spec.d()) throw std::invalid_argument("xi has wrong dimension");
}

}  // namespace

double sphere_area(int d) {
    switch (d) {
        case 1: return 2.0;
        case 2: return kTwoPi;
        case 3: return 4.0 * std::numbers::pi;
    }
    throw std::invalid_argument("sphere_area: d must be 1, 2 or 3");
}

double k1(const MediumSpec& s) {
    const double a = exponents(s).singular_exponent;
    return sphere_area(s.d()) / (2.0 * s.beta()) * std::pow(s.mu(), -a) * std::tgamma(a);
}

double k1_quadrature(const MediumSpec& s) {
    const double g = s.gamma(), b = s.beta(), mu = s.mu();
    auto f = [=](double rho) { return std::exp(-mu * std::pow(rho, 2.0 * b)) * std::pow(rho, 1.0 - 2.0 * g); };
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    const double head = ts.integrate(f, 0.0, 1.0, 1e-15);
    const double tail = es.integrate(f, 1.0, std::numeric_limits<double>::infinity(), 1e-15);
    return sphere_area(s.d()) * (head + tail);
}

double k2_radial(const MediumSpec& s, double r) {
    if (r < 0.0) throw std::invalid_argument("k2_radial: r must be non-negative");
    if (r == 0.0) return k1(s) / std::pow(kTwoPi, s.d());
    // rho = v^c with c = 1/(2 - 2 gamma) makes the integrand smooth at 0.
    const double c = 1.0 / (2.0 - 2.0 * s.gamma());
    const double p = 2.0 * s.beta() * c;
    const double mu = s.mu();
    const int d = s.d();
    const double vmax = std::pow(45.0 / mu, 1.0 / p);
    auto f = [=](double v) { return c * std::exp(-mu * std::pow(v, p)) * kernel(d, std::pow(v, c) * r); };
    // Split into pieces with a bounded number of oscillations each.
    const double rho_max = std::pow(vmax, c);
    const int pieces = std::max(4, static_cast<int>(std::ceil(rho_max * r / 6.0)));
    double total = 0.0;
    for (int i = 0; i < pieces; ++i) {
        // uniform in rho, so oscillation count per piece is balanced
        const double lo = std::pow(rho_max * i / pieces, 1.0 / c);
        const double hi = std::pow(rho_max * (i + 1) / pieces, 1.0 / c);
        total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 12, 1e-14);
    }
    return sphere_area(d) * total / std::pow(kTwoPi, d);
}

double k2(const MediumSpec& s, double lambda, std::span<const double> xi) {
    check_xi(s, xi);
    if (!(lambda >= 0.0)) throw std::invalid_argument("k2: lambda must be non-negative");
    const double x = norm(xi);
    const double e = 1.0 - 1.0 / (2.0 * s.beta());
    double r;
    if (x == 0.0) {
        r = 0.0;
    } else if (lambda == 0.0) {
        if (e > 0.0) r = 0.0;
        else if (e == 0.0) r = x;
        else return 0.0;
    } else {
        r = x * std::pow(lambda, e);
    }
    return k2_radial(s, r);
}

K2Table::K2Table(const MediumSpec& spec, double r_max, int nodes) : r_max_(r_max), coeffs_(nodes) {
    if (!(r_max > 0.0)) throw std::invalid_argument("K2Table: r_max must be positive");
    std::vector<double> fv(nodes);
    for (int j = 0; j < nodes; ++j) {
        const double x = std::cos(std::numbers::pi * (j + 0.5) / nodes);
        fv[j] = k2_radial(spec, 0.5 * r_max * (x + 1.0));
    }
    for (int k = 0; k < nodes; ++k) {
        double s = 0.0;
        for (int j = 0; j < nodes; ++j) s += fv[j] * std::cos(std::numbers::pi * k * (j + 0.5) / nodes);
        coeffs_[k] = 2.0 * s / nodes;
    }
    coeffs_[0] *= 0.5;
}

double K2Table::operator()(double r) const {
    if (r < 0.0 || r > r_max_ * (1.0 + 1e-12)) throw std::out_of_range("K2Table: r outside table");
    const double x = 2.0 * r / r_max_ - 1.0;
    // Clenshaw
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 1;) {
        const double b0 = 2.0 * x * b1 - b2 + coeffs_[k];
        b2 = b1;
        b1 = b0;
    }
    return x * b1 - b2 + coeffs_[0];
}

double pair_kernel_mass(double a, double t) {
    return 2.0 * std::pow(t, 2.0 - a) / ((1.0 - a) * (2.0 - a));
}

double big_d(const MediumSpec& s) {
    const double kappa = exponents(s).kappa;
    return s.cutoff().amplitude_at_zero * k1(s) * kappa * kappa / (std::pow(kTwoPi, s.d()) * (2.0 - kappa));
}

double big_d_txi(const MediumSpec& s, double t, std::span<const double> xi) {
    check_xi(s, xi);
    if (!(s.beta() > 0.5)) throw std::invalid_argument("big_d_txi: requires beta > 1/2");
    if (!(t > 0.0)) throw std::invalid_argument("big_d_txi: t must be positive");
    const double a = exponents(s).singular_exponent;
    const double x = norm(xi);
    const double e = 1.0 - 1.0 / (2.0 * s.beta());
    const double a0 = s.cutoff().amplitude_at_zero;
    if (x == 0.0) return big_d(s);
    auto f = [&](double r) { return 2.0 * (1.0 - r) * k2_radial(s, x * std::pow(r * t, e)); };
    return a0 * quad::graded_singular(f, -a, 1.0, 14, 0.15, 24);
}

std::complex<double> predict_moment(const MediumSpec& spec, const Regime& regime, int M, int N, double t,
                                    std::span<const double> xi, std::complex<double> phi0_hat) {
    if (M < 0 || N < 0) throw std::invalid_argument("predict_moment: M, N must be non-negative");
    if (!(t > 0.0)) throw std::invalid_argument("predict_moment: t must be positive");
    check_xi(spec, xi);
    const auto ex = exponents(spec);
    const double tk = std::pow(t, 2.0 / ex.kappa);
    const std::complex<double> base = std::pow(phi0_hat, M) * std::pow(std::conj(phi0_hat), N);
    switch (regime.label) {
        case RegimeLabel::OutOfTheory:
            throw NoPredictionError("no limit theorem covers this (medium, alpha)");
        case RegimeLabel::Homogenized:
            return base * std::exp(-0.5 * (M + N) * big_d(spec) * tk);
        case RegimeLabel::Critical:
            if (M != 1 || N != 0)
                throw NoPredictionError("critical regime: only the first moment is closed form; use the limit sampler");
            return phi0_hat * std::exp(-0.5 * big_d(spec) * tk);
        case RegimeLabel::FractionalPhase:
            return base * std::exp(-0.5 * (M - N) * (M - N) * big_d(spec) * tk);
        case RegimeLabel::FractionalPhaseXi:
            return base * std::exp(-0.5 * (M - N) * (M - N) * big_d_txi(spec, t, xi) * tk);
    }
    throw std::logic_error("predict_moment: unhandled regime");
}

TheoryPrediction predict(const MediumSpec& spec, double alpha, double t, std::span<const double> xi,
                         std::complex<double> phi0_hat, std::span<const std::pair<int, int>> pairs) {
    TheoryPrediction p;
    p.regime = classify_regime(spec, alpha);
    p.exps = exponents(spec);
    p.k1 = k1(spec);
    p.D = big_d(spec);
    const double tk = std::pow(t, 2.0 / p.exps.kappa);
    if (spec.beta() > 0.5) p.D_txi = big_d_txi(spec, t, xi);
    if (p.regime.label == RegimeLabel::FractionalPhase) p.phase_variance = p.D * tk;
    if (p.regime.label == RegimeLabel::FractionalPhaseXi) p.phase_variance = *p.D_txi * tk;
    for (auto [M, N] : pairs) {
        MomentPrediction m{M, N, std::nullopt, {}};
        try {
            m.value = predict_moment(spec, p.regime, M, N, t, xi, phi0_hat);
        } catch (const NoPredictionError& e) {
            m.note = e.what();
        }
        p.moments.push_back(std::move(m));
    }
    return p;
}

}  // namespace schrolab
