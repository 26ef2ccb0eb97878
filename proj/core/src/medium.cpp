#include "schrolab/medium.hpp"

#include <cmath>
#include <stdexcept>

namespace schrolab {

namespace {

double norm_of(std::span<const double> p, int d) {
    if (static_cast<int>(p.size()) != d) throw std::invalid_argument("momentum has wrong dimension");
    double s = 0.0;
    for (double v : p) s += v * v;
    return std::sqrt(s);
}

bool near(double x, double y) { return std::abs(x - y) <= 1e-9 * std::max(1.0, std::abs(y)); }

}  // namespace

double Cutoff::operator()(double p) const noexcept {
    if (p > p_max || p < 0.0) return 0.0;
    if (kind == CutoffKind::SharpBall) return amplitude_at_zero;
    const double u = p / p_max;
    if (u >= 1.0) return 0.0;
    return amplitude_at_zero * std::exp(1.0 - 1.0 / (1.0 - u * u));
}

MediumSpec MediumSpec::validate(const MediumParams& raw) {
    if (raw.d < 1 || raw.d > 3) throw std::invalid_argument("medium: d must be 1, 2 or 3");
    if (!(raw.gamma > 0.0 && raw.gamma < 1.0)) throw std::invalid_argument("medium: gamma must lie in (0,1)");
    if (!(raw.beta > 0.0 && raw.beta < 1.0)) throw std::invalid_argument("medium: beta must lie in (0,1)");
    if (!(raw.gamma + raw.beta > 1.0)) throw std::invalid_argument("medium: gamma + beta must exceed 1");
    if (!(raw.mu > 0.0) || !std::isfinite(raw.mu)) throw std::invalid_argument("medium: mu must be positive");
    if (!(raw.cutoff.amplitude_at_zero > 0.0)) throw std::invalid_argument("medium: a(0) must be positive");
    if (!(raw.cutoff.p_max > 0.0) || !std::isfinite(raw.cutoff.p_max))
        throw std::invalid_argument("medium: cutoff radius must be positive");
    return MediumSpec(raw);
}

MediumSpec medium_a() { return MediumSpec::validate({1, 0.75, 0.5, 1.0, {}}); }
MediumSpec medium_b() { return MediumSpec::validate({1, 0.5, 0.75, 1.0, {}}); }

ScalingExponents exponents(const MediumSpec& s) noexcept {
    const double den = 2.0 * s.beta() + s.gamma() - 1.0;
    const double kappa = 2.0 * s.beta() / den;
    return {kappa, 1.0 / den, (1.0 - s.gamma()) / s.beta(), 1.0 / kappa};
}

Regime classify_regime(const MediumSpec& spec, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("classify_regime: alpha must be positive");
    const auto e = exponents(spec);
    const double lower = e.kappa - e.alpha_c;
    RegimeLabel label;
    if (near(alpha, e.alpha_c)) {
        label = RegimeLabel::Critical;
    } else if (alpha > e.alpha_c) {
        label = RegimeLabel::Homogenized;
    } else if (spec.beta() <= 0.5) {
        label = RegimeLabel::FractionalPhase;
    } else if (near(alpha, lower)) {
        label = RegimeLabel::FractionalPhaseXi;
    } else if (alpha > lower) {
        label = RegimeLabel::FractionalPhase;
    } else {
        label = RegimeLabel::OutOfTheory;
    }
    return {label, alpha};
}

std::string_view to_string(RegimeLabel label) noexcept {
    switch (label) {
        case RegimeLabel::Homogenized: return "Homogenized";
        case RegimeLabel::Critical: return "Critical";
        case RegimeLabel::FractionalPhase: return "FractionalPhase";
        case RegimeLabel::FractionalPhaseXi: return "FractionalPhaseXi";
        case RegimeLabel::OutOfTheory: return "OutOfTheory";
    }
    return "?";
}

std::string_view short_name(RegimeLabel label) noexcept {
    switch (label) {
        case RegimeLabel::Homogenized: return "i";
        case RegimeLabel::Critical: return "ii";
        case RegimeLabel::FractionalPhase: return "iii";
        case RegimeLabel::FractionalPhaseXi: return "iv";
        case RegimeLabel::OutOfTheory: return "OutOfTheory";
    }
    return "?";
}

RegimeLabel regime_from_string(std::string_view s) {
    for (auto l : {RegimeLabel::Homogenized, RegimeLabel::Critical, RegimeLabel::FractionalPhase,
                   RegimeLabel::FractionalPhaseXi, RegimeLabel::OutOfTheory})
        if (s == to_string(l) || s == short_name(l)) return l;
    throw std::invalid_argument("unknown regime label: " + std::string(s));
}

double spectral_density(const MediumSpec& spec, std::span<const double> p) {
    const double r = norm_of(p, spec.d());
    if (r == 0.0) throw std::domain_error("spectral density is singular at p = 0");
    return spec.cutoff()(r) / std::pow(r, 2.0 * spec.gamma() + spec.d() - 2.0);
}

double spectral_gap(const MediumSpec& spec, std::span<const double> p) {
    const double r = norm_of(p, spec.d());
    if (r == 0.0) return 0.0;
    return spec.mu() * std::pow(r, 2.0 * spec.beta());
}

SpectralData spectral_data(const MediumSpec& spec, std::span<const double> p) {
    return {spectral_density(spec, p), spectral_gap(spec, p)};
}

}  // namespace schrolab
