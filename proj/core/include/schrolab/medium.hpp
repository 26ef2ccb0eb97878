#pragma once

#include <span>
#include <string>
#include <string_view>

namespace schrolab {

enum class CutoffKind { SharpBall, SmoothBump };

// Radial cutoff a(p): a(0) = amplitude_at_zero, supported in |p| <= p_max.
// SmoothBump is a0 * exp(1 - 1/(1 - (p/p_max)^2)).
struct Cutoff {
    CutoffKind kind = CutoffKind::SharpBall;
    double p_max = 1.0;
    double amplitude_at_zero = 1.0;

    double operator()(double p_norm) const noexcept;
    double sup() const noexcept { return amplitude_at_zero; }
};

struct MediumParams {
    int d = 1;
    double gamma = 0.75;
    double beta = 0.5;
    double mu = 1.0;
    Cutoff cutoff{};
};

// Validated medium. Only constructible through validate(), so every instance satisfies
// 0 < gamma, beta < 1, gamma + beta > 1, mu > 0, d in {1,2,3}, a(0) > 0, p_max > 0.
class MediumSpec {
public:
    static MediumSpec validate(const MediumParams& raw);

    int d() const noexcept { return p_.d; }
    double gamma() const noexcept { return p_.gamma; }
    double beta() const noexcept { return p_.beta; }
    double mu() const noexcept { return p_.mu; }
    const Cutoff& cutoff() const noexcept { return p_.cutoff; }
    const MediumParams& params() const noexcept { return p_; }

private:
    explicit MediumSpec(const MediumParams& p) : p_(p) {}
    MediumParams p_;
};

// Reference media used throughout the tests.
MediumSpec medium_a();  // d=1, gamma=3/4, beta=1/2, mu=1, sharp cutoff p_max=1, a(0)=1
MediumSpec medium_b();  // d=1, gamma=1/2, beta=3/4, same cutoff

struct ScalingExponents {
    double kappa;              // 2 beta / (2 beta + gamma - 1)
    double alpha_c;            // 1 / (2 beta + gamma - 1)
    double singular_exponent;  // (1 - gamma) / beta
    double hurst;              // 1 / kappa
};

ScalingExponents exponents(const MediumSpec& spec) noexcept;

enum class RegimeLabel { Homogenized, Critical, FractionalPhase, FractionalPhaseXi, OutOfTheory };

struct Regime {
    RegimeLabel label;
    double alpha;
};

// Boundaries alpha = alpha_c and alpha = kappa - alpha_c are matched with relative tolerance 1e-9.
Regime classify_regime(const MediumSpec& spec, double alpha);

std::string_view to_string(RegimeLabel label) noexcept;
std::string_view short_name(RegimeLabel label) noexcept;  // "i", "ii", "iii", "iv", "OutOfTheory"
RegimeLabel regime_from_string(std::string_view s);

struct SpectralData {
    double density;  // R_hat(p) = a(p) / |p|^(2 gamma + d - 2)
    double gap;      // g(p) = mu |p|^(2 beta)
};

double spectral_density(const MediumSpec& spec, std::span<const double> p);
double spectral_gap(const MediumSpec& spec, std::span<const double> p);
SpectralData spectral_data(const MediumSpec& spec, std::span<const double> p);

}  // namespace schrolab
