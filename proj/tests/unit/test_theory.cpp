#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "schrolab/rng.hpp"
#include "schrolab/theory.hpp"

using namespace schrolab;

namespace {
const double kSqrtPi = std::sqrt(std::numbers::pi);
MediumSpec make(double g, double b, double mu = 1.0, int d = 1) {
    MediumParams p;
    p.d = d;
    p.gamma = g;
    p.beta = b;
    p.mu = mu;
    return MediumSpec::validate(p);
}
}  // namespace

TEST_CASE("K1 closed form") {
    CHECK(k1(medium_a()) == doctest::Approx(2 * kSqrtPi).epsilon(1e-15));
    CHECK(k1(medium_a()) == doctest::Approx(3.5449077018110321).epsilon(1e-15));
    CHECK(k1(medium_b()) == doctest::Approx(1.8054905859018672).epsilon(1e-14));
    CHECK(k1(medium_b()) == doctest::Approx(4.0 / 3.0 * std::tgamma(2.0 / 3.0)).epsilon(1e-15));
    CHECK(k1(make(0.75, 0.5, 4.0)) == doctest::Approx(0.5 * k1(medium_a())).epsilon(1e-15));
}

TEST_CASE("K1 closed form against quadrature over a parameter sweep") {
    SequentialRng rng(RngStream(2024, 0, StreamPurpose::Generic));
    for (int i = 0; i < 20; ++i) {
        const double g = 0.2 + 0.75 * rng.uniform();
        const double lo = std::max(1.05 - g, 0.1);
        const double b = lo + (0.95 - lo) * rng.uniform();
        const double mu = 0.3 + 3.0 * rng.uniform();
        const int d = 1 + i % 3;
        const auto s = make(g, b, mu, d);
        CHECK(k1_quadrature(s) == doctest::Approx(k1(s)).epsilon(1e-10));
    }
}

TEST_CASE("K2 values") {
    const double zero[1] = {0.0}, one[1] = {1.0};
    CHECK(k2(medium_a(), 0.8, zero) == doctest::Approx(1.0 / kSqrtPi).epsilon(1e-12));
    // Re Gamma(1/2) (1 + i)^{-1/2} / pi
    const double ref = std::real(std::pow(std::complex<double>(1, 1), -0.5)) / kSqrtPi;
    CHECK(ref == doctest::Approx(0.43831154566767447).epsilon(1e-14));
    for (double lam : {0.1, 1.0, 7.5}) CHECK(k2(medium_a(), lam, one) == doctest::Approx(ref).epsilon(1e-10));
    CHECK(k2(medium_b(), 0.37, zero) == doctest::Approx(0.28735275145216445).epsilon(1e-12));
    CHECK(k2(medium_b(), 0.5, one) == doctest::Approx(0.22926835933098215).epsilon(1e-9));
    const double three[1] = {3.0};
    CHECK(k2(medium_b(), 2.0, three) == doctest::Approx(0.016158288640292121).epsilon(1e-7));
    CHECK_THROWS_AS(k2(medium_b(), 0.0 - 1.0, one), std::invalid_argument);
}

TEST_CASE("K2 is bounded by its value at xi = 0") {
    for (const auto& s : {medium_a(), medium_b(), make(0.6, 0.7, 1.0, 2), make(0.6, 0.7, 1.0, 3)}) {
        std::vector<double> xi(s.d(), 0.0);
        const double top = k2(s, 1.0, xi);
        CHECK(top == doctest::Approx(k1(s) / std::pow(2 * std::numbers::pi, s.d())).epsilon(1e-10));
        for (double lam : {0.2, 1.0, 3.0})
            for (double x : {0.1, 0.5, 1.0, 2.0, 5.0}) {
                xi[0] = x;
                CHECK(std::abs(k2(s, lam, xi)) <= top * (1 + 1e-12));
            }
    }
}

TEST_CASE("K2 table matches direct evaluation") {
    const K2Table t(medium_b(), 20.0);
    for (double r : {0.0, 0.01, 0.3, 1.0, 4.0, 11.0, 20.0}) CHECK(t(r) == doctest::Approx(k2_radial(medium_b(), r)).epsilon(1e-9).scale(1.0));
}

TEST_CASE("D values and identity") {
    CHECK(big_d(medium_a()) == doctest::Approx(8.0 / (3.0 * kSqrtPi)).epsilon(1e-15));
    CHECK(big_d(medium_a()) == doctest::Approx(1.5045055561273501).epsilon(1e-14));
    CHECK(big_d(medium_b()) == doctest::Approx(1.29308738153474).epsilon(1e-13));
    for (const auto& s : {medium_a(), medium_b()}) {
        const double a = exponents(s).singular_exponent;
        const double viaint = k1(s) / (2 * std::numbers::pi) * pair_kernel_mass(a, 1.0);
        CHECK(viaint == doctest::Approx(big_d(s)).epsilon(1e-13));
    }
}

TEST_CASE("D(t, xi)") {
    const double zero[1] = {0.0};
    for (double t : {0.5, 1.0, 2.0}) CHECK(big_d_txi(medium_b(), t, zero) == doctest::Approx(big_d(medium_b())).epsilon(1e-8));
    const double one[1] = {1.0}, twenty[1] = {20.0}, half[1] = {0.5};
    CHECK(big_d_txi(medium_b(), 1.0, one) == doctest::Approx(1.1970197823995767).epsilon(1e-8));
    CHECK(big_d_txi(medium_b(), 1.0, twenty) == doctest::Approx(0.148566010836465).epsilon(1e-7));
    CHECK(big_d_txi(medium_b(), 0.5, one) == doctest::Approx(1.230370220016387).epsilon(1e-8));
    CHECK(big_d_txi(medium_b(), 2.0, half) == doctest::Approx(1.2526539857240019).epsilon(1e-8));
    double prev = big_d(medium_b());
    for (double x : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) {
        const double xi[1] = {x};
        const double v = big_d_txi(medium_b(), 1.0, xi);
        CHECK(v < prev);
        CHECK(std::abs(v) <= big_d(medium_b()));
        prev = v;
    }
    CHECK_THROWS_AS(big_d_txi(medium_a(), 1.0, one), std::invalid_argument);
    CHECK_THROWS_AS(big_d_txi(medium_b(), 0.0, one), std::invalid_argument);
}

TEST_CASE("kappa^2/(2-kappa) equals 2/((1-a)(2-a)) over a sweep") {
    for (int i = 0; i < 20; ++i) {
        const double g = 0.3 + 0.03 * i;
        const double b = 1.05 - g + 0.02 * (i % 5);
        const auto e = exponents(make(g, b));
        const double a = e.singular_exponent;
        CHECK(e.kappa * e.kappa / (2 - e.kappa) == doctest::Approx(2 / ((1 - a) * (2 - a))).epsilon(1e-12));
    }
}

TEST_CASE("moment predictions") {
    const auto s = medium_a();
    const double one[1] = {1.0};
    const double D = big_d(s);
    const Regime hom{RegimeLabel::Homogenized, 8.0 / 3.0}, frac{RegimeLabel::FractionalPhase, 2.0 / 3.0},
        crit{RegimeLabel::Critical, 4.0 / 3.0};
    CHECK(std::abs(predict_moment(s, hom, 1, 0, 1.0, one, 1.0) - std::exp(-D / 2)) < 1e-15);
    CHECK(std::abs(predict_moment(s, hom, 1, 0, 1.0, one, 1.0) - 0.4713036134656627) < 1e-12);
    CHECK(std::abs(predict_moment(s, hom, 1, 1, 1.0, one, 1.0) - std::exp(-D)) < 1e-15);
    CHECK(std::abs(predict_moment(s, hom, 1, 1, 1.0, one, 1.0) - 0.2221271) < 1e-7);
    const std::complex<double> phi(0.3, 0.4);
    for (double t : {0.3, 1.0, 2.0}) {
        CHECK(std::abs(predict_moment(s, frac, 1, 1, t, one, phi) - std::norm(phi)) < 1e-15);
        CHECK(predict_moment(s, hom, 1, 1, t, one, phi).real() < predict_moment(s, frac, 1, 1, t, one, phi).real());
        const auto first = phi * std::exp(-0.5 * D * std::pow(t, 1.5));
        CHECK(std::abs(predict_moment(s, hom, 1, 0, t, one, phi) - first) < 1e-15);
        CHECK(std::abs(predict_moment(s, frac, 1, 0, t, one, phi) - first) < 1e-15);
        CHECK(std::abs(predict_moment(s, crit, 1, 0, t, one, phi) - first) < 1e-15);
    }
    CHECK(std::abs(predict_moment(s, frac, 2, 0, 1.0, one, 1.0) - std::exp(-2 * D)) < 1e-14);
    CHECK_THROWS_AS(predict_moment(s, crit, 1, 1, 1.0, one, 1.0), NoPredictionError);
    CHECK_THROWS_AS(predict_moment(medium_b(), Regime{RegimeLabel::OutOfTheory, 0.3}, 1, 0, 1.0, one, 1.0),
                    NoPredictionError);
    const double xi[1] = {1.0};
    const Regime iv{RegimeLabel::FractionalPhaseXi, 0.5};
    CHECK(std::abs(predict_moment(medium_b(), iv, 1, 0, 1.0, xi, 1.0) - std::exp(-0.5 * 1.1970197823995767)) < 1e-8);
}

TEST_CASE("predict bundles the regime and constants") {
    const double xi[1] = {1.0};
    const std::pair<int, int> pairs[] = {{1, 0}, {1, 1}, {2, 0}, {2, 2}};
    const auto p = predict(medium_a(), 2.0 / 3.0, 1.0, xi, 1.0, pairs);
    CHECK(p.regime.label == RegimeLabel::FractionalPhase);
    REQUIRE(p.phase_variance);
    CHECK(*p.phase_variance == doctest::Approx(big_d(medium_a())));
    CHECK(p.moments.size() == 4);
    for (const auto& m : p.moments) CHECK(m.value.has_value());
    const auto c = predict(medium_a(), 4.0 / 3.0, 1.0, xi, 1.0, pairs);
    CHECK(c.moments[0].value.has_value());
    CHECK(!c.moments[1].value.has_value());
    CHECK(!c.moments[1].note.empty());
    const auto o = predict(medium_b(), 0.3, 1.0, xi, 1.0, pairs);
    CHECK(o.regime.label == RegimeLabel::OutOfTheory);
    for (const auto& m : o.moments) CHECK(!m.value.has_value());
    const auto iv = predict(medium_b(), 0.5, 1.0, xi, 1.0, pairs);
    REQUIRE(iv.D_txi);
    CHECK(*iv.phase_variance == doctest::Approx(*iv.D_txi));
}
