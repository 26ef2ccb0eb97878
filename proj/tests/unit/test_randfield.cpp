#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "oracle_support.hpp"
#include "schrolab/randfield.hpp"
#include "schrolab/stats.hpp"

using namespace schrolab;

namespace {
std::shared_ptr<const EffectiveMedium> share(EffectiveMedium m) {
    return std::make_shared<const EffectiveMedium>(std::move(m));
}
}  // namespace

TEST_CASE("grid validation and indexing") {
    CHECK_THROWS(GridSpec{1, 6, 1.0}.validate());
    CHECK_THROWS(GridSpec{1, 4, 1.0}.validate());
    CHECK_THROWS(GridSpec{1, 12, 1.0}.validate());
    CHECK_THROWS(GridSpec{1, 16, 0.0}.validate());
    CHECK_THROWS(GridSpec{4, 16, 1.0}.validate());
    const GridSpec g{2, 8, 4.0};
    CHECK_NOTHROW(g.validate());
    CHECK(g.size() == 64);
    int k[2];
    g.mode_index(8 * 3 + 6, k);
    CHECK(k[0] == 3);
    CHECK(k[1] == -2);
    const auto neg = g.negated(8 * 3 + 6);
    g.mode_index(neg, k);
    CHECK(k[0] == -3);
    CHECK(k[1] == 2);
    CHECK(g.is_excluded(0));
    CHECK(g.is_excluded(4));
    CHECK(g.is_excluded(8 * 4 + 1));
    CHECK(!g.is_excluded(9));
    CHECK(g.origin_sign(9) == 1.0);
    CHECK(g.origin_sign(1) == -1.0);
}

TEST_CASE("rescaled spectrum exponents") {
    const auto s = medium_a();
    const GridSpec g{1, 64, 100.0};
    const auto m = rescaled_medium(s, 0.5, 2.0, g);
    // prefactor exponent 2 - 2 kappa + alpha d = 4/3
    for (std::size_t i = 1; i < 32; ++i) {
        const double q = std::sqrt(g.wavenumber_sq(i));
        const double p = 0.25 * q;
        const double expect = p <= 1.0 ? std::pow(0.5, 4.0 / 3.0) * std::pow(p, -0.5) : 0.0;
        CHECK(m.density[i] == doctest::Approx(expect).epsilon(1e-13));
        CHECK(m.gap[i] == doctest::Approx(std::pow(0.5, 2.0 * 2.0 * 0.5 - 4.0 / 3.0) * q).epsilon(1e-13));
    }
    const auto phys = physical_medium(s, g);
    const auto one = rescaled_medium(s, 1.0, 2.0, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(one.density[i] == doctest::Approx(phys.density[i]).epsilon(1e-15));
        CHECK(one.gap[i] == doctest::Approx(phys.gap[i]).epsilon(1e-15));
    }
    const auto crit = rescaled_medium(s, 0.37, 4.0 / 3.0, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(crit.gap[i] == phys.gap[i]);
        if (!g.is_excluded(i)) {
            const double q = std::sqrt(g.wavenumber_sq(i));
            const double p = std::pow(0.37, 4.0 / 3.0) * q;
            CHECK(crit.density[i] == doctest::Approx(p <= 1.0 ? std::pow(q, -0.5) : 0.0).epsilon(1e-12));
        }
    }
    CHECK(m.density[0] == 0.0);
    CHECK(m.density[32] == 0.0);
}

TEST_CASE("rescaled covariance against the continuum integral") {
    // At large L and fine spacing the mode sum approximates
    // R_eps(t, x) = int dq/(2 pi) S_eps(q) e^{-g_eps(q) t} cos(q x).
    const auto s = medium_a();
    const double eps = 0.5, alpha = 2.0;
    const double L = 4000.0;
    const int n = 1 << 16;
    const GridSpec g{1, static_cast<std::size_t>(n), L};
    const auto m = rescaled_medium(s, eps, alpha, g);
    const double t = 0.3, x = 1.7;
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (m.variance[i] == 0.0) continue;
        int k;
        g.mode_index(i, &k);
        sum += m.variance[i] * std::exp(-m.gap[i] * t) * std::cos(g.dk() * k * x);
    }
    // continuum value by direct quadrature in v, q = v^2 (removes the q^{-1/2} singularity)
    const double W = 1.0 / std::pow(eps, alpha);
    double cont = 0.0;
    const int nq = 400000;
    const double vmax = std::sqrt(W);
    for (int j = 0; j < nq; ++j) {
        const double v = (j + 0.5) * vmax / nq;
        const double q = v * v;
        const double dens = std::pow(eps, 4.0 / 3.0) * std::pow(std::pow(eps, alpha) * q, -0.5);
        const double gap = std::pow(eps, 2 * alpha * 0.5 - 4.0 / 3.0) * q;
        cont += 2.0 * v * dens * std::exp(-gap * t) * std::cos(q * x) * (vmax / nq);
    }
    cont = cont * 2.0 / (2 * std::numbers::pi);
    // the excluded zero mode costs O(sqrt(dk)) relative
    CHECK(sum == doctest::Approx(cont).epsilon(1.5e-2));
}

TEST_CASE("stationary draw: hermitian, zero mode, real field") {
    const GridSpec g{1, 256, 50.0};
    const auto m = share(physical_medium(medium_a(), g));
    const auto f = draw_stationary(m, RngStream(1, 0, StreamPurpose::FieldInit));
    const auto c = f.modes();
    CHECK(c[0] == std::complex<double>(0.0, 0.0));
    CHECK(c[128] == std::complex<double>(0.0, 0.0));
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(c[g.negated(i)] == std::conj(c[i]));
    FieldEvaluator ev(g);
    std::vector<double> v;
    const double imag = ev(f, v);
    double norm = 0.0;
    for (double x : v) norm = std::max(norm, std::abs(x));
    CHECK(imag < 1e-12 * norm);
    // real space value against a direct sum
    for (std::size_t j : {0u, 17u, 200u}) {
        const double x = -25.0 + j * g.dx();
        double direct = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            int k;
            g.mode_index(i, &k);
            direct += (c[i] * std::polar(1.0, g.dk() * k * x)).real();
        }
        CHECK(v[j] == doctest::Approx(direct).epsilon(1e-11));
    }
}

TEST_CASE("single hermitian pair and zero field") {
    const GridSpec g{1, 64, 10.0};
    auto m = physical_medium(medium_a(), g);
    auto sm = share(m);
    FieldState f(sm, RngStream(1, 0, StreamPurpose::FieldInit));
    const std::complex<double> c(0.3, -0.4);
    f.modes_mut()[1] = c;
    f.modes_mut()[63] = std::conj(c);
    FieldEvaluator ev(g);
    std::vector<double> v;
    ev(f, v);
    for (std::size_t j = 0; j < 64; ++j) {
        const double x = -5.0 + j * g.dx();
        CHECK(v[j] == doctest::Approx(2 * std::abs(c) * std::cos(g.dk() * x + std::arg(c))).epsilon(1e-12));
    }
    FieldState z(sm, RngStream(1, 0, StreamPurpose::FieldInit));
    ev(z, v);
    for (double x : v) CHECK(x == 0.0);
}

TEST_CASE("advance: dt = 0 is the identity, negative dt rejected") {
    const GridSpec g{1, 64, 20.0};
    const auto m = share(physical_medium(medium_a(), g));
    auto f = draw_stationary(m, RngStream(4, 0, StreamPurpose::FieldInit));
    const std::vector<std::complex<double>> before(f.modes().begin(), f.modes().end());
    f.advance(0.0);
    CHECK(std::equal(before.begin(), before.end(), f.modes().begin()));
    CHECK_THROWS_AS(f.advance(-0.1), std::invalid_argument);
}

TEST_CASE("OU lag correlation and semigroup") {
    // Mode with gap 1: physical medium A has g(q) = |q|, so choose L with dk = 1.
    const GridSpec g{1, 16, 2 * std::numbers::pi};
    const auto m = share(physical_medium(medium_a(), g));
    REQUIRE(m->gap[1] == doctest::Approx(1.0));
    REQUIRE(m->variance[1] > 0.0);
    const int n = 10000;
    std::vector<double> prod(n), prod2(n), var0(n);
    for (int r = 0; r < n; ++r) {
        auto f = draw_stationary(m, RngStream(9, r, StreamPurpose::FieldInit));
        const auto c0 = f.modes()[1];
        f.advance(0.7);
        const auto c1 = f.modes()[1];
        f.advance(0.7);
        const auto c2 = f.modes()[1];
        prod[r] = (c1 * std::conj(c0)).real() / m->variance[1];
        prod2[r] = (c2 * std::conj(c0)).real() / m->variance[1];
        var0[r] = std::norm(c2) / m->variance[1];
    }
    const auto a = stats::real_mean(prod);
    CHECK(std::abs(a.mean - std::exp(-0.7)) < 3 * a.stderr_);
    const auto b = stats::real_mean(prod2);
    CHECK(std::abs(b.mean - std::exp(-1.4)) < 3 * b.stderr_);
    const auto v = stats::real_mean(var0);
    CHECK(std::abs(v.mean - 1.0) < 4 * v.stderr_);
}

TEST_CASE("stationarity under an irregular dt schedule") {
    const GridSpec g{1, 32, 20.0};
    const auto m = share(physical_medium(medium_a(), g));
    const int n = 10000;
    const std::size_t mode = 3;
    std::vector<double> x(n);
    for (int r = 0; r < n; ++r) {
        auto f = draw_stationary(m, RngStream(21, r, StreamPurpose::FieldInit));
        for (double dt : {0.01, 0.3, 2.0, 0.07}) f.advance(dt);
        x[r] = std::norm(f.modes()[mode]) / m->variance[mode];
    }
    const auto s = stats::real_mean(x);
    CHECK(std::abs(s.mean - 1.0) < 4 * s.stderr_);
}

TEST_CASE("empirical covariance against the mode-sum oracle") {
    const GridSpec g{1, 1024, 100.0};
    const auto m = share(rescaled_medium(medium_a(), 0.3, 1.0, g));
    std::vector<CovarianceLag> lags = {{0.0, {0.0}}, {0.5, {0.0}}, {0.0, {10 * g.dx()}}, {1.0, {50 * g.dx()}}};
    const auto est = empirical_covariance(m, 2000, lags, 77);
    const auto ref = oracle_support::medium_a();
    for (const auto& e : est) {
        const double want = oracle_support::mode_sum_covariance(ref, 0.3, 1.0, 100.0, 1024, e.lag.t, e.lag.x[0]);
        CHECK(std::abs(e.estimate - want) < 3.5 * e.stderr_);
        CHECK(e.n_samples == 2000);
    }
    EffectiveMedium zero = *m;
    std::fill(zero.variance.begin(), zero.variance.end(), 0.0);
    zero.representatives.clear();
    zero.total_variance = 0.0;
    const auto z = empirical_covariance(share(zero), 100, lags, 1);
    for (const auto& e : z) {
        CHECK(e.estimate == 0.0);
        CHECK(e.stderr_ == 0.0);
    }
}
