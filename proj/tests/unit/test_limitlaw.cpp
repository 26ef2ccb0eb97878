#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracle_support.hpp"
#include "schrolab/limitlaw.hpp"
#include "schrolab/stats.hpp"
#include "schrolab/theory.hpp"

using namespace schrolab;

TEST_CASE("fbm endpoint variance and self-similarity") {
    const double grid[] = {0.5, 1.0};
    const auto p = sample_fbm(medium_a(), grid, 100000, 5);
    REQUIRE(p.times.size() == 3);
    const double D = big_d(medium_a());
    std::vector<double> x1(p.n_paths), xh(p.n_paths);
    for (std::size_t i = 0; i < p.n_paths; ++i) {
        CHECK(p.at(i, 0) == 0.0);
        x1[i] = p.at(i, 2);
        xh[i] = p.at(i, 1);
    }
    const double v1 = stats::sample_variance(x1), vh = stats::sample_variance(xh);
    CHECK(std::abs(v1 - D) < 3 * stats::variance_stderr(x1));
    CHECK(std::abs(vh - D * std::pow(0.5, 1.5)) < 3 * stats::variance_stderr(xh));
    CHECK(v1 / vh == doctest::Approx(std::pow(2.0, 1.5)).epsilon(0.05));
}

TEST_CASE("fbm covariance and stationary increments") {
    const FbmLaw law{0.75, 1.5};
    const double grid[] = {0.25, 0.5, 0.75, 1.0, 1.25};
    const auto p = sample_fbm(law, grid, 40000, 9);
    const std::pair<int, int> pairs[] = {{1, 2}, {1, 4}, {2, 3}, {3, 5}, {4, 5}};
    for (auto [a, b] : pairs) {
        std::vector<double> prod(p.n_paths);
        for (std::size_t i = 0; i < p.n_paths; ++i) prod[i] = p.at(i, a) * p.at(i, b);
        const auto m = stats::real_mean(prod);
        CHECK(std::abs(m.mean - oracle_support::fbm_cov(1.5, 0.75, p.times[a], p.times[b])) < 4 * m.stderr_);
    }
    // increments over 0.25 starting at s = 0.25 and s = 0.75
    std::vector<double> i1(p.n_paths), i2(p.n_paths);
    for (std::size_t i = 0; i < p.n_paths; ++i) {
        i1[i] = p.at(i, 2) - p.at(i, 1);
        i2[i] = p.at(i, 4) - p.at(i, 3);
    }
    const double want = 1.5 * std::pow(0.25, 1.5);
    CHECK(std::abs(stats::sample_variance(i1) - want) < 3.5 * stats::variance_stderr(i1));
    CHECK(std::abs(stats::sample_variance(i2) - want) < 3.5 * stats::variance_stderr(i2));
}

TEST_CASE("fbm edge cases") {
    const double grid[] = {1.0};
    const auto z = sample_fbm(FbmLaw{0.75, 0.0}, grid, 10, 1);
    for (double v : z.values) CHECK(v == 0.0);
    const double bad[] = {0.5, 0.5};
    CHECK_THROWS_AS(sample_fbm(FbmLaw{0.75, 1.0}, bad, 10, 1), std::invalid_argument);
    const double zero[] = {0.0, 0.5};
    CHECK_THROWS_AS(sample_fbm(FbmLaw{0.75, 1.0}, zero, 10, 1), std::invalid_argument);
    CHECK(fbm_law(medium_a()).hurst == doctest::Approx(0.75));
    CHECK(fbm_law(medium_a()).scale == doctest::Approx(big_d(medium_a())));
}

TEST_CASE("phase samples") {
    const auto x = sample_phase(medium_a(), 1.0, 100000, 3);
    CHECK(std::abs(stats::sample_variance(x) - big_d(medium_a())) < 3 * stats::variance_stderr(x));
    const auto y = sample_phase(medium_a(), 1e-6, 1000, 3);
    CHECK(stats::sample_variance(y) < 1e-8);
    CHECK_THROWS_AS(sample_phase(medium_a(), 0.0, 10, 1), std::invalid_argument);
    // endpoint law agrees with the fbm sampler
    const double grid[] = {1.0};
    const auto p = sample_fbm(medium_a(), grid, 100000, 4);
    std::vector<double> e(p.n_paths);
    for (std::size_t i = 0; i < p.n_paths; ++i) e[i] = p.at(i, 1);
    CHECK(std::abs(stats::sample_variance(e) - stats::sample_variance(x)) <
          3 * std::hypot(stats::variance_stderr(e), stats::variance_stderr(x)));
}

TEST_CASE("ks calibration of phase samples") {
    const double var = big_d(medium_a());
    int pass = 0;
    for (int r = 0; r < 100; ++r) {
        const auto x = sample_phase(var, 10000, 1000 + r);
        if (stats::ks_statistic_normal(x, 0.0, var) < stats::ks_critical_value(x.size(), 0.01)) ++pass;
    }
    CHECK(pass >= 95);
}

TEST_CASE("ou value and integral transition") {
    // stationary second moments after one exact step
    const double g = 3.0, v = 2.0, h = 0.4;
    const auto st = ou_integral_step(g, v, h);
    CHECK(st.e == doctest::Approx(std::exp(-g * h)));
    // Var I over [0,h] from a stationary start: m^2 v + s21^2 + s22^2
    const double var_i = st.m * st.m * v + st.s21 * st.s21 + st.s22 * st.s22;
    CHECK(var_i == doctest::Approx(ou_integral_variance(g, v, h)).epsilon(1e-13));
    CHECK(ou_integral_variance(g, v, h) ==
          doctest::Approx(2 * v * (g * h - 1 + std::exp(-g * h)) / (g * g)).epsilon(1e-13));
    // Var X' stays stationary
    CHECK(st.e * st.e * v + st.s11 * st.s11 == doctest::Approx(v).epsilon(1e-14));
    // small rate uses the series branch without loss
    const double gs = 1e-7;
    CHECK(ou_integral_variance(gs, v, h) == doctest::Approx(v * h * h).epsilon(1e-6));
}

TEST_CASE("critical sampler: mode set and trivial functional") {
    const InitialPacket pk{};
    CriticalLimitSampler s(medium_a(), pk, 1.0, 1.0);
    const double D = big_d(medium_a());
    CHECK(s.theta_variance() == doctest::Approx(D).epsilon(2e-3));
    CHECK(s.wdot_covariance(0.0) > 0.0);
    std::vector<double> zero(s.window_x().size(), 0.0);
    const double xi[1] = {1.0};
    CHECK(std::abs(s.functional(zero) - pk.fourier(xi)) < 1e-12);
    CHECK_THROWS_AS(CriticalLimitSampler(medium_b(), InitialPacket{1.0, {20.0}, 1.0}, 1.0, 1.0),
                    std::invalid_argument);
}

TEST_CASE("critical sampler: doubling the mode cutoff barely changes Var Theta") {
    CriticalSamplerConfig a, b;
    b.tail_max = 2 * a.tail_max;
    b.band_max = 2 * a.band_max;
    const InitialPacket pk{};
    const double va = CriticalLimitSampler(medium_a(), pk, 1.0, 1.0, a).theta_variance();
    const double vb = CriticalLimitSampler(medium_a(), pk, 1.0, 1.0, b).theta_variance();
    CHECK(std::abs(va - vb) / vb < 0.02);
}

TEST_CASE("critical sampler: modulus bound and first moment") {
    const InitialPacket pk{};
    CriticalLimitSampler s(medium_a(), pk, 1.0, 1.0);
    const auto z = s.sample_many(2000, 17);
    for (const auto& v : z) CHECK(std::abs(v) <= pk.l1_norm() * (1 + 1e-12));
    const auto m = stats::complex_mean(z);
    const double xi[1] = {1.0};
    const auto want = pk.fourier(xi) * std::exp(-0.5 * big_d(medium_a()));
    CHECK(std::abs(m.mean - want) < 3 * m.stderr_);
    CHECK(s.sample(17, 5) == z[5]);
}

TEST_CASE("critical sampler: W-dot covariance and Theta variance by sampling") {
    const InitialPacket pk{};
    CriticalLimitSampler s(medium_a(), pk, 1.0, 1.0);
    const int n = 20000;
    std::vector<double> prod(n), th2(n);
    const double lag = 0.3;
    for (int i = 0; i < n; ++i) {
        const auto p = s.probe_center(23, i, lag);
        prod[i] = p.wdot0 * p.wdot_lag;
        th2[i] = p.theta_lag * p.theta_lag;
    }
    const auto c = stats::real_mean(prod);
    CHECK(std::abs(c.mean - s.wdot_covariance(lag)) < 3.5 * c.stderr_);
    // Theta over [0, lag] has variance D lag^{2/kappa} for the full field
    const auto v = stats::real_mean(th2);
    CHECK(std::abs(v.mean - big_d(medium_a()) * std::pow(lag, 1.5)) < 3.5 * v.stderr_ + 2e-3 * v.mean);
}

TEST_CASE("critical sampler: substep count leaves the law unchanged") {
    CriticalSamplerConfig c1, c4;
    c4.substeps = 4;
    const InitialPacket pk{};
    CriticalLimitSampler a(medium_a(), pk, 1.0, 1.0, c1), b(medium_a(), pk, 1.0, 1.0, c4);
    CHECK(a.theta_variance() == doctest::Approx(b.theta_variance()).epsilon(1e-12));
    const auto za = a.sample_many(1500, 31), zb = b.sample_many(1500, 32);
    const auto ma = stats::complex_mean(za), mb = stats::complex_mean(zb);
    CHECK(std::abs(ma.mean - mb.mean) < 3.5 * std::hypot(ma.stderr_, mb.stderr_));
}
