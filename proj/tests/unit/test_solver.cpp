#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracle_support.hpp"
#include "schrolab/solver.hpp"

using namespace schrolab;

namespace {
constexpr double kPi = std::numbers::pi;

RealizationSetup small_setup() {
    RealizationSetup s;
    s.medium = medium_a();
    s.eps = 0.2;
    s.alpha = 8.0 / 3.0;
    s.wave_grid = GridSpec{1, 256, 16 * kPi};
    s.probes = {{1.0}, {0.0}, {0.5}};
    s.times = {0.25, 0.5};
    s.master_seed = 42;
    return s;
}
}  // namespace

TEST_CASE("initial wave matches the analytic transform") {
    const InitialPacket p{1.0, {0.0}, 1.0};
    const GridSpec g{1, 1024, 40.0};
    const auto w = init_wave(p, g, 1.0);
    CHECK(std::abs(w.compensated()[0] - std::sqrt(2 * kPi)) < 1e-12);
    for (std::size_t k = 1; k < 60; ++k) {
        const double xi = g.dk() * k;
        CHECK(std::abs(w.compensated()[k] - oracle_support::gaussian_ft(1.0, 0.0, 1.0, xi)) < 1e-12);
        CHECK(std::abs(w.compensated()[g.n - k] - oracle_support::gaussian_ft(1.0, 0.0, 1.0, -xi)) < 1e-12);
    }
    const InitialPacket shifted{1.0, {2.5}, 1.0};
    const auto ws = init_wave(shifted, g, 1.0);
    for (std::size_t k = 0; k < 60; ++k) {
        const double xi = g.dk() * k;
        CHECK(std::abs(ws.compensated()[k] - w.compensated()[k] * std::polar(1.0, -xi * 2.5)) < 1e-12);
    }
    const auto z = init_wave(InitialPacket{1.0, {0.0}, 0.0}, g, 1.0);
    for (auto v : z.compensated()) CHECK(v == std::complex<double>(0.0, 0.0));
    CHECK_THROWS_AS(init_wave(p, GridSpec{1, 64, 11.0}, 1.0), std::invalid_argument);
}

TEST_CASE("initial wave against a direct DFT in 2-d") {
    const InitialPacket p{0.8, {0.3, -0.2}, 1.5};
    const GridSpec g{2, 32, 16.0};
    const auto w = init_wave(p, g, 1.0);
    for (std::size_t i : {0u, 1u, 33u, 67u, 1023u}) {
        int k[2];
        g.mode_index(i, k);
        const double xi[2] = {g.dk() * k[0], g.dk() * k[1]};
        CHECK(std::abs(w.compensated()[i] - p.fourier(xi)) < 1e-10);
    }
}

TEST_CASE("probe alignment") {
    const GridSpec g{1, 256, 16 * kPi};
    const double ok[1] = {1.0}, off[1] = {0.9}, far[1] = {100.0};
    CHECK(make_probe(g, ok).flat == 8);
    const double neg[1] = {-1.0};
    CHECK(make_probe(g, neg).flat == 248);
    CHECK_THROWS_AS(make_probe(g, off), std::invalid_argument);
    CHECK_THROWS_AS(make_probe(g, far), std::invalid_argument);
}

TEST_CASE("one step with V = 0 or a random potential: drift below 1e-14") {
    const GridSpec g{1, 512, 16 * kPi};
    auto w = init_wave(InitialPacket{}, g, 3.7);
    const std::vector<std::complex<double>> psi0(w.compensated().begin(), w.compensated().end());
    const double m0 = w.mass();
    StrangStepper st(g, g);
    const std::vector<double> zero(g.size(), 0.0);
    st.step_with_potential(w, zero, 0.01);
    double worst = 0.0;
    for (std::size_t i = 0; i < psi0.size(); ++i) worst = std::max(worst, std::abs(w.compensated()[i] - psi0[i]));
    CHECK(worst < 1e-14);
    CHECK(std::abs(w.mass() - m0) / m0 < 1e-14);
    std::vector<double> v(g.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = 3.0 * std::sin(0.37 * j);
    const double m1 = w.mass();
    st.step_with_potential(w, v, 0.01);
    CHECK(std::abs(w.mass() - m1) / m1 < 1e-14);
}

// Per-step FFT roundoff is a biased ~1e-16; over 10^4 steps it must stay linear, not compound.
TEST_CASE("free evolution over 10^4 steps: phase convention and roundoff growth") {
    const GridSpec g{1, 512, 16 * kPi};
    auto w = init_wave(InitialPacket{}, g, 3.7);
    const std::vector<std::complex<double>> psi0(w.compensated().begin(), w.compensated().end());
    const double m0 = w.mass();
    StrangStepper st(g, g);
    const std::vector<double> zero(g.size(), 0.0);
    for (int s = 0; s < 10000; ++s) st.step_with_potential(w, zero, 0.01);
    double worst = 0.0;
    for (std::size_t i = 0; i < psi0.size(); ++i) worst = std::max(worst, std::abs(w.compensated()[i] - psi0[i]));
    CHECK(worst < 1e4 * 1e-15);
    CHECK(std::abs(w.mass() - m0) / m0 < 1e4 * 1e-15);
    const auto f = w.fourier();
    for (std::size_t k : {1u, 8u, 20u}) {
        const double xi = g.dk() * k;
        CHECK(std::abs(f[k] - psi0[k] * std::polar(1.0, -3.7 * xi * xi * w.time() / 2)) < 1e-9);
    }
}

TEST_CASE("mass drift with a random potential over 10^4 steps stays at roundoff") {
    const GridSpec g{1, 256, 16 * kPi};
    auto w = init_wave(InitialPacket{}, g, 0.5);
    const double m0 = w.mass();
    StrangStepper st(g, g);
    std::vector<double> v(g.size());
    for (int s = 0; s < 10000; ++s) {
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = std::sin(0.37 * j + 0.01 * s) * 3.0;
        st.step_with_potential(w, v, 0.01);
    }
    CHECK(std::abs(w.mass() - m0) / m0 < 1e4 * 1e-15);
}

TEST_CASE("second order in dt with a frozen smooth potential") {
    const GridSpec g{1, 256, 16 * kPi};
    std::vector<double> v(g.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double x = -0.5 * g.length + j * g.dx();
        v[j] = 2.0 * std::cos(0.5 * x) + std::exp(-x * x / 8.0);
    }
    auto run = [&](double dt) {
        auto w = init_wave(InitialPacket{}, g, 1.0);
        StrangStepper st(g, g);
        const int n = static_cast<int>(std::lround(1.0 / dt));
        for (int s = 0; s < n; ++s) st.step_with_potential(w, v, dt);
        return std::vector<std::complex<double>>(w.compensated().begin(), w.compensated().end());
    };
    const auto ref = run(0.005 / 8);
    auto err = [&](double dt) {
        const auto a = run(dt);
        double e = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - ref[i]));
        return e;
    };
    const double e1 = err(0.02), e2 = err(0.01), e3 = err(0.005);
    const double slope1 = std::log2(e1 / e2), slope2 = std::log2(e2 / e3);
    CHECK(slope1 == doctest::Approx(2.0).epsilon(0.05));
    CHECK(slope2 == doctest::Approx(2.0).epsilon(0.05));
    CHECK(e2 / e3 > 3.5);
    CHECK(e2 / e3 < 4.5);
}

TEST_CASE("stepper rejects a field sampled away from the midpoint") {
    auto s = small_setup();
    const GridSpec fg = field_grid_for(s.wave_grid, 1);
    StrangStepper st(s.wave_grid, fg);
    auto w = init_wave(s.packet, s.wave_grid, 1.0);
    auto f = draw_stationary(make_effective_medium(s), RngStream(1, 0, StreamPurpose::FieldStep));
    CHECK_THROWS_AS(st.step(w, f, 0.01), std::invalid_argument);
    f.advance(0.005);
    CHECK_NOTHROW(st.step(w, f, 0.01));
}

TEST_CASE("realizations are deterministic and distinct") {
    const auto s = small_setup();
    const auto a = run_realization(s, 0), b = run_realization(s, 0), c = run_realization(s, 1);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    CHECK(a.times == s.times);
    CHECK(a.values.size() == s.times.size() * s.probes.size());
    CHECK(std::abs(a.mass_final - a.mass_initial) / a.mass_initial < 1e-12);
    RealizationRunner runner(s);
    const auto d = runner.run(0);
    CHECK(d.values == a.values);
    CHECK(runner.step_size() > 0.0);
}

TEST_CASE("times {0} records the initial transform") {
    auto s = small_setup();
    s.times = {0.0};
    const auto r = run_realization(s, 3);
    for (std::size_t p = 0; p < s.probes.size(); ++p)
        CHECK(std::abs(r.at(0, p) - s.packet.fourier(s.probes[p])) < 1e-12);
    CHECK(r.steps == 0);
}

TEST_CASE("field oversize leaves the window consistent") {
    auto s = small_setup();
    s.field_oversize = 2;
    const auto r = run_realization(s, 0);
    CHECK(std::abs(r.mass_final - r.mass_initial) / r.mass_initial < 1e-12);
    s.field_oversize = 3;
    CHECK_THROWS(run_realization(s, 0));
}

TEST_CASE("dt rule") {
    auto s = small_setup();
    const auto m = make_effective_medium(s);
    const double dt = choose_dt(s, *m);
    CHECK(dt <= s.dt_rule.dt_max);
    CHECK(dt <= 0.1 / (5 * std::sqrt(m->total_variance)) + 1e-15);
    CHECK(dt <= 0.1 * std::pow(s.eps, 4.0 / 3.0 - 2 * s.alpha) + 1e-15);
    CHECK(dt <= 1.0 / m->max_gap + 1e-15);
}

TEST_CASE("grid refinement leaves probe values unchanged") {
    // frozen band-limited potential so both grids see the same V
    const InitialPacket p{};
    std::vector<double> v1(128), v2(256);
    auto pot = [](double x) { return std::cos(0.25 * x) + 0.5 * std::sin(0.5 * x); };
    const GridSpec g1{1, 128, 16 * kPi}, g2{1, 256, 16 * kPi};
    for (std::size_t j = 0; j < 128; ++j) v1[j] = pot(-0.5 * g1.length + j * g1.dx());
    for (std::size_t j = 0; j < 256; ++j) v2[j] = pot(-0.5 * g2.length + j * g2.dx());
    auto w1 = init_wave(p, g1, 1.0);
    auto w2 = init_wave(p, g2, 1.0);
    StrangStepper s1(g1, g1), s2(g2, g2);
    for (int k = 0; k < 200; ++k) {
        s1.step_with_potential(w1, v1, 0.005);
        s2.step_with_potential(w2, v2, 0.005);
    }
    for (double xi : {0.0, 0.5, 1.0, 2.0}) {
        const double x[1] = {xi};
        const auto a = w1.compensated()[make_probe(g1, x).flat];
        const auto b = w2.compensated()[make_probe(g2, x).flat];
        CHECK(std::abs(a - b) < 1e-6 * std::abs(b));
    }
}
