#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "schrolab/harness.hpp"
#include "schrolab/limitlaw.hpp"
#include "schrolab/oracle.hpp"
#include "schrolab/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace schrolab;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    unsigned threads = 0;
};

ExperimentConfig load(const Common& c) {
    ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_config(c.config);
    if (c.seed) cfg.master_seed = *c.seed;
    if (!c.out.empty()) cfg.out_dir = c.out;
    cfg.validate();
    return cfg;
}

json cplx(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

// Writes to <out>/<name> when --out is set, else stdout.
void deliver(const Common& c, const std::string& name, const std::string& body) {
    if (c.out.empty()) {
        std::cout << body;
        return;
    }
    fs::create_directories(c.out);
    const fs::path p = fs::path(c.out) / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << body;
    std::cerr << "wrote " << p.string() << "\n";
}

unsigned worker_count(unsigned requested) {
    return requested ? requested : std::max(1u, std::thread::hardware_concurrency());
}

int cmd_theory(const Common& c) {
    const auto cfg = load(c);
    const auto spec = MediumSpec::validate(cfg.medium);
    const auto ex = exponents(spec);
    const auto regime = classify_regime(spec, cfg.alpha);
    json out = {{"medium", {{"d", spec.d()}, {"gamma", spec.gamma()}, {"beta", spec.beta()}, {"mu", spec.mu()}}},
                {"kappa", ex.kappa},
                {"alpha_c", ex.alpha_c},
                {"singular_exponent", ex.singular_exponent},
                {"hurst", ex.hurst},
                {"K1", k1(spec)},
                {"K1_quadrature", k1_quadrature(spec)},
                {"D", big_d(spec)},
                {"alpha", cfg.alpha},
                {"regime", std::string(short_name(regime.label))}};
    json dtxi = json::array();
    if (spec.beta() > 0.5) {
        for (const auto& xi : cfg.probes)
            for (double t : cfg.times)
                if (t > 0) dtxi.push_back({{"t", t}, {"xi", xi}, {"D_txi", big_d_txi(spec, t, xi)}});
    }
    out["D_txi"] = dtxi;
    json preds = json::array();
    for (const auto& xi : cfg.probes) {
        const auto phi0 = cfg.packet.fourier(xi);
        for (double t : cfg.times) {
            const auto p = predict(spec, cfg.alpha, t, xi, phi0, kReportMoments);
            json row = {{"t", t}, {"xi", xi}, {"phi0_hat", cplx(phi0)}};
            row["phase_variance"] = p.phase_variance ? json(*p.phase_variance) : json(nullptr);
            json ms = json::array();
            for (const auto& m : p.moments)
                ms.push_back({{"M", m.M}, {"N", m.N}, {"value", m.value ? cplx(*m.value) : json(nullptr)},
                              {"note", m.note}});
            row["moments"] = ms;
            preds.push_back(row);
        }
    }
    out["predictions"] = preds;
    deliver(c, "theory.json", out.dump(2) + "\n");
    return 0;
}

int cmd_simulate(const Common& c) {
    const auto cfg = load(c);
    const auto rep = run_experiment(cfg, c.threads);
    const auto paths = default_paths(cfg);
    emit(rep, paths);
    std::cerr << "wrote " << paths.csv.string() << " and " << paths.json.string() << " (" << rep.rows.size()
              << " rows, " << rep.runtime.wall_seconds << " s)\n";
    return 0;
}

int cmd_limit_sample(const Common& c, std::size_t n) {
    const auto cfg = load(c);
    const auto spec = MediumSpec::validate(cfg.medium);
    const auto regime = classify_regime(spec, cfg.alpha);
    const auto& xi = cfg.probes.front();
    const double t = cfg.times.back();
    const auto phi0 = cfg.packet.fourier(xi);
    const std::uint64_t seed = cfg.master_seed;
    std::vector<std::complex<double>> samples(n);
    switch (regime.label) {
        case RegimeLabel::Homogenized: {
            // deterministic limit
            const auto v = predict_moment(spec, regime, 1, 0, t, xi, phi0);
            std::fill(samples.begin(), samples.end(), v);
            break;
        }
        case RegimeLabel::FractionalPhase:
        case RegimeLabel::FractionalPhaseXi: {
            const std::pair<int, int> none[1] = {{1, 0}};
            const auto p = predict(spec, cfg.alpha, t, xi, phi0, none);
            const auto theta = sample_phase(*p.phase_variance, n, seed);
            for (std::size_t i = 0; i < n; ++i) samples[i] = phi0 * std::polar(1.0, -theta[i]);
            break;
        }
        case RegimeLabel::Critical: {
            if (spec.d() != 1 || xi.size() != 1) throw std::invalid_argument("limit-sample: the critical sampler is 1-d");
            const unsigned T = std::min<unsigned>(worker_count(c.threads), static_cast<unsigned>(std::max<std::size_t>(n, 1)));
            std::vector<std::thread> pool;
            std::vector<std::exception_ptr> errs(T);
            for (unsigned w = 0; w < T; ++w)
                pool.emplace_back([&, w] {
                    try {
                        CriticalLimitSampler s(spec, cfg.packet, xi[0], t);
                        for (std::size_t i = w; i < n; i += T) samples[i] = s.sample(seed, i);
                    } catch (...) {
                        errs[w] = std::current_exception();
                    }
                });
            for (auto& th : pool) th.join();
            for (auto& e : errs)
                if (e) std::rethrow_exception(e);
            break;
        }
        case RegimeLabel::OutOfTheory:
            throw std::invalid_argument("limit-sample: alpha is outside the theorem, no limit law");
    }
    std::string body = "sample_index,re,im\n";
    char buf[96];
    for (std::size_t i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, samples[i].real(), samples[i].imag());
        body += buf;
    }
    deliver(c, "limit_samples.csv", body);
    return 0;
}

int cmd_oracle(const Common& c, int k_max) {
    const auto cfg = load(c);
    const auto spec = MediumSpec::validate(cfg.medium);
    const auto regime = classify_regime(spec, cfg.alpha);
    const auto& xi = cfg.probes.front();
    const double t = cfg.times.back();
    const auto phi0 = cfg.packet.fourier(xi);
    oracle::SeriesMode mode = oracle::SeriesMode::LimitNoPhase;
    if (regime.label == RegimeLabel::Homogenized) mode = oracle::SeriesMode::LimitHomogenized;
    if (regime.label == RegimeLabel::FractionalPhaseXi) mode = oracle::SeriesMode::LimitXiPhase;
    const char* mode_name = mode == oracle::SeriesMode::LimitHomogenized ? "homogenized"
                            : mode == oracle::SeriesMode::LimitXiPhase   ? "xi_phase"
                                                                          : "no_phase";
    json terms = json::array();
    for (const auto& [M, N] : kReportMoments) {
        std::complex<double> prev = 0.0;
        for (int k = 0; k <= k_max; ++k) {
            const auto s = oracle::moment_partial_sum(spec, M, N, t, k, mode, xi, phi0);
            std::size_t total = 0, crossing = 0, local = 0;
            if (k > 0 && M + N > 0) {
                // pairing census for the single-vertex-block layout of each factor order split
                const auto all = oracle::pairings(2 * k);
                std::vector<int> m(M, 0), nn(N, 0);
                (M > 0 ? m[0] : nn[0]) = 2 * k;
                const auto layout = oracle::VertexLayout::product(m, nn);
                for (const auto& p : all) {
                    ++total;
                    if (oracle::is_crossing(p, layout)) ++crossing;
                    if (oracle::is_factor_local(p, layout)) ++local;
                }
            }
            terms.push_back({{"M", M}, {"N", N}, {"k", k}, {"term", cplx(s - prev)}, {"partial_sum", cplx(s)},
                             {"pairings", total}, {"crossing", crossing}, {"factor_local", local}});
            prev = s;
        }
    }
    json sweep = json::array();
    std::vector<double> eps_list = {0.5, 0.25, 0.125, 0.0625};
    for (double e : cfg.eps)
        if (std::find(eps_list.begin(), eps_list.end(), e) == eps_list.end()) eps_list.push_back(e);
    std::sort(eps_list.rbegin(), eps_list.rend());
    for (double e : eps_list) {
        json row = {{"eps", e}, {"uniform_bound", oracle::uniform_bound_integral(spec, e, t)}};
        if (spec.d() == 1) row["first_term"] = cplx(oracle::finite_eps_first_term(spec, e, cfg.alpha, t, xi[0], phi0));
        sweep.push_back(row);
    }
    json out = {{"regime", std::string(short_name(regime.label))},
                {"series_mode", mode_name},
                {"t", t},
                {"xi", xi},
                {"D", big_d(spec)},
                {"terms", terms},
                {"bound_sweep", sweep}};
    deliver(c, "oracle.json", out.dump(2) + "\n");
    return 0;
}

int cmd_report(const Common& c, const std::string& in) {
    std::ifstream f(in, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + in);
    std::stringstream ss;
    ss << f.rdbuf();
    const auto rep = report_from_json(ss.str());
    std::printf("%s  schema %d  %s  config %s  rows %zu\n", rep.config.experiment_id.c_str(), rep.schema_version,
                rep.tool_version.c_str(), rep.config_hash.c_str(), rep.rows.size());
    std::printf("%8s %6s %6s %5s %5s %24s %10s %24s %8s\n", "eps", "regime", "t", "M", "N", "mean", "stderr", "pred",
                "z");
    for (const auto& r : rep.rows) {
        char mean[64], pred[64] = "NA", z[32] = "NA";
        std::snprintf(mean, sizeof mean, "%.5f%+.5fi", r.mean.real(), r.mean.imag());
        if (r.pred) {
            std::snprintf(pred, sizeof pred, "%.5f%+.5fi", r.pred->real(), r.pred->imag());
            if (r.stderr_ > 0) std::snprintf(z, sizeof z, "%.2f", std::abs(r.mean - *r.pred) / r.stderr_);
        }
        std::printf("%8.4g %6s %6.3g %5d %5d %24s %10.3g %24s %8s\n", r.eps, r.regime.c_str(), r.t, r.M, r.N, mean,
                    r.stderr_, pred, z);
    }
    if (!c.out.empty()) {
        fs::create_directories(c.out);
        emit(rep, {fs::path(c.out) / rep.config.csv_name, fs::path(c.out) / rep.config.json_name});
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"schrolab: weakly random Schroedinger equation with slowly decorrelating potentials"};
    app.set_version_flag("--version", std::string(tool_version()));
    app.require_subcommand(1);
    Common common;
    std::uint64_t seed = 0;
    app.add_option("--config", common.config, "experiment config (JSON)")->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed, "override master_seed");
    app.add_option("--out", common.out, "output directory");
    app.add_option("--threads", common.threads, "worker threads (0 = all cores)");

    auto* theory = app.add_subcommand("theory", "constants and limit predictions as JSON");
    auto* simulate = app.add_subcommand("simulate", "run the Monte Carlo ensemble and write CSV + JSON reports");
    auto* limit = app.add_subcommand("limit-sample", "samples of the limit law as CSV (sample_index,re,im)");
    std::size_t n_samples = 10000;
    limit->add_option("-n,--samples", n_samples, "number of samples")->check(CLI::PositiveNumber);
    auto* orc = app.add_subcommand("oracle", "per-order series terms and bound sweep as JSON");
    int k_max = 2;
    orc->add_option("--kmax", k_max, "highest pairing order")->check(CLI::Range(0, 4));
    auto* report = app.add_subcommand("report", "summarize a JSON report; with --out, re-emit CSV + JSON");
    std::string in;
    report->add_option("--in", in, "report JSON")->required()->check(CLI::ExistingFile);
    for (auto* s : {theory, simulate, limit, orc, report}) s->fallthrough();

    CLI11_PARSE(app, argc, argv);
    if (*seed_opt) common.seed = seed;
    try {
        if (*theory) return cmd_theory(common);
        if (*simulate) return cmd_simulate(common);
        if (*limit) return cmd_limit_sample(common, n_samples);
        if (*orc) return cmd_oracle(common, k_max);
        if (*report) return cmd_report(common, in);
    } catch (const std::exception& e) {
        std::cerr << "schrolab: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
