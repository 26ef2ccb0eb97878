#include "schrolab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "schrolab/stats.hpp"
#include "schrolab/theory.hpp"

namespace schrolab {

std::string_view tool_version() noexcept { return "schrolab 0.1.0"; }

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
    if (experiment_id.empty() || experiment_id.find_first_of(",\n\"") != std::string::npos)
        fail("experiment_id must be non-empty and free of commas, quotes and newlines");
    const MediumSpec spec = MediumSpec::validate(medium);
    if (!(alpha > 0.0)) fail("alpha must be positive");
    if (eps.empty()) fail("eps list is empty");
    for (double e : eps)
        if (!(e > 0.0 && e <= 1.0)) fail("eps values must lie in (0,1]");
    grid.validate();
    if (grid.d != spec.d()) fail("grid.d must equal medium.d");
    if (field_oversize < 1) fail("field_oversize must be >= 1");
    packet.validate(grid.d);
    if (probes.empty()) fail("probes list is empty");
    for (const auto& xi : probes) {
        if (static_cast<int>(xi.size()) != grid.d) fail("probe dimension must equal grid.d");
        make_probe(grid, xi);  // throws if not grid aligned
    }
    if (times.empty()) fail("times list is empty");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0)) fail("times must be non-negative");
        if (i > 0 && !(times[i] > times[i - 1])) fail("times must be strictly increasing");
    }
    if (n_realizations == 0) fail("n_realizations must be positive");
    if (!(dt_rule.dt_max > 0.0) || !(dt_rule.c_potential > 0.0) || !(dt_rule.c_dispersion > 0.0) ||
        !(dt_rule.c_rate > 0.0))
        fail("dt rule constants must be positive");
    if (csv_name.empty() || json_name.empty()) fail("output names must be non-empty");
}

RealizationSetup ExperimentConfig::setup_for(double e) const {
    RealizationSetup s;
    s.medium = MediumSpec::validate(medium);
    s.eps = e;
    s.alpha = alpha;
    s.wave_grid = grid;
    s.field_oversize = field_oversize;
    s.packet = packet;
    s.probes = probes;
    s.times = times;
    s.dt_rule = dt_rule;
    s.master_seed = master_seed;
    return s;
}

std::vector<MomentEstimate> estimate_moments(std::span<const std::complex<double>> samples,
                                             std::span<const std::pair<int, int>> pairs) {
    if (samples.empty()) throw std::invalid_argument("estimate_moments: no samples");
    std::vector<MomentEstimate> out;
    std::vector<std::complex<double>> z(samples.size());
    for (auto [M, N] : pairs) {
        if (M < 0 || N < 0) throw std::invalid_argument("estimate_moments: M, N must be non-negative");
        if (M == 0 && N == 0) {
            out.push_back({0, 0, 1.0, 0.0, samples.size()});
            continue;
        }
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto s = samples[i];
            // |s|^2 written as a real product keeps unit-modulus (1,1) estimates exact.
            const int common = std::min(M, N);
            const double mod2 = s.real() * s.real() + s.imag() * s.imag();
            std::complex<double> v = std::pow(mod2, common);
            for (int k = common; k < M; ++k) v *= s;
            for (int k = common; k < N; ++k) v *= std::conj(s);
            z[i] = v;
        }
        const auto m = stats::complex_mean(z);
        out.push_back({M, N, m.mean, m.stderr_, m.n});
    }
    return out;
}

NormalityResult normality_test(std::span<const double> phases, double variance, double level) {
    if (!(variance > 0.0)) throw std::invalid_argument("normality_test: variance must be positive");
    if (phases.size() < 100) throw std::invalid_argument("normality_test: need at least 100 samples");
    NormalityResult r;
    r.n = phases.size();
    r.statistic = stats::ks_statistic_normal(phases, 0.0, variance);
    r.critical = stats::ks_critical_value(r.n, level);
    r.pass = r.statistic < r.critical;
    return r;
}

std::vector<double> unwrap_phase_path(std::span<const std::complex<double>> path, std::complex<double> phi0_hat) {
    if (phi0_hat == 0.0) throw std::invalid_argument("unwrap: phi0_hat is zero");
    std::vector<double> out(path.size());
    double prev = 0.0;
    for (std::size_t j = 0; j < path.size(); ++j) {
        const double raw = std::arg(path[j] / phi0_hat);
        double step = raw - std::remainder(prev, 2.0 * std::numbers::pi);
        step = std::remainder(step, 2.0 * std::numbers::pi);
        if (std::abs(step) >= 0.5 * std::numbers::pi)
            throw std::runtime_error("unwrap: phase increment >= pi/2 at time index " + std::to_string(j) +
                                     "; refine the time grid");
        prev += step;
        out[j] = prev;
    }
    return out;
}

namespace {

std::vector<ProbeRecord> run_ensemble(const RealizationSetup& setup, std::size_t n, unsigned threads,
                                      double& dt_out) {
    const auto medium = make_effective_medium(setup);
    std::vector<ProbeRecord> records(n);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex err_mu;
    std::string err;
    dt_out = 0.0;
    std::mutex dt_mu;

    auto worker = [&] {
        std::optional<RealizationRunner> runner;
        try {
            runner.emplace(setup, medium);
            std::lock_guard lk(dt_mu);
            dt_out = runner->step_size();
        } catch (const std::exception& e) {
            std::lock_guard lk(err_mu);
            if (!failed.exchange(true)) err = std::string("solver setup failed: ") + e.what();
            return;
        }
        for (;;) {
            if (failed.load()) return;
            const std::size_t r = next.fetch_add(1);
            if (r >= n) return;
            try {
                records[r] = runner->run(r);
            } catch (const std::exception& e) {
                std::lock_guard lk(err_mu);
                if (!failed.exchange(true))
                    err = "realization " + std::to_string(r) + " (master seed " + std::to_string(setup.master_seed) +
                          ", eps " + std::to_string(setup.eps) + ") failed: " + e.what();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned nt = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    for (unsigned i = 1; i < nt; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failed) throw std::runtime_error(err);
    return records;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Report run_experiment(const ExperimentConfig& cfg, unsigned threads) {
    cfg.validate();
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    const auto t_start = std::chrono::steady_clock::now();

    Report rep;
    rep.tool_version = std::string(tool_version());
    rep.config_hash = config_hash(cfg);
    rep.config = cfg;
    rep.runtime.threads = threads;

    const MediumSpec spec = MediumSpec::validate(cfg.medium);
    const Regime regime = classify_regime(spec, cfg.alpha);
    const bool phase_regime =
        regime.label == RegimeLabel::FractionalPhase || regime.label == RegimeLabel::FractionalPhaseXi;
    const std::span<const std::pair<int, int>> pairs(kReportMoments);

    for (double eps : cfg.eps) {
        const RealizationSetup setup = cfg.setup_for(eps);
        double dt = 0.0;
        const auto records = run_ensemble(setup, cfg.n_realizations, threads, dt);
        rep.runtime.dt.push_back(dt);
        rep.runtime.steps.push_back(records.front().steps);

        const std::size_t n_t = cfg.times.size();
        const std::size_t n_p = cfg.probes.size();
        std::vector<std::complex<double>> samples(records.size());
        for (std::size_t p = 0; p < n_p; ++p) {
            const auto& xi = cfg.probes[p];
            const std::complex<double> phi0 = cfg.packet.fourier(xi);

            // phases[r][j]
            std::vector<std::vector<double>> phases;
            if (phase_regime) {
                phases.resize(records.size());
                std::vector<std::complex<double>> path(n_t);
                for (std::size_t r = 0; r < records.size(); ++r) {
                    for (std::size_t j = 0; j < n_t; ++j) path[j] = records[r].at(j, p);
                    try {
                        phases[r] = unwrap_phase_path(path, phi0);
                    } catch (const std::exception& e) {
                        throw std::runtime_error("realization " + std::to_string(r) + " (master seed " +
                                                 std::to_string(cfg.master_seed) + "): " + e.what());
                    }
                }
            }

            for (std::size_t j = 0; j < n_t; ++j) {
                const double t = cfg.times[j];
                for (std::size_t r = 0; r < records.size(); ++r) samples[r] = records[r].at(j, p);
                const auto est = estimate_moments(samples, pairs);

                std::optional<TheoryPrediction> pred;
                if (t > 0.0) pred = predict(spec, cfg.alpha, t, xi, phi0, pairs);

                std::optional<double> pv, pv_pred, ks;
                std::optional<bool> ks_ok;
                if (phase_regime) {
                    std::vector<double> th(records.size());
                    for (std::size_t r = 0; r < records.size(); ++r) th[r] = phases[r][j];
                    if (th.size() >= 2) pv = stats::sample_variance(th);
                    pv_pred = pred ? *pred->phase_variance : 0.0;
                    if (th.size() >= 100 && *pv_pred > 0.0) {
                        const auto nt = normality_test(th, *pv_pred);
                        ks = nt.statistic;
                        ks_ok = nt.pass;
                    }
                }

                for (std::size_t m = 0; m < est.size(); ++m) {
                    ReportRow row;
                    row.experiment_id = cfg.experiment_id;
                    row.eps = eps;
                    row.alpha = cfg.alpha;
                    row.regime = std::string(short_name(regime.label));
                    row.t = t;
                    row.xi = xi;
                    row.M = est[m].M;
                    row.N = est[m].N;
                    row.mean = est[m].mean;
                    row.stderr_ = est[m].stderr_;
                    row.n_samples = est[m].n;
                    if (!pred) {
                        row.pred = std::pow(phi0, row.M) * std::pow(std::conj(phi0), row.N);
                    } else if (pred->moments[m].value) {
                        row.pred = *pred->moments[m].value;
                    } else {
                        row.pred_note = pred->moments[m].note;
                    }
                    row.phase_var = pv;
                    row.phase_var_pred = pv_pred;
                    row.ks_stat = ks;
                    row.ks_pass = ks_ok;
                    rep.rows.push_back(std::move(row));
                }
            }
        }
    }
    rep.runtime.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rep;
}

std::string csv_header() {
    return "experiment_id,eps,alpha,regime,t,xi,M,N,re_mean,im_mean,stderr,n_samples,re_pred,im_pred,phase_var,"
           "phase_var_pred,ks_stat,ks_pass";
}

std::string report_csv(const Report& report) {
    std::ostringstream os;
    os << csv_header() << '\n';
    auto opt = [](const std::optional<double>& v) { return v ? fmt_double(*v) : std::string("NA"); };
    for (const auto& r : report.rows) {
        std::string xi;
        for (std::size_t i = 0; i < r.xi.size(); ++i) xi += (i ? ";" : "") + fmt_double(r.xi[i]);
        os << r.experiment_id << ',' << fmt_double(r.eps) << ',' << fmt_double(r.alpha) << ',' << r.regime << ','
           << fmt_double(r.t) << ',' << xi << ',' << r.M << ',' << r.N << ',' << fmt_double(r.mean.real()) << ','
           << fmt_double(r.mean.imag()) << ',' << fmt_double(r.stderr_) << ',' << r.n_samples << ','
           << (r.pred ? fmt_double(r.pred->real()) : "NA") << ',' << (r.pred ? fmt_double(r.pred->imag()) : "NA")
           << ',' << opt(r.phase_var) << ',' << opt(r.phase_var_pred) << ',' << opt(r.ks_stat) << ','
           << (r.ks_pass ? (*r.ks_pass ? "true" : "false") : "NA") << '\n';
    }
    return os.str();
}

EmitPaths default_paths(const ExperimentConfig& cfg) {
    const std::filesystem::path dir(cfg.out_dir);
    return {dir / cfg.csv_name, dir / cfg.json_name};
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
    f << body;
    f.close();
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

void emit(const Report& report, const EmitPaths& paths) {
    write_file(paths.csv, report_csv(report));
    write_file(paths.json, report_to_json(report));
}

}  // namespace schrolab
