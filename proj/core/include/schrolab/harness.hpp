#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "schrolab/medium.hpp"
#include "schrolab/randfield.hpp"
#include "schrolab/solver.hpp"

namespace schrolab {

inline constexpr int kReportSchemaVersion = 1;
std::string_view tool_version() noexcept;

struct ExperimentConfig {
    std::string experiment_id = "experiment";
    MediumParams medium{};
    double alpha = 1.0;
    std::vector<double> eps{0.1};
    GridSpec grid{};
    int field_oversize = 1;
    InitialPacket packet{};
    std::vector<std::vector<double>> probes{{1.0}};
    std::vector<double> times{1.0};
    std::size_t n_realizations = 100;
    std::uint64_t master_seed = 1;
    DtRule dt_rule{};
    std::string out_dir = ".";
    std::string csv_name = "report.csv";
    std::string json_name = "report.json";

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
    RealizationSetup setup_for(double eps) const;
};

// JSON text <-> config. Unknown keys are rejected.
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);
// FNV-1a 64 of the canonical JSON form, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

struct MomentEstimate {
    int M = 0;
    int N = 0;
    std::complex<double> mean;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

std::vector<MomentEstimate> estimate_moments(std::span<const std::complex<double>> samples,
                                             std::span<const std::pair<int, int>> pairs);

struct NormalityResult {
    double statistic = 0.0;
    double critical = 0.0;
    bool pass = false;
    std::size_t n = 0;
};

// Two-sided KS against N(0, variance) at significance `level`.
NormalityResult normality_test(std::span<const double> phases, double variance, double level = 0.01);

// theta_j = arg(psi_j / phi0_hat) continued from theta = 0 at t = 0 along the recorded grid.
// Throws if a step increment reaches pi/2 (grid too coarse).
std::vector<double> unwrap_phase_path(std::span<const std::complex<double>> path, std::complex<double> phi0_hat);

struct ReportRow {
    std::string experiment_id;
    double eps = 0.0;
    double alpha = 0.0;
    std::string regime;
    double t = 0.0;
    std::vector<double> xi;
    int M = 0;
    int N = 0;
    std::complex<double> mean;
    double stderr_ = 0.0;
    std::size_t n_samples = 0;
    std::optional<std::complex<double>> pred;
    std::string pred_note;  // why pred is empty
    std::optional<double> phase_var;
    std::optional<double> phase_var_pred;
    std::optional<double> ks_stat;
    std::optional<bool> ks_pass;
};

struct RunMetadata {
    double wall_seconds = 0.0;
    unsigned threads = 1;
    std::vector<double> dt;  // per eps
    std::vector<std::size_t> steps;
};

struct Report {
    int schema_version = kReportSchemaVersion;
    std::string tool_version;
    std::string config_hash;
    ExperimentConfig config;
    std::vector<ReportRow> rows;
    RunMetadata runtime;
};

inline const std::pair<int, int> kReportMoments[4] = {{1, 0}, {1, 1}, {2, 0}, {2, 2}};

// threads = 0 uses hardware concurrency.
Report run_experiment(const ExperimentConfig& cfg, unsigned threads = 0);

std::string csv_header();
std::string report_csv(const Report& report);
std::string report_to_json(const Report& report, bool include_runtime = true);
Report report_from_json(const std::string& text);

struct EmitPaths {
    std::filesystem::path csv;
    std::filesystem::path json;
};
EmitPaths default_paths(const ExperimentConfig& cfg);
void emit(const Report& report, const EmitPaths& paths);

}  // namespace schrolab
