#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "schrolab/harness.hpp"

namespace schrolab {

using nlohmann::json;

namespace {

const char* cutoff_name(CutoffKind k) { return k == CutoffKind::SharpBall ? "sharp_ball" : "smooth_bump"; }

CutoffKind cutoff_from(const std::string& s) {
    if (s == "sharp_ball") return CutoffKind::SharpBall;
    if (s == "smooth_bump") return CutoffKind::SmoothBump;
    throw std::invalid_argument("config: unknown cutoff kind '" + s + "'");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw std::invalid_argument("config: '" + where + "' must be a table");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) throw std::invalid_argument("config: unknown key '" + where + "." + it.key() + "'");
}

template <class T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) {
        try {
            out = j.at(key).get<T>();
        } catch (const json::exception& e) {
            throw std::invalid_argument(std::string("config: bad value for '") + key + "': " + e.what());
        }
    }
}

json medium_json(const MediumParams& m) {
    return {{"d", m.d},
            {"gamma", m.gamma},
            {"beta", m.beta},
            {"mu", m.mu},
            {"cutoff", {{"kind", cutoff_name(m.cutoff.kind)}, {"p_max", m.cutoff.p_max},
                        {"amplitude_at_zero", m.cutoff.amplitude_at_zero}}}};
}

json config_json(const ExperimentConfig& c) {
    return {{"experiment_id", c.experiment_id},
            {"medium", medium_json(c.medium)},
            {"alpha", c.alpha},
            {"eps", c.eps},
            {"grid", {{"d", c.grid.d}, {"n", c.grid.n}, {"length", c.grid.length}}},
            {"field_oversize", c.field_oversize},
            {"packet", {{"sigma", c.packet.sigma}, {"center", c.packet.center}, {"amplitude", c.packet.amplitude}}},
            {"probes", c.probes},
            {"times", c.times},
            {"n_realizations", c.n_realizations},
            {"master_seed", c.master_seed},
            {"dt_rule", {{"dt_max", c.dt_rule.dt_max}, {"c_potential", c.dt_rule.c_potential},
                         {"c_dispersion", c.dt_rule.c_dispersion}, {"c_rate", c.dt_rule.c_rate}}},
            {"output", {{"out_dir", c.out_dir}, {"csv_name", c.csv_name}, {"json_name", c.json_name}}}};
}

ExperimentConfig config_from(const json& j) {
    ExperimentConfig c;
    check_keys(j, {"experiment_id", "medium", "alpha", "eps", "grid", "field_oversize", "packet", "probes", "times",
                   "n_realizations", "master_seed", "dt_rule", "output"},
               "config");
    read(j, "experiment_id", c.experiment_id);
    if (j.contains("medium")) {
        const auto& m = j.at("medium");
        check_keys(m, {"d", "gamma", "beta", "mu", "cutoff"}, "medium");
        read(m, "d", c.medium.d);
        read(m, "gamma", c.medium.gamma);
        read(m, "beta", c.medium.beta);
        read(m, "mu", c.medium.mu);
        if (m.contains("cutoff")) {
            const auto& k = m.at("cutoff");
            check_keys(k, {"kind", "p_max", "amplitude_at_zero"}, "medium.cutoff");
            std::string kind = cutoff_name(c.medium.cutoff.kind);
            read(k, "kind", kind);
            c.medium.cutoff.kind = cutoff_from(kind);
            read(k, "p_max", c.medium.cutoff.p_max);
            read(k, "amplitude_at_zero", c.medium.cutoff.amplitude_at_zero);
        }
    }
    read(j, "alpha", c.alpha);
    read(j, "eps", c.eps);
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        check_keys(g, {"d", "n", "length"}, "grid");
        read(g, "d", c.grid.d);
        read(g, "n", c.grid.n);
        read(g, "length", c.grid.length);
    }
    read(j, "field_oversize", c.field_oversize);
    if (j.contains("packet")) {
        const auto& p = j.at("packet");
        check_keys(p, {"sigma", "center", "amplitude"}, "packet");
        read(p, "sigma", c.packet.sigma);
        read(p, "center", c.packet.center);
        read(p, "amplitude", c.packet.amplitude);
    }
    read(j, "probes", c.probes);
    read(j, "times", c.times);
    read(j, "n_realizations", c.n_realizations);
    read(j, "master_seed", c.master_seed);
    if (j.contains("dt_rule")) {
        const auto& d = j.at("dt_rule");
        check_keys(d, {"dt_max", "c_potential", "c_dispersion", "c_rate"}, "dt_rule");
        read(d, "dt_max", c.dt_rule.dt_max);
        read(d, "c_potential", c.dt_rule.c_potential);
        read(d, "c_dispersion", c.dt_rule.c_dispersion);
        read(d, "c_rate", c.dt_rule.c_rate);
    }
    if (j.contains("output")) {
        const auto& o = j.at("output");
        check_keys(o, {"out_dir", "csv_name", "json_name"}, "output");
        read(o, "out_dir", c.out_dir);
        read(o, "csv_name", c.csv_name);
        read(o, "json_name", c.json_name);
    }
    return c;
}

json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }
std::complex<double> complex_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

template <class T>
json opt_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> opt_from(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<T>();
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: parse error: ") + e.what());
    }
    return config_from(j);
}

std::string config_to_json(const ExperimentConfig& cfg) { return config_json(cfg).dump(2); }

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read config: " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    try {
        return config_from_json(ss.str());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

std::string config_hash(const ExperimentConfig& cfg) {
    const std::string canon = config_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : canon) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string report_to_json(const Report& r, bool include_runtime) {
    json rows = json::array();
    for (const auto& x : r.rows) {
        rows.push_back({{"experiment_id", x.experiment_id},
                        {"eps", x.eps},
                        {"alpha", x.alpha},
                        {"regime", x.regime},
                        {"t", x.t},
                        {"xi", x.xi},
                        {"M", x.M},
                        {"N", x.N},
                        {"mean", complex_json(x.mean)},
                        {"stderr", x.stderr_},
                        {"n_samples", x.n_samples},
                        {"pred", x.pred ? complex_json(*x.pred) : json(nullptr)},
                        {"pred_note", x.pred_note},
                        {"phase_var", opt_json(x.phase_var)},
                        {"phase_var_pred", opt_json(x.phase_var_pred)},
                        {"ks_stat", opt_json(x.ks_stat)},
                        {"ks_pass", opt_json(x.ks_pass)}});
    }
    json j = {{"schema_version", r.schema_version},
              {"tool_version", r.tool_version},
              {"config_hash", r.config_hash},
              {"config", config_json(r.config)},
              {"rows", rows}};
    if (include_runtime)
        j["runtime"] = {{"wall_seconds", r.runtime.wall_seconds},
                        {"threads", r.runtime.threads},
                        {"dt", r.runtime.dt},
                        {"steps", r.runtime.steps}};
    return j.dump(2);
}

Report report_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("report: parse error: ") + e.what());
    }
    Report r;
    try {
        r.schema_version = j.at("schema_version").get<int>();
        if (r.schema_version != kReportSchemaVersion)
            throw std::invalid_argument("report: schema version " + std::to_string(r.schema_version) +
                                        " does not match " + std::to_string(kReportSchemaVersion));
        r.tool_version = j.at("tool_version").get<std::string>();
        r.config_hash = j.at("config_hash").get<std::string>();
        r.config = config_from(j.at("config"));
        for (const auto& x : j.at("rows")) {
            ReportRow row;
            row.experiment_id = x.at("experiment_id").get<std::string>();
            row.eps = x.at("eps").get<double>();
            row.alpha = x.at("alpha").get<double>();
            row.regime = x.at("regime").get<std::string>();
            row.t = x.at("t").get<double>();
            row.xi = x.at("xi").get<std::vector<double>>();
            row.M = x.at("M").get<int>();
            row.N = x.at("N").get<int>();
            row.mean = complex_from(x.at("mean"));
            row.stderr_ = x.at("stderr").get<double>();
            row.n_samples = x.at("n_samples").get<std::size_t>();
            if (!x.at("pred").is_null()) row.pred = complex_from(x.at("pred"));
            row.pred_note = x.value("pred_note", std::string{});
            row.phase_var = opt_from<double>(x, "phase_var");
            row.phase_var_pred = opt_from<double>(x, "phase_var_pred");
            row.ks_stat = opt_from<double>(x, "ks_stat");
            row.ks_pass = opt_from<bool>(x, "ks_pass");
            r.rows.push_back(std::move(row));
        }
        if (j.contains("runtime")) {
            const auto& m = j.at("runtime");
            r.runtime.wall_seconds = m.at("wall_seconds").get<double>();
            r.runtime.threads = m.at("threads").get<unsigned>();
            r.runtime.dt = m.at("dt").get<std::vector<double>>();
            r.runtime.steps = m.at("steps").get<std::vector<std::size_t>>();
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("report: malformed: ") + e.what());
    }
    return r;
}

}  // namespace schrolab
