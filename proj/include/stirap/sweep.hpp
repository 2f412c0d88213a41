// sweep.hpp: settings, config files, 2-D sweeps and oracle comparison runs
// behind the `stirap` command-line tool.
//
// Interface units: Ω₀τ, T/τ, ντ, ν'τ, Δ/ν, ω/ν, η√Λ τ. Internally τ = 1.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stirap/errors.hpp"
#include "stirap/exact_oracle.hpp"
#include "stirap/perturbative_efficiency.hpp"
#include "stirap/pulses_frame.hpp"

namespace stirap::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitVerifyFailed = 4;

inline constexpr std::string_view kCsvHeader = "axis1,axis2,two_re_J_tau2,correction,efficiency,valid";

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ------------------------------------------------------------- settings --

struct KeySpec {
    std::string_view name;
    std::string_view help;
};

// Every key doubles as a `--name` flag.
inline const std::vector<KeySpec>& known_keys() {
    static const std::vector<KeySpec> keys{
        {"omega0-tau", "peak Rabi amplitude, Omega0*tau"},
        {"T-over-tau", "protocol half-window T/tau"},
        {"nu-tau", "atomic gap nu*tau"},
        {"nu-prime-tau", "drive frequency nu'*tau (exclusive with delta-over-nu)"},
        {"delta-over-nu", "detuning (nu - nu')/nu (exclusive with nu-prime-tau)"},
        {"omega-over-nu", "bath spin frequency omega/nu"},
        {"r-eta", "coupling ratio eta^(2)/eta^(1)"},
        {"eta-sqrt-lambda-tau", "collective coupling eta*sqrt(Lambda)*tau"},
        {"n-grid", "quadrature nodes, or 'auto'"},
        {"samples-per-period", "resolution rule: nodes per fastest integrand period"},
        {"phase-convention", "derived | printed"},
        {"spins", "number of bath spins L (lambda_k = 1)"},
        {"output", "output file (default: standard output)"},
        {"format", "csv | json"},
        {"parallelism", "worker threads (0 = hardware concurrency)"},
        {"matrix-output", "optional gnuplot nonuniform-matrix file for 2ReJ"},
        {"axis1", "omega_bath | delta | r_eta"},
        {"axis1-min", "first axis minimum"},
        {"axis1-max", "first axis maximum"},
        {"axis1-count", "first axis point count"},
        {"axis1-scale", "linear | log"},
        {"axis2", "omega_bath | delta | r_eta"},
        {"axis2-min", "second axis minimum"},
        {"axis2-max", "second axis maximum"},
        {"axis2-count", "second axis point count"},
        {"axis2-scale", "linear | log"},
        {"couplings", "verify: comma-separated eta*sqrt(Lambda)*tau values"},
        {"oracle-mode", "verify: full | rwa | closed"},
        {"oracle-frame", "verify: picture1 | lab"},
        {"oracle-steps-per-period", "verify: RK4 steps per fastest period"},
        {"pulse-counter-rotating", "verify: keep the counter-rotating drive term (true | false)"},
    };
    return keys;
}

inline bool is_known_key(std::string_view k) {
    const auto& keys = known_keys();
    return std::any_of(keys.begin(), keys.end(), [&](const KeySpec& s) { return s.name == k; });
}

struct SettingEntry {
    std::string value;
    std::string origin; // "file:line" or "--flag"
};

using Settings = std::map<std::string, SettingEntry>;

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

// Flat `key = value` lines; '#' starts a comment.
inline Settings parse_config(std::istream& in, const std::string& source) {
    Settings out;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string where = source + ":" + std::to_string(line_no);
        std::string line = raw.substr(0, raw.find('#'));
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
        std::string key = trim(std::string_view(line).substr(0, eq));
        std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": missing key before '='");
        if (!is_known_key(key)) throw ConfigError(where + ": unknown key '" + key + "'");
        if (value.empty()) throw ConfigError(where + ": key '" + key + "' has an empty value");
        if (out.count(key)) throw ConfigError(where + ": key '" + key + "' repeated (first at " + out[key].origin + ")");
        out[key] = {value, where};
    }
    return out;
}

inline Settings load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    return parse_config(in, path);
}

// Values in `overrides` win.
inline Settings merge_settings(Settings base, const Settings& overrides) {
    for (const auto& [k, v] : overrides) base[k] = v;
    return base;
}

inline std::optional<std::string> lookup(const Settings& s, const std::string& key) {
    const auto it = s.find(key);
    if (it == s.end()) return std::nullopt;
    return it->second.value;
}

inline std::string describe(const Settings& s, const std::string& key) {
    const auto it = s.find(key);
    return it == s.end() ? "key '" + key + "'" : it->second.origin + ": key '" + key + "'";
}

inline double parse_number(const Settings& s, const std::string& key) {
    const std::string v = s.at(key).value;
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size() || !std::isfinite(x)) {
        throw ConfigError(describe(s, key) + ": expected a finite number, got '" + v + "'");
    }
    return x;
}

inline std::optional<double> optional_number(const Settings& s, const std::string& key) {
    if (!s.count(key)) return std::nullopt;
    return parse_number(s, key);
}

inline double required_number(const Settings& s, const std::string& key) {
    if (!s.count(key)) throw ConfigError("missing required key '" + key + "' (flag --" + key + ")");
    return parse_number(s, key);
}

inline double number_or(const Settings& s, const std::string& key, double fallback) {
    return optional_number(s, key).value_or(fallback);
}

inline std::size_t count_or(const Settings& s, const std::string& key, std::size_t fallback) {
    if (!s.count(key)) return fallback;
    const std::string v = s.at(key).value;
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
        throw ConfigError(describe(s, key) + ": expected a non-negative integer, got '" + v + "'");
    }
    return static_cast<std::size_t>(std::stoull(v));
}

inline std::string choice_or(const Settings& s, const std::string& key, std::initializer_list<std::string_view> allowed,
                             std::string fallback) {
    if (!s.count(key)) return fallback;
    const std::string v = s.at(key).value;
    for (auto a : allowed) {
        if (v == a) return v;
    }
    std::string list;
    for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
    throw ConfigError(describe(s, key) + ": expected one of {" + list + "}, got '" + v + "'");
}

inline bool flag_or(const Settings& s, const std::string& key, bool fallback) {
    if (!s.count(key)) return fallback;
    const std::string v = s.at(key).value;
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(describe(s, key) + ": expected true or false, got '" + v + "'");
}

inline std::vector<double> number_list(const Settings& s, const std::string& key) {
    if (!s.count(key)) throw ConfigError("missing required key '" + key + "' (flag --" + key + ")");
    std::vector<double> out;
    std::stringstream ss(s.at(key).value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        Settings one{{key, {trim(item), s.at(key).origin}}};
        out.push_back(parse_number(one, key));
    }
    if (out.empty()) throw ConfigError(describe(s, key) + ": empty list");
    return out;
}

// --------------------------------------------------------------- points --

enum class AxisKind { omega_bath, delta, r_eta };

struct PointSpec {
    double omega0_tau{10.0};
    double T_over_tau{5.0};
    double nu_tau{10.0};
    std::optional<double> nu_prime_tau;
    std::optional<double> delta_over_nu;
    double omega_over_nu{0.1};
    double r_eta{1.0};
    double eta_sqrt_lambda_tau{0.0};
    std::size_t spins{1};
    std::size_t n_grid{0}; // 0 = auto
    QuadratureOptions quadrature{};

    PulseParams pulses() const { return PulseParams::symmetric(omega0_tau, 1.0, T_over_tau); }

    SystemBathParams system() const {
        if (spins == 0) throw ConfigError("spins must be >= 1");
        SystemBathParams s;
        s.nu = nu_tau;
        if (nu_prime_tau) {
            s.nu_prime = *nu_prime_tau;
        } else if (delta_over_nu) {
            s.set_detuning(*delta_over_nu * nu_tau);
        } else {
            throw ConfigError("one of nu-prime-tau or delta-over-nu is required");
        }
        s.omega_bath = omega_over_nu * nu_tau;
        s.r_eta = r_eta;
        s.lambda_weights.assign(spins, 1.0);
        s.eta = eta_sqrt_lambda_tau / std::sqrt(static_cast<double>(spins));
        s.validate();
        return s;
    }

    void set_axis(AxisKind kind, double v) {
        switch (kind) {
        case AxisKind::omega_bath: omega_over_nu = v; break;
        case AxisKind::delta: delta_over_nu = v; nu_prime_tau.reset(); break;
        case AxisKind::r_eta: r_eta = v; break;
        }
    }

    std::size_t resolved_n_grid() const {
        return n_grid != 0 ? n_grid : required_n_grid(pulses(), system(), quadrature.samples_per_period);
    }
};

inline const char* axis_key(AxisKind k) {
    switch (k) {
    case AxisKind::omega_bath: return "omega-over-nu";
    case AxisKind::delta: return "delta-over-nu";
    case AxisKind::r_eta: return "r-eta";
    }
    return "";
}

// Reads the physical point; keys listed in `swept` may be absent.
inline PointSpec point_from_settings(const Settings& s, const std::vector<AxisKind>& swept = {}) {
    auto is_swept = [&](AxisKind k) { return std::find(swept.begin(), swept.end(), k) != swept.end(); };
    PointSpec p;
    p.omega0_tau = required_number(s, "omega0-tau");
    p.T_over_tau = required_number(s, "T-over-tau");
    p.nu_tau = required_number(s, "nu-tau");
    p.nu_prime_tau = optional_number(s, "nu-prime-tau");
    p.delta_over_nu = optional_number(s, "delta-over-nu");
    if (p.nu_prime_tau && p.delta_over_nu) {
        throw ConfigError("nu-prime-tau and delta-over-nu are mutually exclusive");
    }
    if (is_swept(AxisKind::delta)) {
        if (p.nu_prime_tau || p.delta_over_nu) {
            throw ConfigError("detuning is swept; drop nu-prime-tau / delta-over-nu");
        }
        p.delta_over_nu = 0.0;
    } else if (!p.nu_prime_tau && !p.delta_over_nu) {
        throw ConfigError("missing required key: one of 'nu-prime-tau' or 'delta-over-nu'");
    }
    p.omega_over_nu = is_swept(AxisKind::omega_bath) ? number_or(s, "omega-over-nu", 0.0)
                                                     : required_number(s, "omega-over-nu");
    p.r_eta = is_swept(AxisKind::r_eta) ? number_or(s, "r-eta", 1.0) : required_number(s, "r-eta");
    p.eta_sqrt_lambda_tau = required_number(s, "eta-sqrt-lambda-tau");
    p.spins = count_or(s, "spins", 1);
    if (!s.count("n-grid")) throw ConfigError("missing required key 'n-grid' (flag --n-grid)");
    p.n_grid = s.at("n-grid").value == "auto" ? 0 : count_or(s, "n-grid", 0);
    if (s.at("n-grid").value != "auto" && p.n_grid < 2) throw ConfigError(describe(s, "n-grid") + ": must be >= 2");
    p.quadrature.samples_per_period = number_or(s, "samples-per-period", 10.0);
    if (!(p.quadrature.samples_per_period > 0.0)) throw ConfigError(describe(s, "samples-per-period") + ": must be > 0");
    p.quadrature.convention = choice_or(s, "phase-convention", {"derived", "printed"}, "derived") == "printed"
                                  ? PhaseConvention::printed
                                  : PhaseConvention::derived;
    try {
        (void)p.pulses();
        (void)p.system();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return p;
}

// ------------------------------------------------------------ formatting --

inline std::string format_number(double x) {
    if (x == 0.0) x = 0.0; // drop the sign of -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

// Round-trips the 12-digit CSV rendering into a JSON number.
inline double rounded(double x) { return std::stod(format_number(x)); }

struct ResultRow {
    double axis1{0.0};
    double axis2{0.0};
    double two_re_j{0.0};
    double correction{0.0};
    double efficiency{1.0};
    bool valid{false};
    std::string error; // non-empty when the point failed
};

inline ResultRow row_from(const EfficiencyResult& r, double a1, double a2) {
    ResultRow row{a1, a2, r.two_re_j(), r.correction, r.efficiency, r.valid, {}};
    if (!std::isfinite(row.two_re_j) || !std::isfinite(row.correction) || !std::isfinite(row.efficiency)) {
        row = ResultRow{a1, a2, 0.0, 0.0, 0.0, false, "non-finite result"};
    }
    return row;
}

inline std::string csv_row(const ResultRow& r) {
    return format_number(r.axis1) + "," + format_number(r.axis2) + "," + format_number(r.two_re_j) + "," +
           format_number(r.correction) + "," + format_number(r.efficiency) + "," + (r.valid ? "true" : "false");
}

inline std::string to_csv(const std::vector<ResultRow>& rows) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : rows) out += csv_row(r) + '\n';
    return out;
}

inline nlohmann::ordered_json row_json(const ResultRow& r) {
    nlohmann::ordered_json j;
    j["axis1"] = rounded(r.axis1);
    j["axis2"] = rounded(r.axis2);
    j["two_re_J_tau2"] = rounded(r.two_re_j);
    j["correction"] = rounded(r.correction);
    j["efficiency"] = rounded(r.efficiency);
    j["valid"] = r.valid;
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

inline std::string to_json(const std::vector<ResultRow>& rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) arr.push_back(row_json(r));
    return arr.dump(2) + "\n";
}

// --------------------------------------------------------------- compute --

inline ResultRow compute_point(const PointSpec& p) {
    const SystemBathParams s = p.system();
    const EfficiencyResult r = perturbative_efficiency(p.pulses(), s, p.resolved_n_grid(), p.quadrature);
    return row_from(r, 0.0, 0.0);
}

// ----------------------------------------------------------------- sweep --

struct Axis {
    AxisKind kind{AxisKind::omega_bath};
    double min{0.0};
    double max{1.0};
    std::size_t count{2};
    bool log{false};

    std::vector<double> values() const {
        std::vector<double> v(count);
        for (std::size_t i = 0; i < count; ++i) {
            const double f = static_cast<double>(i) / static_cast<double>(count - 1);
            v[i] = log ? min * std::pow(max / min, f) : min + (max - min) * f;
        }
        v.back() = max;
        return v;
    }
};

struct SweepSpec {
    Axis axis1;
    Axis axis2;
    PointSpec fixed;
    std::size_t parallelism{1};

    void validate() const {
        if (axis1.kind == axis2.kind) throw ConfigError("axis1 and axis2 must differ");
        for (const Axis* a : {&axis1, &axis2}) {
            if (a->count < 2) throw ConfigError("axis count must be >= 2");
            if (a->log && !(a->min > 0.0 && a->max > 0.0)) throw ConfigError("log axis requires min > 0 and max > 0");
        }
    }
};

inline AxisKind parse_axis_kind(const Settings& s, const std::string& key) {
    if (!s.count(key)) throw ConfigError("missing required key '" + key + "'");
    const std::string v = choice_or(s, key, {"omega_bath", "delta", "r_eta"}, "");
    if (v == "omega_bath") return AxisKind::omega_bath;
    if (v == "delta") return AxisKind::delta;
    return AxisKind::r_eta;
}

inline Axis parse_axis(const Settings& s, const std::string& prefix) {
    Axis a;
    a.kind = parse_axis_kind(s, prefix);
    a.min = required_number(s, prefix + "-min");
    a.max = required_number(s, prefix + "-max");
    a.count = count_or(s, prefix + "-count", 0);
    if (!s.count(prefix + "-count")) throw ConfigError("missing required key '" + prefix + "-count'");
    a.log = choice_or(s, prefix + "-scale", {"linear", "log"}, "linear") == "log";
    return a;
}

inline std::size_t resolve_parallelism(std::size_t requested) {
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

inline SweepSpec sweep_from_settings(const Settings& s) {
    SweepSpec spec;
    spec.axis1 = parse_axis(s, "axis1");
    spec.axis2 = parse_axis(s, "axis2");
    spec.validate();
    spec.fixed = point_from_settings(s, {spec.axis1.kind, spec.axis2.kind});
    spec.parallelism = resolve_parallelism(count_or(s, "parallelism", 1));
    return spec;
}

// Runs fn(i) for i in [0, n) on up to `workers` threads. fn must not throw.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

struct SweepResult {
    std::vector<double> axis1_values;
    std::vector<double> axis2_values;
    std::vector<ResultRow> rows; // row-major: axis1 outer, axis2 inner
    std::size_t n_grid{0};
    std::size_t failed{0};
};

// Points sharing a detuning share one FrameGeometry. Any under-resolved
// point aborts the sweep before evaluation starts.
inline SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    SweepResult out;
    out.axis1_values = spec.axis1.values();
    out.axis2_values = spec.axis2.values();
    const std::size_t n1 = out.axis1_values.size(), n2 = out.axis2_values.size();
    const std::size_t total = n1 * n2;

    std::vector<PointSpec> points(total, spec.fixed);
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            auto& p = points[i * n2 + j];
            p.set_axis(spec.axis1.kind, out.axis1_values[i]);
            p.set_axis(spec.axis2.kind, out.axis2_values[j]);
        }
    }

    const PulseParams pulses = spec.fixed.pulses();
    std::size_t n_grid = spec.fixed.n_grid;
    if (n_grid == 0) {
        for (const auto& p : points) {
            n_grid = std::max(n_grid, required_n_grid(pulses, p.system(), p.quadrature.samples_per_period));
        }
    } else if (spec.fixed.quadrature.enforce_resolution) {
        for (const auto& p : points) check_resolution(pulses, p.system(), n_grid, p.quadrature);
    }
    out.n_grid = n_grid;

    std::map<double, std::vector<std::size_t>> by_delta;
    for (std::size_t k = 0; k < total; ++k) by_delta[points[k].system().delta()].push_back(k);

    out.rows.resize(total);
    for (const auto& [delta, members] : by_delta) {
        const FrameGeometry geo(pulses, delta, n_grid);
        parallel_for(members.size(), spec.parallelism, [&](std::size_t m) {
            const std::size_t k = members[m];
            const double a1 = out.axis1_values[k / n2], a2 = out.axis2_values[k % n2];
            try {
                out.rows[k] = row_from(perturbative_efficiency(geo, points[k].system(), points[k].quadrature), a1, a2);
            } catch (const std::exception& e) {
                out.rows[k] = ResultRow{a1, a2, 0.0, 0.0, 0.0, false, e.what()};
            }
        });
    }
    for (const auto& r : out.rows) out.failed += r.error.empty() ? 0 : 1;
    return out;
}

// Gnuplot "nonuniform matrix" text layout of 2ReJ: first line holds the
// axis2 count and values, each later line an axis1 value and its row.
inline std::string to_gnuplot_matrix(const SweepResult& r) {
    std::string out = format_number(static_cast<double>(r.axis2_values.size()));
    for (double y : r.axis2_values) out += " " + format_number(y);
    out += '\n';
    const std::size_t n2 = r.axis2_values.size();
    for (std::size_t i = 0; i < r.axis1_values.size(); ++i) {
        out += format_number(r.axis1_values[i]);
        for (std::size_t j = 0; j < n2; ++j) out += " " + format_number(r.rows[i * n2 + j].two_re_j);
        out += '\n';
    }
    return out;
}

inline nlohmann::ordered_json settings_json(const Settings& s) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [k, v] : s) j[k] = v.value;
    return j;
}

inline std::string sweep_metadata(const Settings& s, const SweepResult& r) {
    nlohmann::ordered_json j;
    j["tool"] = "stirap sweep";
    j["settings"] = settings_json(s);
    j["n_grid_used"] = r.n_grid;
    j["points"] = r.rows.size();
    j["failed_points"] = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < r.rows.size(); ++k) {
        if (!r.rows[k].error.empty()) j["failed_points"].push_back({{"index", k}, {"error", r.rows[k].error}});
    }
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------- verify --

struct VerifyThresholds {
    double relative_tolerance{0.2}; // |d_exact - correction| <= tol · d_exact
    double ratio_min{3.0};
    double ratio_max{5.0};
};

struct VerifySpec {
    PointSpec point;
    std::vector<double> couplings; // η√Λ τ
    OracleConfig oracle;
    VerifyThresholds thresholds;
};

struct VerifyPoint {
    double coupling{0.0};
    double p_exact{0.0};
    double p_closed{0.0};
    double p_perturbative{1.0};
    double deficit_exact{0.0};       // P_closed - P_exact
    double one_minus_p_exact{0.0};
    double correction{0.0};          // 2η²Λ Re J
    double abs_diff{0.0};            // |deficit_exact - correction|
    double deficit_ratio_on_doubling{0.0};
    bool agreement{false};
    bool scaling{false};
    std::string error;

    bool passed() const noexcept { return error.empty() && agreement && scaling; }
};

struct VerifyReport {
    std::vector<VerifyPoint> points;
    bool passed() const noexcept {
        return !points.empty() && std::all_of(points.begin(), points.end(), [](const VerifyPoint& p) { return p.passed(); });
    }
};

inline VerifySpec verify_from_settings(const Settings& s) {
    VerifySpec v;
    Settings copy = s;
    if (!copy.count("eta-sqrt-lambda-tau")) copy["eta-sqrt-lambda-tau"] = {"0", "verify"};
    v.point = point_from_settings(copy);
    v.couplings = number_list(s, "couplings");
    for (double c : v.couplings) {
        if (!(c >= 0.0)) throw ConfigError(describe(s, "couplings") + ": couplings must be >= 0");
    }
    if (v.point.spins > kMaxOracleSpins) {
        throw ConfigError(describe(s, "spins") + ": oracle supports at most " + std::to_string(kMaxOracleSpins) + " spins");
    }
    const std::string mode = choice_or(s, "oracle-mode", {"full", "rwa", "closed"}, "full");
    v.oracle.mode = mode == "full" ? InteractionMode::full : mode == "rwa" ? InteractionMode::rwa : InteractionMode::closed;
    v.oracle.frame = choice_or(s, "oracle-frame", {"picture1", "lab"}, "picture1") == "lab" ? Frame::lab : Frame::picture1;
    v.oracle.steps_per_period = number_or(s, "oracle-steps-per-period", v.oracle.steps_per_period);
    if (!(v.oracle.steps_per_period >= 20.0)) throw ConfigError(describe(s, "oracle-steps-per-period") + ": must be >= 20");
    v.oracle.pulse_counter_rotating = flag_or(s, "pulse-counter-rotating", true);
    return v;
}

inline double oracle_efficiency(const PointSpec& p, double coupling, const OracleConfig& cfg) {
    PointSpec q = p;
    q.eta_sqrt_lambda_tau = coupling;
    return transfer_efficiency(propagate(q.pulses(), q.system(), cfg));
}

inline VerifyReport run_verify(const VerifySpec& v, std::size_t parallelism = 1) {
    VerifyReport report;
    report.points.resize(v.couplings.size());
    OracleConfig closed = v.oracle;
    closed.mode = InteractionMode::closed;

    double p_closed = 0.0;
    std::string closed_error;
    try {
        p_closed = oracle_efficiency(v.point, 0.0, closed);
    } catch (const std::exception& e) {
        closed_error = e.what();
    }

    parallel_for(v.couplings.size(), parallelism, [&](std::size_t i) {
        VerifyPoint& out = report.points[i];
        out.coupling = v.couplings[i];
        out.p_closed = p_closed;
        if (!closed_error.empty()) {
            out.error = "closed-system oracle: " + closed_error;
            return;
        }
        try {
            PointSpec q = v.point;
            q.eta_sqrt_lambda_tau = out.coupling;
            const ResultRow pert = compute_point(q);
            out.correction = pert.correction;
            out.p_perturbative = pert.efficiency;
            out.p_exact = oracle_efficiency(v.point, out.coupling, v.oracle);
            out.deficit_exact = p_closed - out.p_exact;
            out.one_minus_p_exact = 1.0 - out.p_exact;
            out.abs_diff = std::abs(out.deficit_exact - out.correction);
            const double doubled = p_closed - oracle_efficiency(v.point, 2.0 * out.coupling, v.oracle);
            out.deficit_ratio_on_doubling = out.deficit_exact != 0.0 ? doubled / out.deficit_exact : 0.0;
            out.agreement = out.abs_diff <= v.thresholds.relative_tolerance * std::abs(out.deficit_exact);
            out.scaling = out.deficit_ratio_on_doubling >= v.thresholds.ratio_min &&
                          out.deficit_ratio_on_doubling <= v.thresholds.ratio_max;
        } catch (const std::exception& e) {
            out.error = e.what();
        }
    });
    return report;
}

inline std::string verify_json(const Settings& s, const VerifyReport& r, const VerifyThresholds& t = {}) {
    nlohmann::ordered_json j;
    j["settings"] = settings_json(s);
    j["points"] = nlohmann::ordered_json::array();
    std::size_t passed = 0;
    for (const auto& p : r.points) {
        nlohmann::ordered_json o;
        o["eta_sqrt_lambda_tau"] = rounded(p.coupling);
        o["P_exact"] = rounded(p.p_exact);
        o["P_closed"] = rounded(p.p_closed);
        o["P_perturbative"] = rounded(p.p_perturbative);
        o["deficit_exact"] = rounded(p.deficit_exact);
        o["one_minus_P_exact"] = rounded(p.one_minus_p_exact);
        o["correction"] = rounded(p.correction);
        o["abs_diff"] = rounded(p.abs_diff);
        o["deficit_ratio_on_doubling"] = rounded(p.deficit_ratio_on_doubling);
        o["agreement"] = p.agreement;
        o["quadratic_scaling"] = p.scaling;
        o["passed"] = p.passed();
        if (!p.error.empty()) o["error"] = p.error;
        j["points"].push_back(o);
        passed += p.passed() ? 1 : 0;
    }
    j["summary"] = {{"points", r.points.size()},
                    {"passed", passed},
                    {"thresholds", {{"abs_diff_over_deficit", t.relative_tolerance}, {"ratio_min", t.ratio_min}, {"ratio_max", t.ratio_max}}},
                    {"result", r.passed() ? "pass" : "fail"}};
    return j.dump(2) + "\n";
}

} // namespace stirap::cli
