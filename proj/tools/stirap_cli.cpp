// stirap: perturbative STIRAP efficiency: single points, sweeps, oracle checks.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "stirap/sweep.hpp"

namespace {

using namespace stirap::cli;

struct Invocation {
    std::map<std::string, std::string> flags;
    std::string config_path;
};

void add_setting_flags(CLI::App& cmd, Invocation& inv) {
    for (const auto& key : known_keys()) {
        cmd.add_option("--" + std::string(key.name), inv.flags[std::string(key.name)], std::string(key.help));
    }
}

Settings collect(const CLI::App& cmd, const Invocation& inv) {
    Settings flags;
    for (const auto& [name, value] : inv.flags) {
        if (cmd.count("--" + name) > 0) flags[name] = {value, "--" + name};
    }
    Settings base = inv.config_path.empty() ? Settings{} : load_config_file(inv.config_path);
    return merge_settings(std::move(base), flags);
}

void write_text(const Settings& s, const std::string& text) {
    const auto out = lookup(s, "output");
    if (!out) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream f(*out, std::ios::binary);
    if (!f) throw ConfigError(describe(s, "output") + ": cannot open '" + *out + "' for writing");
    f << text;
    if (!f) throw ConfigError(describe(s, "output") + ": write to '" + *out + "' failed");
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open '" + path + "' for writing");
    f << text;
}

std::string format_of(const Settings& s) { return choice_or(s, "format", {"csv", "json"}, "csv"); }

int run_compute(const Settings& s) {
    const PointSpec p = point_from_settings(s);
    const ResultRow row = compute_point(p);
    if (format_of(s) == "json") {
        auto j = row_json(row);
        j.erase("axis1");
        j.erase("axis2");
        j["n_grid"] = p.resolved_n_grid();
        write_text(s, j.dump(2) + "\n");
    } else {
        write_text(s, "two_re_J_tau2,correction,efficiency,valid\n" + format_number(row.two_re_j) + "," +
                          format_number(row.correction) + "," + format_number(row.efficiency) + "," +
                          (row.valid ? "true" : "false") + "\n");
    }
    return kExitOk;
}

int run_sweep_cmd(const Settings& s) {
    const SweepSpec spec = sweep_from_settings(s);
    const std::string format = format_of(s);
    const SweepResult r = run_sweep(spec);
    write_text(s, format == "json" ? to_json(r.rows) : to_csv(r.rows));
    if (const auto out = lookup(s, "output")) write_file(*out + ".meta.json", sweep_metadata(s, r));
    if (const auto m = lookup(s, "matrix-output")) write_file(*m, to_gnuplot_matrix(r));
    if (r.failed > 0) std::fprintf(stderr, "stirap sweep: %zu point(s) failed, marked valid=false\n", r.failed);
    return kExitOk;
}

int run_verify_cmd(const Settings& s) {
    const VerifySpec v = verify_from_settings(s);
    const VerifyReport r = run_verify(v, resolve_parallelism(count_or(s, "parallelism", 1)));
    write_text(s, verify_json(s, r, v.thresholds));
    return r.passed() ? kExitOk : kExitVerifyFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"STIRAP transfer efficiency with a spin bath beyond the RWA"};
    app.require_subcommand(1);

    Invocation compute_inv, sweep_inv, verify_inv;
    auto* compute = app.add_subcommand("compute", "evaluate one parameter point");
    compute->add_option("--config", compute_inv.config_path, "key = value settings file");
    add_setting_flags(*compute, compute_inv);

    auto* sweep = app.add_subcommand("sweep", "2-D parameter sweep to CSV or JSON");
    sweep->add_option("config", sweep_inv.config_path, "key = value settings file")->required();
    add_setting_flags(*sweep, sweep_inv);

    auto* verify = app.add_subcommand("verify", "compare against the exact small-bath oracle");
    verify->add_option("config", verify_inv.config_path, "key = value settings file")->required();
    add_setting_flags(*verify, verify_inv);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*compute) return run_compute(collect(*compute, compute_inv));
        if (*sweep) return run_sweep_cmd(collect(*sweep, sweep_inv));
        return run_verify_cmd(collect(*verify, verify_inv));
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "stirap: %s\n", e.what());
        return kExitUsage;
    } catch (const stirap::ResolutionError& e) {
        std::fprintf(stderr, "stirap: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "stirap: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "stirap: %s\n", e.what());
        return 1;
    }
}
