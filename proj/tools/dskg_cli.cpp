// Command-line front end over the dskg C API. Each subcommand assembles a
// JSON job config (optionally seeded from --config), runs it through
// dskg_job_run, writes the requested artifacts, and exits with
//   0  all checks passed
//   1  a check failed or the computation broke down numerically
//   2  bad usage, bad config, or out-of-domain parameters
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dskg.h"
#include "json.hpp"

using nlohmann::json;

namespace {

struct OutputOpts {
    std::string json_path;
    std::string csv_dir;
    std::vector<std::string> csv_specs;  // name=path
    bool quiet = false;
};

void add_output_flags(CLI::App* cmd, OutputOpts& out) {
    cmd->add_option("--json", out.json_path, "Write the JSON report to this file");
    cmd->add_option("--csv-dir", out.csv_dir,
                    "Write every CSV artifact into this directory as <name>.csv");
    cmd->add_option("--csv", out.csv_specs,
                    "Write one CSV artifact, given as name=path (repeatable)");
    cmd->add_flag("--quiet", out.quiet, "Suppress the JSON report on stdout");
}

bool write_file(const std::string& path, const std::string& data) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot open " << path << " for writing\n";
        return false;
    }
    f << data;
    return f.good();
}

json load_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw CLI::ValidationError("--config", "cannot read " + path);
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw CLI::ValidationError("--config", path + ": " + e.what());
    }
}

// CLI11 turns an empty value string into a default-constructed number, so
// `--M "$unset_var"` would silently run with M = 0; reject it up front.
const CLI::Validator nonempty_value{
    [](std::string& s) {
        return s.empty() ? std::string("value must not be empty") : std::string();
    },
    "NONEMPTY"};

// Flag helpers writing straight into an overlay document; only flags the
// user actually passed end up there.
using Path = std::vector<std::string>;

json& descend(json& doc, const Path& path) {
    json* node = &doc;
    for (const auto& key : path) node = &(*node)[key];
    return *node;
}

void opt_num(CLI::App* cmd, json& overlay, const std::string& flag,
             const Path& path, const std::string& desc) {
    cmd->add_option_function<double>(
           flag, [&overlay, path](double v) { descend(overlay, path) = v; },
           desc)
        ->check(nonempty_value);
}

void opt_int(CLI::App* cmd, json& overlay, const std::string& flag,
             const Path& path, const std::string& desc) {
    cmd->add_option_function<int>(
           flag, [&overlay, path](int v) { descend(overlay, path) = v; }, desc)
        ->check(nonempty_value);
}

void opt_str(CLI::App* cmd, json& overlay, const std::string& flag,
             const Path& path, const std::string& desc) {
    cmd->add_option_function<std::string>(
        flag,
        [&overlay, path](const std::string& v) { descend(overlay, path) = v; },
        desc);
}

void opt_bool(CLI::App* cmd, json& overlay, const std::string& flag,
              const Path& path, const std::string& desc) {
    cmd->add_flag_function(
        flag,
        [&overlay, path](std::int64_t count) {
            descend(overlay, path) = count > 0;
        },
        desc);
}

void opt_axis(CLI::App* cmd, json& overlay, const std::string& flag,
              const Path& path, const std::string& desc) {
    cmd->add_option_function<std::vector<double>>(
           flag,
           [&overlay, path](const std::vector<double>& v) {
               descend(overlay, path) = v;
           },
           desc)
        ->delimiter(',')
        ->check(nonempty_value);
}

void add_gamma_flags(CLI::App* cmd, json& overlay) {
    opt_str(cmd, overlay, "--gamma-family", {"gamma", "family"},
            "Time weight family: power_exp, pure_exp, or kato_power");
    opt_num(cmd, overlay, "--gamma-c", {"gamma", "c"}, "Weight prefactor c");
    opt_num(cmd, overlay, "--d0", {"gamma", "d0"},
            "Exponential rate in c (1+t)^{d1} e^{d0 t}");
    opt_num(cmd, overlay, "--d1", {"gamma", "d1"},
            "Power in c (1+t)^{d1} e^{d0 t}");
    opt_num(cmd, overlay, "--gamma-rate", {"gamma", "gamma"},
            "Rate of the pure exponential weight e^{gamma t}");
    opt_num(cmd, overlay, "--gamma-q", {"gamma", "q"},
            "Exponent of the Kato weight c t^{-1-q}");
}

struct Subcommand {
    CLI::App* app = nullptr;
    json overlay = json::object();
    OutputOpts out;
    std::string config_path;
    bool csv_to_stdout = false;  // plotdata prints its table by default
};

int run_job(const std::string& kind, Subcommand& sub) {
    json doc = sub.config_path.empty() ? json::object()
                                       : load_json_file(sub.config_path);
    if (kind == "scan" && !doc.is_null() && !doc.empty() &&
        !doc.contains("spec"))
        doc = json{{"spec", std::move(doc)}};
    // A mass flag replaces whichever mass convention the config used.
    if (sub.overlay.contains("params") && doc.contains("params")) {
        if (sub.overlay["params"].contains("m")) doc["params"].erase("M");
        if (sub.overlay["params"].contains("M")) doc["params"].erase("m");
    }
    doc.update(sub.overlay, /*merge_objects=*/true);
    doc["schema_version"] = 1;
    doc["kind"] = kind;

    dskg_job* job = nullptr;
    const dskg_status status = dskg_job_run(doc.dump().c_str(), &job);
    if (status != DSKG_OK) {
        std::cerr << "error: " << dskg_last_error() << "\n";
        return (status == DSKG_ERR_CONFIG || status == DSKG_ERR_DOMAIN) ? 2 : 1;
    }

    int rc = dskg_job_checks_passed(job) ? 0 : 1;
    const std::string report = dskg_job_result_json(job);
    auto artifact = [&](const std::string& name) -> const char* {
        for (int i = 0; i < dskg_job_csv_count(job); ++i)
            if (name == dskg_job_csv_name(job, i)) return dskg_job_csv_data(job, i);
        return nullptr;
    };

    bool io_ok = true;
    for (const auto& spec : sub.out.csv_specs) {
        const auto eq = spec.find('=');
        const std::string name = spec.substr(0, eq);
        const char* data = eq == std::string::npos ? nullptr : artifact(name);
        if (!data) {
            std::cerr << "error: no CSV artifact named '" << name
                      << "' (use name=path)\n";
            dskg_job_free(job);
            return 2;
        }
        io_ok = write_file(spec.substr(eq + 1), data) && io_ok;
    }
    if (!sub.out.csv_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(sub.out.csv_dir, ec);
        for (int i = 0; i < dskg_job_csv_count(job); ++i) {
            const auto path = std::filesystem::path(sub.out.csv_dir) /
                              (std::string(dskg_job_csv_name(job, i)) + ".csv");
            io_ok = write_file(path.string(), dskg_job_csv_data(job, i)) && io_ok;
        }
    }
    if (!sub.out.json_path.empty())
        io_ok = write_file(sub.out.json_path, report + "\n") && io_ok;

    if (sub.csv_to_stdout && sub.out.csv_specs.empty() &&
        sub.out.csv_dir.empty()) {
        if (const char* plot = artifact("plot")) std::cout << plot;
    } else if (!sub.out.quiet) {
        std::cout << report << "\n";
    }
    dskg_job_free(job);
    if (!io_ok) return 2;
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Verification and simulation toolkit for semilinear "
                 "Klein-Gordon fields on an expanding background"};
    app.require_subcommand(1);
    app.set_version_flag("--version", dskg_version());

    std::vector<std::pair<std::string, Subcommand>> subs;
    subs.reserve(7);
    auto make = [&](const char* name, const char* desc) -> Subcommand& {
        subs.emplace_back(name, Subcommand{});
        Subcommand& sub = subs.back().second;
        sub.app = app.add_subcommand(name, desc);
        sub.app->add_option("--config", sub.config_path,
                            "JSON config file; flags override its fields");
        add_output_flags(sub.app, sub.out);
        return sub;
    };

    {
        auto& sub = make("identity",
                         "Check a kernel-moment identity for one parameter set");
        opt_str(sub.app, sub.overlay, "--case", {"case"},
                "i, ii, iii, corollary_i, corollary_ii, or corollary_iii");
        opt_int(sub.app, sub.overlay, "--n", {"n"},
                "Spatial dimension (default: natural dimension of the case)");
        opt_num(sub.app, sub.overlay, "--M,--mass", {"M"}, "Curved mass M >= 0");
        opt_num(sub.app, sub.overlay, "--b", {"b"}, "Emission time b");
        opt_num(sub.app, sub.overlay, "--t", {"t"}, "Observation time t");
        opt_num(sub.app, sub.overlay, "--tol", {"tol"},
                "Residual tolerance (default 1e-8)");
    }
    {
        auto& sub = make("kernel", "Evaluate the light-cone kernel or its moment");
        opt_num(sub.app, sub.overlay, "--M,--mass", {"M"}, "Curved mass M >= 0");
        opt_num(sub.app, sub.overlay, "--b", {"b"}, "Emission time b");
        opt_num(sub.app, sub.overlay, "--t", {"t"}, "Observation time t");
        opt_num(sub.app, sub.overlay, "--r", {"r"}, "Radius (point evaluation)");
        opt_bool(sub.app, sub.overlay, "--moment", {"moment"},
                 "Integrate over the cone section and compare to the closed form");
        opt_num(sub.app, sub.overlay, "--tol", {"tol"}, "Quadrature tolerance");
        opt_num(sub.app, sub.overlay, "--check-tol", {"check_tol"},
                "Closed-form agreement tolerance (default 1e-8)");
    }
    {
        auto& sub = make("ode", "Integrate the comparison moment equation");
        opt_num(sub.app, sub.overlay, "--M,--mass", {"M"}, "Curved mass M >= 0");
        opt_num(sub.app, sub.overlay, "--q-eff", {"q_eff"},
                "Effective exponent q (overrides --p/--beta)");
        opt_num(sub.app, sub.overlay, "--p", {"p"}, "Nonlinearity power p");
        opt_num(sub.app, sub.overlay, "--beta", {"beta"}, "Nonlocal exponent beta");
        opt_num(sub.app, sub.overlay, "--delta0", {"delta0"},
                "Interpolation constant delta0");
        add_gamma_flags(sub.app, sub.overlay);
        opt_num(sub.app, sub.overlay, "--F0", {"F0"}, "Initial moment F(a)");
        opt_num(sub.app, sub.overlay, "--Fdot0", {"Fdot0"},
                "Initial moment derivative");
        opt_num(sub.app, sub.overlay, "--a", {"a"}, "Start time a");
        opt_num(sub.app, sub.overlay, "--t-max", {"t_max"}, "Integration horizon");
        opt_num(sub.app, sub.overlay, "--tol", {"tol"}, "Step tolerance");
        opt_num(sub.app, sub.overlay, "--horizon", {"horizon"},
                "Certificate search horizon (default t_max)");
        opt_num(sub.app, sub.overlay, "--eps", {"eps"},
                "Envelope lower-bound constant (<= 0: existence mode)");
        opt_num(sub.app, sub.overlay, "--c-env", {"c_env"},
                "Envelope scale constant");
        sub.app->add_flag_function(
            "--no-certificates",
            [&sub](std::int64_t) { sub.overlay["certificates"] = false; },
            "Skip the blow-up certificates");
    }
    {
        auto& sub = make("certify", "Evaluate blow-up certificates only");
        opt_str(sub.app, sub.overlay, "--which", {"which"},
                "energy_gap, envelope, power, large_data, or all");
        opt_num(sub.app, sub.overlay, "--M,--mass", {"M"}, "Curved mass M >= 0");
        opt_num(sub.app, sub.overlay, "--q-eff", {"q_eff"}, "Effective exponent");
        opt_num(sub.app, sub.overlay, "--p", {"p"}, "Nonlinearity power p");
        opt_num(sub.app, sub.overlay, "--beta", {"beta"}, "Nonlocal exponent beta");
        opt_num(sub.app, sub.overlay, "--delta0", {"delta0"},
                "Interpolation constant delta0");
        add_gamma_flags(sub.app, sub.overlay);
        opt_num(sub.app, sub.overlay, "--a", {"a"}, "Certificate start time");
        opt_num(sub.app, sub.overlay, "--F0", {"F0"}, "Moment at the start time");
        opt_num(sub.app, sub.overlay, "--Fdot0", {"Fdot0"},
                "Moment derivative at the start time");
        opt_num(sub.app, sub.overlay, "--horizon", {"horizon"},
                "Energy-gap search horizon");
        opt_num(sub.app, sub.overlay, "--C0", {"C0"},
                "Data moment for the large-data conditions");
        opt_num(sub.app, sub.overlay, "--C1", {"C1"},
                "Data flux for the large-data conditions");
        opt_num(sub.app, sub.overlay, "--eps", {"eps"},
                "Envelope lower-bound constant");
        opt_num(sub.app, sub.overlay, "--c-env", {"c_env"},
                "Envelope scale constant");
    }
    {
        auto& sub = make("pde", "Evolve the field equation on a 1d grid");
        opt_int(sub.app, sub.overlay, "--n", {"params", "n"},
                "Spatial dimension of the model parameters");
        opt_num(sub.app, sub.overlay, "--m", {"params", "m"},
                "Physical mass (exclusive with --M)");
        opt_num(sub.app, sub.overlay, "--M", {"params", "M"},
                "Curved mass (exclusive with --m)");
        opt_num(sub.app, sub.overlay, "--p", {"params", "p"},
                "Nonlinearity power p");
        opt_num(sub.app, sub.overlay, "--beta", {"params", "beta"},
                "Nonlocal exponent beta");
        opt_num(sub.app, sub.overlay, "--R0", {"data", "R0"},
                "Support radius of the data bump");
        opt_num(sub.app, sub.overlay, "--C0", {"data", "C0"},
                "Target moment of the position data");
        opt_num(sub.app, sub.overlay, "--C1", {"data", "C1"},
                "Target moment of the velocity data");
        opt_num(sub.app, sub.overlay, "--x-min", {"grid", "x_min"}, "Left edge");
        opt_num(sub.app, sub.overlay, "--x-max", {"grid", "x_max"}, "Right edge");
        opt_int(sub.app, sub.overlay, "--nx", {"grid", "nx"}, "Grid points");
        opt_num(sub.app, sub.overlay, "--dt", {"grid", "dt"}, "Time step");
        opt_num(sub.app, sub.overlay, "--t-max", {"grid", "t_max"},
                "Evolution horizon");
        add_gamma_flags(sub.app, sub.overlay);
        sub.app->add_flag_function(
            "--linear",
            [&sub](std::int64_t) { sub.overlay["gamma"] = nullptr; },
            "Drop the nonlinearity (zero coupling)");
        opt_str(sub.app, sub.overlay, "--backend", {"backend"},
                "fd (leapfrog) or picard (kernel fixed point)");
        opt_bool(sub.app, sub.overlay, "--two-grid", {"two_grid"},
                 "Classify with a half-step confirmation run (default)");
        sub.app->add_flag_function(
            "--single-grid",
            [&sub](std::int64_t) { sub.overlay["two_grid"] = false; },
            "Run one grid only");
        opt_int(sub.app, sub.overlay, "--keep-every", {"keep_every"},
                "Keep every k-th solution level in memory");
        opt_int(sub.app, sub.overlay, "--picard-kmax", {"picard", "k_max"},
                "Fixed-point iteration cap");
        opt_num(sub.app, sub.overlay, "--picard-window", {"picard", "window"},
                "Initial fixed-point window length");
        opt_num(sub.app, sub.overlay, "--picard-tol", {"picard", "tol"},
                "Fixed-point tolerance");
        opt_num(sub.app, sub.overlay, "--picard-gtol", {"picard", "g_tol"},
                "Kernel quadrature tolerance");
    }
    {
        auto& sub = make("scan", "Sweep parameters and map the blow-up boundary");
        opt_axis(sub.app, sub.overlay, "--mass", {"spec", "m"},
                 "Physical mass axis (comma separated)");
        opt_axis(sub.app, sub.overlay, "--M", {"spec", "M"},
                 "Curved mass axis (comma separated)");
        opt_axis(sub.app, sub.overlay, "--p", {"spec", "p"}, "Power axis");
        opt_axis(sub.app, sub.overlay, "--beta", {"spec", "beta"},
                 "Nonlocal exponent axis");
        opt_axis(sub.app, sub.overlay, "--d0", {"spec", "d0"},
                 "Weight exponential-rate axis");
        opt_axis(sub.app, sub.overlay, "--d1", {"spec", "d1"},
                 "Weight power axis");
        opt_axis(sub.app, sub.overlay, "--amp", {"spec", "amp"},
                 "Data amplitude axis");
        opt_num(sub.app, sub.overlay, "--R0", {"spec", "R0"},
                "Support radius of the data bump");
        opt_num(sub.app, sub.overlay, "--x-min", {"spec", "grid", "x_min"},
                "Left edge");
        opt_num(sub.app, sub.overlay, "--x-max", {"spec", "grid", "x_max"},
                "Right edge");
        opt_int(sub.app, sub.overlay, "--nx", {"spec", "grid", "nx"},
                "Grid points");
        opt_num(sub.app, sub.overlay, "--dt", {"spec", "grid", "dt"},
                "Time step");
        opt_num(sub.app, sub.overlay, "--t-max", {"spec", "grid", "t_max"},
                "Evolution horizon");
        opt_bool(sub.app, sub.overlay, "--two-grid", {"spec", "two_grid"},
                 "Confirm each point on a refined grid (default)");
        sub.app->add_flag_function(
            "--single-grid",
            [&sub](std::int64_t) { sub.overlay["spec"]["two_grid"] = false; },
            "Run one grid per point");
        opt_int(sub.app, sub.overlay, "--threads", {"spec", "threads"},
                "Worker threads (0: hardware default, capped by DSKG_THREADS)");
    }
    {
        auto& sub = make("plotdata",
                         "Turn scan records into a plain table for plotting");
        sub.csv_to_stdout = true;
        sub.app->add_option_function<std::string>(
            "--input",
            [&sub](const std::string& path) {
                json data = load_json_file(path);
                if (data.is_array())
                    sub.overlay["records"] = std::move(data);
                else
                    sub.overlay["scan"] = std::move(data);
            },
            "Scan manifest or records JSON file");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        for (auto& [kind, sub] : subs)
            if (sub.app->parsed()) return run_job(kind, sub);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    return 2;
}
