#include "dskg.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dskg/blowup_ode.hpp"
#include "dskg/cone_kernel.hpp"
#include "dskg/descent.hpp"
#include "dskg/errors.hpp"
#include "dskg/gamma_schedule.hpp"
#include "dskg/lab.hpp"
#include "dskg/semilinear.hpp"
#include "dskg/special.hpp"
#include "json.hpp"

using nlohmann::json;

struct dskg_job {
    std::string result;
    bool checks_passed = true;
    std::vector<std::pair<std::string, std::string>> csvs;
};

namespace {

thread_local std::string g_last_error;

dskg_status fail(dskg_status status, const std::string& what) {
    g_last_error = what;
    return status;
}

template <typename F>
dskg_status guarded(F&& body) {
    try {
        body();
        return DSKG_OK;
    } catch (const dskg::ConfigError& e) {
        return fail(DSKG_ERR_CONFIG, e.what());
    } catch (const dskg::DomainError& e) {
        return fail(DSKG_ERR_DOMAIN, e.what());
    } catch (const dskg::NumericError& e) {
        return fail(DSKG_ERR_NUMERIC, e.what());
    } catch (const json::exception& e) {
        return fail(DSKG_ERR_CONFIG, e.what());
    } catch (const std::exception& e) {
        return fail(DSKG_ERR_INTERNAL, e.what());
    }
}

[[noreturn]] void config_error(const std::string& what) {
    throw dskg::ConfigError(what);
}

double need_num(const json& doc, const char* key) {
    if (!doc.contains(key)) config_error(std::string("missing field: ") + key);
    if (!doc.at(key).is_number())
        config_error(std::string("field must be a number: ") + key);
    return doc.at(key).get<double>();
}

double opt_num(const json& doc, const char* key, double fallback) {
    if (!doc.contains(key) || doc.at(key).is_null()) return fallback;
    if (!doc.at(key).is_number())
        config_error(std::string("field must be a number: ") + key);
    return doc.at(key).get<double>();
}

int opt_int(const json& doc, const char* key, int fallback) {
    if (!doc.contains(key) || doc.at(key).is_null()) return fallback;
    if (!doc.at(key).is_number_integer())
        config_error(std::string("field must be an integer: ") + key);
    return doc.at(key).get<int>();
}

bool opt_bool(const json& doc, const char* key, bool fallback) {
    if (!doc.contains(key) || doc.at(key).is_null()) return fallback;
    if (!doc.at(key).is_boolean())
        config_error(std::string("field must be a boolean: ") + key);
    return doc.at(key).get<bool>();
}

std::string opt_str(const json& doc, const char* key, const std::string& fallback) {
    if (!doc.contains(key) || doc.at(key).is_null()) return fallback;
    if (!doc.at(key).is_string())
        config_error(std::string("field must be a string: ") + key);
    return doc.at(key).get<std::string>();
}

dskg::ode::GammaSchedule gamma_from_json(const json& node) {
    if (!node.is_object()) config_error("gamma must be an object");
    const std::string family = opt_str(node, "family", "");
    if (family == "power_exp")
        return dskg::ode::GammaSchedule::power_exp(opt_num(node, "c", 1.0),
                                                   need_num(node, "d0"),
                                                   need_num(node, "d1"));
    if (family == "pure_exp")
        return dskg::ode::GammaSchedule::pure_exp(need_num(node, "gamma"));
    if (family == "kato_power")
        return dskg::ode::GammaSchedule::kato_power(opt_num(node, "c", 1.0),
                                                    need_num(node, "q"));
    config_error("gamma family must be power_exp, pure_exp, or kato_power");
}

dskg::pde::Coupling coupling_from_json(const json& doc) {
    if (!doc.contains("gamma") || doc.at("gamma").is_null()) return std::nullopt;
    return gamma_from_json(doc.at("gamma"));
}

dskg::descent::IdentityCase case_from_tag(const std::string& tag) {
    using dskg::descent::IdentityCase;
    if (tag == "i") return IdentityCase::i;
    if (tag == "ii") return IdentityCase::ii;
    if (tag == "iii") return IdentityCase::iii;
    if (tag == "corollary_i") return IdentityCase::corollary_i;
    if (tag == "corollary_ii") return IdentityCase::corollary_ii;
    if (tag == "corollary_iii") return IdentityCase::corollary_iii;
    config_error("identity case must be one of i, ii, iii, corollary_i, "
                 "corollary_ii, corollary_iii");
}

int default_dimension(dskg::descent::IdentityCase which) {
    using dskg::descent::IdentityCase;
    switch (which) {
        case IdentityCase::i:
        case IdentityCase::corollary_i: return 1;
        case IdentityCase::ii:
        case IdentityCase::corollary_ii: return 3;
        default: return 2;
    }
}

const char* outcome_name(dskg::ode::Outcome o) {
    switch (o) {
        case dskg::ode::Outcome::blowup: return "blowup";
        case dskg::ode::Outcome::alive_at: return "alive_at";
        default: return "inconclusive";
    }
}

json check_entry(const std::string& name, bool passed, const std::string& detail) {
    return json{{"name", name}, {"passed", passed}, {"detail", detail}};
}

std::string num_str(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void finish_checks(dskg_job& job, json& result) {
    bool all = true;
    for (const auto& c : result["checks"]) all = all && c.at("passed").get<bool>();
    job.checks_passed = all;
    result["checks_passed"] = all;
    job.result = result.dump(2);
}

// Core lemma identifiers -> the stable names used by configs and reports.
std::string public_lemma_name(const std::string& lemma) {
    if (lemma == "large_energy") return "energy_gap";
    if (lemma == "small_energy") return "envelope";
    if (lemma == "kato_power") return "power";
    return lemma;
}

json certificate_to_json(const dskg::ode::BlowupCertificate& cert) {
    json j{{"lemma", public_lemma_name(cert.lemma)},
           {"holds", cert.holds},
           {"a", cert.a}};
    if (cert.a1) j["a1"] = *cert.a1;
    if (cert.T_upper) j["T_upper"] = *cert.T_upper;
    j["conditions"] = json::array();
    for (const auto& c : cert.conditions)
        j["conditions"].push_back(
            {{"name", c.name}, {"holds", c.holds}, {"margin", c.margin}});
    return j;
}

void run_identity_job(const json& doc, dskg_job& job) {
    const std::string tag = opt_str(doc, "case", "i");
    const auto which = case_from_tag(tag);
    const double M = opt_num(doc, "M", 0.0);
    const double b = opt_num(doc, "b", 0.0);
    const double t = need_num(doc, "t");
    const int n = opt_int(doc, "n", default_dimension(which));
    const double tol = opt_num(doc, "tol", 1e-8);

    const dskg::descent::DimensionConstants dims(n);
    const double quad_tol = std::min(tol * 1e-2, 1e-10);
    const double residual =
        dskg::descent::identity_check(which, M, b, t, dims, quad_tol);
    const double target =
        dskg::cone::kernel_moment_closed_form(dskg::cone::CurvedMass(M), b, t);

    json result{{"kind", "identity"}, {"case", tag}, {"n", n},     {"M", M},
                {"b", b},             {"t", t},      {"tol", tol},
                {"residual", residual}, {"target", target}};
    result["checks"] = json::array();
    result["checks"].push_back(check_entry(
        "identity_residual", residual <= tol,
        "residual " + num_str(residual) + " vs tol " + num_str(tol)));
    finish_checks(job, result);
}

void run_kernel_job(const json& doc, dskg_job& job) {
    const double M = opt_num(doc, "M", 0.0);
    const double b = opt_num(doc, "b", 0.0);
    const double t = need_num(doc, "t");
    const dskg::cone::CurvedMass mass(M);

    json result{{"kind", "kernel"}, {"M", M}, {"b", b}, {"t", t}};
    result["checks"] = json::array();
    if (opt_bool(doc, "moment", false)) {
        const double tol = opt_num(doc, "tol", 1e-10);
        const double check_tol = opt_num(doc, "check_tol", 1e-8);
        const auto quad = dskg::cone::kernel_moment(mass, b, t, tol);
        const double closed = dskg::cone::kernel_moment_closed_form(mass, b, t);
        const double diff = std::abs(quad.value - closed);
        result["moment"] = quad.value;
        result["error_estimate"] = quad.error_estimate;
        result["closed_form"] = closed;
        result["difference"] = diff;
        result["checks"].push_back(check_entry(
            "moment_identity", diff <= check_tol,
            "difference " + num_str(diff) + " vs tol " +
                num_str(check_tol)));
    } else {
        const double r = opt_num(doc, "r", 0.0);
        result["r"] = r;
        result["value"] = dskg::cone::kernel_eval(mass, {b, t, r});
    }
    finish_checks(job, result);
}

dskg::ode::ComparisonParams comparison_from_json(const json& doc) {
    double q_eff;
    if (doc.contains("q_eff")) {
        q_eff = need_num(doc, "q_eff");
    } else {
        const double p = opt_num(doc, "p", 2.0);
        const double beta = opt_num(doc, "beta", 0.0);
        q_eff = p * (beta + 1.0);
    }
    if (!doc.contains("gamma") || doc.at("gamma").is_null())
        config_error("comparison problems need a gamma schedule");
    dskg::ode::ComparisonParams params{need_num(doc, "M"), q_eff,
                                       opt_num(doc, "delta0", 1.0),
                                       gamma_from_json(doc.at("gamma"))};
    params.validate();
    return params;
}

void run_ode_job(const json& doc, dskg_job& job) {
    const auto params = comparison_from_json(doc);
    const double a = opt_num(doc, "a", 0.0);
    const double F0 = need_num(doc, "F0");
    const double Fdot0 = opt_num(doc, "Fdot0", 0.0);
    const double t_max = need_num(doc, "t_max");
    const double tol = opt_num(doc, "tol", 1e-10);

    const auto run = dskg::ode::integrate_moment_ode({F0, Fdot0, a}, params,
                                                     t_max, tol);
    json result{{"kind", "ode"},
                {"M", params.M},
                {"q_eff", params.q_eff},
                {"delta0", params.delta0},
                {"a", a},
                {"F0", F0},
                {"Fdot0", Fdot0},
                {"t_max", t_max},
                {"outcome", outcome_name(run.report.outcome)},
                {"t_end", run.report.t_end},
                {"detail", run.report.detail},
                {"steps", run.trajectory.size()}};
    if (run.report.T_est) result["T_est"] = *run.report.T_est;
    if (run.report.fit_exponent) result["fit_exponent"] = *run.report.fit_exponent;
    result["checks"] = json::array();

    if (opt_bool(doc, "certificates", true)) {
        result["certificates"] = json::array();
        const double horizon = opt_num(doc, "horizon", t_max);
        std::optional<dskg::ode::BlowupCertificate> gap;
        try {
            gap = dskg::ode::check_lemma_large_energy(params, a, F0, Fdot0,
                                                      horizon);
            result["certificates"].push_back(certificate_to_json(*gap));
        } catch (const dskg::ConfigError& e) {
            result["certificates"].push_back(
                {{"lemma", "energy_gap"}, {"available", false}, {"note", e.what()}});
        }
        try {
            const auto eventual =
                params.M > 0.0
                    ? dskg::ode::check_lemma_small_energy(
                          params.M, params.gamma, params.q_eff,
                          opt_num(doc, "eps", 0.0), opt_num(doc, "c_env", 1.0))
                    : dskg::ode::check_kato_power(params.gamma, params.q_eff);
            result["certificates"].push_back(certificate_to_json(eventual));
        } catch (const dskg::ConfigError& e) {
            result["certificates"].push_back({{"lemma", "envelope"},
                                              {"available", false},
                                              {"note", e.what()}});
        }
        if (gap && gap->holds && gap->T_upper) {
            result["T_upper"] = *gap->T_upper;
            if (run.report.outcome == dskg::ode::Outcome::blowup) {
                const bool ok = run.report.T_est &&
                                *run.report.T_est <= 1.05 * *gap->T_upper;
                result["checks"].push_back(check_entry(
                    "lifespan_bound", ok,
                    "T_est within 1.05 of the certified upper bound"));
            } else if (t_max >= *gap->T_upper) {
                result["checks"].push_back(check_entry(
                    "lifespan_bound", false,
                    "certificate bounds the lifespan inside the horizon, but "
                    "no blow-up was observed"));
            }
        }
    }
    finish_checks(job, result);
    job.csvs.emplace_back("trajectory", dskg::ode::trajectory_csv(run.trajectory));
}

void run_certify_job(const json& doc, dskg_job& job) {
    const std::string which = opt_str(doc, "which", "all");
    if (which != "all" && which != "energy_gap" && which != "envelope" &&
        which != "power" && which != "large_data")
        config_error("which must be energy_gap, envelope, power, large_data, or all");

    json result{{"kind", "certify"}, {"which", which}};
    result["certificates"] = json::array();
    result["checks"] = json::array();
    bool any_holds = false;
    bool requested_holds = false;
    auto note = [&](const std::string& lemma, const std::string& text) {
        result["certificates"].push_back(
            {{"lemma", lemma}, {"available", false}, {"note", text}});
    };
    auto record = [&](const dskg::ode::BlowupCertificate& cert) {
        result["certificates"].push_back(certificate_to_json(cert));
        any_holds = any_holds || cert.holds;
        if (public_lemma_name(cert.lemma) == which) requested_holds = cert.holds;
    };

    const auto params = comparison_from_json(doc);
    result["M"] = params.M;
    result["q_eff"] = params.q_eff;
    result["delta0"] = params.delta0;

    if (which == "all" || which == "energy_gap") {
        try {
            const double a = opt_num(doc, "a", 0.0);
            const auto cert = dskg::ode::check_lemma_large_energy(
                params, a, need_num(doc, "F0"), opt_num(doc, "Fdot0", 0.0),
                opt_num(doc, "horizon", 1e6));
            record(cert);
        } catch (const dskg::ConfigError& e) {
            if (which == "energy_gap") throw;
            note("energy_gap", e.what());
        }
    }
    if (which == "all" || which == "envelope") {
        try {
            const auto cert = dskg::ode::check_lemma_small_energy(
                params.M, params.gamma, params.q_eff, opt_num(doc, "eps", 0.0),
                opt_num(doc, "c_env", 1.0));
            record(cert);
        } catch (const dskg::ConfigError& e) {
            if (which == "envelope") throw;
            note("envelope", e.what());
        }
    }
    if (which == "all" || which == "power") {
        const auto cert = dskg::ode::check_kato_power(params.gamma, params.q_eff);
        record(cert);
    }
    if (which == "all" || which == "large_data") {
        if (params.gamma.kind != dskg::ode::ScheduleKind::pure_exp) {
            if (which == "large_data")
                config_error("the large-data conditions apply to pure_exp weights");
            note("large_data", "applies to pure_exp weights only");
        } else if (which == "all" &&
                   (!doc.contains("C0") || !doc.contains("C1"))) {
            note("large_data", "needs Cauchy moments C0 and C1");
        } else {
            const auto rep = dskg::ode::check_large_data_conditions(
                params.gamma.gamma, params.q_eff, params.delta0,
                {need_num(doc, "C0"), need_num(doc, "C1")});
            result["certificates"].push_back(
                {{"lemma", "large_data"},
                 {"holds", rep.holds},
                 {"redirect_to_positive_gamma", rep.redirect_to_positive_gamma},
                 {"margin_c1", rep.margin_c1},
                 {"margin_c0", rep.margin_c0}});
            any_holds = any_holds || rep.holds;
            if (which == "large_data") requested_holds = rep.holds;
        }
    }

    const bool passed = which == "all" ? any_holds : requested_holds;
    result["checks"].push_back(check_entry(
        "certificate", passed,
        which == "all" ? "at least one certificate holds"
                       : "the requested certificate holds"));
    finish_checks(job, result);
}

dskg::pde::PhysicalParams pde_params_from_json(const json& doc) {
    if (!doc.contains("params") || !doc.at("params").is_object())
        config_error("pde jobs need a params object");
    const auto& node = doc.at("params");
    const int n = opt_int(node, "n", 1);
    const double p = opt_num(node, "p", 2.0);
    const double beta = opt_num(node, "beta", 0.0);
    const bool has_m = node.contains("m") && !node.at("m").is_null();
    const bool has_M = node.contains("M") && !node.at("M").is_null();
    if (has_m == has_M)
        config_error("params needs exactly one of m (physical) or M (curved)");
    return has_m ? dskg::pde::PhysicalParams::from_mass(n, need_num(node, "m"),
                                                        p, beta)
                 : dskg::pde::PhysicalParams::from_curved_mass(
                       n, need_num(node, "M"), p, beta);
}

dskg::pde::Grid1D pde_grid_from_json(const json& doc) {
    dskg::pde::Grid1D grid{-2.2, 2.2, 221, 0.01, 10.0};
    if (doc.contains("grid")) {
        const auto& g = doc.at("grid");
        grid.x_min = opt_num(g, "x_min", grid.x_min);
        grid.x_max = opt_num(g, "x_max", grid.x_max);
        grid.nx = opt_int(g, "nx", grid.nx);
        grid.dt = opt_num(g, "dt", grid.dt);
        grid.t_max = opt_num(g, "t_max", grid.t_max);
    }
    return grid;
}

json run_summary(const dskg::pde::RunResult& run) {
    json j{{"outcome", outcome_name(run.outcome)},
           {"t_end", run.t_end},
           {"detail", run.detail},
           {"dx", run.dx},
           {"dt", run.dt},
           {"rows", run.history.size()}};
    if (run.T_est) j["T_est"] = *run.T_est;
    return j;
}

void run_pde_job(const json& doc, dskg_job& job) {
    const auto params = pde_params_from_json(doc);
    const auto grid = pde_grid_from_json(doc);
    const auto gamma = coupling_from_json(doc);
    dskg::pde::DataSpec data;
    if (doc.contains("data")) {
        const auto& d = doc.at("data");
        data.R0 = opt_num(d, "R0", data.R0);
        data.C0 = opt_num(d, "C0", data.C0);
        data.C1 = opt_num(d, "C1", data.C1);
    }
    const std::string backend = opt_str(doc, "backend", "fd");

    json result{{"kind", "pde"},
                {"backend", backend},
                {"params",
                 {{"n", params.n},
                  {"m", params.m},
                  {"M", params.M},
                  {"p", params.p},
                  {"beta", params.beta},
                  {"q_eff", params.q_eff()}}},
                {"data", {{"R0", data.R0}, {"C0", data.C0}, {"C1", data.C1}}},
                {"grid",
                 {{"x_min", grid.x_min},
                  {"x_max", grid.x_max},
                  {"nx", grid.nx},
                  {"dt", grid.dt},
                  {"t_max", grid.t_max}}}};
    result["checks"] = json::array();

    bool holder_ok = true, causal_ok = true;
    if (backend == "picard") {
        dskg::pde::PicardOptions opts;
        if (doc.contains("picard")) {
            const auto& po = doc.at("picard");
            opts.k_max = opt_int(po, "k_max", opts.k_max);
            opts.window = opt_num(po, "window", opts.window);
            opts.tol = opt_num(po, "tol", opts.tol);
            opts.g_tol = opt_num(po, "g_tol", opts.g_tol);
        }
        const auto base = dskg::pde::solve_linear_levels(data, grid, params);
        const auto run = dskg::pde::solve_picard(base, params, gamma, opts);
        result["outcome"] = outcome_name(run.outcome);
        result["detail"] = run.detail;
        result["t_end"] = run.t_end;
        if (run.T_est) result["T_est"] = *run.T_est;
        holder_ok = dskg::pde::holder_lower_bound_check(run.history, params);
        causal_ok = dskg::pde::support_causality_check(run.history, data.R0, run.dx);
        result["law_residual"] =
            dskg::pde::verify_moment_law(run.history, params, gamma);
        job.csvs.emplace_back("run", dskg::pde::run_csv(run));
    } else if (backend == "fd") {
        if (opt_bool(doc, "two_grid", true)) {
            const auto cls =
                dskg::pde::classify_two_grid(data, grid, params, gamma);
            result["outcome"] = outcome_name(cls.outcome);
            result["detail"] = cls.detail;
            if (cls.T_est) result["T_est"] = *cls.T_est;
            if (cls.T_err) result["T_err"] = *cls.T_err;
            result["coarse"] = run_summary(cls.coarse);
            result["fine"] = run_summary(cls.fine);
            holder_ok =
                dskg::pde::holder_lower_bound_check(cls.coarse.history, params) &&
                dskg::pde::holder_lower_bound_check(cls.fine.history, params);
            causal_ok = dskg::pde::support_causality_check(cls.coarse.history,
                                                           data.R0, cls.coarse.dx) &&
                        dskg::pde::support_causality_check(cls.fine.history,
                                                           data.R0, cls.fine.dx);
            result["law_residual"] =
                dskg::pde::verify_moment_law(cls.fine.history, params, gamma);
            job.csvs.emplace_back("run", dskg::pde::run_csv(cls.fine));
            job.csvs.emplace_back("run_coarse", dskg::pde::run_csv(cls.coarse));
        } else {
            const auto run =
                dskg::pde::solve_fd(data, grid, params, gamma,
                                    opt_int(doc, "keep_every", 0));
            result["outcome"] = outcome_name(run.outcome);
            result["detail"] = run.detail;
            result["t_end"] = run.t_end;
            if (run.T_est) result["T_est"] = *run.T_est;
            holder_ok = dskg::pde::holder_lower_bound_check(run.history, params);
            causal_ok =
                dskg::pde::support_causality_check(run.history, data.R0, run.dx);
            result["law_residual"] =
                dskg::pde::verify_moment_law(run.history, params, gamma);
            job.csvs.emplace_back("run", dskg::pde::run_csv(run));
        }
    } else {
        config_error("backend must be fd or picard");
    }

    result["checks"].push_back(check_entry(
        "interpolation_lower_bound", holder_ok,
        "|F|^p <= (tau R^n)^{p-1} Pp along the recorded trajectory"));
    result["checks"].push_back(check_entry(
        "support_causality", causal_ok,
        "support stays inside the influence cone with 2 dx slack"));
    finish_checks(job, result);
}

void run_scan_job(const json& doc, dskg_job& job) {
    if (!doc.contains("spec") || !doc.at("spec").is_object())
        config_error("scan jobs need a spec object");
    json spec_node = doc.at("spec");
    if (!spec_node.contains("schema_version")) spec_node["schema_version"] = 1;
    const auto spec = dskg::lab::ScanSpec::from_json(spec_node.dump());
    const auto result = dskg::lab::run_scan(spec);

    json out = json::parse(dskg::lab::scan_json(result));
    out["checks"] = json::array();
    out["checks"].push_back(check_entry(
        "certificate_concordance", result.concordance_ok,
        "no record with an in-horizon lifespan certificate survived"));
    json wrapped = std::move(out);
    finish_checks(job, wrapped);
    job.csvs.emplace_back("records", dskg::lab::records_csv(result));
    job.csvs.emplace_back("summary", dskg::lab::summary_csv(result));
    job.csvs.emplace_back("plot", dskg::lab::plot_csv(result.records));
}

void run_plotdata_job(const json& doc, dskg_job& job) {
    std::vector<dskg::lab::RunRecord> records;
    if (doc.contains("records"))
        records = dskg::lab::records_from_json(doc.at("records").dump());
    else if (doc.contains("scan"))
        records = dskg::lab::records_from_json(doc.at("scan").dump());
    else
        config_error("plotdata jobs need a records array or a scan manifest");

    json result{{"kind", "plotdata"}, {"rows", records.size()}};
    result["checks"] = json::array();
    finish_checks(job, result);
    job.csvs.emplace_back("plot", dskg::lab::plot_csv(records));
}

}  // namespace

extern "C" {

const char* dskg_version(void) { return "1.0.0"; }

const char* dskg_last_error(void) { return g_last_error.c_str(); }

dskg_status dskg_gauss_2f1(double a, double b, double c, double zeta,
                           double* out) {
    if (!out) return fail(DSKG_ERR_CONFIG, "null output pointer");
    return guarded([&] { *out = dskg::special::gauss_2f1({a, b, c}, zeta); });
}

dskg_status dskg_kernel_eval(double M, double b, double t, double r,
                             double* out) {
    if (!out) return fail(DSKG_ERR_CONFIG, "null output pointer");
    return guarded([&] {
        *out = dskg::cone::kernel_eval(dskg::cone::CurvedMass(M), {b, t, r});
    });
}

dskg_status dskg_kernel_moment(double M, double b, double t, double tol,
                               double* out_value, double* out_error) {
    if (!out_value) return fail(DSKG_ERR_CONFIG, "null output pointer");
    return guarded([&] {
        const auto quad =
            dskg::cone::kernel_moment(dskg::cone::CurvedMass(M), b, t, tol);
        *out_value = quad.value;
        if (out_error) *out_error = quad.error_estimate;
    });
}

dskg_status dskg_kernel_moment_closed_form(double M, double b, double t,
                                           double* out) {
    if (!out) return fail(DSKG_ERR_CONFIG, "null output pointer");
    return guarded([&] {
        *out = dskg::cone::kernel_moment_closed_form(dskg::cone::CurvedMass(M),
                                                     b, t);
    });
}

dskg_status dskg_identity_check(const char* case_tag, int n, double M, double b,
                                double t, double tol, double* out_residual) {
    if (!out_residual) return fail(DSKG_ERR_CONFIG, "null output pointer");
    if (!case_tag) return fail(DSKG_ERR_CONFIG, "null case tag");
    return guarded([&] {
        const auto which = case_from_tag(case_tag);
        const int dim = n > 0 ? n : default_dimension(which);
        const dskg::descent::DimensionConstants dims(dim);
        *out_residual = dskg::descent::identity_check(which, M, b, t, dims, tol);
    });
}

dskg_status dskg_job_run(const char* config_json, dskg_job** out_job) {
    if (!out_job) return fail(DSKG_ERR_CONFIG, "null job pointer");
    *out_job = nullptr;
    if (!config_json) return fail(DSKG_ERR_CONFIG, "null config");
    return guarded([&] {
        json doc;
        try {
            doc = json::parse(config_json);
        } catch (const json::exception& e) {
            config_error(std::string("config is not valid JSON: ") + e.what());
        }
        if (!doc.is_object()) config_error("config must be a JSON object");
        if (!doc.contains("schema_version") || doc.at("schema_version") != 1)
            config_error("config needs schema_version 1");
        const std::string kind = opt_str(doc, "kind", "");

        auto job = std::make_unique<dskg_job>();
        if (kind == "identity") run_identity_job(doc, *job);
        else if (kind == "kernel") run_kernel_job(doc, *job);
        else if (kind == "ode") run_ode_job(doc, *job);
        else if (kind == "certify") run_certify_job(doc, *job);
        else if (kind == "pde") run_pde_job(doc, *job);
        else if (kind == "scan") run_scan_job(doc, *job);
        else if (kind == "plotdata") run_plotdata_job(doc, *job);
        else config_error("kind must be identity, kernel, ode, certify, pde, "
                          "scan, or plotdata");
        *out_job = job.release();
    });
}

const char* dskg_job_result_json(const dskg_job* job) {
    return job ? job->result.c_str() : "";
}

int dskg_job_checks_passed(const dskg_job* job) {
    return job && job->checks_passed ? 1 : 0;
}

int dskg_job_csv_count(const dskg_job* job) {
    return job ? static_cast<int>(job->csvs.size()) : 0;
}

const char* dskg_job_csv_name(const dskg_job* job, int index) {
    if (!job || index < 0 || index >= static_cast<int>(job->csvs.size()))
        return "";
    return job->csvs[static_cast<std::size_t>(index)].first.c_str();
}

const char* dskg_job_csv_data(const dskg_job* job, int index) {
    if (!job || index < 0 || index >= static_cast<int>(job->csvs.size()))
        return "";
    return job->csvs[static_cast<std::size_t>(index)].second.c_str();
}

void dskg_job_free(dskg_job* job) { delete job; }

}  // extern "C"
