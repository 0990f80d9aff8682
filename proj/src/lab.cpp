#include "dskg/lab.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "dskg/errors.hpp"
#include "json.hpp"

namespace dskg::lab {

namespace {

using nlohmann::json;
using dskg::ode::Outcome;

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
    return v ? fmt(*v) : std::string();
}

// RFC-4180: quote fields containing comma, quote, CR or LF.
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += "\"\"";
        else out += ch;
    }
    out += '"';
    return out;
}

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::blowup: return "blowup";
        case Outcome::alive_at: return "alive_at";
        default: return "inconclusive";
    }
}

std::vector<double> parse_axis(const json& node, const std::string& name) {
    std::vector<double> values;
    if (node.is_array()) {
        for (const auto& v : node) {
            if (!v.is_number())
                throw dskg::ConfigError("axis '" + name + "' must hold numbers");
            values.push_back(v.get<double>());
        }
    } else if (node.is_object()) {
        for (const auto& [k, v] : node.items())
            if (k != "min" && k != "max" && k != "count")
                throw dskg::ConfigError("axis '" + name + "' object supports keys min, max, count");
        if (!node.contains("min") || !node.contains("max") || !node.contains("count"))
            throw dskg::ConfigError("axis '" + name + "' object needs min, max, count");
        const double lo = node.at("min").get<double>();
        const double hi = node.at("max").get<double>();
        const int count = node.at("count").get<int>();
        if (count < 1) throw dskg::ConfigError("axis '" + name + "' count must be >= 1");
        if (count == 1) {
            values.push_back(lo);
        } else {
            for (int i = 0; i < count; ++i)
                values.push_back(lo + (hi - lo) * i / (count - 1));
        }
    } else if (node.is_number()) {
        values.push_back(node.get<double>());
    } else {
        throw dskg::ConfigError("axis '" + name + "' must be a number, array, or {min,max,count}");
    }
    if (values.empty())
        throw dskg::ConfigError("axis '" + name + "' must not be empty");
    return values;
}

struct PointRun {
    RunRecord rec;
};

RunRecord run_point(const ScanSpec& spec, int index, const PointKey& key) {
    RunRecord rec;
    rec.index = index;
    rec.key = key;
    const auto t0 = std::chrono::steady_clock::now();

    pde::PhysicalParams params;
    try {
        params = spec.mass_is_curved
                     ? pde::PhysicalParams::from_curved_mass(spec.n, key.mass,
                                                             key.p, key.beta)
                     : pde::PhysicalParams::from_mass(spec.n, key.mass, key.p,
                                                      key.beta);
    } catch (const std::exception& e) {
        rec.status = RecordStatus::skipped;
        rec.detail = e.what();
        rec.seconds = elapsed_s(t0);
        return rec;
    }
    rec.m = params.m;
    rec.M = params.M;

    const auto gamma = dskg::ode::GammaSchedule::power_exp(spec.c, key.d0, key.d1);
    const pde::DataSpec data{spec.R0, key.amp, key.amp};

    try {
        if (spec.two_grid) {
            const auto cls = pde::classify_two_grid(data, spec.grid, params, gamma);
            rec.outcome = cls.outcome;
            rec.T_est = cls.T_est;
            rec.T_err = cls.T_err;
            rec.detail = cls.detail;
            rec.holder_ok = pde::holder_lower_bound_check(cls.coarse.history, params) &&
                            pde::holder_lower_bound_check(cls.fine.history, params);
            rec.causal_ok =
                pde::support_causality_check(cls.coarse.history, data.R0,
                                             cls.coarse.dx) &&
                pde::support_causality_check(cls.fine.history, data.R0, cls.fine.dx);
        } else {
            const auto run = pde::solve_fd(data, spec.grid, params, gamma);
            rec.outcome = run.outcome;
            rec.T_est = run.T_est;
            rec.detail = run.detail;
            rec.holder_ok = pde::holder_lower_bound_check(run.history, params);
            rec.causal_ok =
                pde::support_causality_check(run.history, data.R0, run.dx);
        }
    } catch (const std::exception& e) {
        rec.outcome = Outcome::inconclusive;
        rec.detail = std::string("point failed: ") + e.what();
    }

    // Lifespan certificates from the initial moments, with delta0 taken from
    // the largest support radius the cone allows.
    const double measure = 2.0 * (spec.R0 + 1.0);
    const double delta0 = std::pow(measure, -(key.p - 1.0) * (key.beta + 1.0));
    const dskg::ode::ComparisonParams cp{params.M, params.q_eff(), delta0, gamma};
    if (key.amp > 0.0) {
        try {
            const auto cert = dskg::ode::check_lemma_large_energy(
                cp, 0.0, key.amp, key.amp, spec.grid.t_max);
            rec.cert_bounded_holds = cert.holds;
            rec.cert_T_upper = cert.T_upper;
            if (cert.holds) rec.cert_lemma = "energy_gap";
        } catch (const std::exception&) {
            // mixed-monotonicity schedules fall outside the energy-gap lemma
        }
    }
    try {
        rec.cert_eventual_checked = true;
        if (params.M > 0.0) {
            const auto cert = dskg::ode::check_lemma_small_energy(
                params.M, gamma, params.q_eff(), 0.0, 1.0);
            rec.cert_eventual_holds = cert.holds;
            if (cert.holds && rec.cert_lemma.empty()) rec.cert_lemma = "envelope";
        } else {
            const auto cert = dskg::ode::check_kato_power(gamma, params.q_eff());
            rec.cert_eventual_holds = cert.holds;
            if (cert.holds && rec.cert_lemma.empty()) rec.cert_lemma = "power";
        }
    } catch (const std::exception& e) {
        rec.cert_eventual_checked = false;
        if (rec.detail.empty())
            rec.detail = std::string("certificate failed: ") + e.what();
    }
    if (rec.cert_lemma.empty()) rec.cert_lemma = "none";

    // A lifespan bound inside the tested horizon must not coexist with a
    // clean survival classification.
    if (rec.cert_bounded_holds && rec.cert_T_upper &&
        *rec.cert_T_upper <= spec.grid.t_max && rec.outcome == Outcome::alive_at)
        rec.concordant = false;

    rec.seconds = elapsed_s(t0);
    return rec;
}

int resolve_threads(int requested, std::size_t n_points) {
    int n = requested > 0 ? requested
                          : static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* cap = std::getenv("DSKG_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(cap, &end, 10);
        if (end != cap && v > 0) n = std::min<long>(n, v);
    }
    return static_cast<int>(std::min<std::size_t>(n, std::max<std::size_t>(1, n_points)));
}

bool same_point(const PointKey& a, const PointKey& b) {
    return a.mass == b.mass && a.p == b.p && a.beta == b.beta && a.d0 == b.d0 &&
           a.d1 == b.d1 && a.amp == b.amp;
}

void build_summary(ScanResult& result) {
    const auto& records = result.records;
    // Slices keyed by (mass, p, beta, d1, amp) in record order.
    std::vector<std::vector<const RunRecord*>> slices;
    for (const auto& rec : records) {
        if (rec.status != RecordStatus::ok) continue;
        bool placed = false;
        for (auto& slice : slices) {
            const auto& k = slice.front()->key;
            if (k.mass == rec.key.mass && k.p == rec.key.p &&
                k.beta == rec.key.beta && k.d1 == rec.key.d1 &&
                k.amp == rec.key.amp) {
                slice.push_back(&rec);
                placed = true;
                break;
            }
        }
        if (!placed) slices.push_back({&rec});
    }

    for (auto& slice : slices) {
        std::sort(slice.begin(), slice.end(),
                  [](const RunRecord* a, const RunRecord* b) {
                      return a->key.d0 < b->key.d0;
                  });
        SliceSummary s;
        const auto& k = slice.front()->key;
        s.mass = k.mass;
        s.p = k.p;
        s.beta = k.beta;
        s.d1 = k.d1;
        s.amp = k.amp;
        s.M = slice.front()->M;
        s.d0_predicted = -s.M * (k.p * (k.beta + 1.0) - 1.0);

        for (const auto* rec : slice) {
            if (rec->outcome == Outcome::blowup && !s.d0_first_blowup)
                s.d0_first_blowup = rec->key.d0;
            if (rec->outcome == Outcome::alive_at &&
                (!s.d0_first_blowup || rec->key.d0 < *s.d0_first_blowup))
                s.d0_last_alive = rec->key.d0;
        }
        if (s.d0_last_alive && s.d0_first_blowup &&
            *s.d0_last_alive < *s.d0_first_blowup) {
            s.d0_boundary = 0.5 * (*s.d0_last_alive + *s.d0_first_blowup);
            s.distance = std::abs(*s.d0_boundary - s.d0_predicted);
        }

        // alive* inconclusive* blowup* along ascending d0
        int phase = 0;
        for (const auto* rec : slice) {
            const int want = rec->outcome == Outcome::alive_at     ? 0
                             : rec->outcome == Outcome::inconclusive ? 1
                                                                     : 2;
            if (want < phase) s.ordered = false;
            phase = std::max(phase, want);
            if (rec->outcome == Outcome::inconclusive) {
                const bool in_band =
                    (!s.d0_last_alive || rec->key.d0 >= *s.d0_last_alive) &&
                    (!s.d0_first_blowup || rec->key.d0 <= *s.d0_first_blowup);
                if (!in_band) ++s.inconclusive_off_boundary;
            }
        }
        result.summary.push_back(s);
    }
}

json record_to_json(const RunRecord& rec) {
    json j{{"index", rec.index},
           {"mass", rec.key.mass},
           {"p", rec.key.p},
           {"beta", rec.key.beta},
           {"d0", rec.key.d0},
           {"d1", rec.key.d1},
           {"amp", rec.key.amp},
           {"status", rec.status == RecordStatus::ok ? "ok" : "skipped"},
           {"detail", rec.detail},
           {"seconds", rec.seconds}};
    if (rec.status == RecordStatus::ok) {
        j["m"] = rec.m;
        j["M"] = rec.M;
        j["outcome"] = outcome_name(rec.outcome);
        if (rec.T_est) j["T_est"] = *rec.T_est;
        if (rec.T_err) j["T_err"] = *rec.T_err;
        j["holder_ok"] = rec.holder_ok;
        j["causal_ok"] = rec.causal_ok;
        j["certificate"] = {{"lemma", rec.cert_lemma},
                            {"bounded_holds", rec.cert_bounded_holds},
                            {"eventual_checked", rec.cert_eventual_checked},
                            {"eventual_holds", rec.cert_eventual_holds}};
        if (rec.cert_T_upper) j["certificate"]["T_upper"] = *rec.cert_T_upper;
        j["concordant"] = rec.concordant;
    }
    return j;
}

}  // namespace

void ScanSpec::validate() const {
    if (n < 1) throw dskg::ConfigError("dimension must be at least 1");
    for (const auto* axis : {&mass, &p, &beta, &d0, &d1, &amp})
        if (axis->empty())
            throw dskg::ConfigError("every scan axis needs at least one value");
    if (!(c > 0.0)) throw dskg::ConfigError("weight scale c must be positive");
    if (!(R0 > 0.0)) throw dskg::ConfigError("data radius R0 must be positive");
    grid.validate();
    grid.validate_for_data(R0);
    if (two_grid) grid.refined().validate();
    if (threads < 0) throw dskg::ConfigError("threads must be nonnegative");
}

ScanSpec ScanSpec::from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw dskg::ConfigError(std::string("scan spec is not valid JSON: ") +
                                e.what());
    }
    if (!doc.is_object()) throw dskg::ConfigError("scan spec must be a JSON object");
    if (!doc.contains("schema_version") || doc.at("schema_version") != 1)
        throw dskg::ConfigError("scan spec needs schema_version 1");

    static const char* known[] = {"schema_version", "n",    "m",       "M",
                                  "p",              "beta", "d0",      "d1",
                                  "amp",            "c",    "R0",      "grid",
                                  "two_grid",       "threads"};
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw dskg::ConfigError("unknown scan spec key: " + key);
    }

    ScanSpec spec;
    try {
        if (doc.contains("n")) spec.n = doc.at("n").get<int>();
        if (doc.contains("m") && doc.contains("M"))
            throw dskg::ConfigError("give either the m axis or the M axis, not both");
        if (doc.contains("m")) {
            spec.mass = parse_axis(doc.at("m"), "m");
            spec.mass_is_curved = false;
        } else if (doc.contains("M")) {
            spec.mass = parse_axis(doc.at("M"), "M");
            spec.mass_is_curved = true;
        } else {
            throw dskg::ConfigError("scan spec needs an m or M axis");
        }
        if (doc.contains("p")) spec.p = parse_axis(doc.at("p"), "p");
        if (doc.contains("beta")) spec.beta = parse_axis(doc.at("beta"), "beta");
        if (!doc.contains("d0") || !doc.contains("d1"))
            throw dskg::ConfigError("scan spec needs d0 and d1 axes");
        spec.d0 = parse_axis(doc.at("d0"), "d0");
        spec.d1 = parse_axis(doc.at("d1"), "d1");
        if (doc.contains("amp")) spec.amp = parse_axis(doc.at("amp"), "amp");
        if (doc.contains("c")) spec.c = doc.at("c").get<double>();
        if (doc.contains("R0")) spec.R0 = doc.at("R0").get<double>();
        if (doc.contains("grid")) {
            const auto& g = doc.at("grid");
            for (const auto& [key, value] : g.items()) {
                (void)value;
                bool ok = false;
                for (const char* k :
                     {"x_min", "x_max", "nx", "dt", "t_max"})
                    ok = ok || key == k;
                if (!ok) throw dskg::ConfigError("unknown grid key: " + key);
            }
            if (g.contains("x_min")) spec.grid.x_min = g.at("x_min").get<double>();
            if (g.contains("x_max")) spec.grid.x_max = g.at("x_max").get<double>();
            if (g.contains("nx")) spec.grid.nx = g.at("nx").get<int>();
            if (g.contains("dt")) spec.grid.dt = g.at("dt").get<double>();
            if (g.contains("t_max")) spec.grid.t_max = g.at("t_max").get<double>();
        }
        if (doc.contains("two_grid")) spec.two_grid = doc.at("two_grid").get<bool>();
        if (doc.contains("threads")) spec.threads = doc.at("threads").get<int>();
    } catch (const json::exception& e) {
        throw dskg::ConfigError(std::string("scan spec field has the wrong type: ") +
                                e.what());
    }
    spec.validate();
    return spec;
}

std::string ScanSpec::to_json() const {
    json j{{"schema_version", 1},
           {"n", n},
           {mass_is_curved ? "M" : "m", mass},
           {"p", p},
           {"beta", beta},
           {"d0", d0},
           {"d1", d1},
           {"amp", amp},
           {"c", c},
           {"R0", R0},
           {"grid",
            {{"x_min", grid.x_min},
             {"x_max", grid.x_max},
             {"nx", grid.nx},
             {"dt", grid.dt},
             {"t_max", grid.t_max}}},
           {"two_grid", two_grid},
           {"threads", threads}};
    return j.dump(2);
}

ScanResult run_scan(const ScanSpec& spec) {
    spec.validate();
    const auto t0 = std::chrono::steady_clock::now();

    ScanResult result;
    result.spec = spec;

    std::vector<PointKey> points;
    for (double mass : spec.mass)
        for (double p : spec.p)
            for (double beta : spec.beta)
                for (double d0 : spec.d0)
                    for (double d1 : spec.d1)
                        for (double amp : spec.amp) {
                            const PointKey key{mass, p, beta, d0, d1, amp};
                            bool dup = false;
                            for (const auto& seen : points)
                                if (same_point(seen, key)) {
                                    dup = true;
                                    break;
                                }
                            if (dup) {
                                result.warnings.push_back(
                                    "duplicate grid point removed: mass=" +
                                    fmt(mass) + " p=" + fmt(p) + " beta=" +
                                    fmt(beta) + " d0=" + fmt(d0) + " d1=" +
                                    fmt(d1) + " amp=" + fmt(amp));
                            } else {
                                points.push_back(key);
                            }
                        }

    result.records.resize(points.size());
    result.threads_used = resolve_threads(spec.threads, points.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= points.size()) return;
            result.records[i] =
                run_point(spec, static_cast<int>(i), points[i]);
        }
    };
    if (result.threads_used <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(result.threads_used);
        for (int k = 0; k < result.threads_used; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    build_summary(result);
    for (const auto& rec : result.records)
        if (rec.status == RecordStatus::ok && !rec.concordant)
            result.concordance_ok = false;
    result.seconds = elapsed_s(t0);
    return result;
}

std::string records_csv(const ScanResult& result) {
    std::string out =
        "index,m,M,p,beta,d0,d1,amp,status,outcome,T_est,T_err,holder_ok,"
        "causal_ok,cert_lemma,cert_T_upper,concordant,detail\r\n";
    for (const auto& rec : result.records) {
        const bool ok = rec.status == RecordStatus::ok;
        out += fmt(rec.index);
        out += ',';
        out += ok ? fmt(rec.m) : (result.spec.mass_is_curved ? "" : fmt(rec.key.mass));
        out += ',';
        out += ok ? fmt(rec.M) : (result.spec.mass_is_curved ? fmt(rec.key.mass) : "");
        out += ',' + fmt(rec.key.p) + ',' + fmt(rec.key.beta) + ',' +
               fmt(rec.key.d0) + ',' + fmt(rec.key.d1) + ',' + fmt(rec.key.amp);
        out += ',';
        out += ok ? "ok" : "skipped";
        out += ',';
        out += ok ? outcome_name(rec.outcome) : "";
        out += ',' + fmt_opt(rec.T_est) + ',' + fmt_opt(rec.T_err);
        out += ',';
        out += ok ? (rec.holder_ok ? "1" : "0") : "";
        out += ',';
        out += ok ? (rec.causal_ok ? "1" : "0") : "";
        out += ',';
        out += ok ? rec.cert_lemma : "";
        out += ',' + fmt_opt(rec.cert_T_upper);
        out += ',';
        out += ok ? (rec.concordant ? "1" : "0") : "";
        out += ',' + csv_field(rec.detail) + "\r\n";
    }
    return out;
}

std::string summary_csv(const ScanResult& result) {
    std::string out =
        "mass,M,p,beta,d1,amp,d0_last_alive,d0_first_blowup,d0_boundary,"
        "d0_predicted,distance,ordered,inconclusive_off_boundary\r\n";
    for (const auto& s : result.summary) {
        out += fmt(s.mass) + ',' + fmt(s.M) + ',' + fmt(s.p) + ',' +
               fmt(s.beta) + ',' + fmt(s.d1) + ',' + fmt(s.amp);
        out += ',' + fmt_opt(s.d0_last_alive) + ',' + fmt_opt(s.d0_first_blowup) +
               ',' + fmt_opt(s.d0_boundary) + ',' + fmt(s.d0_predicted) + ',' +
               fmt_opt(s.distance);
        out += ',';
        out += s.ordered ? "1" : "0";
        out += ',' + fmt(s.inconclusive_off_boundary) + "\r\n";
    }
    return out;
}

std::string plot_csv(const std::vector<RunRecord>& records) {
    std::string out = "d0,d1,M,p,beta,amp,outcome,T_est\r\n";
    for (const auto& rec : records) {
        out += fmt(rec.key.d0) + ',' + fmt(rec.key.d1) + ',';
        out += rec.status == RecordStatus::ok ? fmt(rec.M) : std::string();
        out += ',' + fmt(rec.key.p) + ',' + fmt(rec.key.beta) + ',' +
               fmt(rec.key.amp) + ',';
        out += rec.status == RecordStatus::ok ? outcome_name(rec.outcome)
                                              : "skipped";
        out += ',' + fmt_opt(rec.T_est) + "\r\n";
    }
    return out;
}

std::string scan_json(const ScanResult& result) {
    json j;
    j["schema_version"] = 1;
    j["kind"] = "scan";
    j["spec"] = json::parse(result.spec.to_json());
    j["threads_used"] = result.threads_used;
    j["seconds"] = result.seconds;
    j["warnings"] = result.warnings;
    j["concordance_ok"] = result.concordance_ok;
    j["records"] = json::array();
    for (const auto& rec : result.records) j["records"].push_back(record_to_json(rec));
    j["summary"] = json::array();
    for (const auto& s : result.summary) {
        json row{{"mass", s.mass},
                 {"M", s.M},
                 {"p", s.p},
                 {"beta", s.beta},
                 {"d1", s.d1},
                 {"amp", s.amp},
                 {"d0_predicted", s.d0_predicted},
                 {"ordered", s.ordered},
                 {"inconclusive_off_boundary", s.inconclusive_off_boundary}};
        if (s.d0_last_alive) row["d0_last_alive"] = *s.d0_last_alive;
        if (s.d0_first_blowup) row["d0_first_blowup"] = *s.d0_first_blowup;
        if (s.d0_boundary) row["d0_boundary"] = *s.d0_boundary;
        if (s.distance) row["distance"] = *s.distance;
        j["summary"].push_back(row);
    }
    return j.dump(2);
}

std::vector<RunRecord> records_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw dskg::ConfigError(std::string("manifest is not valid JSON: ") +
                                e.what());
    }
    const json* arr = nullptr;
    if (doc.is_array()) arr = &doc;
    else if (doc.is_object() && doc.contains("records")) arr = &doc.at("records");
    else throw dskg::ConfigError("manifest carries no records array");

    std::vector<RunRecord> records;
    try {
        for (const auto& node : *arr) {
            RunRecord rec;
            rec.index = node.value("index", static_cast<int>(records.size()));
            rec.key.mass = node.value("mass", 0.0);
            rec.key.p = node.value("p", 2.0);
            rec.key.beta = node.value("beta", 0.0);
            rec.key.d0 = node.at("d0").get<double>();
            rec.key.d1 = node.at("d1").get<double>();
            rec.key.amp = node.value("amp", 0.0);
            const std::string status = node.value("status", "ok");
            rec.status = status == "ok" ? RecordStatus::ok : RecordStatus::skipped;
            if (rec.status == RecordStatus::ok) {
                rec.m = node.value("m", 0.0);
                rec.M = node.value("M", 0.0);
                const std::string oc = node.value("outcome", "inconclusive");
                rec.outcome = oc == "blowup"     ? Outcome::blowup
                              : oc == "alive_at" ? Outcome::alive_at
                                                 : Outcome::inconclusive;
                if (node.contains("T_est")) rec.T_est = node.at("T_est").get<double>();
                if (node.contains("T_err")) rec.T_err = node.at("T_err").get<double>();
            }
            records.push_back(std::move(rec));
        }
    } catch (const json::exception& e) {
        throw dskg::ConfigError(std::string("record field has the wrong type: ") +
                                e.what());
    }
    return records;
}

}  // namespace dskg::lab
