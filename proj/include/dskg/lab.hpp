#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dskg/blowup_ode.hpp"
#include "dskg/semilinear.hpp"

namespace dskg::lab {

// Cartesian sweep over the weight scale Gamma(t) = c (1+t)^{d1} e^{d0 t}
// and the data amplitude (C0 = C1 = amp), classifying each point by the
// dual-resolution PDE run.
struct ScanSpec {
    int n = 1;
    bool mass_is_curved = false;  // values below are M instead of m
    std::vector<double> mass;
    std::vector<double> p{2.0};
    std::vector<double> beta{0.0};
    std::vector<double> d0;
    std::vector<double> d1;
    std::vector<double> amp{1e-4};
    double c = 1.0;
    double R0 = 1.0;
    pde::Grid1D grid{-2.2, 2.2, 221, 0.01, 30.0};
    bool two_grid = true;
    int threads = 0;  // 0 = hardware concurrency; DSKG_THREADS caps either way

    void validate() const;
    static ScanSpec from_json(const std::string& text);
    std::string to_json() const;
};

struct PointKey {
    double mass, p, beta, d0, d1, amp;
};

enum class RecordStatus { ok, skipped };

struct RunRecord {
    int index = 0;
    PointKey key{};
    RecordStatus status = RecordStatus::ok;
    double m = 0.0, M = 0.0;  // resolved masses when status == ok
    dskg::ode::Outcome outcome = dskg::ode::Outcome::inconclusive;
    std::optional<double> T_est, T_err;
    std::string detail;
    bool holder_ok = true;  // interpolation lower bound along the run
    bool causal_ok = true;  // support stayed inside the influence cone
    // Lifespan certificates evaluated at the initial data.
    bool cert_bounded_holds = false;          // energy-gap lemma, carries T_upper
    std::optional<double> cert_T_upper;
    bool cert_eventual_checked = false;       // envelope lemma / power criterion
    bool cert_eventual_holds = false;
    std::string cert_lemma;                   // which certificate fired, if any
    bool concordant = true;  // bounded certificate inside the horizon vs outcome
    double seconds = 0.0;
};

// Per (mass, p, beta, d1, amp) slice: location of the empirical blow-up
// boundary along d0 and its distance to the predicted -M (q_eff - 1).
struct SliceSummary {
    double mass, p, beta, d1, amp;
    double M = 0.0;
    std::optional<double> d0_last_alive, d0_first_blowup, d0_boundary;
    double d0_predicted = 0.0;
    std::optional<double> distance;
    bool ordered = true;  // alive* inconclusive* blowup* along ascending d0
    int inconclusive_off_boundary = 0;
};

struct ScanResult {
    ScanSpec spec;
    std::vector<RunRecord> records;  // deterministic grid order
    std::vector<SliceSummary> summary;
    std::vector<std::string> warnings;
    bool concordance_ok = true;
    int threads_used = 1;
    double seconds = 0.0;
};

ScanResult run_scan(const ScanSpec& spec);

// RFC-4180 CSV emitters. Record rows exclude timings so output is
// byte-identical across thread counts.
std::string records_csv(const ScanResult& result);
std::string summary_csv(const ScanResult& result);
std::string plot_csv(const std::vector<RunRecord>& records);

// Full machine-readable manifest (includes timings and warnings).
std::string scan_json(const ScanResult& result);

// Rebuild records from a scan_json document (for plot emission from a
// saved manifest).
std::vector<RunRecord> records_from_json(const std::string& text);

}  // namespace dskg::lab
