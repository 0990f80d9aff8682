#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dskg/gamma_schedule.hpp"

namespace dskg::ode {

struct MomentState {
    double F;
    double Fdot;
    double t;
};

struct CauchyMoments {
    double C0;
    double C1;
};

// Parameters of the comparison equation Fdd = M^2 F + delta0 Gamma(t) F^q.
struct ComparisonParams {
    double M;
    double q_eff;
    double delta0;
    GammaSchedule gamma;

    void validate() const;
};

double comparison_rhs(double t, double F, const ComparisonParams& params);

struct TrajectoryPoint {
    double t;
    double F;
    double Fdot;
    double step;
};
using Trajectory = std::vector<TrajectoryPoint>;

std::string trajectory_csv(const Trajectory& traj);

enum class Outcome { blowup, alive_at, inconclusive };

struct BlowupReport {
    Outcome outcome;
    double t_end;
    std::optional<double> T_est;        // blow-up time estimate
    std::optional<double> fit_exponent; // tail exponent, ideally -2/(q_eff - 1)
    std::string detail;
};

struct IntegrationResult {
    Trajectory trajectory;
    BlowupReport report;
};

// Embedded Runge-Kutta 5(4) with blow-up detection at F > 1e12 and a
// power-law tail fit for the blow-up time.
IntegrationResult integrate_moment_ode(const MomentState& init,
                                       const ComparisonParams& params, double t_max,
                                       double tol);

struct ConditionReport {
    std::string name;
    bool holds;
    double margin;
};

struct BlowupCertificate {
    std::string lemma;
    bool holds;
    double a;
    std::optional<double> a1;
    std::optional<double> T_upper;
    std::vector<ConditionReport> conditions;
};

// Large-energy finite-lifespan certificate: requires a monotone schedule,
// checks the initial energy inequality and the integral gap on
// [a, search_horizon], and reports the smallest admissible a1.
BlowupCertificate check_lemma_large_energy(const ComparisonParams& params, double a,
                                           double F_a, double Fdot_a,
                                           double search_horizon);

// Small-energy certificate with growth function e^{M t}; requires M > 0.
// eps <= 0 switches the lower-bound condition to existence mode (some
// eps > 0 suffices).
BlowupCertificate check_lemma_small_energy(double M, const GammaSchedule& schedule,
                                           double q_eff, double eps, double c,
                                           const std::vector<double>& probe_grid = {});

// Massless power criterion: Gamma(t) t^{1+q_eff} bounded below for large t.
BlowupCertificate check_kato_power(const GammaSchedule& schedule, double q_eff);

struct LargeDataReport {
    bool holds;
    bool redirect_to_positive_gamma;
    double margin_c1;  // C1 minus the kinetic-energy threshold
    double margin_c0;  // C0^{q-1} minus the potential-energy threshold
};

LargeDataReport check_large_data_conditions(double gamma, double q_eff, double delta0,
                                            const CauchyMoments& moments);

struct LifespanBound {
    std::optional<double> T;
    std::string note;
};

// Smallest T exhausting the energy gap
//   sqrt(2/(q+1)) * int_a^T sqrt(delta0 Gamma) >= (2/(q-1)) F_a^{(1-q)/2};
// nondecreasing schedules are frozen at Gamma(a) (valid lower bound).
LifespanBound lifespan_upper_bound(const ComparisonParams& params, double a,
                                   double F_a);

}  // namespace dskg::ode
