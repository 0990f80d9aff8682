#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dskg/blowup_ode.hpp"
#include "dskg/gamma_schedule.hpp"

namespace dskg::pde {

// Equation data for u_tt - e^{-2t} u_xx - M^2 u = Gamma(t) (int |u|^p dx)^beta |u|^p
// with curved mass M^2 = n^2/4 - m^2 >= 0.
struct PhysicalParams {
    int n = 1;
    double m = 0.0;
    double M = 0.5;
    double p = 2.0;
    double beta = 0.0;

    double q_eff() const { return p * (beta + 1.0); }
    static PhysicalParams from_mass(int n, double m, double p, double beta);
    static PhysicalParams from_curved_mass(int n, double M, double p, double beta);
    void validate() const;
};

struct Grid1D {
    double x_min = -2.5;
    double x_max = 2.5;
    int nx = 501;
    double dt = 0.005;
    double t_max = 10.0;

    double dx() const { return (x_max - x_min) / (nx - 1); }
    double x(int i) const { return x_min + i * dx(); }
    Grid1D refined() const;  // halves dx and dt, same domain and horizon
    void validate() const;
    // The data's influence region [-R0-1, R0+1] must sit inside the domain.
    void validate_for_data(double R0) const;
};

// Compactly supported smooth data: bumps scaled to prescribed moments
//   int u(x,0) dx = C0,  int u_t(x,0) dx = C1  (discrete trapezoid moments).
struct DataSpec {
    double R0 = 1.0;
    double C0 = 1.0;
    double C1 = 0.0;
};

// exp(-1/(1-(x/R0)^2)) on |x| < R0, scaled so its trapezoid moment on the
// grid equals target exactly; identically zero for target == 0.
std::vector<double> bump_profile(const Grid1D& grid, double R0, double target);

struct StateMoments {
    double F;   // int u dx (signed)
    double Pp;  // int |u|^p dx
};
StateMoments moments(const std::vector<double>& u, double dx, double p);

// Support radius: largest |x_i| carrying |u_i| >= 1e-14, plus half a cell.
double support_radius(const std::vector<double>& u, const Grid1D& grid);

std::vector<double> transform_phi_to_u(const std::vector<double>& phi, double t,
                                       const PhysicalParams& params);
std::vector<double> transform_u_to_phi(const std::vector<double>& u, double t,
                                       const PhysicalParams& params);

// Absent schedule means the linear equation (zero coupling).
using Coupling = std::optional<dskg::ode::GammaSchedule>;

struct FieldState {
    std::vector<double> u_prev, u_curr;
    double t = 0.0;
    int step_index = 0;
    bool blown_up = false;
    // Data support radius; each level is masked to the influence cone
    // |x| <= R_data + 1 - e^{-t}, where the exact solution vanishes.
    double R_data = 0.0;
};

// Level 0 plus the second-order Taylor start for level 1.
FieldState make_initial_state(const DataSpec& data, const Grid1D& grid,
                              const PhysicalParams& params, const Coupling& gamma);

// One explicit leapfrog step; NaN/overflow freezes the state at the last
// finite level and raises the blow-up flag.
void step_fd(FieldState& state, const Grid1D& grid, const PhysicalParams& params,
             const Coupling& gamma);

struct TraceRow {
    double t;
    double F;
    double Fdot;  // central difference of F, one-sided at the ends
    double Pp;
    double R;
    double u_max;
};

struct RunResult {
    std::vector<TraceRow> history;
    dskg::ode::Outcome outcome = dskg::ode::Outcome::inconclusive;
    double t_end = 0.0;
    std::optional<double> T_est;  // first time max|u| exceeds 1e8
    std::string detail;
    double dx = 0.0, dt = 0.0, R_data = 0.0;
    // Optional solution snapshots (every keep_every-th level) for
    // cross-backend comparison.
    std::vector<double> times;
    std::vector<std::vector<double>> levels;
};

RunResult solve_fd(const DataSpec& data, const Grid1D& grid,
                   const PhysicalParams& params, const Coupling& gamma,
                   int keep_every = 0);

// Runs at (dx, dt) and (dx/2, dt/2); agreement -> classification with
// |T_fine - T_coarse| as the error bar, disagreement -> inconclusive.
struct Classification {
    dskg::ode::Outcome outcome = dskg::ode::Outcome::inconclusive;
    std::optional<double> T_est, T_err;
    std::string detail;
    RunResult coarse, fine;
};
Classification classify_two_grid(const DataSpec& data, const Grid1D& grid,
                                 const PhysicalParams& params, const Coupling& gamma);

// Max over interior rows of the normalized residual of
//   Fdd = M^2 F + Gamma(t) Pp^{beta+1},
// with Fdd estimated by stride-two second differences (O(dt^2) truncation).
double verify_moment_law(const std::vector<TraceRow>& history,
                         const PhysicalParams& params, const Coupling& gamma);

// |F|^p <= (tau_n R^n)^{p-1} Pp with tau_1 = 2, within a small slack.
// r_scale != 1 is a falsification hook for tests.
bool holder_lower_bound_check(const std::vector<TraceRow>& history,
                              const PhysicalParams& params, double r_scale = 1.0);

// R(t) <= R_data + 1 - e^{-t} + 2 dx at every recorded time.
bool support_causality_check(const std::vector<TraceRow>& history, double R_data,
                             double dx);

// CSV: t,F,Fdot_est,Pp,R,max_abs_u
std::string run_csv(const RunResult& run);

// Full space-time linear solution (zero coupling) kept level by level; the
// Picard backend iterates on top of it.
struct LinearRun {
    Grid1D grid;
    PhysicalParams params;
    DataSpec data;
    std::vector<double> times;
    std::vector<std::vector<double>> levels;
};
LinearRun solve_linear_levels(const DataSpec& data, const Grid1D& grid,
                              const PhysicalParams& params);

struct PicardOptions {
    int k_max = 25;
    double window = 0.2;  // initial window length in t
    double tol = 1e-8;    // sup-norm fixed-point tolerance
    double g_tol = 1e-7;  // tolerance for the kernel integrals
};

// Windowed fixed-point iteration of u = u0 + G[Gamma (int|u|^p)^beta |u|^p];
// window halves on divergence, window underflow flags blow-up at the
// window start.
RunResult solve_picard(const LinearRun& u0, const PhysicalParams& params,
                       const Coupling& gamma, const PicardOptions& opts = {});

}  // namespace dskg::pde
