#include "dskg/semilinear.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "dskg/descent.hpp"
#include "dskg/errors.hpp"
#include "dskg/goperator.hpp"

namespace dskg::pde {

namespace {

constexpr double kSupportFloor = 1e-14;
constexpr double kBlowupCap = 1e8;

double gamma_at(const Coupling& gamma, double t) {
    return gamma ? (*gamma)(t) : 0.0;
}

// |x|^p with fast paths for the common small integer exponents.
double pow_abs(double x, double p) {
    const double a = std::abs(x);
    if (p == 2.0) return a * a;
    if (p == 3.0) return a * a * a;
    if (p == 1.0) return a;
    return std::pow(a, p);
}

double nonlinear_factor(const Coupling& gamma, double t, double Pp, double beta) {
    if (!gamma) return 0.0;
    const double g = (*gamma)(t);
    if (beta == 0.0) return g;
    // Zero field: the source Pp^beta |u|^p tends to 0 whenever q_eff > 0.
    if (Pp == 0.0) return 0.0;
    return g * std::pow(Pp, beta);
}

// The exact solution vanishes outside the influence cone; zeroing the
// dispersive fringe there imposes that known boundary behavior.
void apply_cone_mask(std::vector<double>& u, const Grid1D& grid, double R_data,
                     double t) {
    const double reach = R_data + 1.0 - std::exp(-t);
    const int nx = grid.nx;
    for (int i = 0; i < nx; ++i) {
        const double ax = std::abs(grid.x(i));
        if (ax > reach)
            u[i] = 0.0;
        else if (ax < reach - grid.dx())
            break;  // symmetric grid: the far side is handled below
    }
    for (int i = nx - 1; i >= 0; --i) {
        const double ax = std::abs(grid.x(i));
        if (ax > reach)
            u[i] = 0.0;
        else if (ax < reach - grid.dx())
            break;
    }
}

bool level_finite(const std::vector<double>& u) {
    for (double v : u)
        if (!std::isfinite(v)) return false;
    return true;
}

double level_max(const std::vector<double>& u) {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
}

// Right-hand side e^{-2t} u_xx + M^2 u + Gamma Pp^beta |u|^p at one level,
// homogeneous Dirichlet (boundary entries stay zero).
void accumulate_rhs(const std::vector<double>& u, double t, double dx,
                    const PhysicalParams& params, const Coupling& gamma,
                    std::vector<double>& rhs) {
    const int nx = static_cast<int>(u.size());
    const double c2 = std::exp(-2.0 * t) / (dx * dx);
    const double M2 = params.M * params.M;
    const double Pp = moments(u, dx, params.p).Pp;
    const double nl = nonlinear_factor(gamma, t, Pp, params.beta);
    rhs.assign(u.size(), 0.0);
    if (nl == 0.0) {
        for (int i = 1; i + 1 < nx; ++i)
            rhs[i] = c2 * (u[i + 1] - 2.0 * u[i] + u[i - 1]) + M2 * u[i];
        return;
    }
    for (int i = 1; i + 1 < nx; ++i) {
        rhs[i] = c2 * (u[i + 1] - 2.0 * u[i] + u[i - 1]) + M2 * u[i] +
                 nl * pow_abs(u[i], params.p);
    }
}

}  // namespace

PhysicalParams PhysicalParams::from_mass(int n, double m, double p, double beta) {
    if (n < 1) throw dskg::ConfigError("dimension must be at least 1");
    if (!(m >= 0.0)) throw dskg::DomainError("mass must be nonnegative");
    const double M2 = 0.25 * n * n - m * m;
    if (M2 < -1e-12)
        throw dskg::DomainError("mass exceeds n/2: curved mass would be imaginary");
    PhysicalParams params;
    params.n = n;
    params.m = m;
    params.M = std::sqrt(std::max(M2, 0.0));
    params.p = p;
    params.beta = beta;
    params.validate();
    return params;
}

PhysicalParams PhysicalParams::from_curved_mass(int n, double M, double p,
                                                double beta) {
    if (n < 1) throw dskg::ConfigError("dimension must be at least 1");
    if (!(M >= 0.0)) throw dskg::DomainError("curved mass must be nonnegative");
    const double m2 = 0.25 * n * n - M * M;
    if (m2 < -1e-12)
        throw dskg::DomainError("curved mass exceeds n/2");
    PhysicalParams params;
    params.n = n;
    params.M = M;
    params.m = std::sqrt(std::max(m2, 0.0));
    params.p = p;
    params.beta = beta;
    params.validate();
    return params;
}

void PhysicalParams::validate() const {
    if (n < 1) throw dskg::ConfigError("dimension must be at least 1");
    if (!(m >= 0.0) || !(M >= 0.0))
        throw dskg::ConfigError("masses must be nonnegative");
    if (std::abs(M * M + m * m - 0.25 * n * n) > 1e-10 * std::max(1.0, 0.25 * n * n))
        throw dskg::ConfigError("curved mass inconsistent with M^2 = n^2/4 - m^2");
    if (!(p > 1.0)) throw dskg::ConfigError("p must exceed 1");
    if (!(q_eff() > 1.0))
        throw dskg::ConfigError("p (beta + 1) must exceed 1 (beta > 1/p - 1)");
}

Grid1D Grid1D::refined() const {
    Grid1D g = *this;
    g.nx = 2 * nx - 1;
    g.dt = 0.5 * dt;
    return g;
}

void Grid1D::validate() const {
    if (nx < 8) throw dskg::ConfigError("grid needs at least 8 points");
    if (!(x_max > x_min)) throw dskg::ConfigError("empty spatial domain");
    if (!(dt > 0.0) || !(t_max > 0.0))
        throw dskg::ConfigError("time step and horizon must be positive");
    if (dt > 0.5 * dx() * (1.0 + 1e-12))
        throw dskg::ConfigError("CFL violated: need dt <= 0.5 dx");
}

void Grid1D::validate_for_data(double R0) const {
    validate();
    if (!(R0 > 0.0)) throw dskg::ConfigError("data radius must be positive");
    const double reach = R0 + 1.0 + 2.0 * dx();
    if (x_min > -reach || x_max < reach)
        throw dskg::ConfigError(
            "domain must contain the influence region [-R0-1, R0+1] with margin");
}

std::vector<double> bump_profile(const Grid1D& grid, double R0, double target) {
    grid.validate_for_data(R0);
    std::vector<double> u(grid.nx, 0.0);
    if (target == 0.0) return u;
    for (int i = 0; i < grid.nx; ++i) {
        const double s = grid.x(i) / R0;
        if (std::abs(s) < 1.0 - 1e-12) u[i] = std::exp(-1.0 / (1.0 - s * s));
    }
    const double raw = moments(u, grid.dx(), 2.0).F;
    if (!(raw > 0.0))
        throw dskg::ConfigError("grid cannot resolve a bump of this radius");
    const double scale = target / raw;
    for (double& v : u) v *= scale;
    return u;
}

StateMoments moments(const std::vector<double>& u, double dx, double p) {
    const std::size_t n = u.size();
    double F = 0.0, Pp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
        F += w * u[i];
        Pp += w * pow_abs(u[i], p);
    }
    return {F * dx, Pp * dx};
}

double support_radius(const std::vector<double>& u, const Grid1D& grid) {
    double r = 0.0;
    bool found = false;
    for (int i = 0; i < grid.nx; ++i) {
        if (std::abs(u[i]) >= kSupportFloor) {
            r = std::max(r, std::abs(grid.x(i)));
            found = true;
        }
    }
    return found ? r + 0.5 * grid.dx() : 0.0;
}

std::vector<double> transform_phi_to_u(const std::vector<double>& phi, double t,
                                       const PhysicalParams& params) {
    const double s = std::exp(0.5 * params.n * t);
    std::vector<double> u(phi);
    for (double& v : u) v *= s;
    return u;
}

std::vector<double> transform_u_to_phi(const std::vector<double>& u, double t,
                                       const PhysicalParams& params) {
    const double s = std::exp(-0.5 * params.n * t);
    std::vector<double> phi(u);
    for (double& v : phi) v *= s;
    return phi;
}

FieldState make_initial_state(const DataSpec& data, const Grid1D& grid,
                              const PhysicalParams& params, const Coupling& gamma) {
    params.validate();
    grid.validate_for_data(data.R0);
    FieldState state;
    state.u_prev = bump_profile(grid, data.R0, data.C0);
    const std::vector<double> ut0 = bump_profile(grid, data.R0, data.C1);

    std::vector<double> rhs;
    accumulate_rhs(state.u_prev, 0.0, grid.dx(), params, gamma, rhs);
    state.u_curr.resize(grid.nx);
    const double dt = grid.dt;
    for (int i = 0; i < grid.nx; ++i)
        state.u_curr[i] = state.u_prev[i] + dt * ut0[i] + 0.5 * dt * dt * rhs[i];
    state.t = dt;
    state.step_index = 1;
    state.R_data = data.R0;
    apply_cone_mask(state.u_curr, grid, data.R0, dt);
    return state;
}

void step_fd(FieldState& state, const Grid1D& grid, const PhysicalParams& params,
             const Coupling& gamma) {
    if (state.blown_up) return;
    std::vector<double> rhs;
    accumulate_rhs(state.u_curr, state.t, grid.dx(), params, gamma, rhs);
    const double dt = grid.dt;
    std::vector<double> next(grid.nx, 0.0);
    for (int i = 1; i + 1 < grid.nx; ++i)
        next[i] = 2.0 * state.u_curr[i] - state.u_prev[i] + dt * dt * rhs[i];
    if (!level_finite(next)) {
        state.blown_up = true;  // freeze at the last finite level
        return;
    }
    apply_cone_mask(next, grid, state.R_data, (state.step_index + 1) * dt);
    state.u_prev.swap(state.u_curr);
    state.u_curr.swap(next);
    ++state.step_index;
    state.t = state.step_index * dt;
}

namespace {

TraceRow make_row(const std::vector<double>& u, double t, const Grid1D& grid,
                  const PhysicalParams& params) {
    const auto mm = moments(u, grid.dx(), params.p);
    return {t, mm.F, 0.0, mm.Pp, support_radius(u, grid), level_max(u)};
}

void fill_fdot(std::vector<TraceRow>& rows, double dt) {
    const std::size_t n = rows.size();
    if (n < 2) return;
    rows[0].Fdot = (rows[1].F - rows[0].F) / dt;
    rows[n - 1].Fdot = (rows[n - 1].F - rows[n - 2].F) / dt;
    for (std::size_t j = 1; j + 1 < n; ++j)
        rows[j].Fdot = (rows[j + 1].F - rows[j - 1].F) / (2.0 * dt);
}

}  // namespace

RunResult solve_fd(const DataSpec& data, const Grid1D& grid,
                   const PhysicalParams& params, const Coupling& gamma,
                   int keep_every) {
    FieldState state = make_initial_state(data, grid, params, gamma);
    const long n_steps = std::lround(grid.t_max / grid.dt);

    RunResult run;
    run.dx = grid.dx();
    run.dt = grid.dt;
    run.R_data = data.R0;
    run.history.reserve(static_cast<std::size_t>(n_steps) + 2);
    run.history.push_back(make_row(state.u_prev, 0.0, grid, params));
    run.history.push_back(make_row(state.u_curr, state.t, grid, params));

    auto keep = [&](double t, const std::vector<double>& u) {
        run.times.push_back(t);
        run.levels.push_back(u);
    };
    if (keep_every > 0) keep(0.0, state.u_prev);
    if (keep_every == 1) keep(state.t, state.u_curr);

    bool ended = false;
    if (level_max(state.u_curr) > kBlowupCap) {  // pathological data
        run.outcome = dskg::ode::Outcome::blowup;
        run.T_est = state.t;
        ended = true;
    }
    while (!ended && state.step_index < n_steps) {
        step_fd(state, grid, params, gamma);
        if (state.blown_up) {
            run.outcome = dskg::ode::Outcome::blowup;
            run.T_est = (state.step_index + 1) * grid.dt;
            run.detail = "solution left the finite range";
            break;
        }
        run.history.push_back(make_row(state.u_curr, state.t, grid, params));
        if (keep_every > 0 && state.step_index % keep_every == 0)
            keep(state.t, state.u_curr);
        if (run.history.back().u_max > kBlowupCap) {
            run.outcome = dskg::ode::Outcome::blowup;
            run.T_est = state.t;
            run.detail = "sup norm crossed the blow-up threshold";
            ended = true;
        }
    }
    if (run.outcome != dskg::ode::Outcome::blowup) {
        run.outcome = dskg::ode::Outcome::alive_at;
        run.detail = "no blow-up before the horizon at this resolution";
    }
    run.t_end = state.t;
    fill_fdot(run.history, grid.dt);
    return run;
}

Classification classify_two_grid(const DataSpec& data, const Grid1D& grid,
                                 const PhysicalParams& params,
                                 const Coupling& gamma) {
    Classification cls;
    cls.coarse = solve_fd(data, grid, params, gamma);
    cls.fine = solve_fd(data, grid.refined(), params, gamma);
    const bool cb = cls.coarse.outcome == dskg::ode::Outcome::blowup;
    const bool fb = cls.fine.outcome == dskg::ode::Outcome::blowup;
    if (cb && fb) {
        cls.outcome = dskg::ode::Outcome::blowup;
        cls.T_est = cls.fine.T_est;
        cls.T_err = std::abs(*cls.fine.T_est - *cls.coarse.T_est);
        cls.detail = "both resolutions blow up";
    } else if (!cb && !fb) {
        cls.outcome = dskg::ode::Outcome::alive_at;
        cls.detail = "no blow-up before the horizon at either resolution";
    } else {
        cls.outcome = dskg::ode::Outcome::inconclusive;
        cls.detail = "resolutions disagree on the classification";
    }
    return cls;
}

double verify_moment_law(const std::vector<TraceRow>& history,
                         const PhysicalParams& params, const Coupling& gamma) {
    if (history.size() < 5) return 0.0;
    const double dt = history[1].t - history[0].t;
    const double M2 = params.M * params.M;
    double worst = 0.0;
    for (std::size_t j = 2; j + 2 < history.size(); ++j) {
        const double d2F = (history[j + 2].F - 2.0 * history[j].F +
                            history[j - 2].F) /
                           (4.0 * dt * dt);
        const double rhs =
            M2 * history[j].F +
            gamma_at(gamma, history[j].t) *
                std::pow(history[j].Pp, params.beta + 1.0);
        const double res = std::abs(d2F - rhs) / std::max(1.0, std::abs(rhs));
        worst = std::max(worst, res);
    }
    return worst;
}

bool holder_lower_bound_check(const std::vector<TraceRow>& history,
                              const PhysicalParams& params, double r_scale) {
    const double tau = dskg::descent::DimensionConstants(params.n).tau;
    for (const auto& row : history) {
        const double lhs = std::pow(std::abs(row.F), params.p);
        const double measure = tau * std::pow(r_scale * row.R, params.n);
        const double rhs = std::pow(measure, params.p - 1.0) * row.Pp;
        if (lhs > rhs * (1.0 + 1e-9) + 1e-12 * std::max(1.0, lhs)) return false;
    }
    return true;
}

bool support_causality_check(const std::vector<TraceRow>& history, double R_data,
                             double dx) {
    for (const auto& row : history) {
        const double bound = R_data + 1.0 - std::exp(-row.t) + 2.0 * dx + 1e-12;
        if (row.R > bound) return false;
    }
    return true;
}

std::string run_csv(const RunResult& run) {
    std::string out = "t,F,Fdot_est,Pp,R,max_abs_u\r\n";
    char buf[240];
    for (const auto& r : run.history) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\r\n",
                      r.t, r.F, r.Fdot, r.Pp, r.R, r.u_max);
        out += buf;
    }
    return out;
}

LinearRun solve_linear_levels(const DataSpec& data, const Grid1D& grid,
                              const PhysicalParams& params) {
    LinearRun run;
    run.grid = grid;
    run.params = params;
    run.data = data;
    const RunResult fd = solve_fd(data, grid, params, std::nullopt, 1);
    run.times = fd.times;
    run.levels = fd.levels;
    return run;
}

namespace {

// Flattened |u|^p source values Gamma(b_j) Pp_j^beta |u_{j,i}|^p over
// levels 0..j_end.
std::vector<double> picard_source(const std::vector<std::vector<double>>& levels,
                                  int j_end, const Grid1D& grid,
                                  const PhysicalParams& params,
                                  const Coupling& gamma) {
    const int nx = grid.nx;
    std::vector<double> values(static_cast<std::size_t>(j_end + 1) * nx, 0.0);
    if (!gamma) return values;
    for (int j = 0; j <= j_end; ++j) {
        const double t = j * grid.dt;
        const auto mm = moments(levels[j], grid.dx(), params.p);
        const double nl = nonlinear_factor(gamma, t, mm.Pp, params.beta);
        for (int i = 0; i < nx; ++i)
            values[static_cast<std::size_t>(j) * nx + i] =
                nl * pow_abs(levels[j][i], params.p);
    }
    return values;
}

bool all_zero(const std::vector<double>& v) {
    for (double x : v)
        if (x != 0.0) return false;
    return true;
}

}  // namespace

RunResult solve_picard(const LinearRun& u0, const PhysicalParams& params,
                       const Coupling& gamma, const PicardOptions& opts) {
    params.validate();
    const Grid1D& grid = u0.grid;
    grid.validate();
    if (u0.levels.size() < 2)
        throw dskg::ConfigError("linear run must carry at least two levels");
    const int J = static_cast<int>(u0.levels.size()) - 1;
    const int nx = grid.nx;
    const double dt = grid.dt;

    std::vector<std::vector<double>> u = u0.levels;
    int j_start = 0;
    int W = std::max(4, static_cast<int>(std::lround(opts.window / dt)));

    RunResult run;
    run.dx = grid.dx();
    run.dt = dt;
    run.R_data = u0.data.R0;
    run.outcome = dskg::ode::Outcome::alive_at;
    run.detail = "fixed point reached on every window";
    int last_level = J;

    while (j_start < J) {
        const int j_end = std::min(J, j_start + W);
        bool window_done = false;
        double prev_delta = std::numeric_limits<double>::infinity();
        for (int k = 0; k < opts.k_max && !window_done; ++k) {
            const auto src_values = picard_source(u, j_end, grid, params, gamma);
            double delta = 0.0;
            if (all_zero(src_values)) {
                for (int j = j_start + 1; j <= j_end; ++j) {
                    for (int i = 0; i < nx; ++i)
                        delta = std::max(delta,
                                         std::abs(u0.levels[j][i] - u[j][i]));
                    u[j] = u0.levels[j];
                }
            } else {
                gop::GridSource1D src(grid.x_min, grid.dx(), nx, 0.0, dt,
                                      j_end + 1, src_values);
                const auto field = src.field();
                for (int j = j_start + 1; j <= j_end; ++j) {
                    const double t = j * dt;
                    for (int i = 1; i + 1 < nx; ++i) {
                        const double v =
                            u0.levels[j][i] +
                            gop::apply_G_1d(field, grid.x(i), t, params.M,
                                            opts.g_tol);
                        delta = std::max(delta, std::abs(v - u[j][i]));
                        u[j][i] = v;
                    }
                }
            }
            if (!std::isfinite(delta) || (k > 0 && delta > 3.0 * prev_delta)) break;
            prev_delta = delta;
            if (delta <= opts.tol) window_done = true;
        }
        if (window_done) {
            for (int j = j_start + 1; j <= j_end; ++j) {
                if (level_max(u[j]) > kBlowupCap) {
                    run.outcome = dskg::ode::Outcome::blowup;
                    run.T_est = j * dt;
                    run.detail = "sup norm crossed the blow-up threshold";
                    last_level = j;
                    break;
                }
            }
            if (run.outcome == dskg::ode::Outcome::blowup) break;
            j_start = j_end;
            continue;
        }
        // Not contracting: revert the window to the linear base and shorten it.
        for (int j = j_start + 1; j <= j_end; ++j) u[j] = u0.levels[j];
        W /= 2;
        if (W < 4) {
            run.outcome = dskg::ode::Outcome::blowup;
            run.T_est = j_start * dt;
            run.detail = "fixed-point window collapsed: contraction lost";
            last_level = j_start;
            break;
        }
    }

    for (int j = 0; j <= last_level; ++j) {
        run.history.push_back(make_row(u[j], j * dt, grid, params));
        run.times.push_back(j * dt);
        run.levels.push_back(u[j]);
    }
    run.t_end = last_level * dt;
    fill_fdot(run.history, dt);
    return run;
}

}  // namespace dskg::pde
