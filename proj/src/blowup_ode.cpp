#include "dskg/blowup_ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "dskg/errors.hpp"

namespace dskg::ode {

namespace {

constexpr double kFCap = 1e12;
constexpr long kMaxSteps = 2000000;

std::string format_row(double t, double F, double Fdot, double step) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\r\n", t, F, Fdot, step);
    return buf;
}

}  // namespace

void ComparisonParams::validate() const {
    if (!(M >= 0.0)) throw dskg::ConfigError("M must be nonnegative");
    if (!(q_eff > 1.0))
        throw dskg::ConfigError(
            "q_eff = p (beta + 1) must exceed 1 (beta > 1/p - 1)");
    if (!(delta0 > 0.0)) throw dskg::ConfigError("delta0 must be positive");
}

double comparison_rhs(double t, double F, const ComparisonParams& params) {
    params.validate();
    if (!(F >= 0.0)) throw dskg::DomainError("comparison equation assumes F >= 0");
    return params.M * params.M * F +
           params.delta0 * params.gamma(t) * std::pow(F, params.q_eff);
}

std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t,F,Fdot,stepsize\r\n";
    for (const auto& p : traj) out += format_row(p.t, p.F, p.Fdot, p.step);
    return out;
}

namespace {

struct State {
    double F;
    double Fdot;
};

State rhs(double t, const State& y, const ComparisonParams& p) {
    const double Fpos = std::max(y.F, 0.0);
    return {y.Fdot, p.M * p.M * y.F +
                        p.delta0 * p.gamma(t) * std::pow(Fpos, p.q_eff)};
}

// Least-squares line z = A + B t; returns {A, B}.
std::array<double, 2> fit_line(const std::vector<double>& ts,
                               const std::vector<double>& zs) {
    const std::size_t n = ts.size();
    double st = 0.0, sz = 0.0, stt = 0.0, stz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        st += ts[i];
        sz += zs[i];
        stt += ts[i] * ts[i];
        stz += ts[i] * zs[i];
    }
    const double det = n * stt - st * st;
    if (det == 0.0) return {sz / n, 0.0};
    return {(sz * stt - st * stz) / det, (n * stz - st * sz) / det};
}

// Blow-up time from the tail: F^{-(q-1)/2} is asymptotically linear in t.
void estimate_blowup_time(const Trajectory& traj, double q, BlowupReport& report) {
    std::vector<double> ts, zs;
    const std::size_t n = traj.size();
    const std::size_t take = std::min<std::size_t>(20, n);
    for (std::size_t i = n - take; i < n; ++i) {
        if (traj[i].F <= 0.0) continue;
        ts.push_back(traj[i].t);
        zs.push_back(std::pow(traj[i].F, -0.5 * (q - 1.0)));
    }
    if (ts.size() < 3) {
        report.T_est = report.t_end;
        report.detail += "; tail too short for a fit";
        return;
    }
    const auto [A, B] = fit_line(ts, zs);
    if (!(B < 0.0)) {
        report.T_est = report.t_end;
        report.detail += "; tail fit not decreasing";
        return;
    }
    const double T = -A / B;
    report.T_est = std::max(T, report.t_end);
    // Tail exponent of F against (T - t) as a sanity check on the fit.
    std::vector<double> lx, lf;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double gap = T - ts[i];
        if (gap <= 0.0) continue;
        lx.push_back(std::log(gap));
        lf.push_back(-2.0 / (q - 1.0) * std::log(zs[i]));
    }
    if (lx.size() >= 3) {
        const auto [a2, b2] = fit_line(lx, lf);
        (void)a2;
        report.fit_exponent = b2;
    }
}

}  // namespace

IntegrationResult integrate_moment_ode(const MomentState& init,
                                       const ComparisonParams& params, double t_max,
                                       double tol) {
    params.validate();
    if (!(tol > 0.0)) throw dskg::ConfigError("tolerance must be positive");
    if (!(init.F >= 0.0)) throw dskg::DomainError("initial F must be nonnegative");
    if (!(t_max > init.t)) throw dskg::ConfigError("t_max must exceed the start time");

    // Dormand-Prince 5(4) tableau.
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640,
                        e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    IntegrationResult out;
    out.report.outcome = Outcome::inconclusive;

    double t = init.t;
    State y{init.F, init.Fdot};
    out.trajectory.push_back({t, y.F, y.Fdot, 0.0});

    double h = std::min(1e-2, t_max - t);
    State k1 = rhs(t, y, params);
    long steps = 0;

    auto finish = [&](Outcome oc, const std::string& why) {
        out.report.outcome = oc;
        out.report.t_end = t;
        out.report.detail = why;
        if (oc == Outcome::blowup)
            estimate_blowup_time(out.trajectory, params.q_eff, out.report);
    };

    while (true) {
        if (steps++ > kMaxSteps) {
            finish(Outcome::inconclusive, "step budget exhausted");
            return out;
        }
        if (h > t_max - t) h = t_max - t;

        auto stage = [&](double frac, double s1, double s2, double s3, double s4,
                         double s5, const State& K1, const State& K2, const State& K3,
                         const State& K4, const State& K5) {
            State yy{y.F + h * (s1 * K1.F + s2 * K2.F + s3 * K3.F + s4 * K4.F +
                                s5 * K5.F),
                     y.Fdot + h * (s1 * K1.Fdot + s2 * K2.Fdot + s3 * K3.Fdot +
                                   s4 * K4.Fdot + s5 * K5.Fdot)};
            return rhs(t + frac * h, yy, params);
        };

        const State k2 = stage(c2, a21, 0, 0, 0, 0, k1, k1, k1, k1, k1);
        const State k3 = stage(c3, a31, a32, 0, 0, 0, k1, k2, k2, k2, k2);
        const State k4 = stage(c4, a41, a42, a43, 0, 0, k1, k2, k3, k3, k3);
        const State k5 = stage(c5, a51, a52, a53, a54, 0, k1, k2, k3, k4, k4);
        const State k6 = stage(1.0, a61, a62, a63, a64, a65, k1, k2, k3, k4, k5);

        State ynew{y.F + h * (b1 * k1.F + b3 * k3.F + b4 * k4.F + b5 * k5.F + b6 * k6.F),
                   y.Fdot + h * (b1 * k1.Fdot + b3 * k3.Fdot + b4 * k4.Fdot +
                                 b5 * k5.Fdot + b6 * k6.Fdot)};
        const State k7 = rhs(t + h, ynew, params);

        const double errF = h * (e1 * k1.F + e3 * k3.F + e4 * k4.F + e5 * k5.F +
                                 e6 * k6.F + e7 * k7.F);
        const double errFd = h * (e1 * k1.Fdot + e3 * k3.Fdot + e4 * k4.Fdot +
                                  e5 * k5.Fdot + e6 * k6.Fdot + e7 * k7.Fdot);
        const double scF = tol + tol * std::max(std::abs(y.F), std::abs(ynew.F));
        const double scFd = tol + tol * std::max(std::abs(y.Fdot), std::abs(ynew.Fdot));
        const double err = std::sqrt(0.5 * ((errF / scF) * (errF / scF) +
                                            (errFd / scFd) * (errFd / scFd)));

        const bool finite = std::isfinite(ynew.F) && std::isfinite(ynew.Fdot) &&
                            std::isfinite(err);
        if (finite && err <= 1.0) {
            t += h;
            y = ynew;
            k1 = k7;
            out.trajectory.push_back({t, y.F, y.Fdot, h});
            if (y.F > kFCap) {
                finish(Outcome::blowup, "moment exceeded cap");
                return out;
            }
            if (y.F < 0.0) {
                finish(Outcome::inconclusive,
                       "moment left the nonnegative comparison regime");
                return out;
            }
            if (t >= t_max) {
                finish(Outcome::alive_at, "reached final time");
                return out;
            }
        }

        const double shrink =
            finite ? std::max(0.2, std::min(5.0, 0.9 * std::pow(err, -0.2))) : 0.2;
        h *= shrink;
        if (t_max - t <= 1e-12 * std::max(1.0, std::abs(t_max))) {
            finish(Outcome::alive_at, "reached final time");
            return out;
        }
        if (h < 1e-13 * std::max(1.0, std::abs(t))) {
            if (y.F > 1e6 && y.Fdot > 0.0) {
                finish(Outcome::blowup, "step collapse during growth");
            } else {
                finish(Outcome::inconclusive, "step size collapsed without growth");
            }
            return out;
        }
    }
}

namespace {

// Smallest T in [a, horizon] with sqrt(delta0) * int_a^T sqrt(Gamma) >= target,
// for a schedule evaluated as-is (callers freeze nondecreasing schedules).
std::optional<double> exhaust_gap(const GammaSchedule& g, double delta0, double a,
                                  double target, double horizon) {
    if (target <= 0.0) return a;
    const double sd = std::sqrt(delta0);
    double lo = a;
    double acc = 0.0;
    double w = std::max(0.25, 0.05 * (1.0 + a));
    while (lo < horizon) {
        const double hi = std::min(lo + w, horizon);
        const double piece = sd * g.sqrt_integral(lo, hi);
        if (acc + piece >= target) {
            double bl = lo, bh = hi;
            for (int i = 0; i < 80; ++i) {
                const double mid = 0.5 * (bl + bh);
                if (acc + sd * g.sqrt_integral(lo, mid) >= target)
                    bh = mid;
                else
                    bl = mid;
            }
            return 0.5 * (bl + bh);
        }
        acc += piece;
        lo = hi;
        w *= 1.4;
    }
    return std::nullopt;
}

}  // namespace

LifespanBound lifespan_upper_bound(const ComparisonParams& params, double a,
                                   double F_a) {
    params.validate();
    if (!(F_a > 0.0)) throw dskg::DomainError("F(a) must be positive");
    if (!(a >= 0.0)) throw dskg::DomainError("a must be nonnegative");
    const double q = params.q_eff;
    const Monotonicity mono = params.gamma.monotonicity();
    if (mono == Monotonicity::mixed)
        throw dskg::ConfigError(
            "schedule must be monotone (nonincreasing, or frozen nondecreasing)");

    const double gap = (2.0 / (q - 1.0)) * std::pow(F_a, 0.5 * (1.0 - q));
    const double target = gap * std::sqrt(0.5 * (q + 1.0));

    if (mono == Monotonicity::nondecreasing) {
        const double T = a + target / std::sqrt(params.delta0 * params.gamma(a));
        return {T, "schedule frozen at its value at a"};
    }
    const auto T = exhaust_gap(params.gamma, params.delta0, a, target, 1e6);
    if (!T) return {std::nullopt, "integral of sqrt(Gamma) never exhausts the gap"};
    return {*T, ""};
}

BlowupCertificate check_lemma_large_energy(const ComparisonParams& params, double a,
                                           double F_a, double Fdot_a,
                                           double search_horizon) {
    params.validate();
    if (!(F_a > 0.0)) throw dskg::DomainError("F(a) must be positive");
    if (!(Fdot_a >= 0.0)) throw dskg::DomainError("Fdot(a) must be nonnegative");
    if (!(a >= 0.0)) throw dskg::DomainError("a must be nonnegative");
    if (!(search_horizon > a)) throw dskg::ConfigError("search horizon must exceed a");

    const Monotonicity mono = params.gamma.monotonicity();
    if (mono == Monotonicity::mixed)
        throw dskg::ConfigError(
            "large-energy certificate requires a monotone schedule "
            "(nonincreasing, or nondecreasing hence bounded below)");

    BlowupCertificate cert;
    cert.lemma = "large_energy";
    cert.a = a;
    const double q = params.q_eff;
    const double gamma_a = params.gamma(a);

    // Initial energy inequality.
    const double energy_rhs =
        (2.0 / (q + 1.0)) * params.delta0 * gamma_a * std::pow(F_a, q + 1.0);
    const bool cond_energy = Fdot_a * Fdot_a >= energy_rhs;
    cert.conditions.push_back(
        {"initial_energy", cond_energy, Fdot_a * Fdot_a - energy_rhs});

    // Integral gap on [a, search_horizon], frozen for nondecreasing schedules.
    const double need = std::sqrt(2.0) / (q - 1.0) * std::pow(F_a, 0.5 * (1.0 - q));
    double supply_horizon;
    std::optional<double> a1;
    if (mono == Monotonicity::nondecreasing) {
        const double sq = std::sqrt(params.delta0 * gamma_a);
        supply_horizon = sq * (search_horizon - a) / std::sqrt(q + 1.0);
        if (supply_horizon > need)
            a1 = a + need * std::sqrt(q + 1.0) / sq;
    } else {
        const double sd = std::sqrt(params.delta0);
        supply_horizon =
            sd * params.gamma.sqrt_integral(a, search_horizon) / std::sqrt(q + 1.0);
        if (supply_horizon > need) {
            a1 = exhaust_gap(params.gamma, params.delta0, a,
                             need * std::sqrt(q + 1.0), search_horizon);
            if (!a1) a1 = search_horizon;  // supply crosses right at the horizon
        }
    }
    const bool cond_gap = a1.has_value();
    cert.conditions.push_back({"integral_gap", cond_gap, supply_horizon - need});

    cert.holds = cond_energy && cond_gap;
    if (cert.holds) {
        cert.a1 = a1;
        cert.T_upper = lifespan_upper_bound(params, a, F_a).T;
    }
    return cert;
}

BlowupCertificate check_lemma_small_energy(double M, const GammaSchedule& schedule,
                                           double q_eff, double eps, double c,
                                           const std::vector<double>& probe_grid) {
    if (!(q_eff > 1.0))
        throw dskg::ConfigError(
            "q_eff = p (beta + 1) must exceed 1 (beta > 1/p - 1)");
    if (!(M >= 0.0)) throw dskg::ConfigError("M must be nonnegative");
    if (M == 0.0)
        throw dskg::ConfigError(
            "growth function is constant at M = 0: use the Kato power criterion");
    if (!(c > 0.0)) throw dskg::ConfigError("lower-bound constant must be positive");

    BlowupCertificate cert;
    cert.lemma = "small_energy";
    cert.a = 0.0;

    // (growth) lim A(t) = infinity holds for every M > 0.
    cert.conditions.push_back({"growth_unbounded", true, M});

    // (decay) d/dt [ gamma(t) A(t)^{-q} ] = Gamma'(t) <= 0, from some time on.
    const auto from = schedule.nonincreasing_from();
    const bool cond_decay = from.has_value();
    const double a_eff = from.value_or(0.0);
    cert.conditions.push_back({"weight_nonincreasing", cond_decay, -a_eff});
    cert.a = a_eff;

    // (lower bound) Gamma(t) >= c e^{-M (q-1) t} (M t)^{2+eps}.
    const bool existence = !(eps > 0.0);
    const double rate = -M * (q_eff - 1.0);
    bool cond_bound = false;
    switch (schedule.kind) {
        case ScheduleKind::power_exp: {
            const double tol_rate = 1e-12 * (1.0 + std::abs(rate));
            if (schedule.d0 > rate + tol_rate)
                cond_bound = true;
            else if (std::abs(schedule.d0 - rate) <= tol_rate)
                cond_bound = existence ? schedule.d1 > 2.0 : schedule.d1 >= 2.0 + eps;
            else
                cond_bound = false;
            break;
        }
        case ScheduleKind::pure_exp:
            cond_bound = schedule.gamma > rate + 1e-12 * (1.0 + std::abs(rate));
            break;
        case ScheduleKind::kato_power:
            cond_bound = true;  // algebraic decay beats the exponential envelope
            break;
    }

    // Margin: worst ratio against the envelope over the probe grid.
    std::vector<double> grid = probe_grid;
    if (grid.empty()) {
        for (double t = 0.1; t <= 1e3; t *= 1.2) grid.push_back(t);
    }
    double worst = std::numeric_limits<double>::infinity();
    const double eps_eff = existence ? 2.0 : 2.0 + eps;
    for (double t : grid) {
        if (!(t > a_eff)) continue;
        const double envelope = std::exp(rate * t) * std::pow(M * t, eps_eff);
        const double ratio = schedule(t) / envelope;
        worst = std::min(worst, ratio - (existence ? 0.0 : c));
    }
    cert.conditions.push_back({"gamma_lower_bound", cond_bound, worst});

    cert.holds = cond_decay && cond_bound;
    return cert;
}

BlowupCertificate check_kato_power(const GammaSchedule& schedule, double q_eff) {
    if (!(q_eff > 1.0))
        throw dskg::ConfigError(
            "q_eff = p (beta + 1) must exceed 1 (beta > 1/p - 1)");
    BlowupCertificate cert;
    cert.lemma = "kato_power";
    cert.a = 0.0;

    bool holds = false;
    switch (schedule.kind) {
        case ScheduleKind::kato_power:
            holds = schedule.q <= q_eff;
            break;
        case ScheduleKind::pure_exp:
            holds = schedule.gamma >= 0.0;
            break;
        case ScheduleKind::power_exp:
            if (schedule.d0 > 0.0)
                holds = true;
            else if (schedule.d0 == 0.0)
                holds = schedule.d1 >= -(1.0 + q_eff);
            else
                holds = false;
            break;
    }

    double margin = std::numeric_limits<double>::infinity();
    for (double t = 1.0; t <= 1e3; t *= 1.2)
        margin = std::min(margin, schedule(t) * std::pow(t, 1.0 + q_eff));
    cert.conditions.push_back({"power_lower_bound", holds, margin});
    cert.holds = holds;
    return cert;
}

LargeDataReport check_large_data_conditions(double gamma, double q_eff, double delta0,
                                            const CauchyMoments& moments) {
    if (!(q_eff > 1.0))
        throw dskg::ConfigError(
            "q_eff = p (beta + 1) must exceed 1 (beta > 1/p - 1)");
    if (!(delta0 > 0.0)) throw dskg::ConfigError("delta0 must be positive");
    if (!(moments.C0 > 0.0) || !(moments.C1 > 0.0))
        throw dskg::DomainError("both Cauchy moments must be positive");

    LargeDataReport rep;
    rep.redirect_to_positive_gamma = gamma >= 0.0;
    const double thr_c1 = std::sqrt(2.0 * delta0 / (q_eff + 1.0)) *
                          std::pow(moments.C0, 0.5 * (q_eff + 1.0));
    rep.margin_c1 = moments.C1 - thr_c1;
    const double thr_c0 =
        gamma * gamma * (q_eff + 1.0) / (delta0 * (q_eff - 1.0));
    rep.margin_c0 = std::pow(moments.C0, q_eff - 1.0) - thr_c0;
    rep.holds = rep.margin_c1 >= 0.0 && rep.margin_c0 > 0.0;
    return rep;
}

}  // namespace dskg::ode
