#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "doctest.h"
#include "dskg/errors.hpp"
#include "dskg/goperator.hpp"
#include "dskg/semilinear.hpp"

using namespace dskg::pde;
using dskg::ode::GammaSchedule;
using dskg::ode::Outcome;

namespace {

// Shared small configuration for the fixed-point backend tests.
const PhysicalParams kParams = PhysicalParams::from_curved_mass(1, 0.4, 2.0, 0.0);
const Grid1D kGrid{-1.7, 1.7, 69, 0.025, 0.2};
const DataSpec kData{0.5, 0.6, 0.3};

const LinearRun& shared_linear_run() {
    static const LinearRun run = solve_linear_levels(kData, kGrid, kParams);
    return run;
}

double sup_level_diff(const std::vector<std::vector<double>>& a,
                      const std::vector<std::vector<double>>& b) {
    REQUIRE(a.size() == b.size());
    double d = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        REQUIRE(a[j].size() == b[j].size());
        for (std::size_t i = 0; i < a[j].size(); ++i)
            d = std::max(d, std::abs(a[j][i] - b[j][i]));
    }
    return d;
}

}  // namespace

TEST_CASE("physical parameter factories and validation") {
    const auto pm = PhysicalParams::from_mass(1, 0.3, 2.0, 0.0);
    CHECK(pm.M == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(pm.q_eff() == doctest::Approx(2.0).epsilon(1e-15));

    const auto pm2 = PhysicalParams::from_mass(2, 0.6, 2.0, 0.5);
    CHECK(pm2.M == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(pm2.q_eff() == doctest::Approx(3.0).epsilon(1e-15));

    const auto pc = PhysicalParams::from_curved_mass(1, 0.4, 2.0, 0.0);
    CHECK(pc.m == doctest::Approx(0.3).epsilon(1e-14));

    CHECK_THROWS_AS(PhysicalParams::from_mass(1, 0.6, 2.0, 0.0),
                    dskg::DomainError);  // m > n/2
    CHECK_THROWS_AS(PhysicalParams::from_curved_mass(1, 0.6, 2.0, 0.0),
                    dskg::DomainError);  // M > n/2
    CHECK_THROWS_AS(PhysicalParams::from_mass(1, 0.3, 1.0, 0.0),
                    dskg::ConfigError);  // p must exceed 1
    CHECK_THROWS_AS(PhysicalParams::from_mass(1, 0.3, 2.0, -0.6),
                    dskg::ConfigError);  // q_eff = 0.8

    PhysicalParams bad = pm;
    bad.M = 0.5;  // inconsistent with m = 0.3, n = 1
    CHECK_THROWS_AS(bad.validate(), dskg::ConfigError);
}

TEST_CASE("grid validation and refinement") {
    Grid1D g{-2.0, 2.0, 401, 0.005, 1.0};
    CHECK(g.dx() == doctest::Approx(0.01).epsilon(1e-14));
    CHECK_NOTHROW(g.validate());
    CHECK_NOTHROW(g.validate_for_data(0.9));
    CHECK_THROWS_AS(g.validate_for_data(1.1), dskg::ConfigError);  // cone leaves box

    const Grid1D r = g.refined();
    CHECK(r.nx == 801);
    CHECK(r.dt == doctest::Approx(0.0025).epsilon(1e-15));
    CHECK(r.dx() == doctest::Approx(0.005).epsilon(1e-14));
    CHECK(r.t_max == g.t_max);

    Grid1D cfl = g;
    cfl.dt = 0.006;  // > dx/2
    CHECK_THROWS_AS(cfl.validate(), dskg::ConfigError);
    Grid1D tiny = g;
    tiny.nx = 7;
    CHECK_THROWS_AS(tiny.validate(), dskg::ConfigError);
    Grid1D flipped = g;
    flipped.x_max = flipped.x_min;
    CHECK_THROWS_AS(flipped.validate(), dskg::ConfigError);
    Grid1D still = g;
    still.dt = 0.0;
    CHECK_THROWS_AS(still.validate(), dskg::ConfigError);
}

TEST_CASE("exponential weight transforms") {
    PhysicalParams params = PhysicalParams::from_mass(2, 0.6, 2.0, 0.0);
    const std::vector<double> phi{0.5, -1.25, 3.0};

    const auto u0 = transform_phi_to_u(phi, 0.0, params);
    for (std::size_t i = 0; i < phi.size(); ++i) CHECK(u0[i] == phi[i]);

    // n = 2, t = 1: u = e^{n t / 2} phi = e phi.
    const auto u1 = transform_phi_to_u(phi, 1.0, params);
    for (std::size_t i = 0; i < phi.size(); ++i)
        CHECK(u1[i] == doctest::Approx(std::exp(1.0) * phi[i]).epsilon(1e-15));

    const auto back = transform_u_to_phi(u1, 1.0, params);
    for (std::size_t i = 0; i < phi.size(); ++i)
        CHECK(back[i] == doctest::Approx(phi[i]).epsilon(1e-14));
}

TEST_CASE("bump profile hits its prescribed moment exactly") {
    const Grid1D g{-1.7, 1.7, 69, 0.02, 1.0};
    for (double target : {1.0, -0.35, 2.7}) {
        const auto u = bump_profile(g, 0.5, target);
        double acc = 0.0;
        for (int i = 0; i < g.nx; ++i) {
            const double w = (i == 0 || i == g.nx - 1) ? 0.5 : 1.0;
            acc += w * u[i];
        }
        CHECK(acc * g.dx() == doctest::Approx(target).epsilon(1e-13));
        for (int i = 0; i < g.nx; ++i)
            if (std::abs(g.x(i)) >= 0.5) CHECK(u[i] == 0.0);
        // even profile on the symmetric grid
        CHECK(u[20] == doctest::Approx(u[48]).epsilon(1e-15));
    }
    const auto z = bump_profile(g, 0.5, 0.0);
    for (double v : z) CHECK(v == 0.0);
}

TEST_CASE("trapezoid moments of a hand-built vector") {
    const std::vector<double> u{0.0, -1.0, 2.0, 0.0};
    const double dx = 0.5;
    const auto m2 = moments(u, dx, 2.0);
    CHECK(m2.F == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m2.Pp == doctest::Approx(2.5).epsilon(1e-15));
    const auto m3 = moments(u, dx, 3.0);
    CHECK(m3.Pp == doctest::Approx(4.5).epsilon(1e-14));  // |.|^3 keeps signs out
}

TEST_CASE("support radius thresholding") {
    const Grid1D g{-1.0, 1.0, 9, 0.1, 1.0};  // dx = 0.25
    std::vector<double> u(9, 0.0);
    CHECK(support_radius(u, g) == 0.0);
    u[1] = 1e-13;  // x = -0.75
    CHECK(support_radius(u, g) == doctest::Approx(0.875).epsilon(1e-14));
    u[1] = 1e-15;  // below the floor
    CHECK(support_radius(u, g) == 0.0);
}

TEST_CASE("first time level matches the quadratic Taylor start") {
    const Grid1D g{-1.7, 1.7, 69, 0.02, 0.2};
    const DataSpec data{0.5, 0.6, 0.3};
    const auto u0 = bump_profile(g, data.R0, data.C0);
    const auto v0 = bump_profile(g, data.R0, data.C1);
    const double dt = g.dt;
    const double c2 = 1.0 / (g.dx() * g.dx());  // e^{-2 t} = 1 at t = 0

    SUBCASE("zero coupling") {
        const auto st = make_initial_state(data, g, kParams, std::nullopt);
        CHECK(st.t == doctest::Approx(dt).epsilon(1e-15));
        CHECK(st.R_data == data.R0);
        for (int i = 1; i + 1 < g.nx; ++i) {
            const double lap = c2 * (u0[i - 1] - 2.0 * u0[i] + u0[i + 1]);
            const double expect =
                u0[i] + dt * v0[i] +
                0.5 * dt * dt * (lap + kParams.M * kParams.M * u0[i]);
            CHECK(st.u_curr[i] == doctest::Approx(expect).epsilon(1e-12));
        }
    }
    SUBCASE("constant coupling enters the start level") {
        const Coupling gam = GammaSchedule::power_exp(2.0, 0.0, 0.0);
        const auto st = make_initial_state(data, g, kParams, gam);
        for (int i = 1; i + 1 < g.nx; ++i) {
            const double lap = c2 * (u0[i - 1] - 2.0 * u0[i] + u0[i + 1]);
            const double expect =
                u0[i] + dt * v0[i] +
                0.5 * dt * dt *
                    (lap + kParams.M * kParams.M * u0[i] + 2.0 * u0[i] * u0[i]);
            CHECK(st.u_curr[i] == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("zero data stays identically zero") {
    const Grid1D g{-2.2, 2.2, 221, 0.01, 1.0};
    const auto run = solve_fd({1.0, 0.0, 0.0}, g, kParams, std::nullopt);
    CHECK(run.outcome == Outcome::alive_at);
    for (const auto& row : run.history) {
        CHECK(row.F == 0.0);
        CHECK(row.Pp == 0.0);
        CHECK(row.u_max == 0.0);
        CHECK(row.R == 0.0);
    }
}

TEST_CASE("linear total moment follows the hyperbolic closed form") {
    // With zero coupling, F(t) = C0 cosh(M t) + C1 sinh(M t) / M.
    const auto params = PhysicalParams::from_curved_mass(1, 0.5, 2.0, 0.0);
    const Grid1D g{-2.2, 2.2, 441, 0.005, 2.0};
    const DataSpec data{1.0, 1.0, 0.7};
    auto max_err = [&](const RunResult& run) {
        double err = 0.0;
        for (const auto& row : run.history) {
            const double exact = data.C0 * std::cosh(params.M * row.t) +
                                 data.C1 * std::sinh(params.M * row.t) / params.M;
            err = std::max(err, std::abs(row.F - exact));
        }
        return err;
    };
    const auto run = solve_fd(data, g, params, std::nullopt);
    CHECK(run.outcome == Outcome::alive_at);
    const double err = max_err(run);
    CHECK(err <= 1e-4);  // observed 3.3e-5 at dx = 0.01
    const double err_fine = max_err(solve_fd(data, g.refined(), params, std::nullopt));
    CHECK(err_fine <= err / 4.0);  // observed ratio 25
    CHECK(verify_moment_law(run.history, params, std::nullopt) <= 1e-3);
    CHECK(support_causality_check(run.history, data.R0, g.dx()));
    CHECK(holder_lower_bound_check(run.history, params));
}

TEST_CASE("zero-coupling evolution is linear in the data") {
    const Grid1D g{-1.7, 1.7, 69, 0.02, 0.5};
    const auto r1 = solve_fd({0.5, 0.6, 0.3}, g, kParams, std::nullopt);
    const auto r2 = solve_fd({0.5, 1.2, 0.6}, g, kParams, std::nullopt);
    REQUIRE(r1.history.size() == r2.history.size());
    for (std::size_t j = 0; j < r1.history.size(); ++j)
        CHECK(r2.history[j].F ==
              doctest::Approx(2.0 * r1.history[j].F).epsilon(1e-12));
}

TEST_CASE("moment law residual drops at second order under refinement") {
    const auto params = PhysicalParams::from_mass(1, 0.3, 2.0, 0.0);
    const DataSpec data{1.0, 0.5, 0.25};
    const Coupling gam = GammaSchedule::power_exp(1.0, -0.4, 1.0);
    const Grid1D coarse{-2.2, 2.2, 1101, 0.002, 2.0};

    const auto run0 = solve_fd(data, coarse, params, gam);
    const auto run1 = solve_fd(data, coarse.refined(), params, gam);
    REQUIRE(run0.outcome == Outcome::alive_at);
    REQUIRE(run1.outcome == Outcome::alive_at);
    const double res0 = verify_moment_law(run0.history, params, gam);
    const double res1 = verify_moment_law(run1.history, params, gam);
    CHECK(res0 <= 1e-5);         // observed 3.0e-6
    CHECK(res1 <= res0 / 3.2);   // observed ratio 4.0
}

TEST_CASE("moment law needs a few interior rows") {
    const Grid1D g{-1.7, 1.7, 69, 0.02, 0.06};  // four time levels only
    const auto run = solve_fd(kData, g, kParams, std::nullopt);
    CHECK(run.history.size() == 4);
    CHECK(verify_moment_law(run.history, kParams, std::nullopt) == 0.0);
}

TEST_CASE("support stays inside the shrinking influence cone") {
    const Grid1D g{-2.2, 2.2, 221, 0.01, 2.0};
    const DataSpec data{1.0, 1.0, 0.5};
    const auto run = solve_fd(data, g, kParams, std::nullopt, 50);
    CHECK(support_causality_check(run.history, data.R0, g.dx()));

    // Kept levels vanish exactly beyond the cone radius.
    REQUIRE(!run.levels.empty());
    const double t_last = run.times.back();
    const double reach = data.R0 + 1.0 - std::exp(-t_last);
    for (int i = 0; i < g.nx; ++i)
        if (std::abs(g.x(i)) > reach) CHECK(run.levels.back()[i] == 0.0);

    // A doctored radius column must be flagged.
    auto broken = run.history;
    broken[broken.size() / 2].R = data.R0 + 1.0 + 10.0 * g.dx();
    CHECK_FALSE(support_causality_check(broken, data.R0, g.dx()));
}

TEST_CASE("interpolation lower bound: sharpness and falsification") {
    // A flat box of height c on [-R, R] makes |F|^p = (2R)^{p-1} Pp exactly.
    std::vector<TraceRow> box(1);
    box[0] = {0.0, 1.0, 0.0, 1.0, 0.5, 1.0};  // F = 1, Pp = 1, R = 0.5
    PhysicalParams p2 = kParams;
    CHECK(holder_lower_bound_check(box, p2));            // equality case
    CHECK_FALSE(holder_lower_bound_check(box, p2, 0.999));  // any shrink breaks it

    const Grid1D g{-1.7, 1.7, 69, 0.02, 0.5};
    const auto run = solve_fd(kData, g, kParams, std::nullopt);
    CHECK(holder_lower_bound_check(run.history, kParams));
    CHECK_FALSE(holder_lower_bound_check(run.history, kParams, 0.5));
}

TEST_CASE("two-grid classification pins a finite-time blow-up") {
    const auto params = PhysicalParams::from_mass(1, 0.3, 2.0, 0.0);
    const DataSpec data{1.0, 1e-2, 1e-2};
    const Coupling gam = GammaSchedule::power_exp(1.0, -0.4, 3.0);
    const Grid1D g{-2.2, 2.2, 221, 0.01, 7.0};

    const auto cls = classify_two_grid(data, g, params, gam);
    REQUIRE(cls.outcome == Outcome::blowup);
    REQUIRE(cls.T_est.has_value());
    REQUIRE(cls.T_err.has_value());
    CHECK(*cls.T_est > 5.5);
    CHECK(*cls.T_est < 6.3);
    CHECK(*cls.T_err <= 0.05);  // observed 0.01
    CHECK(cls.coarse.outcome == Outcome::blowup);
    CHECK(cls.fine.outcome == Outcome::blowup);
    CHECK(holder_lower_bound_check(cls.coarse.history, params));
    CHECK(support_causality_check(cls.coarse.history, data.R0, g.dx()));
    CHECK(holder_lower_bound_check(cls.fine.history, params));
    CHECK(support_causality_check(cls.fine.history, data.R0, cls.fine.dx));
}

TEST_CASE("run CSV layout") {
    const Grid1D g{-1.7, 1.7, 69, 0.02, 0.1};
    const auto run = solve_fd(kData, g, kParams, std::nullopt);
    const std::string csv = run_csv(run);
    CHECK(csv.rfind("t,F,Fdot_est,Pp,R,max_abs_u\r\n", 0) == 0);
    std::size_t lines = 0, pos = 0;
    while ((pos = csv.find("\r\n", pos)) != std::string::npos) {
        ++lines;
        pos += 2;
    }
    CHECK(lines == run.history.size() + 1);
    // First data row starts at t = 0 and carries six numeric fields.
    const std::size_t r0 = csv.find("\r\n") + 2;
    const std::string row = csv.substr(r0, csv.find("\r\n", r0) - r0);
    double t, F, Fd, Pp, R, um;
    CHECK(std::sscanf(row.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &t, &F, &Fd, &Pp,
                      &R, &um) == 6);
    CHECK(t == 0.0);
    CHECK(F == doctest::Approx(kData.C0).epsilon(1e-12));
}

TEST_CASE("snapshot cadence matches the requested stride") {
    const Grid1D g{-1.7, 1.7, 69, 0.02, 0.2};
    const auto run = solve_fd(kData, g, kParams, std::nullopt, 2);
    REQUIRE(run.times.size() == run.levels.size());
    REQUIRE(run.times.size() >= 3);
    CHECK(run.times[0] == 0.0);
    CHECK(run.times[1] == doctest::Approx(2.0 * g.dt).epsilon(1e-15));
    const auto m = moments(run.levels[1], g.dx(), kParams.p);
    CHECK(m.F == doctest::Approx(run.history[2].F).epsilon(1e-15));
}

TEST_CASE("fixed-point backend reproduces the linear run at zero coupling") {
    const LinearRun& u0 = shared_linear_run();
    const auto pic = solve_picard(u0, kParams, std::nullopt);
    CHECK(pic.outcome == Outcome::alive_at);
    REQUIRE(pic.levels.size() == u0.levels.size());
    CHECK(sup_level_diff(pic.levels, u0.levels) == 0.0);
}

TEST_CASE("weak coupling: first-order source correction and linear scaling") {
    const LinearRun& u0 = shared_linear_run();
    PicardOptions opts;
    opts.window = 0.2;
    const auto pa =
        solve_picard(u0, kParams, GammaSchedule::power_exp(1e-3, 0.0, 0.0), opts);
    const auto pb =
        solve_picard(u0, kParams, GammaSchedule::power_exp(2e-3, 0.0, 0.0), opts);
    const double da = sup_level_diff(pa.levels, u0.levels);
    const double db = sup_level_diff(pb.levels, u0.levels);
    CHECK(da > 5e-6);
    CHECK(da < 8e-5);  // observed 1.9e-5
    CHECK(db / da == doctest::Approx(2.0).epsilon(0.03));

    // The correction agrees with one Duhamel application of the frozen source.
    const int J = static_cast<int>(u0.levels.size()) - 1;
    const int nx = kGrid.nx;
    std::vector<double> src(static_cast<std::size_t>(J + 1) * nx);
    for (int j = 0; j <= J; ++j)
        for (int i = 0; i < nx; ++i)
            src[static_cast<std::size_t>(j) * nx + i] =
                1e-3 * u0.levels[j][i] * u0.levels[j][i];
    dskg::gop::GridSource1D source(kGrid.x_min, kGrid.dx(), nx, 0.0, kGrid.dt,
                                   J + 1, src);
    const auto field = source.field();
    const int probes[][2] = {{36, 8}, {40, 6}, {30, 4}};
    for (const auto& pr : probes) {
        const int i = pr[0], j = pr[1];
        const double first = dskg::gop::apply_G_1d(field, kGrid.x(i),
                                                   j * kGrid.dt, kParams.M, 1e-9);
        const double actual = pa.levels[j][i] - u0.levels[j][i];
        CHECK(actual == doctest::Approx(first).epsilon(1e-3));  // observed 2e-5
    }
}

TEST_CASE("fixed-point and finite-difference backends agree") {
    const LinearRun& u0 = shared_linear_run();
    const Coupling gam = GammaSchedule::power_exp(0.5, -0.5, 0.0);
    PicardOptions opts;
    opts.window = 0.2;
    opts.g_tol = 1e-6;
    const auto pic = solve_picard(u0, kParams, gam, opts);
    const auto fd = solve_fd(kData, kGrid, kParams, gam, 1);
    REQUIRE(pic.outcome == Outcome::alive_at);
    const double signal = sup_level_diff(pic.levels, u0.levels);
    const double dev = sup_level_diff(pic.levels, fd.levels);
    CHECK(signal > 5e-3);  // the coupling visibly moves the solution
    CHECK(dev <= 1e-4);    // observed 2.2e-5
}
