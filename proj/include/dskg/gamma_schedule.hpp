#pragma once

#include <optional>

namespace dskg::ode {

enum class ScheduleKind { power_exp, pure_exp, kato_power };
enum class Monotonicity { nondecreasing, nonincreasing, mixed };

// Time weight Gamma(t) drawn from one of three parametric families:
//   power_exp(c, d0, d1): c (1+t)^{d1} e^{d0 t}      on t >= 0
//   pure_exp(gamma):      e^{gamma t}                on t >= 0
//   kato_power(c, q):     c t^{-1-q}                 on t > 0
struct GammaSchedule {
    ScheduleKind kind;
    double c = 1.0;
    double d0 = 0.0;
    double d1 = 0.0;
    double gamma = 0.0;
    double q = 0.0;

    static GammaSchedule power_exp(double c, double d0, double d1);
    static GammaSchedule pure_exp(double gamma);
    static GammaSchedule kato_power(double c, double q);

    double operator()(double t) const;

    Monotonicity monotonicity() const;
    // First time from which the schedule is nonincreasing forever, if any.
    std::optional<double> nonincreasing_from() const;

    // Integral of sqrt(Gamma) over [a, b]; closed form for pure_exp and
    // kato_power, adaptive quadrature for power_exp.
    double sqrt_integral(double a, double b) const;
};

}  // namespace dskg::ode
