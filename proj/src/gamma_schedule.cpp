#include "dskg/gamma_schedule.hpp"

#include <cmath>

#include "dskg/errors.hpp"
#include "dskg/quadrature.hpp"

namespace dskg::ode {

GammaSchedule GammaSchedule::power_exp(double c, double d0, double d1) {
    if (!(c > 0.0)) throw dskg::ConfigError("power_exp amplitude must be positive");
    if (!std::isfinite(d0) || !std::isfinite(d1))
        throw dskg::ConfigError("power_exp exponents must be finite");
    GammaSchedule g;
    g.kind = ScheduleKind::power_exp;
    g.c = c;
    g.d0 = d0;
    g.d1 = d1;
    return g;
}

GammaSchedule GammaSchedule::pure_exp(double gamma) {
    if (!std::isfinite(gamma)) throw dskg::ConfigError("pure_exp rate must be finite");
    GammaSchedule g;
    g.kind = ScheduleKind::pure_exp;
    g.gamma = gamma;
    return g;
}

GammaSchedule GammaSchedule::kato_power(double c, double q) {
    if (!(c > 0.0)) throw dskg::ConfigError("kato_power amplitude must be positive");
    if (!std::isfinite(q)) throw dskg::ConfigError("kato_power exponent must be finite");
    GammaSchedule g;
    g.kind = ScheduleKind::kato_power;
    g.c = c;
    g.q = q;
    return g;
}

double GammaSchedule::operator()(double t) const {
    switch (kind) {
        case ScheduleKind::power_exp:
            if (!(t >= 0.0)) throw dskg::DomainError("schedule defined for t >= 0");
            return c * std::pow(1.0 + t, d1) * std::exp(d0 * t);
        case ScheduleKind::pure_exp:
            if (!(t >= 0.0)) throw dskg::DomainError("schedule defined for t >= 0");
            return std::exp(gamma * t);
        case ScheduleKind::kato_power:
            if (!(t > 0.0)) throw dskg::DomainError("kato_power defined for t > 0");
            return c * std::pow(t, -1.0 - q);
    }
    throw dskg::ConfigError("unknown schedule kind");
}

Monotonicity GammaSchedule::monotonicity() const {
    switch (kind) {
        case ScheduleKind::power_exp: {
            // Gamma' sign follows d0 (1+t) + d1 on t >= 0.
            if (d0 == 0.0)
                return d1 >= 0.0 ? Monotonicity::nondecreasing
                                 : Monotonicity::nonincreasing;
            if (d0 > 0.0)
                return d0 + d1 >= 0.0 ? Monotonicity::nondecreasing
                                      : Monotonicity::mixed;
            return d0 + d1 <= 0.0 ? Monotonicity::nonincreasing : Monotonicity::mixed;
        }
        case ScheduleKind::pure_exp:
            return gamma >= 0.0 ? Monotonicity::nondecreasing
                                : Monotonicity::nonincreasing;
        case ScheduleKind::kato_power:
            return q >= -1.0 ? Monotonicity::nonincreasing : Monotonicity::nondecreasing;
    }
    throw dskg::ConfigError("unknown schedule kind");
}

std::optional<double> GammaSchedule::nonincreasing_from() const {
    switch (monotonicity()) {
        case Monotonicity::nonincreasing:
            return 0.0;
        case Monotonicity::nondecreasing:
            // Constant schedules count as nonincreasing as well.
            if (kind == ScheduleKind::pure_exp && gamma == 0.0) return 0.0;
            if (kind == ScheduleKind::power_exp && d0 == 0.0 && d1 == 0.0) return 0.0;
            return std::nullopt;
        case Monotonicity::mixed:
            if (kind == ScheduleKind::power_exp && d0 < 0.0)
                return -d1 / d0 - 1.0;  // root of d0 (1+t) + d1
            return std::nullopt;
    }
    return std::nullopt;
}

double GammaSchedule::sqrt_integral(double a, double b) const {
    const double t_floor = kind == ScheduleKind::kato_power ? 0.0 : -0.0;
    if (!(a >= 0.0) || !(b >= a)) throw dskg::DomainError("need 0 <= a <= b");
    if (kind == ScheduleKind::kato_power && !(a > t_floor))
        throw dskg::DomainError("kato_power defined for t > 0");
    if (a == b) return 0.0;
    switch (kind) {
        case ScheduleKind::pure_exp: {
            if (gamma == 0.0) return b - a;
            const double h = 0.5 * gamma;
            return (std::exp(h * b) - std::exp(h * a)) / h;
        }
        case ScheduleKind::kato_power: {
            const double e = 0.5 * (1.0 - q);  // exponent of t in the antiderivative
            const double sc = std::sqrt(c);
            if (q == 1.0) return sc * std::log(b / a);
            return sc * (std::pow(b, e) - std::pow(a, e)) / e;
        }
        case ScheduleKind::power_exp: {
            auto f = [this](double s) { return std::sqrt((*this)(s)); };
            const double rough = dskg::gauss_legendre_15(f, a, b);
            const auto res = dskg::adaptive_gauss_legendre(
                f, a, b, 1e-11 * (1.0 + std::abs(rough)));
            return res.value;
        }
    }
    throw dskg::ConfigError("unknown schedule kind");
}

}  // namespace dskg::ode
