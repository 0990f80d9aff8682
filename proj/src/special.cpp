#include "dskg/special.hpp"

#include "dskg/errors.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

namespace dskg::special {

namespace {

constexpr long double kPi = 3.14159265358979323846264338327950288L;

bool near_nonpositive_integer(double x) {
    if (x > 0.5) return false;
    return std::abs(x - std::round(x)) < detail::kIntegerBand;
}

// sin(pi x) with argument reduction, stable for x far from 0.
long double sinpi(long double x) {
    long double r = std::fmod(x, 2.0L);
    if (r < 0.0L) r += 2.0L;
    if (r < 0.5L) return std::sin(kPi * r);
    if (r < 1.5L) return std::sin(kPi * (1.0L - r));
    return std::sin(kPi * (r - 2.0L));
}

struct SignedLogGamma {
    long double log_abs;
    int sign;
};

// log |Gamma(x)| and sign for any non-pole real x; reflection below 0.
SignedLogGamma signed_log_gamma(long double x) {
    if (x > 0.0L) return {std::lgamma(x), 1};
    // Gamma(x) = pi / (sin(pi x) Gamma(1 - x)), and Gamma(1 - x) > 0 here.
    const long double s = sinpi(x);
    if (s == 0.0L)
        throw DomainError("gamma pole at x = " + std::to_string(static_cast<double>(x)));
    return {std::log(kPi / std::abs(s)) - std::lgamma(1.0L - x),
            s > 0.0L ? 1 : -1};
}

long double digamma_ld(long double x) {
    long double acc = 0.0L;
    while (x < 16.0L) {
        acc -= 1.0L / x;
        x += 1.0L;
    }
    const long double inv = 1.0L / x;
    const long double inv2 = inv * inv;
    // Asymptotic series, Bernoulli coefficients.
    long double series = inv2 * (1.0L / 12.0L
                       - inv2 * (1.0L / 120.0L
                       - inv2 * (1.0L / 252.0L
                       - inv2 * (1.0L / 240.0L
                       - inv2 * (1.0L / 132.0L
                       - inv2 * (691.0L / 32760.0L))))));
    return acc + std::log(x) - 0.5L * inv - series;
}

// Direct Gauss series in long double with Kahan compensation. Works for any
// zeta in [0, 1) where it converges within the cap; terminates exactly when
// a or b is a non-positive integer.
long double series_ld(long double a, long double b, long double c, long double zeta,
                      bool* capped) {
    long double sum = 1.0L, comp = 0.0L, term = 1.0L;
    int tiny_run = 0;
    const long double eps = 1e-21L;
    for (int k = 0; k < detail::kMaxTerms; ++k) {
        if (term == 0.0L) {
            // Numerator terminated before any (c)_k pole could matter.
            if (capped) *capped = false;
            return sum;
        }
        const long double ck = c + k;
        if (ck == 0.0L)
            throw DomainError("hypergeometric series pole: c is a non-positive integer");
        term *= (a + k) * (b + k) / (ck * (k + 1)) * zeta;
        const long double y = term - comp;
        const long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (std::abs(term) <= eps * std::abs(sum)) {
            if (++tiny_run >= 2) {
                if (capped) *capped = false;
                return sum;
            }
        } else {
            tiny_run = 0;
        }
    }
    if (capped) {
        *capped = true;
        return sum;
    }
    throw NumericError("hypergeometric series hit the iteration cap",
                       static_cast<double>(sum),
                       std::numeric_limits<double>::quiet_NaN());
}

// AMS55 15.3.10 / 15.3.11: expansion in 1 - zeta when c - a - b is a
// non-negative integer m. Requires a, b away from non-positive integers.
long double log_case_ld(long double a, long double b, long double c, long double zeta,
                        int m) {
    const long double s = 1.0L - zeta;
    const long double logs = std::log(s);
    long double total = 0.0L;

    if (m > 0) {
        // Finite part.
        SignedLogGamma gc = signed_log_gamma(c);
        SignedLogGamma gam = signed_log_gamma(a + m);
        SignedLogGamma gbm = signed_log_gamma(b + m);
        const long double front = gc.sign * gam.sign * gbm.sign *
            std::exp(std::lgamma(static_cast<long double>(m)) + gc.log_abs -
                     gam.log_abs - gbm.log_abs);
        long double term = 1.0L, fin = 0.0L;
        for (int n = 0; n < m; ++n) {
            if (n > 0)
                term *= (a + n - 1) * (b + n - 1) / ((n - static_cast<long double>(m)) * n) * s;
            fin += term;
        }
        total += front * fin;
    }

    // Logarithmic part.
    SignedLogGamma gc = signed_log_gamma(c);
    SignedLogGamma ga = signed_log_gamma(a);
    SignedLogGamma gb = signed_log_gamma(b);
    const long double sign_m = (m % 2 == 0) ? 1.0L : -1.0L;
    const long double front = sign_m * gc.sign * ga.sign * gb.sign *
        std::exp(gc.log_abs - ga.log_abs - gb.log_abs - std::lgamma(static_cast<long double>(m + 1)));

    long double coeff = 1.0L;  // (a+m)_n (b+m)_n / (n! (m+1)_n), n = 0
    long double psum = 0.0L, pcomp = 0.0L;
    long double kn = digamma_ld(1.0L) + digamma_ld(static_cast<long double>(m + 1)) -
                     digamma_ld(a + m) - digamma_ld(b + m);
    const long double eps = 1e-21L;
    int tiny_run = 0;
    long double spow = std::pow(s, static_cast<long double>(m));
    for (int n = 0; n < detail::kMaxTerms; ++n) {
        if (n > 0) {
            coeff *= (a + m + n - 1) * (b + m + n - 1) /
                     (static_cast<long double>(n) * (m + n)) * s;
            kn += 1.0L / n + 1.0L / (m + n) - 1.0L / (a + m + n - 1) - 1.0L / (b + m + n - 1);
        }
        const long double term = coeff * (kn - logs);
        const long double y = term - pcomp;
        const long double t = psum + y;
        pcomp = (t - psum) - y;
        psum = t;
        if (std::abs(term) <= eps * std::abs(psum)) {
            if (++tiny_run >= 2) break;
        } else {
            tiny_run = 0;
        }
        if (n + 1 == detail::kMaxTerms)
            throw NumericError("hypergeometric log-case series hit the iteration cap",
                               static_cast<double>(total + front * spow * psum),
                               std::numeric_limits<double>::quiet_NaN());
    }
    total += front * spow * psum;
    return total;
}

// Generic two-series connection formula (AMS55 15.3.6), long double
// throughout to soften the cancellation as c - a - b nears an integer.
long double generic_connection_ld(long double a, long double b, long double c,
                                  long double zeta) {
    const long double d = c - a - b;
    const long double s = 1.0L - zeta;

    SignedLogGamma gc = signed_log_gamma(c);
    SignedLogGamma gd = signed_log_gamma(d);
    SignedLogGamma gca = signed_log_gamma(c - a);
    SignedLogGamma gcb = signed_log_gamma(c - b);
    const long double c1 = gc.sign * gd.sign * gca.sign * gcb.sign *
        std::exp(gc.log_abs + gd.log_abs - gca.log_abs - gcb.log_abs);

    SignedLogGamma gmd = signed_log_gamma(-d);
    SignedLogGamma ga = signed_log_gamma(a);
    SignedLogGamma gb = signed_log_gamma(b);
    const long double c2 = gc.sign * gmd.sign * ga.sign * gb.sign *
        std::exp(gc.log_abs + gmd.log_abs - ga.log_abs - gb.log_abs);

    const long double s1 = series_ld(a, b, 1.0L - d, s, nullptr);
    const long double s2 = series_ld(c - a, c - b, 1.0L + d, s, nullptr);
    return c1 * s1 + c2 * std::pow(s, d) * s2;
}

} // namespace

namespace detail {

double series_2f1(const HypParams& p, double zeta) {
    return static_cast<double>(series_ld(p.a, p.b, p.c, zeta, nullptr));
}

double connection_2f1(const HypParams& p, double zeta) {
    const long double a = p.a, b = p.b, c = p.c;
    const double d = p.c - p.a - p.b;
    const double id = std::round(d);
    if (std::abs(d - id) < kIntegerBand) {
        if (id >= 0.0)
            return static_cast<double>(log_case_ld(a, b, c, zeta, static_cast<int>(id)));
        // c - a - b a negative integer: Euler transformation flips its sign.
        const HypParams flipped{p.c - p.a, p.c - p.b, p.c};
        return std::pow(1.0 - zeta, d) * connection_2f1(flipped, zeta);
    }
    return static_cast<double>(generic_connection_ld(a, b, c, zeta));
}

} // namespace detail

double gauss_2f1(const HypParams& p, double zeta) {
    if (!(zeta >= 0.0 && zeta < 1.0))
        throw DomainError("gauss_2f1: zeta must lie in [0, 1), got " + std::to_string(zeta));
    if (near_nonpositive_integer(p.c)) {
        // Only admissible if the numerator terminates before the (c)_k pole.
        const bool a_saves = near_nonpositive_integer(p.a) && std::round(p.a) > std::round(p.c);
        const bool b_saves = near_nonpositive_integer(p.b) && std::round(p.b) > std::round(p.c);
        if (!a_saves && !b_saves)
            throw DomainError("gauss_2f1: c is a non-positive integer");
    }

    // Terminating series: valid for every zeta in [0, 1), no connection needed.
    if (near_nonpositive_integer(p.a) || near_nonpositive_integer(p.b))
        return detail::series_2f1(p, zeta);

    if (zeta <= detail::kSeriesSwitch) return detail::series_2f1(p, zeta);
    return detail::connection_2f1(p, zeta);
}

double log_gamma(double x) {
    if (!(x > 0.0))
        throw DomainError("log_gamma: x must be positive, got " + std::to_string(x));
    return std::lgamma(x);
}

double digamma(double x) {
    if (!(x > 0.0))
        throw DomainError("digamma: x must be positive, got " + std::to_string(x));
    return static_cast<double>(digamma_ld(static_cast<long double>(x)));
}

double sinhc(double x) {
    const double ax = std::abs(x);
    if (ax < 1e-4) {
        const double x2 = x * x;
        return 1.0 + x2 / 6.0 * (1.0 + x2 / 20.0);
    }
    return std::sinh(x) / x;
}

} // namespace dskg::special
