#pragma once

// Independent reference implementations used only to derive expected test
// values. Each uses a different method from the production code so that
// agreement is meaningful: AGM for the complete elliptic integral, a
// long-capacity positive-term series in extended precision, a tanh-sinh
// Euler integral, and a Spouge expansion for log-gamma.

#include <cmath>
#include <functional>

namespace oracles {

// Arithmetic-geometric mean.
inline double agm(double a, double b) {
    for (int i = 0; i < 64 && std::abs(a - b) > 1e-17 * (std::abs(a) + std::abs(b)); ++i) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return 0.5 * (a + b);
}

// F(1/2, 1/2; 1; m) = (2/pi) K(sqrt(m)) = 1 / AGM(1, sqrt(1 - m)).
inline double elliptic_2f1(double m) {
    return 1.0 / agm(1.0, std::sqrt(1.0 - m));
}

// Plain Gauss series in long double with a generous cap. All terms of the
// kernel family (a = b) are non-negative, so no cancellation occurs and the
// partial sums are accurate to roughly the long double epsilon.
inline long double brute_series_2f1(long double a, long double b, long double c,
                                    long double z, int cap = 4000000) {
    long double sum = 1.0L, term = 1.0L, comp = 0.0L;
    for (int k = 0; k < cap; ++k) {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z;
        const long double y = term - comp;
        const long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (std::abs(term) < 1e-24L * std::abs(sum)) break;
    }
    return sum;
}

// Tanh-sinh quadrature of f(t, 1 - t) over (0, 1); handles algebraic
// endpoint singularities. f receives both t and 1 - t so that endpoint
// factors can be formed without cancellation.
inline long double tanh_sinh_01(const std::function<long double(long double, long double)>& f) {
    const long double pi_half = 1.57079632679489661923L;
    long double best = 0.0L;
    long double prev = 0.0L;
    const long double umax = 6.0L;
    for (int level = 4; level <= 13; ++level) {
        const long double h = umax / std::pow(2.0L, level);
        long double sum = 0.0L;
        const int nmax = static_cast<int>(umax / h);
        for (int i = -nmax; i <= nmax; ++i) {
            const long double u = i * h;
            const long double s = pi_half * std::sinh(u);
            const long double t = 1.0L / (1.0L + std::exp(-2.0L * s));
            const long double one_minus_t = 1.0L / (1.0L + std::exp(2.0L * s));
            const long double sech = 1.0L / std::cosh(s);
            const long double w = pi_half * std::cosh(u) * 0.5L * sech * sech;
            if (w == 0.0L || t == 0.0L || one_minus_t == 0.0L) continue;
            const long double contrib = w * f(t, one_minus_t);
            if (std::isfinite(static_cast<double>(contrib))) sum += contrib;
        }
        best = sum * h;
        if (level > 6 && std::abs(best - prev) < 1e-17L * std::abs(best)) break;
        prev = best;
    }
    return best;
}

// Spouge's approximation for log Gamma, long double, x > 0:
// Gamma(z + 1) = (z + a)^(z + 1/2) e^(-z - a) (c0 + sum c_k / (z + k)).
inline long double spouge_log_gamma(long double x) {
    const int a = 17;
    const long double sqrt_two_pi = 2.50662827463100050242L;
    const long double z = x - 1.0L;
    long double acc = sqrt_two_pi;
    long double fact = 1.0L;
    for (int k = 1; k < a; ++k) {
        const long double ak = static_cast<long double>(a - k);
        const long double ck = std::pow(ak, k - 0.5L) * std::exp(ak) / fact;
        acc += ((k % 2 == 1) ? ck : -ck) / (z + k);
        fact *= k;
    }
    return std::log(acc) + (z + 0.5L) * std::log(z + a) - (z + a);
}

// Euler integral for F(a, b; c; z), valid for c > b > 0, z in [0, 1).
inline long double euler_2f1(long double a, long double b, long double c, long double z) {
    const long double front = std::exp(spouge_log_gamma(c) - spouge_log_gamma(b) -
                                       spouge_log_gamma(c - b));
    auto f = [&](long double t, long double omt) {
        return std::pow(t, b - 1.0L) * std::pow(omt, c - b - 1.0L) *
               std::pow(1.0L - z * t, -a);
    };
    return front * tanh_sinh_01(f);
}

} // namespace oracles
