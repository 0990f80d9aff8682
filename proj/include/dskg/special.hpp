#pragma once

namespace dskg::special {

// Parameters of the Gauss hypergeometric function F(a, b; c; zeta).
// The kernel family has a = b = 1/2 - M, c = 1; other real parameters are
// accepted but only that family is tuned and tested.
struct HypParams {
    double a;
    double b;
    double c;
};

// F(a, b; c; zeta) on zeta in [0, 1). Direct series below the switch point,
// a 1 - zeta connection formula above it, with dedicated handling when
// c - a - b is (nearly) an integer. Relative accuracy target 1e-12 for the
// kernel family. Throws DomainError for zeta outside [0, 1) or c a
// non-positive integer; NumericError if the iteration cap is hit.
double gauss_2f1(const HypParams& p, double zeta);

// log Gamma(x) for x > 0; DomainError otherwise.
double log_gamma(double x);

// digamma(x) for x > 0; recurrence plus asymptotic series.
double digamma(double x);

// sinh(x)/x, series near 0 so the x -> 0 limit is exact.
double sinhc(double x);

namespace detail {

// Branch entry points, exposed so tests can check continuity at the switch
// point between them.
double series_2f1(const HypParams& p, double zeta);
double connection_2f1(const HypParams& p, double zeta);

// Series switch point and the band around integer c - a - b where the
// generic connection formula would divide 0 by 0.
inline constexpr double kSeriesSwitch = 0.75;
inline constexpr double kIntegerBand = 1e-8;
inline constexpr int kMaxTerms = 10000;

} // namespace detail

} // namespace dskg::special
