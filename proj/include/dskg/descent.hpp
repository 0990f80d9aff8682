#pragma once

#include <array>
#include <functional>
#include <vector>

namespace dskg::descent {

// Sphere area, ball volume and the descent normalization constant for a
// fixed spatial dimension n >= 1.
struct DimensionConstants {
    int n;
    double omega;  // area of the unit sphere S^{n-1}
    double c0;     // descent normalization; parity-dependent
    double tau;    // volume of the unit n-ball, omega / n

    explicit DimensionConstants(int n);
};

// Scalar field on R^n, n <= 3; components beyond the active dimension are 0.
using Field = std::function<double(const std::array<double, 3>&)>;

// Radial function g(r), r >= 0, carrying either exact polynomial
// coefficients or a callable with a declared number of usable derivatives.
// Polynomial algebra is exact; callable derivatives use 4th-order finite
// differences with step 1e-4 * (1 + r).
class RadialProfile {
  public:
    static RadialProfile polynomial(std::vector<double> coeffs);
    static RadialProfile constant(double c);
    static RadialProfile callable(std::function<double(double)> f, int smoothness);

    double operator()(double r) const;
    RadialProfile derivative() const;
    RadialProfile over_r() const;
    RadialProfile times_power(int k) const;
    RadialProfile scaled(double s) const;

    bool is_polynomial() const { return poly_; }
    // Remaining derivative budget (large for polynomials).
    int smoothness() const { return smooth_; }

  private:
    RadialProfile() = default;

    bool poly_ = false;
    std::vector<double> coeffs_;  // ascending powers; valid when poly_
    std::function<double(double)> fn_;
    int smooth_ = 0;
};

// Unnormalized sphere integral of f over the sphere of radius r about x.
// Supported n: 1 (two-point sum), 2 (trapezoid), 3 (Gauss-Legendre x
// trapezoid product rule).
double spherical_mean(const Field& f, const std::array<double, 3>& x, double r,
                      const DimensionConstants& dims);

// Weighted unit-ball integral of f(x + r y) / sqrt(1 - |y|^2), n = 2 only.
double ball_weighted_integral(const Field& f, const std::array<double, 3>& x,
                              double r, const DimensionConstants& dims);

// d/dr (r^{-1} d/dr)^{(n-3)/2} [ r^{n-2} g(r) / (omega * c0) ], n odd >= 3.
double odd_descent(const RadialProfile& g, double r, const DimensionConstants& dims);

// d/dr (r^{-1} d/dr)^{(n-2)/2} [ 2 r^{n-1} h(r) / (omega * c0) ], n even >= 2.
double even_descent(const RadialProfile& h, double r, const DimensionConstants& dims);

// Value at radius r of the free-wave solution with data (f, 0); n in {1, 3}.
double wave_mean(const Field& f, const std::array<double, 3>& x, double r,
                 const DimensionConstants& dims);

enum class IdentityCase { i, ii, iii, corollary_i, corollary_ii, corollary_iii };

// Residual |numeric integral - sinh(M (t - b)) / M| for the integral
// representation selected by the case tag (corollary cases require M = 0 and
// target t - b). Dimension parity must match the case.
double identity_check(IdentityCase which, double M, double b, double t,
                      const DimensionConstants& dims, double tol);

}  // namespace dskg::descent
