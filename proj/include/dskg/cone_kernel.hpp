#pragma once

#include "dskg/quadrature.hpp"

namespace dskg::cone {

// Curved mass: M^2 = n^2/4 - m^2 >= 0 in the small-mass regime.
struct CurvedMass {
    double M;

    explicit CurvedMass(double M_);

    static CurvedMass from_physical(int n, double m);
};

// Cone radius reachable from emission time b when observed at time t:
// e^{-b} - e^{-t}. Requires 0 <= b <= t.
double horizon_radius(double b, double t);

// A point of the backward light cone: emission time b, observation time t,
// spatial offset radius r with 0 <= r <= horizon_radius(b, t).
struct ConePoint {
    double b;
    double t;
    double r;

    ConePoint(double b_, double t_, double r_);
};

// Kernel density
//   (4 e^{-b-t})^{-M} ((e^{-t} + e^{-b})^2 - r^2)^{-1/2 + M}
//     * F(1/2 - M, 1/2 - M; 1; zeta),
//   zeta = ((e^{-b} - e^{-t})^2 - r^2) / ((e^{-b} + e^{-t})^2 - r^2).
double kernel_eval(const CurvedMass& M, const ConePoint& pt);

// Cone cross-section argument zeta at the given point; in [0, 1).
double kernel_argument(const ConePoint& pt);

// integral over z in [-h, h] of the kernel at radius |z|, h the horizon
// radius. Adaptive Gauss-Legendre; evenness halves the work.
QuadResult kernel_moment(const CurvedMass& M, double b, double t, double tol);

// sinh(M (t - b)) / M, with the M -> 0 limit t - b taken via a series.
double kernel_moment_closed_form(const CurvedMass& M, double b, double t);

} // namespace dskg::cone
