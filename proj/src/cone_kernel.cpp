#include "dskg/cone_kernel.hpp"

#include "dskg/errors.hpp"
#include "dskg/special.hpp"

#include <cmath>
#include <string>

namespace dskg::cone {

CurvedMass::CurvedMass(double M_) : M(M_) {
    if (!(M >= 0.0))
        throw DomainError("CurvedMass: M must be >= 0, got " + std::to_string(M_));
}

CurvedMass CurvedMass::from_physical(int n, double m) {
    if (n < 1) throw DomainError("CurvedMass: dimension n must be >= 1");
    const double M2 = 0.25 * n * n - m * m;
    if (M2 < 0.0)
        throw DomainError("CurvedMass: m exceeds n/2, curved mass would be imaginary");
    return CurvedMass(std::sqrt(M2));
}

double horizon_radius(double b, double t) {
    if (!(b >= 0.0) || !(t >= b))
        throw DomainError("horizon_radius: need 0 <= b <= t");
    return std::exp(-b) - std::exp(-t);
}

ConePoint::ConePoint(double b_, double t_, double r_) : b(b_), t(t_), r(r_) {
    const double h = horizon_radius(b, t);
    if (!(r >= 0.0) || r > h * (1.0 + 1e-12) + 1e-300)
        throw DomainError("ConePoint: radius " + std::to_string(r_) +
                          " outside the cone (horizon " + std::to_string(h) + ")");
    if (r > h) r = h;
}

double kernel_argument(const ConePoint& pt) {
    const double eb = std::exp(-pt.b);
    const double et = std::exp(-pt.t);
    const double h = eb - et;   // inner (cone) radius
    const double s = eb + et;   // outer (singular) radius
    // Factored differences keep accuracy near the cone boundary r -> h.
    const double num = (h - pt.r) * (h + pt.r);
    const double den = (s - pt.r) * (s + pt.r);
    if (num <= 0.0) return 0.0;
    return num / den;
}

double kernel_eval(const CurvedMass& mass, const ConePoint& pt) {
    const double M = mass.M;
    const double eb = std::exp(-pt.b);
    const double et = std::exp(-pt.t);
    const double s = eb + et;
    const double den = (s - pt.r) * (s + pt.r);
    const double zeta = kernel_argument(pt);
    // (4 e^{-b-t})^{-M} = exp(M (b + t) - M ln 4)
    const double prefactor = std::exp(M * (pt.b + pt.t) - M * std::log(4.0));
    const double power = std::pow(den, -0.5 + M);
    const double hyp = special::gauss_2f1({0.5 - M, 0.5 - M, 1.0}, zeta);
    return prefactor * power * hyp;
}

QuadResult kernel_moment(const CurvedMass& mass, double b, double t, double tol) {
    const double h = horizon_radius(b, t);
    if (h == 0.0) return {0.0, 0.0, true, 0};
    // Kernel is even in z; integrate [0, h] and double.
    auto f = [&](double z) { return kernel_eval(mass, ConePoint(b, t, z)); };
    QuadResult res = adaptive_gauss_legendre(f, 0.0, h, 0.5 * tol);
    res.value *= 2.0;
    res.error_estimate *= 2.0;
    return res;
}

double kernel_moment_closed_form(const CurvedMass& mass, double b, double t) {
    if (!(b >= 0.0) || !(t >= b))
        throw DomainError("kernel_moment_closed_form: need 0 <= b <= t");
    const double dt = t - b;
    // sinh(M dt)/M = dt * sinhc(M dt), exact at M = 0.
    return dt * special::sinhc(mass.M * dt);
}

} // namespace dskg::cone
