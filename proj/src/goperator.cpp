#include "dskg/goperator.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "dskg/cone_kernel.hpp"
#include "dskg/errors.hpp"
#include "dskg/quadrature.hpp"
#include "dskg/special.hpp"

namespace dskg::gop {

namespace {

void validate_common(double t, double tol, double support_radius) {
    if (!(t >= 0.0)) throw dskg::DomainError("time must be nonnegative");
    if (!(tol > 0.0)) throw dskg::ConfigError("tolerance must be positive");
    if (!(support_radius >= 0.0))
        throw dskg::DomainError("support radius must be nonnegative");
}

// b at which the horizon width e^{-b} - e^{-t} equals c, if inside (0, t).
void add_width_crossing(std::vector<double>& bs, double c, double t) {
    if (c <= 0.0 || c >= 1.0 - std::exp(-t)) return;
    const double b = -std::log(std::exp(-t) + c);
    if (b > 0.0 && b < t) bs.push_back(b);
}

std::vector<double> outer_breakpoints(double t, const std::vector<double>& widths) {
    std::vector<double> bs;
    for (double c : widths) add_width_crossing(bs, c, t);
    return bs;
}

}  // namespace

GridSource1D::GridSource1D(double x0, double dx, int nx, double b0, double db, int nb,
                           std::vector<double> values)
    : x0_(x0), dx_(dx), nx_(nx), b0_(b0), db_(db), nb_(nb), values_(std::move(values)) {
    if (nx < 4 || nb < 1) throw dskg::ConfigError("grid needs nx >= 4 and nb >= 1");
    if (!(dx > 0.0) || (nb > 1 && !(db > 0.0)))
        throw dskg::ConfigError("grid spacings must be positive");
    if (values_.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(nb))
        throw dskg::ConfigError("grid value count does not match nx * nb");
}

double GridSource1D::operator()(double x, double b) const {
    const double s = (x - x0_) / dx_;
    if (s < 0.0 || s > nx_ - 1) return 0.0;

    // 4-point Lagrange stencil in x, clamped at the grid edges.
    int i1 = static_cast<int>(std::floor(s));
    i1 = std::clamp(i1, 1, nx_ - 3);
    const double u = s - i1;
    const double w0 = -u * (u - 1.0) * (u - 2.0) / 6.0;
    const double w1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
    const double w2 = -(u + 1.0) * u * (u - 2.0) / 2.0;
    const double w3 = (u + 1.0) * u * (u - 1.0) / 6.0;

    double tb = nb_ > 1 ? (b - b0_) / db_ : 0.0;
    tb = std::clamp(tb, 0.0, static_cast<double>(nb_ - 1));
    int j = static_cast<int>(std::floor(tb));
    j = std::min(j, nb_ - 2 >= 0 ? nb_ - 2 : 0);
    const double v = nb_ > 1 ? tb - j : 0.0;

    auto row = [&](int jj) {
        const double* p = values_.data() + static_cast<std::size_t>(jj) * nx_;
        return w0 * p[i1 - 1] + w1 * p[i1] + w2 * p[i1 + 1] + w3 * p[i1 + 2];
    };
    if (nb_ == 1) return row(0);
    return (1.0 - v) * row(j) + v * row(j + 1);
}

SourceField1D GridSource1D::field() const {
    const double lo = std::abs(x0_);
    const double hi = std::abs(x0_ + dx_ * (nx_ - 1));
    GridSource1D copy = *this;
    return SourceField1D{
        [copy](double x, double b) { return copy(x, b); },
        std::max(lo, hi),
    };
}

double apply_G_1d(const SourceField1D& f, double x, double t, double M, double tol) {
    validate_common(t, tol, f.support_radius);
    if (!f.f) throw dskg::ConfigError("source callable is empty");
    const cone::CurvedMass cm(M);
    if (t == 0.0) return 0.0;

    const double R = f.support_radius;
    const double inner_tol = 0.1 * tol / std::max(1.0, t);

    auto slice = [&](double b) {
        const double h = cone::horizon_radius(b, t);
        const double lo = std::max(x - h, -R);
        const double hi = std::min(x + h, R);
        if (hi <= lo) return 0.0;
        auto integrand = [&](double y) {
            const double r = std::min(std::abs(x - y), h);
            return f.f(y, b) * cone::kernel_eval(cm, cone::ConePoint(b, t, r));
        };
        return dskg::adaptive_gauss_legendre(integrand, lo, hi, inner_tol).value;
    };

    const auto bs = outer_breakpoints(t, {R - x, R + x});
    const auto outer = dskg::adaptive_gauss_legendre(slice, 0.0, t, 0.5 * tol, bs);
    if (!outer.converged)
        throw dskg::NumericError("time quadrature did not converge", outer.value,
                                 outer.error_estimate);
    return outer.value;
}

double radial_wave_mean(const std::function<double(double)>& profile, double rho,
                        double r) {
    if (!profile) throw dskg::ConfigError("profile callable is empty");
    if (!(rho >= 0.0) || !(r >= 0.0))
        throw dskg::DomainError("radii must be nonnegative");
    // (rho v) solves the 1-D wave equation with odd data z profile(|z|).
    const double p = std::max(rho, 1e-6);
    const double a = p + r;
    const double c = p - r;
    return (a * profile(std::abs(a)) + c * profile(std::abs(c))) / (2.0 * p);
}

double apply_G_radial_3d(const RadialSourceField3D& f, double rho, double t, double M,
                         double tol) {
    validate_common(t, tol, f.support_radius);
    if (!(rho >= 0.0)) throw dskg::DomainError("radius must be nonnegative");
    if (!f.f) throw dskg::ConfigError("source callable is empty");
    const cone::CurvedMass cm(M);
    if (t == 0.0) return 0.0;

    const double R = f.support_radius;
    const double inner_tol = 0.1 * tol / std::max(1.0, t);

    auto slice = [&](double b) {
        const double h = cone::horizon_radius(b, t);
        const double lo = std::max(0.0, rho - R);
        const double hi = std::min(h, rho + R);
        if (hi <= lo) return 0.0;
        auto profile = [&](double s) { return f.f(s, b); };
        auto integrand = [&](double r) {
            const double v = radial_wave_mean(profile, rho, r);
            return v * cone::kernel_eval(cm, cone::ConePoint(b, t, std::min(r, h)));
        };
        const std::vector<double> pts{R - rho, rho};
        return dskg::adaptive_gauss_legendre(integrand, lo, hi, inner_tol, pts).value;
    };

    const auto bs = outer_breakpoints(t, {rho - R, std::abs(R - rho), rho, rho + R});
    const auto outer = dskg::adaptive_gauss_legendre(slice, 0.0, t, 0.5 * tol, bs);
    if (!outer.converged)
        throw dskg::NumericError("time quadrature did not converge", outer.value,
                                 outer.error_estimate);
    return 2.0 * outer.value;
}

double moment_of_G(const std::function<double(double)>& q, double t, double M,
                   double tol) {
    validate_common(t, tol, 0.0);
    if (!q) throw dskg::ConfigError("time profile callable is empty");
    const cone::CurvedMass cm(M);
    if (t == 0.0) return 0.0;
    auto integrand = [&](double b) {
        const double d = t - b;
        return q(b) * d * dskg::special::sinhc(cm.M * d);
    };
    return dskg::adaptive_gauss_legendre(integrand, 0.0, t, tol).value;
}

}  // namespace dskg::gop
