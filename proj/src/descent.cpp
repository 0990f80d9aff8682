#include "dskg/descent.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "dskg/cone_kernel.hpp"
#include "dskg/errors.hpp"
#include "dskg/quadrature.hpp"

namespace dskg::descent {

namespace {

constexpr int kPolySmoothness = 1 << 20;

// 32-node Gauss-Legendre rule on [-1, 1], shared by the product quadratures.
const std::vector<double>& gl32_nodes() {
    static const auto rule = [] {
        std::vector<double> x, w;
        dskg::gauss_legendre_rule(32, x, w);
        return std::make_pair(x, w);
    }();
    return rule.first;
}
const std::vector<double>& gl32_weights() {
    static const auto rule = [] {
        std::vector<double> x, w;
        dskg::gauss_legendre_rule(32, x, w);
        return std::make_pair(x, w);
    }();
    return rule.second;
}

constexpr int kAzimuthPoints = 64;

void require_radius(double r) {
    if (!(r >= 0.0)) throw dskg::DomainError("radius must be nonnegative");
}

}  // namespace

DimensionConstants::DimensionConstants(int dim) : n(dim) {
    if (dim < 1) throw dskg::ConfigError("dimension must be >= 1");
    omega = 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
    tau = omega / dim;
    c0 = 1.0;
    if (dim % 2 == 1) {
        for (int k = 1; k <= dim - 2; k += 2) c0 *= k;
    } else {
        // Normalizes the even-dimension descent bracket so that the f == 1
        // pipeline collapses to 1; equals 2^{n/2} * ((n-2)/2)!.
        for (int k = 0; k < dim / 2; ++k) c0 *= 2.0;
        for (int k = 2; k <= (dim - 2) / 2; ++k) c0 *= k;
    }
}

RadialProfile RadialProfile::polynomial(std::vector<double> coeffs) {
    if (coeffs.empty()) coeffs.push_back(0.0);
    RadialProfile p;
    p.poly_ = true;
    p.coeffs_ = std::move(coeffs);
    p.smooth_ = kPolySmoothness;
    return p;
}

RadialProfile RadialProfile::constant(double c) { return polynomial({c}); }

RadialProfile RadialProfile::callable(std::function<double(double)> f, int smoothness) {
    if (!f) throw dskg::ConfigError("radial profile callable is empty");
    if (smoothness < 0) throw dskg::ConfigError("smoothness must be nonnegative");
    RadialProfile p;
    p.poly_ = false;
    p.fn_ = std::move(f);
    p.smooth_ = smoothness;
    return p;
}

double RadialProfile::operator()(double r) const {
    require_radius(r);
    if (poly_) {
        double acc = 0.0;
        for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * r + coeffs_[i];
        return acc;
    }
    return fn_(r);
}

RadialProfile RadialProfile::derivative() const {
    if (poly_) {
        std::vector<double> d;
        for (std::size_t k = 1; k < coeffs_.size(); ++k)
            d.push_back(coeffs_[k] * static_cast<double>(k));
        return polynomial(std::move(d));
    }
    if (smooth_ < 1)
        throw dskg::DomainError("radial profile has no derivative budget left");
    auto f = fn_;
    auto deriv = [f](double r) {
        const double h = 1e-4 * (1.0 + r);
        if (r >= 2.0 * h) {
            return (f(r - 2.0 * h) - 8.0 * f(r - h) + 8.0 * f(r + h) - f(r + 2.0 * h)) /
                   (12.0 * h);
        }
        // One-sided 4th-order stencil keeps arguments nonnegative near 0.
        return (-25.0 * f(r) + 48.0 * f(r + h) - 36.0 * f(r + 2.0 * h) +
                16.0 * f(r + 3.0 * h) - 3.0 * f(r + 4.0 * h)) /
               (12.0 * h);
    };
    return callable(std::move(deriv), smooth_ - 1);
}

RadialProfile RadialProfile::over_r() const {
    if (poly_) {
        const double scale_ref = [&] {
            double m = 0.0;
            for (double c : coeffs_) m = std::max(m, std::abs(c));
            return m;
        }();
        if (std::abs(coeffs_[0]) > 1e-12 * std::max(scale_ref, 1.0))
            throw dskg::DomainError("cannot divide profile by r: nonzero value at r = 0");
        std::vector<double> q(coeffs_.begin() + 1, coeffs_.end());
        return polynomial(std::move(q));
    }
    auto f = fn_;
    auto quotient = [f](double r) {
        if (r > 0.0) return f(r) / r;
        // Limit value via a one-sided derivative estimate at the origin.
        const double h = 1e-4;
        return (-25.0 * f(0.0) + 48.0 * f(h) - 36.0 * f(2.0 * h) + 16.0 * f(3.0 * h) -
                3.0 * f(4.0 * h)) /
               (12.0 * h);
    };
    return callable(std::move(quotient), smooth_);
}

RadialProfile RadialProfile::times_power(int k) const {
    if (k < 0) throw dskg::ConfigError("times_power requires k >= 0");
    if (k == 0) return *this;
    if (poly_) {
        std::vector<double> q(static_cast<std::size_t>(k), 0.0);
        q.insert(q.end(), coeffs_.begin(), coeffs_.end());
        return polynomial(std::move(q));
    }
    auto f = fn_;
    return callable([f, k](double r) { return std::pow(r, k) * f(r); }, smooth_);
}

RadialProfile RadialProfile::scaled(double s) const {
    if (poly_) {
        std::vector<double> q = coeffs_;
        for (double& c : q) c *= s;
        return polynomial(std::move(q));
    }
    auto f = fn_;
    return callable([f, s](double r) { return s * f(r); }, smooth_);
}

double spherical_mean(const Field& f, const std::array<double, 3>& x, double r,
                      const DimensionConstants& dims) {
    require_radius(r);
    if (!f) throw dskg::ConfigError("field callable is empty");
    switch (dims.n) {
        case 1:
            return f({x[0] + r, 0.0, 0.0}) + f({x[0] - r, 0.0, 0.0});
        case 2: {
            double acc = 0.0;
            for (int j = 0; j < kAzimuthPoints; ++j) {
                const double phi = 2.0 * std::numbers::pi * j / kAzimuthPoints;
                acc += f({x[0] + r * std::cos(phi), x[1] + r * std::sin(phi), 0.0});
            }
            return acc * (2.0 * std::numbers::pi / kAzimuthPoints);
        }
        case 3: {
            const auto& u = gl32_nodes();
            const auto& w = gl32_weights();
            double acc = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) {
                const double s = std::sqrt(std::max(0.0, 1.0 - u[i] * u[i]));
                double ring = 0.0;
                for (int j = 0; j < kAzimuthPoints; ++j) {
                    const double phi = 2.0 * std::numbers::pi * j / kAzimuthPoints;
                    ring += f({x[0] + r * s * std::cos(phi),
                               x[1] + r * s * std::sin(phi), x[2] + r * u[i]});
                }
                acc += w[i] * ring;
            }
            return acc * (2.0 * std::numbers::pi / kAzimuthPoints);
        }
        default:
            throw dskg::ConfigError("spherical_mean supports n in {1, 2, 3}");
    }
}

double ball_weighted_integral(const Field& f, const std::array<double, 3>& x,
                              double r, const DimensionConstants& dims) {
    require_radius(r);
    if (dims.n != 2)
        throw dskg::ConfigError("ball_weighted_integral supports n = 2 only");
    if (!f) throw dskg::ConfigError("field callable is empty");
    // |y| = sin(theta) removes the endpoint singularity of 1/sqrt(1-|y|^2).
    const auto& u = gl32_nodes();
    const auto& w = gl32_weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double theta = 0.25 * std::numbers::pi * (u[i] + 1.0);
        const double rho = std::sin(theta);
        double ring = 0.0;
        for (int j = 0; j < kAzimuthPoints; ++j) {
            const double phi = 2.0 * std::numbers::pi * j / kAzimuthPoints;
            ring += f({x[0] + r * rho * std::cos(phi), x[1] + r * rho * std::sin(phi),
                       0.0});
        }
        acc += w[i] * std::sin(theta) * ring * 0.25 * std::numbers::pi;
    }
    return acc * (2.0 * std::numbers::pi / kAzimuthPoints);
}

namespace {

double run_descent(const RadialProfile& p, int power, double scale, int pairs,
                   double r) {
    require_radius(r);
    const int needed = pairs + 1;
    if (!p.is_polynomial() && p.smoothness() < needed)
        throw dskg::DomainError("radial profile smoothness below descent order");
    RadialProfile bracket = p.times_power(power).scaled(scale);
    for (int i = 0; i < pairs; ++i) bracket = bracket.derivative().over_r();
    return bracket.derivative()(r);
}

}  // namespace

double odd_descent(const RadialProfile& g, double r, const DimensionConstants& dims) {
    if (dims.n < 3 || dims.n % 2 == 0)
        throw dskg::ConfigError("odd_descent requires odd n >= 3");
    return run_descent(g, dims.n - 2, 1.0 / (dims.omega * dims.c0), (dims.n - 3) / 2, r);
}

double even_descent(const RadialProfile& h, double r, const DimensionConstants& dims) {
    if (dims.n < 2 || dims.n % 2 == 1)
        throw dskg::ConfigError("even_descent requires even n >= 2");
    return run_descent(h, dims.n - 1, 2.0 / (dims.omega * dims.c0), (dims.n - 2) / 2, r);
}

double wave_mean(const Field& f, const std::array<double, 3>& x, double r,
                 const DimensionConstants& dims) {
    require_radius(r);
    if (!f) throw dskg::ConfigError("field callable is empty");
    switch (dims.n) {
        case 1:
            return 0.5 * (f({x[0] + r, 0.0, 0.0}) + f({x[0] - r, 0.0, 0.0}));
        case 3: {
            // d/dr [ r * mean(r) ]; the integrand is odd in r, so negative
            // stencil arguments evaluate through rho * mean(|rho|).
            auto g = [&](double rho) {
                return rho * spherical_mean(f, x, std::abs(rho), dims) /
                       (4.0 * std::numbers::pi);
            };
            const double h = 1e-4 * (1.0 + r);
            return (g(r - 2.0 * h) - 8.0 * g(r - h) + 8.0 * g(r + h) - g(r + 2.0 * h)) /
                   (12.0 * h);
        }
        default:
            throw dskg::ConfigError("wave_mean supports n in {1, 3}");
    }
}

double identity_check(IdentityCase which, double M, double b, double t,
                      const DimensionConstants& dims, double tol) {
    if (!(tol > 0.0)) throw dskg::ConfigError("tolerance must be positive");
    const bool corollary = which == IdentityCase::corollary_i ||
                           which == IdentityCase::corollary_ii ||
                           which == IdentityCase::corollary_iii;
    if (corollary && M != 0.0)
        throw dskg::ConfigError("corollary cases require M = 0");

    const cone::CurvedMass cm(M);
    const double target = corollary ? (t - b) : cone::kernel_moment_closed_form(cm, b, t);
    const double h = cone::horizon_radius(b, t);
    const double qtol = std::max(1e-12, 0.01 * tol);

    const bool one_d = which == IdentityCase::i || which == IdentityCase::corollary_i;
    const bool odd_case = which == IdentityCase::ii || which == IdentityCase::corollary_ii;

    if (one_d) {
        if (dims.n != 1) throw dskg::ConfigError("case i requires n = 1");
        return std::abs(cone::kernel_moment(cm, b, t, qtol).value - target);
    }

    Field unit = [](const std::array<double, 3>&) { return 1.0; };
    RadialProfile profile = [&] {
        if (odd_case) {
            if (dims.n % 2 == 0) throw dskg::ConfigError("case ii requires odd n");
            if (dims.n != 3)
                throw dskg::ConfigError("case ii identity quadrature supports n = 3");
            return RadialProfile::callable(
                [&dims, unit](double rho) {
                    return spherical_mean(unit, {0.0, 0.0, 0.0}, rho, dims);
                },
                8);
        }
        if (dims.n % 2 == 1) throw dskg::ConfigError("case iii requires even n");
        if (dims.n != 2)
            throw dskg::ConfigError("case iii identity quadrature supports n = 2");
        return RadialProfile::callable(
            [&dims, unit](double rho) {
                return ball_weighted_integral(unit, {0.0, 0.0, 0.0}, rho, dims);
            },
            8);
    }();

    auto integrand = [&](double r) {
        const double d = odd_case ? odd_descent(profile, r, dims)
                                  : even_descent(profile, r, dims);
        return cone::kernel_eval(cm, cone::ConePoint(b, t, std::min(r, h))) * d;
    };
    if (h == 0.0) return std::abs(target);
    const auto integral = dskg::adaptive_gauss_legendre(integrand, 0.0, h, qtol);
    return std::abs(2.0 * integral.value - target);
}

}  // namespace dskg::descent
