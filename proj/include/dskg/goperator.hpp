#pragma once

#include <functional>
#include <vector>

namespace dskg::gop {

// Source f(x, b) on R x [0, T] vanishing for |x| > support_radius.
struct SourceField1D {
    std::function<double(double, double)> f;
    double support_radius;
};

// Radial source f(|x|, b) on R^3 x [0, T] vanishing for |x| > support_radius.
struct RadialSourceField3D {
    std::function<double(double, double)> f;
    double support_radius;
};

// Uniform-grid samples of f(x, b); cubic interpolation in x, linear in b,
// zero outside the spatial grid.
class GridSource1D {
  public:
    GridSource1D(double x0, double dx, int nx, double b0, double db, int nb,
                 std::vector<double> values);  // values[j * nx + i] = f(x_i, b_j)

    double operator()(double x, double b) const;
    SourceField1D field() const;

  private:
    double x0_, dx_;
    int nx_;
    double b0_, db_;
    int nb_;
    std::vector<double> values_;
};

// G[f](x, t) for n = 1: nested adaptive quadrature of the source against the
// cone kernel. Returns 0 at t = 0.
double apply_G_1d(const SourceField1D& f, double x, double t, double M,
                  double tol = 1e-8);

// G[f] at radius rho for a radial source in n = 3, using the exact radial
// free-wave mean inside the cone integral.
double apply_G_radial_3d(const RadialSourceField3D& f, double rho, double t,
                         double M, double tol = 1e-8);

// Free-wave value at radius r about a center at radius rho, for radial data
// (profile, 0) in n = 3.
double radial_wave_mean(const std::function<double(double)>& profile, double rho,
                        double r);

// Spatial-moment law: integral over [0, t] of q(b) (t-b) sinhc(M (t-b)) db.
double moment_of_G(const std::function<double(double)>& q, double t, double M,
                   double tol = 1e-10);

}  // namespace dskg::gop
