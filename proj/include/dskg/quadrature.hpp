#pragma once

#include <functional>
#include <vector>

namespace dskg {

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = false;
    long evaluations = 0;
};

using Integrand = std::function<double(double)>;

// Adaptive Gauss-Legendre quadrature: 15-node panels, bisection driven by the
// difference between a panel estimate and the sum of its two halves.
// abs_tol is an absolute tolerance for the whole interval; the budget is
// split proportionally to panel length on recursion.
QuadResult adaptive_gauss_legendre(const Integrand& f, double a, double b,
                                   double abs_tol, int max_depth = 48);

// Same, but the interval is pre-split at the given breakpoints (integrand
// kinks, support boundaries). Breakpoints outside (a, b) are ignored.
QuadResult adaptive_gauss_legendre(const Integrand& f, double a, double b,
                                   double abs_tol,
                                   const std::vector<double>& breakpoints,
                                   int max_depth = 48);

// Fixed 15-node Gauss-Legendre estimate on [a, b]; building block and handy
// for smooth inner integrals.
double gauss_legendre_15(const Integrand& f, double a, double b);

// Nodes and weights for an n-point Gauss-Legendre rule on [-1, 1], computed
// by Newton iteration on the Legendre polynomial.
void gauss_legendre_rule(int n, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace dskg
