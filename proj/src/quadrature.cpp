#include "dskg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace dskg {

void gauss_legendre_rule(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-based initial guess for the i-th root of P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
}

namespace {

struct Rule15 {
    std::vector<double> x, w;
    Rule15() { gauss_legendre_rule(15, x, w); }
};

const Rule15& rule15() {
    static const Rule15 r;
    return r;
}

double gl15(const Integrand& f, double a, double b, long& evals) {
    const Rule15& r = rule15();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 15; ++i) s += r.w[i] * f(mid + half * r.x[i]);
    evals += 15;
    return s * half;
}

void adapt(const Integrand& f, double a, double b, double tol, int depth,
           QuadResult& acc) {
    const double whole = gl15(f, a, b, acc.evaluations);
    const double mid = 0.5 * (a + b);
    const double left = gl15(f, a, mid, acc.evaluations);
    const double right = gl15(f, mid, b, acc.evaluations);
    const double halves = left + right;
    const double err = std::abs(whole - halves);
    if (err <= tol || depth <= 0) {
        acc.value += halves;
        acc.error_estimate += err;
        if (err > tol) acc.converged = false;
        return;
    }
    adapt(f, a, mid, 0.5 * tol, depth - 1, acc);
    adapt(f, mid, b, 0.5 * tol, depth - 1, acc);
}

} // namespace

double gauss_legendre_15(const Integrand& f, double a, double b) {
    long evals = 0;
    return gl15(f, a, b, evals);
}

QuadResult adaptive_gauss_legendre(const Integrand& f, double a, double b,
                                   double abs_tol, int max_depth) {
    QuadResult res;
    res.converged = true;
    if (a == b) return res;
    adapt(f, a, b, abs_tol, max_depth, res);
    return res;
}

QuadResult adaptive_gauss_legendre(const Integrand& f, double a, double b,
                                   double abs_tol,
                                   const std::vector<double>& breakpoints,
                                   int max_depth) {
    std::vector<double> pts;
    pts.push_back(a);
    for (double p : breakpoints)
        if (p > a && p < b) pts.push_back(p);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());

    QuadResult res;
    res.converged = true;
    const double len = b - a;
    if (len <= 0.0) return res;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        const double lo = pts[i], hi = pts[i + 1];
        if (hi <= lo) continue;
        adapt(f, lo, hi, abs_tol * (hi - lo) / len, max_depth, res);
    }
    return res;
}

} // namespace dskg
