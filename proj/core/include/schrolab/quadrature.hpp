#pragma once

#include <cmath>
#include <vector>

namespace schrolab::quad {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point Gauss-Legendre on [0,1].
const Rule& gauss_legendre01(int n);

// n-point Gauss-Jacobi for weight u^p on [0,1] (p > -1), via Golub-Welsch.
// Cached per (n, p); thread safe.
const Rule& gauss_jacobi01(int n, double p);

// Integral over [0, h] of r^p f(r) dr, split into a Gauss-Jacobi cell [0, h q^levels]
// and geometrically graded Gauss-Legendre cells. Suited to integrands whose only
// non-smoothness is a fractional-power expansion at r = 0.
template <class F>
double graded_singular(F&& f, double p, double h, int levels = 12, double q = 0.2, int nodes = 20) {
    const Rule& gl = gauss_legendre01(nodes);
    const Rule& gj = gauss_jacobi01(nodes, p);
    double hi = h;
    double total = 0.0;
    for (int l = 0; l < levels; ++l) {
        const double lo = hi * q;
        double s = 0.0;
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double r = lo + (hi - lo) * gl.nodes[i];
            s += gl.weights[i] * std::pow(r, p) * f(r);
        }
        total += s * (hi - lo);
        hi = lo;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < gj.nodes.size(); ++i) s += gj.weights[i] * f(hi * gj.nodes[i]);
    return total + s * std::pow(hi, p + 1.0);
}

}  // namespace schrolab::quad
