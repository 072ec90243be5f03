#pragma once

// Gaussian quadrature rules used throughout the library.  Nodes and weights
// come from the Golub-Welsch eigenvalue construction on the Jacobi matrix of
// the respective orthogonal polynomial family, which is stable for the orders
// we need (<= 64 per axis).

#include <vector>

namespace quintic {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1]; weights sum to 2.
QuadratureRule gauss_legendre(int n);

// n-point Gauss-Hermite rule for the standard normal weight: integrates
// E[f(Z)] with Z ~ N(0,1) exactly for polynomials up to degree 2n-1.
// Weights sum to 1.
QuadratureRule gauss_hermite_normal(int n);

// Integrate f over [a, b] with an n-point Gauss-Legendre rule.
template <class F>
double integrate_gl(const F& f, double a, double b, const QuadratureRule& rule) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * acc;
}

}  // namespace quintic
