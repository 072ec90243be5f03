#include "quintic/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "quintic/errors.hpp"

namespace quintic {

namespace {

// Symmetric tridiagonal Jacobi matrix -> nodes (eigenvalues) and weights
// (mu0 * first eigenvector component squared).
QuadratureRule golub_welsch(const std::vector<double>& offdiag, double mu0) {
    const int n = static_cast<int>(offdiag.size()) + 1;
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        jacobi(i, i + 1) = offdiag[static_cast<std::size_t>(i)];
        jacobi(i + 1, i) = offdiag[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    if (solver.info() != Eigen::Success)
        throw NumericFailure("golub_welsch: eigen decomposition failed");

    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        rule.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
        const double v0 = solver.eigenvectors()(0, i);
        rule.weights[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
    }
    return rule;
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
    if (n < 1 || n > 512) throw InvalidInput("gauss_legendre: order out of range");
    std::vector<double> offdiag(static_cast<std::size_t>(n - 1));
    for (int i = 1; i < n; ++i) {
        const double di = static_cast<double>(i);
        offdiag[static_cast<std::size_t>(i - 1)] = di / std::sqrt(4.0 * di * di - 1.0);
    }
    return golub_welsch(offdiag, 2.0);
}

QuadratureRule gauss_hermite_normal(int n) {
    if (n < 1 || n > 512) throw InvalidInput("gauss_hermite_normal: order out of range");
    std::vector<double> offdiag(static_cast<std::size_t>(n - 1));
    for (int i = 1; i < n; ++i)
        offdiag[static_cast<std::size_t>(i - 1)] = std::sqrt(static_cast<double>(i));
    return golub_welsch(offdiag, 1.0);
}

}  // namespace quintic
