#pragma once

// Gauss-Hermite quadrature for averaging observables over Gaussian-
// distributed parameters (conditional-phase jitter, pulse spectra).

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace cpfsim {

struct QuadratureRule {
    std::vector<double> nodes;    // abscissas
    std::vector<double> weights;  // sum to 1 for the probabilist's form
};

/// Nodes/weights for integrals of the form
///   E[f(x)] = (1/sqrt(pi)) * Integral f(t) exp(-t^2) dt
/// via the Golub-Welsch eigenvalue method on the Jacobi matrix. Weights are
/// returned normalized to sum 1.
inline QuadratureRule gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: need n >= 1");
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = std::sqrt(k / 2.0);
        jacobi(k, k - 1) = b;
        jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int k = 0; k < n; ++k) {
        rule.nodes[k] = es.eigenvalues()(k);
        const double v0 = es.eigenvectors()(0, k);
        rule.weights[k] = v0 * v0;  // already normalized: sum_k v0^2 = 1
    }
    return rule;
}

/// Rule transformed so that E[f(x)] with x ~ N(mean, sigma^2) is
/// sum_k w_k f(node_k).
inline QuadratureRule gauss_hermite_normal(int n, double mean, double sigma) {
    QuadratureRule rule = gauss_hermite(n);
    for (double& x : rule.nodes) x = mean + std::numbers::sqrt2 * sigma * x;
    return rule;
}

}  // namespace cpfsim
