#pragma once

// Gauss-Hermite nodes and weights (weight e^{-x^2}) via Golub-Welsch:
// eigenvalues of the symmetric tridiagonal Jacobi matrix are the nodes,
// weights come from the first eigenvector components.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace pbl {

struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussHermiteRule gauss_hermite(int m) {
  if (m < 1) throw std::invalid_argument("gauss_hermite: m must be positive");
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, m);
  for (int k = 1; k < m; ++k) {
    double off = std::sqrt(k / 2.0);
    jac(k - 1, k) = off;
    jac(k, k - 1) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  const double sqrt_pi = std::sqrt(3.14159265358979323846);
  GaussHermiteRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (int k = 0; k < m; ++k) {
    rule.nodes[k] = es.eigenvalues()(k);
    double v0 = es.eigenvectors()(0, k);
    rule.weights[k] = sqrt_pi * v0 * v0;
  }
  return rule;
}

}  // namespace pbl
