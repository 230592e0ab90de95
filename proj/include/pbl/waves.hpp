#pragma once

// Real-space layer for the multiplication-operator model: Hermite/Laguerre
// recurrences, deformed Gaussian wavefunctions, exact Gauss-Hermite
// quadrature of 2-D Gaussian-weighted inner products, and the squared-norm
// sequence I_n with its Laguerre lower bound.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "opalg.hpp"
#include "quad.hpp"

namespace pbl {

inline constexpr double kPi = 3.14159265358979323846;

inline double hermite(int n, double x) {
  double h0 = 1.0, h1 = 2.0 * x;
  if (n == 0) return h0;
  for (int k = 1; k < n; ++k) {
    double h2 = 2.0 * x * h1 - 2.0 * k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

inline double laguerre(int n, double x) {
  double l0 = 1.0, l1 = 1.0 - x;
  if (n == 0) return l0;
  for (int k = 1; k < n; ++k) {
    double l2 = ((2.0 * k + 1.0 - x) * l1 - k * l0) / (k + 1.0);
    l0 = l1;
    l1 = l2;
  }
  return l1;
}

class NonIntegrableError : public std::runtime_error {
 public:
  explicit NonIntegrableError(const std::string& what) : std::runtime_error(what) {}
};

// Amplitude c H_{n1}(x1) H_{n2}(x2) exp(-1/2 x^T Q x + l^T x).
// For the deformed ground-state family Q = I - 2 gamma J; Q loses positive
// definiteness exactly at |gamma| = 1/2, the square-integrability boundary.
struct DeformedGaussianState {
  int n1 = 0, n2 = 0;
  Eigen::Matrix2d Q = Eigen::Matrix2d::Identity();
  Eigen::Vector2d l = Eigen::Vector2d::Zero();
  cplx c = 1.0;

  bool normalizable() const {
    return Q(0, 0) > 0.0 && Q.determinant() > 0.0;
  }
};

// phi_{n1,n2} of the first detailed model; psi is the gamma -> -gamma twin.
// norm_const is the overall normalization N-tilde; the default reproduces
// <phi_00, Psi_00> = 1.
inline DeformedGaussianState model1_phi(int n1, int n2, double gamma,
                                        double norm_const = 1.0 / std::sqrt(kPi)) {
  DeformedGaussianState s;
  s.n1 = n1;
  s.n2 = n2;
  s.Q << 1.0, -2.0 * gamma, -2.0 * gamma, 1.0;
  s.l << std::sqrt(2.0) * gamma, std::sqrt(2.0) * gamma;
  s.c = norm_const /
        std::sqrt(std::pow(2.0, n1 + n2) * std::tgamma(n1 + 1.0) * std::tgamma(n2 + 1.0));
  return s;
}

inline DeformedGaussianState model1_psi(int n1, int n2, double gamma,
                                        double norm_const = 1.0 / std::sqrt(kPi)) {
  return model1_phi(n1, n2, -gamma, norm_const);
}

inline cplx phi_eval(const DeformedGaussianState& s, double x1, double x2) {
  Eigen::Vector2d x(x1, x2);
  double expo = -0.5 * x.dot(s.Q * x) + s.l.dot(x);
  return s.c * hermite(s.n1, x1) * hermite(s.n2, x2) * std::exp(expo);
}

// <A, B> = int conj(A) B over R^2: complete the square in the combined
// Gaussian, rotate to principal axes, and apply a tensor Gauss-Hermite rule
// exact for the polynomial prefactor.
inline cplx inner2d(const DeformedGaussianState& a, const DeformedGaussianState& b,
                    int quad_order = 0) {
  Eigen::Matrix2d qs = a.Q + b.Q;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(qs);
  if (es.eigenvalues()(0) <= 0.0)
    throw NonIntegrableError("inner2d: combined quadratic form not positive definite");
  Eigen::Vector2d ls = a.l + b.l;
  Eigen::Vector2d mu = qs.ldlt().solve(ls);
  cplx pref = std::conj(a.c) * b.c * std::exp(0.5 * ls.dot(mu));

  int degree = a.n1 + a.n2 + b.n1 + b.n2;
  int m = quad_order > 0 ? quad_order : std::max(20, degree / 2 + 4);
  GaussHermiteRule rule = gauss_hermite(m);

  Eigen::Matrix2d rot = es.eigenvectors();
  Eigen::Vector2d scale(std::sqrt(2.0 / es.eigenvalues()(0)),
                        std::sqrt(2.0 / es.eigenvalues()(1)));
  double jac = scale(0) * scale(1);

  double sum = 0.0;
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) {
      Eigen::Vector2d u(scale(0) * rule.nodes[j], scale(1) * rule.nodes[k]);
      Eigen::Vector2d x = mu + rot * u;
      sum += rule.weights[j] * rule.weights[k] * hermite(a.n1, x(0)) *
             hermite(a.n2, x(1)) * hermite(b.n1, x(0)) * hermite(b.n2, x(1));
    }
  }
  return pref * jac * sum;
}

struct NormEstimate {
  int n;
  double value;        // I_n, with the N-tilde = 1/sqrt(pi) convention divided out
  double lower_bound;  // pi e^{4g^2/(1-2g)} L_n(-(2g/(1-2g))^2), as printed
  double shift;        // s0 = sqrt(2) g / (1 - 2g)
};

// I_n = |phi_{n,0}|^2 / Ntilde^2 via quadrature, plus the printed Laguerre
// lower bound. The bound expression is asymmetric in the sign of gamma and
// is evaluated as printed.
inline std::vector<NormEstimate> norm_growth(double gamma, const std::vector<int>& ns) {
  if (gamma == 0.0 || std::abs(gamma) >= 0.5)
    throw NonIntegrableError("norm_growth requires 0 < |gamma| < 1/2");
  std::vector<NormEstimate> out;
  out.reserve(ns.size());
  for (int n : ns) {
    DeformedGaussianState s = model1_phi(n, 0, gamma, /*norm_const=*/1.0);
    NormEstimate e;
    e.n = n;
    e.value = inner2d(s, s).real();
    double r = 2.0 * gamma / (1.0 - 2.0 * gamma);
    e.lower_bound = kPi * std::exp(4.0 * gamma * gamma / (1.0 - 2.0 * gamma)) *
                    laguerre(n, -r * r);
    e.shift = std::sqrt(2.0) * gamma / (1.0 - 2.0 * gamma);
    out.push_back(e);
  }
  return out;
}

}  // namespace pbl
