#pragma once

// Closed-form conjugation engine. For a quadratic-plus-linear X the adjoint
// action ad_X is linear on the affine span of (A1, A2, Ad1, Ad2, 1), so
// a_j = e^X A_j e^-X and b_j = e^X Ad_j e^-X follow from exponentiating a
// 5x5 generator, and H = e^X H0 e^-X from one exact product per mode.

#include <Eigen/Dense>
#include <array>

#include "expm.hpp"
#include "opalg.hpp"

namespace pbl {

struct H0Spec {
  double w1 = 1.0, w2 = 2.0, w3 = 0.5;  // omega_1, omega_2, omega_3

  double wt1() const { return w1 / 2.0; }
  double wt2() const { return w2 / 2.0; }
  double wt3() const { return w3 - (w1 + w2) / 2.0; }

  static H0Spec from_tilde(double wt1, double wt2, double wt3) {
    return {2.0 * wt1, 2.0 * wt2, wt3 + wt1 + wt2};
  }

  OperatorPoly hamiltonian() const {
    return w1 * product(Ad1(), A1()) + w2 * product(Ad2(), A2()) +
           OperatorPoly::scalar(w3);
  }
};

// Closed-form action of e^X . e^-X on the affine ladder span:
// G_j -> sum_k L(j,k) G_k + v(j), with (G_1..G_4) = (A1, A2, Ad1, Ad2).
struct AffineLadderMap {
  Eigen::Matrix<cplx, 4, 4> L;
  Eigen::Matrix<cplx, 4, 1> v;

  static AffineLadderMap identity() {
    return {Eigen::Matrix<cplx, 4, 4>::Identity(), Eigen::Matrix<cplx, 4, 1>::Zero()};
  }
};

namespace detail {

inline std::array<OperatorPoly, 4> affine_generators() {
  return {A1(), A2(), Ad1(), Ad2()};
}

// Coefficients of an affine-linear poly over (A1, A2, Ad1, Ad2, 1).
inline std::array<cplx, 5> affine_coeffs(const OperatorPoly& p) {
  if (p.degree() > 1) throw AlgebraError("affine_coeffs: poly not affine-linear");
  std::array<cplx, 5> c{};
  NormalMonomial m;
  m.pow = {0, 1, 0, 0};
  c[0] = p.coeff(m);  // A1
  m.pow = {0, 0, 0, 1};
  c[1] = p.coeff(m);  // A2
  m.pow = {1, 0, 0, 0};
  c[2] = p.coeff(m);  // Ad1
  m.pow = {0, 0, 1, 0};
  c[3] = p.coeff(m);  // Ad2
  c[4] = p.scalar_part();
  return c;
}

}  // namespace detail

// 5x5 matrix of ad_X on the affine basis; row j holds the expansion of
// [X, G_j], last row (the identity component) is zero.
inline Eigen::Matrix<cplx, 5, 5> ad_generator(const OperatorPoly& x) {
  if (x.degree() > 2) throw AlgebraError("ad_generator: deg(X) > 2");
  Eigen::Matrix<cplx, 5, 5> m = Eigen::Matrix<cplx, 5, 5>::Zero();
  auto gens = detail::affine_generators();
  for (int j = 0; j < 4; ++j) {
    auto c = detail::affine_coeffs(commutator(x, gens[j]));
    for (int k = 0; k < 5; ++k) m(j, k) = c[k];
  }
  return m;
}

inline AffineLadderMap exp_map(const OperatorPoly& x) {
  if (!x.finite()) throw AlgebraError("exp_map: non-finite coefficients in X");
  Eigen::Matrix<cplx, 5, 5> m = ad_generator(x);
  Eigen::MatrixXcd e = expm(m);
  AffineLadderMap map;
  map.L = e.block<4, 4>(0, 0);
  map.v = e.block<4, 1>(0, 4);
  return map;
}

inline OperatorPoly deform_operator(const AffineLadderMap& map, const OperatorPoly& p) {
  auto c = detail::affine_coeffs(p);
  auto gens = detail::affine_generators();
  OperatorPoly out = OperatorPoly::scalar(c[4]);
  for (int j = 0; j < 4; ++j) {
    if (c[j] == cplx(0.0)) continue;
    for (int k = 0; k < 4; ++k) out += (c[j] * map.L(j, k)) * gens[k];
    out += OperatorPoly::scalar(c[j] * map.v(j));
  }
  return out;
}

struct DeformedLadders {
  OperatorPoly a1, a2, b1, b2;
};

inline DeformedLadders deform_ladders(const OperatorPoly& x) {
  AffineLadderMap m = exp_map(x);
  return {deform_operator(m, A1()), deform_operator(m, A2()),
          deform_operator(m, Ad1()), deform_operator(m, Ad2())};
}

// H = w1 b1 a1 + w2 b2 a2 + w3, with the deformed ladders of e^X.
inline OperatorPoly deform_hamiltonian(const OperatorPoly& x, const H0Spec& h0) {
  DeformedLadders d = deform_ladders(x);
  return h0.w1 * product(d.b1, d.a1) + h0.w2 * product(d.b2, d.a2) +
         OperatorPoly::scalar(h0.w3);
}

// Residuals of the pseudo-bosonic rules [a_j, b_k] = delta_jk and
// [a_1, a_2] = [b_1, b_2] = 0, as max coefficient magnitudes.
struct PseudoBosonResiduals {
  std::array<std::array<double, 2>, 2> ab;  // |[a_j, b_k] - delta_jk|
  double aa;                                // |[a_1, a_2]|
  double bb;                                // |[b_1, b_2]|

  double max() const {
    double m = std::max(aa, bb);
    for (const auto& row : ab)
      for (double r : row) m = std::max(m, r);
    return m;
  }
};

inline PseudoBosonResiduals pseudo_boson_check(const OperatorPoly& a1,
                                               const OperatorPoly& a2,
                                               const OperatorPoly& b1,
                                               const OperatorPoly& b2) {
  PseudoBosonResiduals r{};
  const OperatorPoly* as[2] = {&a1, &a2};
  const OperatorPoly* bs[2] = {&b1, &b2};
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) {
      OperatorPoly c = commutator(*as[j], *bs[k]);
      if (j == k) c -= Id();
      r.ab[j][k] = c.max_abs_coeff();
    }
  r.aa = commutator(a1, a2).max_abs_coeff();
  r.bb = commutator(b1, b2).max_abs_coeff();
  return r;
}

inline PseudoBosonResiduals pseudo_boson_check(const DeformedLadders& d) {
  return pseudo_boson_check(d.a1, d.a2, d.b1, d.b2);
}

// Bilinear form Omega_jk = identity coefficient of [G_j, G_k]; the map is
// pseudo-symplectic iff L Omega L^T = Omega.
inline double symplectic_residual(const AffineLadderMap& map) {
  Eigen::Matrix<cplx, 4, 4> omega = Eigen::Matrix<cplx, 4, 4>::Zero();
  omega(0, 2) = 1.0;   // [A1, Ad1] = 1
  omega(2, 0) = -1.0;
  omega(1, 3) = 1.0;   // [A2, Ad2] = 1
  omega(3, 1) = -1.0;
  return (map.L * omega * map.L.transpose() - omega).cwiseAbs().maxCoeff();
}

}  // namespace pbl
