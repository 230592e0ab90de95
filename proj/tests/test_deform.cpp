#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "pbl/deform.hpp"
#include "pbl/parse.hpp"

using namespace pbl;

namespace {

OperatorPoly model1_x(double g) {
  return parse("gamma*(sqrt(2)*(x1+x2)+2*x1*x2)", {{"gamma", g}});
}

OperatorPoly model2_x(double g) {
  return parse("gamma*(x1*x2+p1*p2)", {{"gamma", g}});
}

}  // namespace

TEST_CASE("ad generator") {
  CHECK(ad_generator(OperatorPoly::zero()).cwiseAbs().maxCoeff() == 0.0);

  double g = 0.7;
  auto m = ad_generator(model2_x(g));
  // [X, A1] = -g A2, [X, A2] = -g A1, conjugate block for the daggers
  CHECK(std::abs(m(0, 1) - cplx(-g)) < 1e-14);
  CHECK(std::abs(m(1, 0) - cplx(-g)) < 1e-14);
  CHECK(std::abs(m(2, 3) - cplx(g)) < 1e-14);
  CHECK(std::abs(m(3, 2) - cplx(g)) < 1e-14);
  CHECK(std::abs(m(0, 0)) < 1e-14);
  CHECK(m.row(4).cwiseAbs().maxCoeff() < 1e-14);

  // the multiplication-operator X has nilpotent adjoint action of order 2
  auto n = ad_generator(model1_x(0.3));
  CHECK((n * n).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("exp_map closed forms") {
  AffineLadderMap id_map = exp_map(OperatorPoly::zero());
  CHECK((id_map.L - Eigen::Matrix<cplx, 4, 4>::Identity()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(id_map.v.cwiseAbs().maxCoeff() < 1e-15);

  double g = 0.4;
  AffineLadderMap m2 = exp_map(model2_x(g));
  CHECK(std::abs(m2.L(0, 0) - std::cosh(g)) < 1e-13);
  CHECK(std::abs(m2.L(0, 1) + std::sinh(g)) < 1e-13);
  CHECK(m2.v.cwiseAbs().maxCoeff() < 1e-13);

  // nilpotent case: the series terminates at order 1, exactly
  AffineLadderMap m1 = exp_map(model1_x(0.25));
  OperatorPoly a1 = deform_operator(m1, A1());
  OperatorPoly expected = A1() - 0.25 * (A2() + Ad2() + Id());
  CHECK((a1 - expected).max_abs_coeff() < 1e-15);
  OperatorPoly b2 = deform_operator(m1, Ad2());
  CHECK((b2 - (Ad2() + 0.25 * (A1() + Ad1() + Id()))).max_abs_coeff() < 1e-15);

  CHECK_THROWS_AS(exp_map(OperatorPoly::scalar(std::nan("") * 1.0)), AlgebraError);
}

TEST_CASE("swanson dilation rotates x and p by opposite phases") {
  double theta = 0.3;
  OperatorPoly x = parse("-(t/2)*(x1*p1+p1*x1)", {{"t", theta}});
  AffineLadderMap m = exp_map(x);
  OperatorPoly x1_img = deform_operator(m, x_op(1));
  OperatorPoly p1_img = deform_operator(m, p_op(1));
  CHECK((x1_img - std::exp(cplx(0, theta)) * x_op(1)).max_abs_coeff() < 1e-13);
  CHECK((p1_img - std::exp(cplx(0, -theta)) * p_op(1)).max_abs_coeff() < 1e-13);
}

TEST_CASE("exp_map agrees with the brute-force conjugation series") {
  for (double g : {0.05, -0.15, 0.2}) {
    for (const OperatorPoly& x : {model1_x(g), model2_x(g)}) {
      AffineLadderMap m = exp_map(x);
      for (const OperatorPoly& gen : {A1(), A2(), Ad1(), Ad2()}) {
        OperatorPoly series = oracles::bch_conjugate(x, gen);
        CHECK((deform_operator(m, gen) - series).max_abs_coeff() < 1e-12);
      }
    }
  }
}

TEST_CASE("deform_hamiltonian") {
  H0Spec h0{1.0, 2.0, 0.5};
  CHECK((deform_hamiltonian(OperatorPoly::zero(), h0) - h0.hamiltonian()).max_abs_coeff() <
        1e-14);

  // undeformed limit
  OperatorPoly near_zero = deform_hamiltonian(model1_x(1e-8), h0);
  CHECK((near_zero - h0.hamiltonian()).max_abs_coeff() < 1e-6);

  // multiplication-operator model: spot coefficients of the phase-space table
  double g = 0.2;
  PhaseTable t = to_phase_space(deform_hamiltonian(model1_x(g), h0));
  double wt1 = h0.wt1(), wt2 = h0.wt2(), wt3 = h0.wt3();
  auto at = [&](int a, int b, int c, int d) {
    PhaseMonomial m;
    m.pow = {std::uint8_t(a), std::uint8_t(b), std::uint8_t(c), std::uint8_t(d)};
    auto it = t.find(m);
    return it == t.end() ? cplx(0.0) : it->second;
  };
  CHECK(std::abs(at(2, 0, 0, 0) - (wt1 - 4 * g * g * wt2)) < 1e-12);
  CHECK(std::abs(at(0, 0, 2, 0) - (wt2 - 4 * g * g * wt1)) < 1e-12);
  CHECK(std::abs(at(0, 2, 0, 0) - wt1) < 1e-12);
  CHECK(std::abs(at(1, 0, 0, 1) - cplx(0, 4 * wt2 * g)) < 1e-12);
  CHECK(std::abs(at(0, 0, 0, 0) - (wt3 - 2 * g * g * (wt1 + wt2))) < 1e-12);

  // hyperbolic model: the rotation-like cross term
  double g2 = 0.4;
  PhaseTable t2 = to_phase_space(deform_hamiltonian(model2_x(g2), h0));
  PhaseMonomial x1p2;
  x1p2.pow = {1, 0, 0, 1};
  cplx expect = cplx(0, 2) * (wt2 - wt1) * std::cosh(g2) * std::sinh(g2);
  CHECK(std::abs(t2.at(x1p2) - expect) < 1e-12);
}

TEST_CASE("pseudo boson residuals") {
  DeformedLadders undeformed{A1(), A2(), Ad1(), Ad2()};
  CHECK(pseudo_boson_check(undeformed).max() < 1e-15);

  DeformedLadders d = deform_ladders(model1_x(0.37));
  CHECK(pseudo_boson_check(d).max() < 1e-12);

  // detector sanity: corrupting b1 shows up in the residual matrix
  OperatorPoly bad_b1 = d.b1 + 0.1 * A2();
  PseudoBosonResiduals r = pseudo_boson_check(d.a1, d.a2, bad_b1, d.b2);
  CHECK(r.max() > 1e-3);
}

TEST_CASE("map invertibility and symplectic invariant") {
  for (double g : {0.2, -0.45, 1.1}) {
    OperatorPoly x = model2_x(g);
    AffineLadderMap fwd = exp_map(x);
    AffineLadderMap bwd = exp_map(-x);
    CHECK((fwd.L * bwd.L - Eigen::Matrix<cplx, 4, 4>::Identity()).cwiseAbs().maxCoeff() <
          1e-10);
    CHECK((fwd.L * bwd.v + fwd.v).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(symplectic_residual(fwd) < 1e-10);
  }
}

TEST_CASE("adjoint symmetry for odd self-adjoint generators") {
  // when X(g)^+ = X(g) and X(-g) = -X(g), adjoint(a_j(g)) = b_j evaluated at -g
  for (double g : {0.2, 0.35}) {
    for (auto* maker : {&model1_x, &model2_x}) {
      DeformedLadders plus = deform_ladders(maker(g));
      DeformedLadders minus = deform_ladders(maker(-g));
      CHECK((adjoint(plus.a1) - minus.b1).max_abs_coeff() < 1e-12);
      CHECK((adjoint(plus.a2) - minus.b2).max_abs_coeff() < 1e-12);
    }
  }
}
