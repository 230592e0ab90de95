#pragma once

// Truncated two-mode Fock representation: dense matrices for operator
// polynomials, non-Hermitian eigensolving with lattice matching, vacuum
// search, phi/Psi ladder families, biorthogonality Grams, metric and
// intertwining residuals, and quasi-basis partial sums.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "deform.hpp"
#include "expm.hpp"
#include "opalg.hpp"

namespace pbl {

using StateVec = Eigen::VectorXcd;

struct FockRep {
  int n_max = 16;  // per-mode cutoff; states |n>, 0 <= n <= n_max

  int side() const { return n_max + 1; }
  int dim() const { return side() * side(); }
  // mode-1 index major
  int index(int n1, int n2) const { return n1 * side() + n2; }
  std::pair<int, int> levels(int idx) const { return {idx / side(), idx % side()}; }
};

namespace detail {

inline double falling_sqrt(int n, int a) {
  // sqrt(n! / (n-a)!)
  double v = 1.0;
  for (int k = 0; k < a; ++k) v *= n - k;
  return std::sqrt(v);
}

inline double factorial(int n) {
  double v = 1.0;
  for (int k = 2; k <= n; ++k) v *= k;
  return v;
}

inline double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double v = 1.0;
  for (int j = 1; j <= k; ++j) v *= double(n - k + j) / j;
  return v;
}

}  // namespace detail

// Exact matrix elements of a normal-ordered ladder monomial from the
// sqrt(n) rules; entries raising past the cutoff are dropped.
inline Eigen::MatrixXcd build_matrix(const FockRep& rep, const OperatorPoly& p) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rep.dim(), rep.dim());
  for (const auto& [mono, c] : p.terms()) {
    int c1 = mono.pow[0], a1 = mono.pow[1], c2 = mono.pow[2], a2 = mono.pow[3];
    for (int n1 = a1; n1 <= rep.n_max; ++n1) {
      int m1 = n1 - a1 + c1;
      if (m1 > rep.n_max) continue;
      double amp1 = detail::falling_sqrt(n1, a1) * detail::falling_sqrt(m1, c1);
      for (int n2 = a2; n2 <= rep.n_max; ++n2) {
        int m2 = n2 - a2 + c2;
        if (m2 > rep.n_max) continue;
        double amp2 = detail::falling_sqrt(n2, a2) * detail::falling_sqrt(m2, c2);
        m(rep.index(m1, m2), rep.index(n1, n2)) += c * amp1 * amp2;
      }
    }
  }
  return m;
}

// Indices (n1, n2) with n1 + n2 <= K, ordered by (total, n1).
inline std::vector<std::pair<int, int>> index_range(int k_max) {
  std::vector<std::pair<int, int>> out;
  for (int t = 0; t <= k_max; ++t)
    for (int n1 = 0; n1 <= t; ++n1) out.emplace_back(n1, t - n1);
  return out;
}

struct LatticeMatch {
  int n1, n2;
  cplx target;  // real lattice value
  cplx found;
  double abs_err;
};

struct SpectrumResult {
  std::vector<cplx> eigenvalues;  // sorted by (Re, Im)
  Eigen::MatrixXcd eigenvectors;  // columns follow eigenvalue order
  std::vector<LatticeMatch> matches;
  double max_abs_err = 0.0;
  double max_abs_imag = 0.0;
};

// Dense non-symmetric eigendecomposition plus greedy nearest-distance
// matching of the lattice {w1 n1 + w2 n2 + w3 : n1+n2 <= K} against the
// computed eigenvalues; each lattice point and eigenvalue is used once.
// The eigensolve runs on a padded representation (n_max + pad per mode):
// deformations that spread states across levels pollute interior eigenvalues
// of the bare truncation well above 1e-8, and the extra levels push that
// pollution below the interior tolerances.
inline SpectrumResult spectrum(const FockRep& rep, const OperatorPoly& h,
                               const H0Spec& h0, int k_interior, int pad = 8) {
  if (2 * k_interior > rep.n_max)
    throw AlgebraError("spectrum: K_interior must satisfy K <= n_max/2");
  FockRep work{rep.n_max + pad};
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(build_matrix(work, h));
  if (es.info() != Eigen::Success) throw AlgebraError("spectrum: eigensolver failed");

  SpectrumResult res;
  std::vector<int> order(work.dim());
  for (int k = 0; k < work.dim(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    cplx ea = es.eigenvalues()(a), eb = es.eigenvalues()(b);
    if (ea.real() != eb.real()) return ea.real() < eb.real();
    return ea.imag() < eb.imag();
  });
  res.eigenvalues.resize(work.dim());
  res.eigenvectors.resize(work.dim(), work.dim());
  for (int k = 0; k < work.dim(); ++k) {
    res.eigenvalues[k] = es.eigenvalues()(order[k]);
    res.eigenvectors.col(k) = es.eigenvectors().col(order[k]);
  }

  auto lattice = index_range(k_interior);
  struct Cand {
    double dist;
    int li, ei;
  };
  std::vector<Cand> cands;
  cands.reserve(lattice.size() * res.eigenvalues.size());
  for (int li = 0; li < int(lattice.size()); ++li) {
    double target = h0.w1 * lattice[li].first + h0.w2 * lattice[li].second + h0.w3;
    for (int ei = 0; ei < int(res.eigenvalues.size()); ++ei)
      cands.push_back({std::abs(res.eigenvalues[ei] - target), li, ei});
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.li != b.li) return a.li < b.li;
    return a.ei < b.ei;
  });
  std::vector<bool> lat_used(lattice.size(), false), eig_used(res.eigenvalues.size(), false);
  std::size_t matched = 0;
  for (const Cand& c : cands) {
    if (matched == lattice.size()) break;
    if (lat_used[c.li] || eig_used[c.ei]) continue;
    lat_used[c.li] = eig_used[c.ei] = true;
    ++matched;
    double target = h0.w1 * lattice[c.li].first + h0.w2 * lattice[c.li].second + h0.w3;
    res.matches.push_back(
        {lattice[c.li].first, lattice[c.li].second, target, res.eigenvalues[c.ei], c.dist});
    res.max_abs_err = std::max(res.max_abs_err, c.dist);
    res.max_abs_imag =
        std::max(res.max_abs_imag, std::abs(res.eigenvalues[c.ei].imag()));
  }
  std::sort(res.matches.begin(), res.matches.end(), [](const LatticeMatch& a,
                                                       const LatticeMatch& b) {
    if (a.n1 + a.n2 != b.n1 + b.n2) return a.n1 + a.n2 < b.n1 + b.n2;
    return a.n1 < b.n1;
  });
  return res;
}

struct VacuumResult {
  StateVec vec;      // unit norm
  double residual;   // sqrt(|a1 v|^2 + |a2 v|^2)
};

// Joint near-null vector of (a1, a2): smallest eigenpair of
// a1^H a1 + a2^H a2. The residual doubles as a validity diagnostic for
// out-of-range parameters.
inline VacuumResult vacuum(const FockRep& rep, const OperatorPoly& a1,
                           const OperatorPoly& a2, double residual_tol = 1e-6,
                           bool enforce_tol = true) {
  if (a1.degree() > 1 || a2.degree() > 1)
    throw AlgebraError("vacuum: annihilators must be affine-linear");
  Eigen::MatrixXcd m1 = build_matrix(rep, a1);
  Eigen::MatrixXcd m2 = build_matrix(rep, a2);
  Eigen::MatrixXcd gram = m1.adjoint() * m1 + m2.adjoint() * m2;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
  if (es.info() != Eigen::Success) throw AlgebraError("vacuum: eigensolver failed");
  VacuumResult r;
  r.vec = es.eigenvectors().col(0);
  // fix the overall phase: largest component real positive
  int imax = 0;
  for (int k = 1; k < r.vec.size(); ++k)
    if (std::abs(r.vec(k)) > std::abs(r.vec(imax))) imax = k;
  r.vec *= std::conj(r.vec(imax)) / std::abs(r.vec(imax));
  r.residual = std::sqrt(std::max(0.0, es.eigenvalues()(0)));
  if (enforce_tol && r.residual > residual_tol)
    throw AlgebraError("vacuum residual " + std::to_string(r.residual) +
                       " exceeds tolerance; parameters outside the valid range?");
  return r;
}

struct StateFamily {
  int k_max = 0;
  std::vector<std::pair<int, int>> indices;  // index_range(k_max) order
  std::vector<StateVec> states;
  double max_edge_leakage = 0.0;  // norm of cutoff-edge components seen

  const StateVec& at(int n1, int n2) const {
    for (std::size_t k = 0; k < indices.size(); ++k)
      if (indices[k].first == n1 && indices[k].second == n2) return states[k];
    throw AlgebraError("StateFamily: index out of range");
  }
};

namespace detail {

inline double edge_norm(const FockRep& rep, const StateVec& v) {
  double s = 0.0;
  for (int n = 0; n <= rep.n_max; ++n) {
    s += std::norm(v(rep.index(rep.n_max, n)));
    if (n != rep.n_max) s += std::norm(v(rep.index(n, rep.n_max)));
  }
  return std::sqrt(s);
}

}  // namespace detail

// phi_{n1,n2} = r1^{n1} r2^{n2} vac / sqrt(n1! n2!) for raising operators
// (r1, r2); pass (b1, b2) with the a-vacuum for the phi family, or
// (adjoint(a1), adjoint(a2)) with the b^+-vacuum for the Psi family.
inline StateFamily raise_family(const FockRep& rep, const OperatorPoly& r1,
                                const OperatorPoly& r2, const StateVec& vac, int k_max,
                                bool allow_full_range = false) {
  if (!allow_full_range && 2 * k_max > rep.n_max)
    throw AlgebraError("raise_family: K must satisfy K <= n_max/2");
  Eigen::MatrixXcd m1 = build_matrix(rep, r1);
  Eigen::MatrixXcd m2 = build_matrix(rep, r2);
  StateFamily fam;
  fam.k_max = k_max;
  fam.indices = index_range(k_max);
  // column ladder: first raise mode 2 from the vacuum, then mode 1
  std::vector<std::vector<StateVec>> grid(k_max + 1);
  grid[0].resize(k_max + 1);
  grid[0][0] = vac;
  for (int n2 = 1; n2 <= k_max; ++n2)
    grid[0][n2] = m2 * grid[0][n2 - 1] / std::sqrt(double(n2));
  for (int n1 = 1; n1 <= k_max; ++n1) {
    grid[n1].resize(k_max + 1);
    for (int n2 = 0; n2 + n1 <= k_max; ++n2)
      grid[n1][n2] = m1 * grid[n1 - 1][n2] / std::sqrt(double(n1));
  }
  for (auto [n1, n2] : fam.indices) {
    fam.states.push_back(grid[n1][n2]);
    fam.max_edge_leakage =
        std::max(fam.max_edge_leakage, detail::edge_norm(rep, grid[n1][n2]));
  }
  return fam;
}

// ------------------------------------------------------------------
// Model-2 closed forms (X = gamma (x1 x2 + p1 p2)).

inline double xi_factor(int a, int b, int c, int d) {
  return std::sqrt(detail::factorial(a + b - c - d) * detail::factorial(c + d) /
                   (detail::factorial(a) * detail::factorial(b)));
}

// Exact evaluation of the printed double sum for phi_{n1,n2} (or, with
// psi=true, the Psi variant carrying the (-S) factors).
inline StateVec model2_coefficients(const FockRep& rep, int n1, int n2, double gamma,
                                    bool psi = false) {
  if (n1 + n2 > rep.n_max)
    throw AlgebraError("model2_coefficients: n1+n2 exceeds n_max");
  const double c = std::cosh(gamma);
  const double s = std::sinh(gamma);
  StateVec v = StateVec::Zero(rep.dim());
  for (int k = 0; k <= n1; ++k) {
    for (int j = 0; j <= n2; ++j) {
      double coef = detail::binom(n1, k) * detail::binom(n2, j) *
                    xi_factor(n1, n2, j, k);
      double cs = std::pow(c, n1 + j - k) *
                  (psi ? std::pow(-s, n2 + k - j) : std::pow(s, n2 + k - j));
      v(rep.index(n1 + n2 - j - k, j + k)) += coef * cs;
    }
  }
  return v;
}

// The quadruple binomial sum of the model-2 summation rule,
// <Psi_{m1,m2}, phi_{n1,n2}>, evaluated exactly as printed.
inline double model2_pairing_sum(int m1, int m2, int n1, int n2, double gamma) {
  if (m1 + m2 != n1 + n2) return 0.0;
  const double c = std::cosh(gamma);
  const double s = std::sinh(gamma);
  double total = 0.0;
  for (int i = 0; i <= m1; ++i)
    for (int l = 0; l <= m2; ++l)
      for (int k = 0; k <= n1; ++k)
        for (int j = 0; j <= n2; ++j) {
          if (l + i != j + k) continue;
          double sign = ((m2 + i - l) % 2 == 0) ? 1.0 : -1.0;
          total += detail::binom(m1, i) * detail::binom(m2, l) * detail::binom(n1, k) *
                   detail::binom(n2, j) * xi_factor(n1, n2, j, k) *
                   xi_factor(m1, m2, l, i) * std::pow(c, m1 + n1 + l - i + j - k) *
                   sign * std::pow(s, m2 + n2 + i - l + k - j);
        }
  return total;
}

// G[(n),(m)] = <phi_n, Psi_m>, conjugate-linear in the first slot.
inline Eigen::MatrixXcd biorth_gram(const StateFamily& phi, const StateFamily& psi) {
  if (phi.indices.size() != psi.indices.size())
    throw AlgebraError("biorth_gram: families must share index range");
  Eigen::MatrixXcd g(phi.indices.size(), psi.indices.size());
  for (std::size_t r = 0; r < phi.indices.size(); ++r)
    for (std::size_t c = 0; c < psi.indices.size(); ++c)
      g(r, c) = phi.states[r].dot(psi.states[c]);
  return g;
}

struct ResidualEntry {
  int n1, n2;
  double residual;
};

struct ResidualReport {
  std::vector<ResidualEntry> entries;
  double max_residual = 0.0;

  void add(int n1, int n2, double r) {
    entries.push_back({n1, n2, r});
    max_residual = std::max(max_residual, r);
  }
};

// Metric check: Theta = e^{-2X} on the Fock matrix; residuals
// |Psi_n - Theta phi_n| per index.
inline ResidualReport theta_check(const FockRep& rep, const OperatorPoly& x,
                                  const StateFamily& phi, const StateFamily& psi) {
  Eigen::MatrixXcd theta = expm(-2.0 * build_matrix(rep, x));
  if (!theta.allFinite()) throw AlgebraError("theta_check: e^{-2X} overflowed");
  ResidualReport rep_out;
  for (std::size_t k = 0; k < phi.indices.size(); ++k) {
    auto [n1, n2] = phi.indices[k];
    rep_out.add(n1, n2, (psi.states[k] - theta * phi.states[k]).norm());
  }
  return rep_out;
}

// Weak intertwining: |N_j^+ Theta phi_n - Theta N_j phi_n| per index/mode.
inline std::array<ResidualReport, 2> intertwine_check(const FockRep& rep,
                                                      const OperatorPoly& x,
                                                      const OperatorPoly& num1,
                                                      const OperatorPoly& num2,
                                                      const StateFamily& phi) {
  Eigen::MatrixXcd theta = expm(-2.0 * build_matrix(rep, x));
  std::array<ResidualReport, 2> out;
  const OperatorPoly* nums[2] = {&num1, &num2};
  for (int j = 0; j < 2; ++j) {
    Eigen::MatrixXcd nj = build_matrix(rep, *nums[j]);
    Eigen::MatrixXcd nj_dag = build_matrix(rep, adjoint(*nums[j]));
    for (std::size_t k = 0; k < phi.indices.size(); ++k) {
      auto [n1, n2] = phi.indices[k];
      out[j].add(n1, n2,
                 (nj_dag * (theta * phi.states[k]) - theta * (nj * phi.states[k])).norm());
    }
  }
  return out;
}

struct QuasiBasisSums {
  std::vector<cplx> partial;  // S_K for K = 0..k_max
  cplx target;                // <f, g>
};

// S_K = sum_{n1+n2 <= K} <f, phi_n><Psi_n, g>.
inline QuasiBasisSums quasi_basis_sum(const StateFamily& phi, const StateFamily& psi,
                                      const StateVec& f, const StateVec& g) {
  QuasiBasisSums out;
  out.target = f.dot(g);
  out.partial.assign(phi.k_max + 1, cplx(0.0));
  for (std::size_t k = 0; k < phi.indices.size(); ++k) {
    int total = phi.indices[k].first + phi.indices[k].second;
    out.partial[total] += f.dot(phi.states[k]) * psi.states[k].dot(g);
  }
  for (int k = 1; k <= phi.k_max; ++k) out.partial[k] += out.partial[k - 1];
  return out;
}

// Minimum Rayleigh quotient of the Hermitian part of e^{-2X} over the
// interior subspace (positivity diagnostic for the metric).
inline double theta_min_rayleigh(const FockRep& rep, const OperatorPoly& x,
                                 int k_interior) {
  Eigen::MatrixXcd theta = expm(-2.0 * build_matrix(rep, x));
  auto interior = index_range(k_interior);
  Eigen::MatrixXcd sub(interior.size(), interior.size());
  for (std::size_t r = 0; r < interior.size(); ++r)
    for (std::size_t c = 0; c < interior.size(); ++c)
      sub(r, c) = theta(rep.index(interior[r].first, interior[r].second),
                        rep.index(interior[c].first, interior[c].second));
  Eigen::MatrixXcd herm = 0.5 * (sub + sub.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
  return es.eigenvalues()(0);
}

}  // namespace pbl
