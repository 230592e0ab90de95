#pragma once

// Dense matrix exponential by Pade approximation with scaling and squaring
// (Higham 2005). Used both for the 5x5 adjoint generator and for Fock-space
// metric operators; eigendecomposition is avoided since the generators may
// be nilpotent or defective.

#include <Eigen/Dense>
#include <cmath>

namespace pbl {

namespace detail {

inline Eigen::MatrixXcd pade_expm(const Eigen::MatrixXcd& a, const double* b, int m) {
  const auto n = a.rows();
  Eigen::MatrixXcd a2 = a * a;
  Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd u, v;
  if (m == 13) {
    Eigen::MatrixXcd a4 = a2 * a2;
    Eigen::MatrixXcd a6 = a4 * a2;
    u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
             b[3] * a2 + b[1] * id);
    v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
        b[2] * a2 + b[0] * id;
  } else {
    Eigen::MatrixXcd pow = id;
    u = b[1] * id;
    v = b[0] * id;
    for (int k = 2; k <= m; k += 2) {
      pow = pow * a2;
      v += b[k] * pow;
      if (k + 1 <= m) u += b[k + 1] * pow;
    }
    u = a * u;
  }
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace detail

inline Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a) {
  static const double b3[] = {120, 60, 12, 1};
  static const double b5[] = {30240, 15120, 3360, 420, 30, 1};
  static const double b7[] = {17297280, 8648640, 1995840, 277200, 25200, 1512, 56, 1};
  static const double b9[] = {17643225600., 8821612800., 2075673600., 302702400.,
                              30270240.,    2162160.,    110880.,     3960.,
                              90.,           1.};
  static const double b13[] = {
      64764752532480000., 32382376266240000., 7771770303897600.,
      1187353796428800.,  129060195264000.,   10559470521600.,
      670442572800.,      33522128640.,       1323241920.,
      40840800.,          960960.,            16380.,
      182.,               1.};

  double nrm = a.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
  if (nrm <= 1.495585217958292e-2) return detail::pade_expm(a, b3, 3);
  if (nrm <= 2.539398330063230e-1) return detail::pade_expm(a, b5, 5);
  if (nrm <= 9.504178996162932e-1) return detail::pade_expm(a, b7, 7);
  if (nrm <= 2.097847961257068e0) return detail::pade_expm(a, b9, 9);

  const double theta13 = 5.371920351148152;
  int s = 0;
  if (nrm > theta13) s = std::max(0, int(std::ceil(std::log2(nrm / theta13))));
  Eigen::MatrixXcd r = detail::pade_expm(a / std::pow(2.0, s), b13, 13);
  for (int k = 0; k < s; ++k) r = r * r;
  return r;
}

}  // namespace pbl
