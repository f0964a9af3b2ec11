#include "twistorlab/curvature_analysis.hpp"

namespace twistorlab {

Operator6 curvature_operator(const Curvature4& R) {
  const auto basis = SdAsdBasis::standard().ordered();
  Eigen::Matrix<double, 6, 6> coeffs;  // coeffs(A, p) over the pairs i<j
  std::array<std::pair<int, int>, 6> pairs{};
  int p = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) pairs[p++] = {i, j};
  for (int A = 0; A < 6; ++A)
    for (int q = 0; q < 6; ++q) coeffs(A, q) = basis[A].coeff({pairs[q].first, pairs[q].second}).real();
  Eigen::Matrix<double, 6, 6> Rp;
  for (int q = 0; q < 6; ++q)
    for (int r = 0; r < 6; ++r) Rp(q, r) = R(pairs[q].first, pairs[q].second, pairs[r].first, pairs[r].second);
  return coeffs * Rp * coeffs.transpose();
}

Operator6 WeylDecomposition::reassemble() const {
  Operator6 m;
  const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
  m.topLeftCorner<3, 3>() = Wplus + (s / 12.0) * I;
  m.bottomRightCorner<3, 3>() = Wminus + (s / 12.0) * I;
  m.bottomLeftCorner<3, 3>() = Ric0;
  m.topRightCorner<3, 3>() = Ric0.transpose();
  return m;
}

WeylDecomposition decompose(const Operator6& op) {
  WeylDecomposition d;
  d.s = 2.0 * op.trace();
  const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
  d.Wplus = op.topLeftCorner<3, 3>() - (d.s / 12.0) * I;
  d.Wminus = op.bottomRightCorner<3, 3>() - (d.s / 12.0) * I;
  d.Ric0 = op.bottomLeftCorner<3, 3>();
  d.sstar = 4.0 * op(0, 0);
  return d;
}

double ricci_J_defect(const Curvature4& R) {
  const Mat4 ric = R.ricci();
  const Mat4 J0 = standard_J();
  return (ric * J0 - J0 * ric).norm();
}

double traceless_ricci_norm(const Curvature4& R) {
  const Mat4 ric = R.ricci();
  return (ric - (ric.trace() / 4.0) * Mat4::Identity()).norm();
}

ConditionFlags predicates(const WeylDecomposition& dec, const Curvature4& R, double dF_norm, double tol) {
  ConditionFlags f;
  f.tolerance = tol;
  auto flag = [tol](double defect) { return Flag{defect < tol, defect}; };
  f.self_dual = flag(dec.Wminus.norm());
  f.anti_self_dual = flag(dec.Wplus.norm());
  f.einstein = flag(dec.Ric0.norm());
  f.kahler = flag(dF_norm);
  f.ricci_J_invariant = flag(ricci_J_defect(R));
  f.s = dec.s;
  f.sstar = dec.sstar;
  return f;
}

ConditionFlags analyze_point(const HermitianSurface& M, const Vec4& x, double tol) {
  const LeviCivitaData lc = levi_civita(M, x);
  return predicates(decompose(curvature_operator(lc.R)), lc.R, dF_coords(M, x).norm(), tol);
}

}  // namespace twistorlab
