#include "twistorlab/twistor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>
#include <tuple>

namespace twistorlab {

namespace {

const Complex kI(0.0, 1.0);
using namespace tw;

ComplexForm phi(int k) { return ComplexForm::basis(kDim, {k}); }
ComplexForm phi(int a, int b) { return ComplexForm::basis(kDim, {a, b}); }
ComplexForm phi(int a, int b, int c) { return ComplexForm::basis(kDim, {a, b, c}); }

ComplexForm bar(const ComplexForm& a) {
  static const std::array<int, 6> inv = twistor_involution();
  return a.conjugate(inv);
}

// (1,0) test for basis index k under J_i.
bool holomorphic_index(int i, int k) {
  const auto pat = holomorphic_pattern(i);
  return k < 3 ? pat[k] : !pat[k - 3];
}

ComplexForm project(const ComplexForm& a, int i, int p) {
  std::vector<ComplexForm::Term> kept;
  for (const auto& t : a.terms()) {
    int n = 0;
    for (int k : ComplexForm::indices_of(t.mask)) n += holomorphic_index(i, k) ? 1 : 0;
    if (n == p) kept.push_back(t);
  }
  return ComplexForm::from_terms(a.dim(), a.degree(), std::move(kept));
}

Eigen::VectorXcd dense(const ComplexForm& a) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(1 << a.dim());
  for (const auto& t : a.terms()) v(t.mask) = t.coeff;
  return v;
}

ComplexForm sparse(int dim, int degree, const Eigen::VectorXcd& v) {
  std::vector<ComplexForm::Term> raw;
  for (int m = 0; m < v.size(); ++m)
    if (v(m) != 0.0) raw.push_back({static_cast<ComplexForm::Mask>(m), v(m)});
  return ComplexForm::from_terms(dim, degree, std::move(raw));
}

// d of a chart-coordinate form given the partial derivatives of its components.
ComplexForm exterior_derivative(int degree, const std::array<Eigen::VectorXcd, 6>& partials) {
  ComplexForm out(kDim, degree + 1);
  for (int m = 0; m < kDim; ++m) out += wedge(phi(m), sparse(kDim, degree, partials[m]));
  return out;
}

Eigen::Matrix4cd along_c(const ConnectionCoords& w, const Eigen::Vector4cd& X) {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  for (int c = 0; c < 4; ++c) m += X(c) * w[c].cast<Complex>();
  return m;
}

// Dual vectors of the horizontal coframe members, in frame components.
std::array<Eigen::Vector4cd, 6> dual_vectors(const Eigen::Matrix<Complex, 4, 2>& uhat) {
  std::array<Eigen::Vector4cd, 6> v;
  v[P1] = uhat.col(0);
  v[P2] = uhat.col(1);
  v[P3] = Eigen::Vector4cd::Zero();
  v[B1] = uhat.col(0).conjugate();
  v[B2] = uhat.col(1).conjugate();
  v[B3] = Eigen::Vector4cd::Zero();
  return v;
}

constexpr std::array<int, 4> kHorizontal{P1, P2, B1, B2};

template <typename F>
ComplexForm horizontal_two_form(const std::array<Eigen::Vector4cd, 6>& v, F f) {
  std::vector<ComplexForm::Term> raw;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      const int P = kHorizontal[a], Q = kHorizontal[b];
      raw.push_back({(1u << P) | (1u << Q), f(v[P], v[Q])});
    }
  return ComplexForm::from_terms(kDim, 2, std::move(raw));
}

template <typename F>
ComplexForm horizontal_one_form(const std::array<Eigen::Vector4cd, 6>& v, F f) {
  std::vector<ComplexForm::Term> raw;
  for (int P : kHorizontal) raw.push_back({1u << P, f(v[P])});
  return ComplexForm::from_terms(kDim, 1, std::move(raw));
}

Eigen::Matrix<Complex, 6, 6> antisym(const ComplexForm& two) {
  Eigen::Matrix<Complex, 6, 6> k = Eigen::Matrix<Complex, 6, 6>::Zero();
  for (const auto& t : two.terms()) {
    const auto idx = ComplexForm::indices_of(t.mask);
    k(idx[0], idx[1]) = t.coeff;
    k(idx[1], idx[0]) = -t.coeff;
  }
  return k;
}

const TwistorStructure& need_structure(const TwistorCoframe& cf) {
  if (!cf.structure) throw Error("coframe was built without structure data");
  return *cf.structure;
}

void check_index(int i, int hi = 4) {
  if (i < 1 || i > hi) throw Error("structure index must be in 1.." + std::to_string(hi));
}

std::string fmt_t(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

}  // namespace

std::array<int, 6> twistor_involution() { return {B1, B2, B3, P1, P2, P3}; }

ConnectionChoice ConnectionChoice::gauduchon(double t) {
  if (t == 0.0) return lichnerowicz();
  if (t == 1.0) return chern();
  return {ConnectionKind::Gauduchon, t};
}

double ConnectionChoice::parameter() const {
  switch (kind) {
    case ConnectionKind::Lichnerowicz: return 0.0;
    case ConnectionKind::Chern: return 1.0;
    case ConnectionKind::Gauduchon: return t;
  }
  return t;
}

std::string ConnectionChoice::name() const {
  switch (kind) {
    case ConnectionKind::Lichnerowicz: return "lichnerowicz";
    case ConnectionKind::Chern: return "chern";
    case ConnectionKind::Gauduchon: return t == -1.0 ? "bismut" : "gauduchon(t=" + fmt_t(t) + ")";
  }
  return "?";
}

ConnectionChoice parse_connection(std::string_view name, double t) {
  if (name == "lichnerowicz") return ConnectionChoice::lichnerowicz();
  if (name == "chern") return ConnectionChoice::chern();
  if (name == "bismut") return {ConnectionKind::Gauduchon, -1.0};
  if (name == "gauduchon") return ConnectionChoice::gauduchon(t);
  throw Error("unknown connection '" + std::string(name) + "'");
}

void Lambdas::validate() const {
  for (double l : {l1, l2, l3})
    if (!(l >= kMinLambda)) throw Error("lambda must be at least 1e-3");
}

TwistorPoint TwistorPoint::from_vector(const HermitianSurface& M, const Vec4& x, const Eigen::Vector4cd& v) {
  const Complex n2 = v.transpose() * M.metric(x).cast<Complex>() * v.conjugate();
  if (!(n2.real() > 1e-24)) throw Error("twistor line needs a nonzero vector");
  Eigen::Vector4cd w = v / std::sqrt(n2.real());
  for (int k = 0; k < 4; ++k) {
    if (std::abs(w(k)) > 1e-12) {
      w *= std::abs(w(k)) / w(k);
      w(k) = std::abs(w(k));
      break;
    }
  }
  return {x, w};
}

TwistorChart::TwistorChart(const HermitianSurface& M, FrameSeeds seeds, double zeta_max)
    : M_(&M), seeds_(std::move(seeds)), zeta_max_(zeta_max) {}

void TwistorChart::check(const Vec6& p) const {
  if (!(std::hypot(p(4), p(5)) <= zeta_max_)) throw Error("fiber coordinate out of chart");
}

Vec6 TwistorChart::coordinates(const TwistorPoint& z) const {
  const UnitaryFrame f = adapted_frame(*M_, z.x, seeds_);
  const Complex c1 = f.eta.row(0) * z.line;
  const Complex c2 = f.eta.row(1) * z.line;
  if (std::abs(c1) < 1e-12 * std::max(1.0, std::abs(c2))) throw Error("fiber coordinate out of chart");
  const Complex zeta = c2 / c1;
  Vec6 p;
  p << z.x, zeta.real(), zeta.imag();
  check(p);
  return p;
}

TwistorPoint TwistorChart::point(const Vec6& p) const {
  check(p);
  const Vec4 x = p.head<4>();
  const UnitaryFrame f = adapted_frame(*M_, x, seeds_);
  const Complex zeta(p(4), p(5));
  return TwistorPoint::from_vector(*M_, x, f.u.col(0) + zeta * f.u.col(1));
}

Eigen::Matrix2cd section_matrix(Complex zeta) {
  const double n = std::sqrt(1.0 + std::norm(zeta));
  Eigen::Matrix2cd a;
  a << 1.0, -std::conj(zeta), zeta, 1.0;
  return a / n;
}

std::array<Eigen::Matrix2cd, 2> section_derivatives(Complex zeta) {
  const double n = std::sqrt(1.0 + std::norm(zeta));
  const double n3 = n * n * n;
  Eigen::Matrix2cd base;
  base << 1.0, -std::conj(zeta), zeta, 1.0;
  Eigen::Matrix2cd d1, d2;
  d1 << 0.0, -1.0, 1.0, 0.0;
  d2 << 0.0, kI, kI, 0.0;
  return {d1 / n - (zeta.real() / n3) * base, d2 / n - (zeta.imag() / n3) * base};
}

CMat6 coframe_matrix(const TwistorChart& chart, const ConnectionChoice& conn, const Vec6& p) {
  chart.check(p);
  const HermitianSurface& M = chart.surface();
  const Vec4 x = p.head<4>();
  const Complex zeta(p(4), p(5));
  const UnitaryFrame f = adapted_frame(M, x, chart.seeds());
  const ConnectionCoords w = gauduchon_forms(M, x, conn.parameter(), chart.seeds());
  const Eigen::Matrix2cd a = section_matrix(zeta);
  const Eigen::Matrix2cd ah = a.adjoint();
  const auto da = section_derivatives(zeta);
  CMat6 C = CMat6::Zero();
  C.block<2, 4>(0, 0) = ah * f.eta;
  for (int c = 0; c < 4; ++c) C(2, c) = (ah * unitary_part(w[c]) * a)(0, 1);
  for (int k = 0; k < 2; ++k) C(2, 4 + k) = (ah * da[k])(0, 1);
  C.bottomRows<3>() = C.topRows<3>().conjugate();
  return C;
}

TwistorCoframe twistor_coframe(const TwistorChart& chart, const ConnectionChoice& conn, const Vec6& p,
                               bool with_structure) {
  TwistorCoframe cf;
  cf.connection = conn;
  cf.p = p;
  cf.C = coframe_matrix(chart, conn, p);
  if (cf.gram() < 1e-10) throw Error("twistor coframe degenerate");
  const Eigen::Matrix2cd a = section_matrix(Complex(p(4), p(5)));
  Eigen::Matrix<Complex, 4, 2> u;
  u.col(0) = slot_vector({1, false});
  u.col(1) = slot_vector({2, false});
  cf.uhat = u * a;
  if (!with_structure) return cf;

  const HermitianSurface& M = chart.surface();
  const Vec4 x = p.head<4>();
  const LeviCivitaData lc = levi_civita(M, x, chart.seeds());
  const HermitianConnectionData hc = gauduchon(M, x, conn.parameter(), conn.kind != ConnectionKind::Lichnerowicz,
                                               chart.seeds());
  const Curvature4& K = hc.K ? *hc.K : lc.R;
  const auto v = dual_vectors(cf.uhat);
  const Eigen::Matrix<Complex, 4, 2> ub = cf.uhat.conjugate();

  TwistorStructure st;
  for (int a1 = 0; a1 < 2; ++a1)
    for (int b1 = 0; b1 < 2; ++b1) {
      st.riemann[a1][b1] = horizontal_two_form(v, [&](const Eigen::Vector4cd& X, const Eigen::Vector4cd& Y) {
        return lc.R.eval(ub.col(a1), cf.uhat.col(b1), X, Y);
      });
      st.curvature[a1][b1] = horizontal_two_form(v, [&](const Eigen::Vector4cd& X, const Eigen::Vector4cd& Y) {
        return K.eval(ub.col(a1), cf.uhat.col(b1), X, Y);
      });
    }
  for (int a1 = 0; a1 < 2; ++a1) {
    st.torsion[a1] = horizontal_two_form(v, [&](const Eigen::Vector4cd& X, const Eigen::Vector4cd& Y) {
      Complex acc = 0.0;
      for (int i = 0; i < 4; ++i) acc += ub(i, a1) * Complex(X.transpose() * hc.torsion[i].cast<Complex>() * Y);
      return acc;
    });
  }
  const Eigen::Matrix4cd E = lc.frame.e.cast<Complex>();
  st.mu = horizontal_one_form(v, [&](const Eigen::Vector4cd& X) {
    return Complex(-(ub.col(0).transpose() * along_c(lc.omega, E * X) * ub.col(1))(0, 0));
  });
  st.R_1b21_1b = lc.R.eval(ub.col(0), cf.uhat.col(1), cf.uhat.col(0), ub.col(0));
  st.R_1b22_2b = lc.R.eval(ub.col(0), cf.uhat.col(1), cf.uhat.col(1), ub.col(1));
  const WeylDecomposition dec = decompose(curvature_operator(lc.R));
  st.s = dec.s;
  st.sstar = dec.sstar;
  st.flags = predicates(dec, lc.R, dF_coords(M, x).norm());
  cf.structure = std::move(st);
  return cf;
}

std::array<bool, 3> holomorphic_pattern(int i) {
  check_index(i);
  switch (i) {
    case 1: return {true, false, true};
    case 2: return {true, false, false};
    case 3: return {true, true, true};
    default: return {true, true, false};
  }
}

Mat6 acs_endomorphism(int i, const CMat6& C) {
  Eigen::Matrix<Complex, 6, 1> d;
  for (int k = 0; k < 6; ++k) d(k) = holomorphic_index(i, k) ? kI : -kI;
  return (C.inverse() * d.asDiagonal() * C).real();
}

ComplexForm kahler_form(int i, const Lambdas& l) {
  check_index(i);
  l.validate();
  const double s2 = (i <= 2) ? -1.0 : 1.0;
  const double s3 = (i % 2 == 1) ? 1.0 : -1.0;
  return kI * (l.l1 * l.l1 * phi(P1, B1) + s2 * l.l2 * l.l2 * phi(P2, B2) + s3 * l.l3 * l.l3 * phi(P3, B3));
}

Mat6 twistor_metric(const Lambdas& l, const CMat6& C) {
  const std::array<double, 3> w{l.l1 * l.l1, l.l2 * l.l2, l.l3 * l.l3};
  Mat6 h = Mat6::Zero();
  for (int a = 0; a < 3; ++a) {
    const Eigen::Matrix<Complex, 1, 6> r = C.row(a);
    h += w[a] * (r.transpose() * r.conjugate()).real();
  }
  return h;
}

ComplexForm to_chart(const ComplexForm& a, const CMat6& C) { return pullback(a, C); }
ComplexForm from_chart(const ComplexForm& a, const CMat6& C) { return pullback(a, C.inverse()); }

ComplexForm dK_formula(int i, double lambda, const TwistorCoframe& cf) {
  check_index(i);
  Lambdas::single(lambda).validate();
  if (!cf.connection.has_formulas())
    throw Error("no dK formula for " + cf.connection.name() + "; use the oracle path");
  const TwistorStructure& st = need_structure(cf);
  const double l2 = lambda * lambda;
  const ComplexForm X = phi(B1, P2, P3) - phi(P1, B2, B3);
  const ComplexForm& Psi = st.curvature[0][1];
  const ComplexForm vert = wedge(Psi, phi(B3)) - wedge(bar(Psi), phi(P3));
  const double sv = (i % 2 == 1) ? l2 : -l2;
  if (cf.connection.kind == ConnectionKind::Lichnerowicz) {
    if (i <= 2) return kI * (2.0 * X + sv * vert);
    const ComplexForm m = 2.0 * wedge(bar(st.mu), phi(P1, P2)) - 2.0 * wedge(st.mu, phi(B1, B2));
    return kI * (m + sv * vert);
  }
  const ComplexForm& T1 = st.torsion[0];
  const ComplexForm& T2 = st.torsion[1];
  const ComplexForm t1 = wedge(T1, phi(B1)) - wedge(bar(T1), phi(P1));
  if (i <= 2) {
    const ComplexForm t2 = wedge(bar(T2), phi(P2)) - wedge(T2, phi(B2));
    return kI * (2.0 * X + t1 + t2 + sv * vert);
  }
  const ComplexForm t2 = wedge(T2, phi(B2)) - wedge(bar(T2), phi(P2));
  return kI * (t1 + t2 + sv * vert);
}

ComplexForm dK_formula(int i, const Lambdas& l, const TwistorCoframe& cf) {
  check_index(i);
  l.validate();
  if (!cf.connection.has_formulas())
    throw Error("no dK formula for " + cf.connection.name() + "; use the oracle path");
  const TwistorStructure& st = need_structure(cf);
  const ComplexForm X = phi(B1, P2, P3) - phi(P1, B2, B3);
  const ComplexForm& Psi = st.curvature[0][1];
  const ComplexForm d3 = kI * (wedge(Psi, phi(B3)) - wedge(bar(Psi), phi(P3)));
  ComplexForm d1, d2;
  if (cf.connection.kind == ConnectionKind::Lichnerowicz) {
    const ComplexForm m = wedge(bar(st.mu), phi(P1, P2)) - wedge(st.mu, phi(B1, B2));
    d1 = kI * (X + m);
    d2 = kI * (m - X);
  } else {
    const ComplexForm& T1 = st.torsion[0];
    const ComplexForm& T2 = st.torsion[1];
    d1 = kI * (X + wedge(T1, phi(B1)) - wedge(bar(T1), phi(P1)));
    d2 = -kI * (X + wedge(bar(T2), phi(P2)) - wedge(T2, phi(B2)));
  }
  const double s2 = (i <= 2) ? -1.0 : 1.0;
  const double s3 = (i % 2 == 1) ? 1.0 : -1.0;
  return l.l1 * l.l1 * d1 + s2 * l.l2 * l.l2 * d2 + s3 * l.l3 * l.l3 * d3;
}

ComplexForm balanced_defect_formula(int i, double lambda, const TwistorCoframe& cf) {
  check_index(i);
  Lambdas::single(lambda).validate();
  if (!cf.connection.has_formulas())
    throw Error("no balanced formula for " + cf.connection.name() + "; use the oracle path");
  const TwistorStructure& st = need_structure(cf);
  const double l2 = lambda * lambda;
  if (cf.connection.kind == ConnectionKind::Lichnerowicz) {
    const Complex R1 = st.R_1b21_1b;
    const Complex R2 = st.R_1b22_2b;
    if (i <= 2) {
      const Complex c = (i == 1) ? R2 - R1 : R1 - R2;
      const ComplexForm base = wedge(phi(P1, B1), phi(B2, P2));
      return l2 * (c * wedge(base, phi(B3)) + std::conj(c) * wedge(base, phi(P3)));
    }
    const Complex c = R2 + R1;
    const ComplexForm base = wedge(phi(P1, B1), phi(P2, B2));
    const ComplexForm m = 2.0 * wedge(wedge(bar(st.mu), phi(P1, P2)) - wedge(st.mu, phi(B1, B2)), phi(P3, B3));
    const ComplexForm r = c * wedge(base, phi(B3)) + std::conj(c) * wedge(base, phi(P3));
    return (i == 3 ? -l2 : l2) * (r + m);
  }
  const ComplexForm& Psi = st.curvature[0][1];
  const ComplexForm& T1 = st.torsion[0];
  const ComplexForm& T2 = st.torsion[1];
  const ComplexForm A = (i <= 2) ? phi(P1, B1) + phi(B2, P2) : phi(P1, B1) + phi(P2, B2);
  const ComplexForm t1 = wedge(T1, phi(B1)) - wedge(bar(T1), phi(P1));
  const ComplexForm t2 = (i <= 2) ? wedge(bar(T2), phi(P2)) - wedge(T2, phi(B2))
                                  : wedge(T2, phi(B2)) - wedge(bar(T2), phi(P2));
  const bool odd = (i % 2 == 1);
  const ComplexForm v33 = odd ? phi(P3, B3) : phi(B3, P3);
  const ComplexForm curv = odd ? wedge(A, Psi, phi(B3)) - wedge(A, bar(Psi), phi(P3))
                               : wedge(A, bar(Psi), phi(P3)) - wedge(A, Psi, phi(B3));
  // The displays give −K∧dK.
  return -l2 * (curv + wedge(t1 + t2, v33));
}

ComplexForm ddbar_formula(int i, double lambda, const TwistorCoframe& cf, const DdbarRequest& req) {
  check_index(i);
  Lambdas::single(lambda).validate();
  const TwistorStructure& st = need_structure(cf);
  const double l2 = lambda * lambda;
  const ConnectionKind kind = cf.connection.kind;
  if (kind == ConnectionKind::Lichnerowicz && (i == 1 || i >= 3)) {
    const ComplexForm& tau = st.riemann[0][1];
    const ComplexForm iOmega = -(st.riemann[0][0] - st.riemann[1][1]);
    const ComplexForm common = l2 * (wedge(iOmega, phi(P3, B3)) - wedge(tau, bar(tau)));
    if (i == 1) {
      if (!st.flags.self_dual.value) throw Error("missing hypothesis: self-dual");
      if (!req.constant_scalar_curvature) throw Error("missing hypothesis: constant scalar curvature");
      const double s = st.s;
      const ComplexForm bracket = (-s / 12.0) * wedge(phi(P1, B1), phi(B2, P2)) +
                                  wedge(phi(B2, P2), phi(P3, B3)) + wedge(phi(P3, B3), phi(P1, B1));
      return -(2.0 - l2 * s / 6.0) * bracket + common;
    }
    if (!st.flags.ricci_J_invariant.value) throw Error("missing hypothesis: Ricci J-invariant");
    const ComplexForm mm = wedge(st.mu, bar(st.mu));
    return 0.25 * (st.s - st.sstar) * wedge(phi(P1, B1), phi(P2, B2)) -
           2.0 * wedge(mm, phi(P1, B1) + phi(P2, B2)) + common;
  }
  if (kind == ConnectionKind::Chern && i >= 3) {
    const ComplexForm& Psi = st.curvature[0][1];
    const ComplexForm& P11 = st.curvature[0][0];
    const ComplexForm& P22 = st.curvature[1][1];
    const ComplexForm& T1 = st.torsion[0];
    const ComplexForm& T2 = st.torsion[1];
    return -l2 * (wedge(Psi, bar(Psi)) + wedge(P11 - P22, phi(P3, B3))) + wedge(P11, phi(P1, B1)) +
           wedge(P22, phi(P2, B2)) + wedge(T1, bar(T1)) - wedge(bar(Psi), phi(P1, B2)) -
           wedge(Psi, phi(B1, P2)) + wedge(T2, bar(T2));
  }
  throw Error("no ddbar formula for i=" + std::to_string(i) + " with the " + cf.connection.name() + " connection");
}

namespace {

// Components against the coframe basis swap under conjugation.
Eigen::VectorXcd conj_vector(const Eigen::VectorXcd& v) {
  const auto inv = twistor_involution();
  Eigen::VectorXcd w(kDim);
  for (int k = 0; k < kDim; ++k) w(inv[k]) = std::conj(v(k));
  return w;
}

}  // namespace

double ddbar_positivity(int i, const ComplexForm& theta) {
  std::array<Eigen::VectorXcd, 3> V;
  for (int k = 0; k < 3; ++k) {
    V[k] = Eigen::VectorXcd::Zero(kDim);
    V[k](holomorphic_pattern(i)[k] ? k : k + 3) = 1.0;
  }
  const std::vector<Eigen::VectorXcd> tests{V[0],        V[1],        V[2],           V[0] + V[1],
                                            V[1] + V[2], V[0] + V[2], V[0] + kI * V[1], V[1] - kI * V[2]};
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < tests.size(); ++a)
    for (std::size_t b = a + 1; b < tests.size(); ++b) {
      const std::array<Eigen::VectorXcd, 4> vs{tests[a], conj_vector(tests[a]), tests[b], conj_vector(tests[b])};
      const double val = -theta.evaluate(vs).real();
      // Skip pairs spanning a line.
      Eigen::MatrixXcd span(kDim, 2);
      span << tests[a], tests[b];
      if (span.jacobiSvd().singularValues()(1) < 1e-9) continue;
      best = std::min(best, val);
    }
  return best;
}

CoframeJet coframe_jet(const TwistorChart& chart, const ConnectionChoice& conn, const Vec6& p) {
  const HermitianSurface& M = chart.surface();
  M.require_interior(p.head<4>(), 2);
  CoframeJet jet;
  jet.p = p;
  jet.C = coframe_matrix(chart, conn, p);
  auto f = [&](const Vec6& q) { return coframe_matrix(chart, conn, q); };
  for (int m = 0; m < 6; ++m) jet.dC[m] = partial(f, p, m, M.backend());
  return jet;
}

namespace {

// dK in chart coordinates from the jet.
ComplexForm dK_chart(const ComplexForm& K, const CoframeJet& jet) {
  const auto k = antisym(K);
  std::array<Eigen::VectorXcd, 6> partials;
  for (int m = 0; m < 6; ++m) {
    const Eigen::Matrix<Complex, 6, 6> dKm =
        jet.dC[m].transpose() * k * jet.C + jet.C.transpose() * k * jet.dC[m];
    partials[m] = dense(ComplexForm::two_form(dKm));
  }
  return exterior_derivative(2, partials);
}

}  // namespace

ComplexForm dK_oracle(int i, const Lambdas& l, const CoframeJet& jet) {
  return from_chart(dK_chart(kahler_form(i, l), jet), jet.C);
}

ComplexForm dK_oracle(int i, const Lambdas& l, const TwistorChart& chart, const ConnectionChoice& conn,
                      const Vec6& p) {
  return dK_oracle(i, l, coframe_jet(chart, conn, p));
}

double nijenhuis_oracle(int i, const CoframeJet& jet) {
  Eigen::Matrix<Complex, 6, 1> d;
  for (int k = 0; k < 6; ++k) d(k) = holomorphic_index(i, k) ? kI : -kI;
  const CMat6 Ci = jet.C.inverse();
  const Mat6 J = (Ci * d.asDiagonal() * jet.C).real();
  std::array<Mat6, 6> dJ;
  for (int m = 0; m < 6; ++m)
    dJ[m] = (Ci * (d.asDiagonal() * jet.dC[m] - jet.dC[m] * J.cast<Complex>())).real();
  double worst = 0.0;
  for (int a = 0; a < 6; ++a)
    for (int b = a + 1; b < 6; ++b) {
      Vec6 N = J * (dJ[b].col(a) - dJ[a].col(b));
      for (int m = 0; m < 6; ++m) N += J(m, a) * dJ[m].col(b) - J(m, b) * dJ[m].col(a);
      worst = std::max(worst, N.norm());
    }
  return worst;
}

double nijenhuis_oracle(int i, const TwistorChart& chart, const ConnectionChoice& conn, const Vec6& p) {
  return nijenhuis_oracle(i, coframe_jet(chart, conn, p));
}

ComplexForm ddbar_oracle(int i, double lambda, const TwistorChart& chart, const ConnectionChoice& conn,
                         const Vec6& p) {
  const HermitianSurface& M = chart.surface();
  M.require_interior(p.head<4>(), 3);
  const ComplexForm K = kahler_form(i, Lambdas::single(lambda));
  // (dK)^{1,2} in chart coordinates.
  auto G = [&](const Vec6& q) {
    const CoframeJet jet = coframe_jet(chart, conn, q);
    const ComplexForm dK = from_chart(dK_chart(K, jet), jet.C);
    return dense(to_chart(project(dK, i, 1), jet.C));
  };
  std::array<Eigen::VectorXcd, 6> partials;
  for (int m = 0; m < 6; ++m) partials[m] = partial(G, p, m, M.backend());
  const CMat6 C = coframe_matrix(chart, conn, p);
  return kI * project(from_chart(exterior_derivative(3, partials), C), i, 2);
}

std::array<double, 4> conformal_compare(const HermitianSurface& M, const std::function<double(const Vec4&)>& f,
                                        const ConnectionChoice& conn, const Vec6& p) {
  const HermitianSurface Mf = M.conformal(f, "conformal");
  const TwistorChart c0(M), c1(Mf);
  const CMat6 C0 = coframe_matrix(c0, conn, p);
  const CMat6 C1 = coframe_matrix(c1, conn, p);
  std::array<double, 4> out{};
  for (int i = 1; i <= 4; ++i)
    out[i - 1] = (acs_endomorphism(i, C0) - acs_endomorphism(i, C1)).cwiseAbs().maxCoeff();
  return out;
}

namespace {

void require_holomorphic_kahler(const HermitianSurface& M, const Vec4& x) {
  if (dF_coords(M, x).norm() > 1e-6) throw Error("non-Kähler input refused");
  if ((M.J(x) - standard_J()).norm() > 1e-12) throw Error("projective bundle form needs the standard complex structure");
}

// The holomorphic structure of P(T^{1,0}M): (1,0) forms φ¹, φ², φ̄³ of the Chern coframe.
Mat6 bundle_J(const TwistorChart& chart, const Vec6& q) {
  return acs_endomorphism(4, coframe_matrix(chart, ConnectionChoice::chern(), q));
}

}  // namespace

ComplexForm projective_bundle_form(const TwistorChart& chart, double lambda, const Vec6& p) {
  const HermitianSurface& M = chart.surface();
  const Vec4 x = p.head<4>();
  M.require_interior(x, 3);
  require_holomorphic_kahler(M, x);
  chart.check(p);
  const DiffBackend& b = M.backend();
  auto logh = [&](const Vec6& q) {
    const Vec4 y = q.head<4>();
    const UnitaryFrame f = adapted_frame(M, y, chart.seeds());
    const Eigen::Vector4cd v = f.u.col(0) + Complex(q(4), q(5)) * f.u.col(1);
    const Eigen::Vector4cd s = v / (2.0 * v(0));
    const Complex h = s.transpose() * M.metric(y).cast<Complex>() * s.conjugate();
    return std::log(h.real());
  };
  // ∂̄f = ½(df + i df∘J) as chart components.
  auto dbar = [&](const Vec6& q) {
    Vec6 df;
    for (int m = 0; m < 6; ++m) df(m) = partial(logh, q, m, b);
    const Mat6 J = bundle_J(chart, q);
    const Eigen::Matrix<Complex, 6, 1> out = 0.5 * (df.cast<Complex>() + kI * (J.transpose() * df).cast<Complex>());
    return out;
  };
  Eigen::Matrix<Complex, 6, 6> ddb = Eigen::Matrix<Complex, 6, 6>::Zero();
  std::array<Eigen::Matrix<Complex, 6, 1>, 6> d;
  for (int m = 0; m < 6; ++m) d[m] = partial(dbar, p, m, b);
  for (int a = 0; a < 6; ++a)
    for (int c = 0; c < 6; ++c) ddb(a, c) = d[a](c) - d[c](a);
  Eigen::Matrix<Complex, 6, 6> F = Eigen::Matrix<Complex, 6, 6>::Zero();
  F.topLeftCorner<4, 4>() = M.fundamental_matrix(x).cast<Complex>();
  return ComplexForm::two_form(lambda * F + kI * ddb);
}

double projective_bundle_positivity(const TwistorChart& chart, const ComplexForm& form, const Vec6& p) {
  const Mat6 J = bundle_J(chart, p);
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 6; ++a) {
    const std::array<Eigen::VectorXcd, 2> vs{Vec6::Unit(a).cast<Complex>(), (J * Vec6::Unit(a)).cast<Complex>()};
    best = std::min(best, form.evaluate(vs).real());
  }
  return best;
}

std::vector<Vec6> sample_twistor_points(const HermitianSurface& M, int count, unsigned seed) {
  const auto base = latin_hypercube(M.chart(), count, seed, 4.0 * M.backend().reach());
  std::mt19937_64 rng(seed + 0x9e37u);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec6> out;
  out.reserve(count);
  for (const Vec4& x : base) {
    const double r = std::sqrt(unit(rng));
    const double th = 2.0 * std::numbers::pi * unit(rng);
    Vec6 p;
    p << x, r * std::cos(th), r * std::sin(th);
    out.push_back(p);
  }
  return out;
}

double symplectic_signature(int i, double lambda, double lambda_ref, const TwistorCoframe& cf) {
  const Eigen::VectorXcd ref = dense(dK_formula(i, lambda_ref, cf));
  const Eigen::VectorXcd cur = dense(dK_formula(i, lambda, cf));
  const double n2 = ref.squaredNorm();
  if (n2 == 0.0) return 0.0;
  return ref.dot(cur).real() / n2;
}

std::optional<double> critical_lambda(int i, const TwistorCoframe& cf, double lo, double hi, double tol) {
  if (!(lo >= kMinLambda) || !(hi > lo)) throw Error("empty lambda range");
  const double ref = lo;
  double flo = symplectic_signature(i, lo, ref, cf);
  double fhi = symplectic_signature(i, hi, ref, cf);
  if (flo == 0.0) return lo;
  if (flo * fhi > 0.0) return std::nullopt;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = symplectic_signature(i, mid, ref, cf);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void parallel_for(int n, int threads, const std::function<void(int)>& f) {
  threads = std::clamp(threads, 1, std::max(1, n));
  if (threads == 1) {
    for (int k = 0; k < n; ++k) f(k);
    return;
  }
  std::atomic<int> next{0};
  std::mutex mu;
  int failed_at = n;
  std::exception_ptr failure;
  auto worker = [&] {
    for (int k = next++; k < n; k = next++) {
      try {
        f(k);
      } catch (...) {
        std::lock_guard lock(mu);
        if (k < failed_at) {
          failed_at = k;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

ConditionReport condition_report(const HermitianSurface& M, const ConnectionChoice& conn, const ReportOptions& opt) {
  if (opt.lambdas.empty()) throw Error("empty lambda grid");
  for (const Lambdas& l : opt.lambdas) l.validate();
  if (opt.points < 1) throw Error("at least one sample point is required");
  ConditionReport rep;
  rep.surface = M.name();
  rep.connection = conn.name();
  rep.tolerance = opt.tolerance;
  rep.nijenhuis_tolerance = opt.nijenhuis_tolerance;
  rep.seed = opt.seed;
  const auto pts = sample_twistor_points(M, opt.points, opt.seed);
  std::vector<Lambdas> lambdas = opt.lambdas;
  std::sort(lambdas.begin(), lambdas.end(), [](const Lambdas& a, const Lambdas& b) {
    return std::tie(a.l3, a.l1, a.l2) < std::tie(b.l3, b.l1, b.l2);
  });
  const TwistorChart chart(M);
  rep.points.resize(pts.size());
  std::vector<std::vector<ConditionRecord>> per_point(pts.size());
  parallel_for(static_cast<int>(pts.size()), opt.threads, [&](int k) {
    const Vec6& p = pts[k];
    const TwistorCoframe cf = twistor_coframe(chart, conn, p, true);
    const CoframeJet jet = coframe_jet(chart, conn, p);
    rep.points[k] = {p, cf.structure->flags};
    for (int i = 1; i <= 4; ++i) {
      const double nij = nijenhuis_oracle(i, jet);
      for (const Lambdas& ls : lambdas) {
        ConditionRecord r;
        r.point_index = k;
        r.i = i;
        r.lambdas = ls;
        const ComplexForm K = kahler_form(i, ls);
        const ComplexForm dKo = dK_oracle(i, ls, jet);
        r.symplectic_oracle = dKo.norm();
        r.balanced_oracle = wedge(K, dKo).norm();
        r.nijenhuis = nij;
        if (conn.has_formulas()) {
          const bool single = ls.l1 == 1.0 && ls.l2 == 1.0;
          const ComplexForm dKf = single ? dK_formula(i, ls.l3, cf) : dK_formula(i, ls, cf);
          r.symplectic_formula = dKf.norm();
          r.balanced_formula =
              single ? balanced_defect_formula(i, ls.l3, cf).norm() : wedge(K, dKf).norm();
          r.formula_oracle_residual = (dKf - dKo).norm();
        }
        r.symplectic = r.symplectic_formula.value_or(r.symplectic_oracle) < opt.tolerance;
        r.balanced = r.balanced_formula.value_or(r.balanced_oracle) < opt.tolerance;
        r.integrable = nij < opt.nijenhuis_tolerance;
        per_point[k].push_back(r);
      }
    }
  });
  for (auto& v : per_point)
    for (auto& r : v) rep.records.push_back(r);
  return rep;
}

}  // namespace twistorlab
