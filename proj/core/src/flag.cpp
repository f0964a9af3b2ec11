#include "twistorlab/flag.hpp"

#include <cmath>
#include <random>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "twistorlab/error.hpp"
#include "twistorlab/finite_difference.hpp"
#include "twistorlab/twistor.hpp"

namespace twistorlab {

using namespace fl;

namespace {

const Complex kI(0.0, 1.0);

ComplexForm e(int k) { return ComplexForm::basis(kDim, {k}); }

// Horizontal index of the pair member: 0..2 for w¹₂, w¹₃, w²₃.
int pair_index(int l, int m) {
  if (l == 1 && m == 2) return 0;
  if (l == 1 && m == 3) return 1;
  return 2;
}

void check_index(int i, int hi) {
  if (i < 1 || i > hi) throw Error("structure index must be in 1.." + std::to_string(hi));
}

// w̄¹₂∧w¹₃∧w̄²₃ − w¹₂∧w̄¹₃∧w²₃
ComplexForm dK_shape() {
  return ComplexForm::basis(kDim, {B12, W13, B23}) - ComplexForm::basis(kDim, {W12, B13, W23});
}

ComplexForm w4(int a, int b, int c, int d) { return ComplexForm::basis(kDim, {a, b, c, d}); }

}  // namespace

SU3Element SU3Element::from_matrix(const Eigen::Matrix3cd& g) {
  if ((g.adjoint() * g - Eigen::Matrix3cd::Identity()).cwiseAbs().maxCoeff() > 1e-12)
    throw Error("matrix is not unitary");
  if (std::abs(g.determinant() - 1.0) > 1e-12) throw Error("determinant is not 1");
  return SU3Element{g};
}

SU3Element SU3Element::random(unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n;
  Eigen::Matrix3cd z;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) z(r, c) = Complex(n(rng), n(rng));
  Eigen::HouseholderQR<Eigen::Matrix3cd> qr(z);
  Eigen::Matrix3cd q = qr.householderQ();
  const Complex d = q.determinant();
  q /= std::pow(d, 1.0 / 3.0);
  return from_matrix(q);
}

const std::array<Eigen::Matrix3cd, 8>& su3_basis() {
  static const std::array<Eigen::Matrix3cd, 8> basis = [] {
    std::array<Eigen::Matrix3cd, 8> b;
    for (auto& m : b) m.setZero();
    int k = 0;
    for (auto [l, m] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
      b[k](l, m) = 1.0;
      b[k](m, l) = -1.0;
      ++k;
      b[k](l, m) = kI;
      b[k](m, l) = kI;
      ++k;
    }
    b[6](0, 0) = kI;
    b[6](1, 1) = -kI;
    b[7](1, 1) = kI;
    b[7](2, 2) = -kI;
    return b;
  }();
  return basis;
}

Eigen::Matrix3cd maurer_cartan(const SU3Element& g, const Eigen::Matrix3cd& V) { return g.g.adjoint() * V; }

Eigen::Matrix<Complex, 8, 1> MaurerCartanEval::covector(int l, int m) const {
  Eigen::Matrix<Complex, 8, 1> v;
  for (int k = 0; k < 8; ++k) v(k) = values[k](l - 1, m - 1);
  return v;
}

MaurerCartanEval maurer_cartan_eval(const SU3Element& g) {
  MaurerCartanEval ev;
  const auto& b = su3_basis();
  for (int k = 0; k < 8; ++k) ev.values[k] = maurer_cartan(g, g.g * b[k]);
  return ev;
}

Eigen::VectorXcd su3_components(const Eigen::Matrix3cd& X) {
  Eigen::VectorXcd v(kDim);
  v << X(0, 1), X(0, 2), X(1, 2), std::conj(X(0, 1)), std::conj(X(0, 2)), std::conj(X(1, 2)), X(0, 0), X(1, 1);
  return v;
}

ComplexForm mc_form(int l, int m) {
  if (l < 1 || l > 3 || m < 1 || m > 3) throw Error("Maurer-Cartan indices must be in 1..3");
  if (l == m) {
    if (l == 1) return e(W11);
    if (l == 2) return e(W22);
    return -(e(W11) + e(W22));
  }
  if (l < m) return e(W12 + pair_index(l, m));
  return -e(B12 + pair_index(m, l));
}

ComplexForm flag_conjugate(const ComplexForm& a) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(kDim, kDim);
  for (int k = 0; k < 3; ++k) {
    m(k, k + 3) = 1.0;
    m(k + 3, k) = 1.0;
  }
  m(W11, W11) = -1.0;
  m(W22, W22) = -1.0;
  ComplexForm c = ComplexForm::from_terms(a.dim(), a.degree(), {});
  for (const auto& t : a.terms()) c += ComplexForm::from_terms(a.dim(), a.degree(), {{t.mask, std::conj(t.coeff)}});
  return pullback(c, m);
}

namespace {

const std::array<ComplexForm, kDim>& basis_differentials() {
  static const std::array<ComplexForm, kDim> d = [] {
    auto dw = [](int l, int m) {
      ComplexForm s(kDim, 2);
      for (int j = 1; j <= 3; ++j) s -= wedge(mc_form(l, j), mc_form(j, m));
      return s;
    };
    std::array<ComplexForm, kDim> out;
    out[W12] = dw(1, 2);
    out[W13] = dw(1, 3);
    out[W23] = dw(2, 3);
    for (int k = 0; k < 3; ++k) out[k + 3] = flag_conjugate(out[k]);
    out[W11] = dw(1, 1);
    out[W22] = dw(2, 2);
    return out;
  }();
  return d;
}

}  // namespace

ComplexForm structural_d(const ComplexForm& a) {
  const auto& db = basis_differentials();
  ComplexForm out(a.dim(), a.degree() + 1);
  for (const auto& t : a.terms()) {
    const auto idx = ComplexForm::indices_of(t.mask);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      ComplexForm piece = ComplexForm::scalar(kDim, (r % 2 == 0 ? 1.0 : -1.0) * t.coeff);
      for (std::size_t s = 0; s < idx.size(); ++s) piece = wedge(piece, s == r ? db[idx[s]] : e(idx[s]));
      out += piece;
    }
  }
  return out;
}

namespace {

const DiffBackend kSu3Backend{4, 1e-3};

// F⁻¹ ∂_a F at q, both by differences of the curve itself.
template <typename Curve, typename V>
Eigen::Matrix3cd pulled_back(const Curve& F, const V& q, int a) {
  return F(q).adjoint() * partial(F, q, a, kSu3Backend);
}

}  // namespace

double structure_equation_residual(const SU3Element& g, const Eigen::Matrix3cd& A, const Eigen::Matrix3cd& B) {
  auto F = [&](const Eigen::Vector2d& q) -> Eigen::Matrix3cd {
    return g.g * (q(0) * A).exp() * (q(1) * B).exp();
  };
  auto ws = [&](const Eigen::Vector2d& q) -> Eigen::Matrix3cd { return pulled_back(F, q, 0); };
  auto wt = [&](const Eigen::Vector2d& q) -> Eigen::Matrix3cd { return pulled_back(F, q, 1); };
  const Eigen::Vector2d o = Eigen::Vector2d::Zero();
  // dw(∂s, ∂t) = ∂s w(∂t) − ∂t w(∂s)
  const Eigen::Matrix3cd dw = partial(wt, o, 0, kSu3Backend) - partial(ws, o, 1, kSu3Backend);
  const Eigen::Matrix3cd a = ws(o), b = wt(o);
  return (dw + (a * b - b * a)).cwiseAbs().maxCoeff();
}

double fd_d_residual(const ComplexForm& alpha, const SU3Element& g, const Eigen::Matrix3cd& A,
                     const Eigen::Matrix3cd& B, const Eigen::Matrix3cd& C) {
  if (alpha.degree() != 2) throw Error("fd_d_residual expects a 2-form");
  auto F = [&](const Eigen::Vector3d& q) -> Eigen::Matrix3cd {
    return g.g * (q(0) * A).exp() * (q(1) * B).exp() * (q(2) * C).exp();
  };
  auto pair = [&](int a, int b) {
    return [&, a, b](const Eigen::Vector3d& q) -> Eigen::Matrix<Complex, 1, 1> {
      const std::array<Eigen::VectorXcd, 2> vs{su3_components(pulled_back(F, q, a)),
                                               su3_components(pulled_back(F, q, b))};
      return Eigen::Matrix<Complex, 1, 1>(alpha.evaluate(vs));
    };
  };
  const Eigen::Vector3d o = Eigen::Vector3d::Zero();
  const Complex fd = partial(pair(1, 2), o, 0, kSu3Backend)(0) - partial(pair(0, 2), o, 1, kSu3Backend)(0) +
                     partial(pair(0, 1), o, 2, kSu3Backend)(0);
  const std::array<Eigen::VectorXcd, 3> vs{su3_components(pulled_back(F, o, 0)), su3_components(pulled_back(F, o, 1)),
                                           su3_components(pulled_back(F, o, 2))};
  return std::abs(structural_d(alpha).evaluate(vs) - fd);
}

void FlagParams::validate() const {
  for (double l : {l1, l2, l3})
    if (!(l > 0.0) || !std::isfinite(l)) throw Error("parameters must be positive");
}

std::array<bool, 3> flag_pattern(int i) {
  check_index(i, 8);
  static constexpr std::array<std::array<bool, 3>, 4> base{
      {{true, false, false}, {true, false, true}, {true, true, false}, {true, true, true}}};
  auto p = base[(i - 1) % 4];
  if (i > 4)
    for (auto& b : p) b = !b;
  return p;
}

std::array<ComplexForm, 3> flag_holomorphic_forms(int i) {
  const auto p = flag_pattern(i);
  std::array<ComplexForm, 3> f;
  for (int k = 0; k < 3; ++k) f[k] = e(p[k] ? k : k + 3);
  return f;
}

ComplexForm flag_bidegree(const ComplexForm& a, int i, int p, int q) {
  const auto pat = flag_pattern(i);
  std::vector<ComplexForm::Term> kept;
  for (const auto& t : a.terms()) {
    int hol = 0, anti = 0;
    bool vertical = false;
    for (int k : ComplexForm::indices_of(t.mask)) {
      if (k >= 6) {
        vertical = true;
        break;
      }
      const bool is_form = k < 3;
      (is_form == pat[k % 3] ? hol : anti) += 1;
    }
    if (!vertical && hol == p && anti == q) kept.push_back(t);
  }
  return ComplexForm::from_terms(a.dim(), a.degree(), std::move(kept));
}

ComplexForm flag_kahler(int i, const FlagParams& params) {
  check_index(i, 4);
  params.validate();
  const auto f = flag_holomorphic_forms(i);
  const std::array<double, 3> l{params.l1, params.l2, params.l3};
  ComplexForm K(kDim, 2);
  for (int k = 0; k < 3; ++k) K += (kI * l[k] * l[k]) * wedge(f[k], flag_conjugate(f[k]));
  return K;
}

double flag_dK_coefficient(int i, const FlagParams& params) {
  check_index(i, 4);
  params.validate();
  const double a = params.l1 * params.l1, b = params.l2 * params.l2, c = params.l3 * params.l3;
  switch (i) {
    case 1: return a + b - c;
    case 2: return a + b + c;
    case 3: return a - b - c;
    default: return a - b + c;
  }
}

ComplexForm flag_dK(int i, const FlagParams& params) {
  return (kI * flag_dK_coefficient(i, params)) * dK_shape();
}

ComplexForm flag_dK_structural(int i, const FlagParams& params) { return structural_d(flag_kahler(i, params)); }

ComplexForm flag_balanced(int i, const FlagParams& params) {
  return wedge(flag_kahler(i, params), flag_dK(i, params));
}

ComplexForm flag_ddbar(int i, const FlagParams& params) {
  check_index(i, 4);
  params.validate();
  const double a = params.l1 * params.l1, b = params.l2 * params.l2, c = params.l3 * params.l3;
  switch (i) {
    case 1:
      return -(a + b - c) * (-w4(W12, B12, B13, W13) + w4(B13, W13, B23, W23) + w4(B23, W23, W12, B12));
    case 3:
      return -(b + c - a) * (w4(W12, B12, W13, B13) - w4(W13, B13, B23, W23) + w4(B23, W23, W12, B12));
    case 4:
      return -(a + c - b) * (w4(W12, B12, W13, B13) + w4(W13, B13, W23, B23) - w4(W23, B23, W12, B12));
    default:
      throw Error("no ddbar formula for i=2: the structure is not integrable");
  }
}

ComplexForm flag_ddbar_structural(int i, const FlagParams& params) {
  const ComplexForm d12 = flag_bidegree(flag_dK_structural(i, params), i, 1, 2);
  return kI * flag_bidegree(structural_d(d12), i, 2, 2);
}

double flag_nijenhuis(int i) {
  const auto pat = flag_pattern(i);
  double worst = 0.0;
  for (const auto& alpha : flag_holomorphic_forms(i)) {
    const ComplexForm d = structural_d(alpha);
    for (const auto& t : d.terms()) {
      bool has_hol = false;
      for (int k : ComplexForm::indices_of(t.mask))
        if (k < 6 && (k < 3) == pat[k % 3]) has_hol = true;
      if (!has_hol) worst = std::max(worst, std::abs(t.coeff));
    }
  }
  return worst;
}

NearlyKahlerResidual nearly_kahler_check() {
  const double l = 1.0 / std::sqrt(2.0);
  const FlagParams p{l, l, l};
  const ComplexForm rho = (kI * kI * kI) * ComplexForm::basis(kDim, {W12, B13, W23});
  const ComplexForm rho_bar = flag_conjugate(rho);
  const ComplexForm re = 0.5 * (rho + rho_bar);
  const ComplexForm im = Complex(0.0, -0.5) * (rho - rho_bar);
  const ComplexForm K = flag_kahler(2, p);
  return {(structural_d(K) - 3.0 * re).norm(), (structural_d(im) + 2.0 * wedge(K, K)).norm()};
}

NormalizationCrosscheck normalization_crosscheck(double c) {
  const HermitianSurface M = builtin(Builtin::CP2, c);
  const TwistorChart chart(M);
  const Vec6 p = sample_twistor_points(M, 1, 1)[0];
  const auto cf = twistor_coframe(chart, ConnectionChoice::lichnerowicz(), p);
  NormalizationCrosscheck out;
  if (auto l = critical_lambda(1, cf, 0.1, 10.0)) out.twistor_lambda_sq = (*l) * (*l);
  // The coefficient is affine in λ²; its root from two samples.
  const double c1 = flag_dK_coefficient(1, FlagParams::single(1.0));
  const double c2 = flag_dK_coefficient(1, FlagParams::single(2.0));
  out.flag_lambda_sq = 1.0 - c1 * 3.0 / (c2 - c1);
  return out;
}

}  // namespace twistorlab
