// Acceptance criteria 1-8: one PASS/FAIL line each, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "twistorlab/curvature_analysis.hpp"
#include "twistorlab/flag.hpp"
#include "twistorlab/twistor.hpp"

using namespace twistorlab;

namespace {

const std::vector<std::string> kSurfaces{"flat_c2", "cp2_fs", "ch2", "hopf"};
const ConnectionChoice kL = ConnectionChoice::lichnerowicz();
const ConnectionChoice kCh = ConnectionChoice::chern();

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
  void below(double value, double tol, const std::string& what) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " = %.3g (tol %.0e)", value, tol);
    require(value < tol, what + buf);
  }
  void above(double value, double floor, const std::string& what) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " = %.3g (need > %.3g)", value, floor);
    require(value > floor, what + buf);
  }
};

int failures = 0;

void run(int n, const char* title, double limit_s, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0) out.below(secs, limit_s, "runtime [s]");
  if (!out.ok) ++failures;
  std::printf("%s criterion %d: %s (%.2f s)%s%s\n", out.ok ? "PASS" : "FAIL", n, title, secs,
              out.ok ? "" : " -- ", out.detail.c_str());
  std::fflush(stdout);
}

// √−1 (w̄¹₂∧w¹₃∧w̄²₃ − w¹₂∧w̄¹₃∧w²₃)
ComplexForm displayed_threeform() {
  const Complex I(0, 1);
  return I * (ComplexForm::basis(fl::kDim, {fl::B12, fl::W13, fl::B23}) -
              ComplexForm::basis(fl::kDim, {fl::W12, fl::B13, fl::W23}));
}

double displayed_coefficient(int i, double l1, double l2, double l3) {
  const double a = l1 * l1, b = l2 * l2, c = l3 * l3;
  switch (i) {
    case 1: return a + b - c;
    case 2: return a + b + c;
    case 3: return a - b - c;
    default: return a - b + c;
  }
}

void criterion1(Outcome& o) {
  const ComplexForm phi = displayed_threeform();
  const std::vector<FlagParams> params{{1, 1, 1}, {1, 2, 3}, {0.5, 1.5, 0.7}, {1, 1, std::sqrt(2.0)},
                                       {std::sqrt(5.0), 1, 2}, {1, std::sqrt(5.0), 2}, {3, 4, 5}};
  for (const auto& p : params)
    for (int i = 1; i <= 4; ++i) {
      const ComplexForm expect = displayed_coefficient(i, p.l1, p.l2, p.l3) * phi;
      o.below((flag_dK_structural(i, p) - expect).max_abs(), 1e-12, "structural dK_" + std::to_string(i));
      o.below((flag_dK(i, p) - expect).max_abs(), 1e-15, "displayed dK_" + std::to_string(i));
      o.require(flag_balanced(i, p).max_abs() < 1e-12, "K_i ^ dK_i != 0");
    }
  // One-parameter displays: 2 − λ², 2 + λ², −λ², λ².
  for (double lam : {0.3, 1.0, std::sqrt(2.0), 2.5}) {
    const double l2 = lam * lam;
    const double coef[4] = {2 - l2, 2 + l2, -l2, l2};
    for (int i = 1; i <= 4; ++i)
      o.below((flag_dK_structural(i, FlagParams::single(lam)) - coef[i - 1] * phi).max_abs(), 1e-12,
              "one-parameter dK_" + std::to_string(i));
  }
  // dK_1(λ) = 0 iff λ² = 2, scanning a grid that contains √2.
  for (int k = 1; k <= 40; ++k) {
    const double lam = 0.05 * k * std::sqrt(2.0);
    const bool zero = flag_dK_structural(1, FlagParams::single(lam)).max_abs() < 1e-12;
    o.require(zero == (k == 20), "dK_1(lambda) zero set");
  }
  // Three-parameter zero sets.
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  for (int k = 0; k < 50; ++k) {
    const double x = u(rng), y = u(rng);
    const double h = std::sqrt(x * x + y * y);
    o.require(flag_dK_structural(1, {x, y, h}).max_abs() < 1e-12, "dK_1 vanishes on l1^2+l2^2=l3^2");
    o.require(flag_dK_structural(3, {h, x, y}).max_abs() < 1e-12, "dK_3 vanishes on l1^2=l2^2+l3^2");
    o.require(flag_dK_structural(4, {x, h, y}).max_abs() < 1e-12, "dK_4 vanishes on l2^2=l1^2+l3^2");
    o.require(flag_dK_structural(1, {x, y, 1.1 * h}).max_abs() > 1e-3, "dK_1 nonzero off the cone");
    o.require(flag_dK_structural(3, {1.1 * h, x, y}).max_abs() > 1e-3, "dK_3 nonzero off the cone");
    o.require(flag_dK_structural(4, {x, 1.1 * h, y}).max_abs() > 1e-3, "dK_4 nonzero off the cone");
    const auto dK2 = flag_dK_structural(2, {x, y, h});
    o.require(dK2.max_abs() > 1e-3, "dK_2 nonzero");
    o.below(flag_bidegree(dK2, 2, 1, 2).max_abs(), 1e-12, "(1,2)-part of dK_2");
  }
  const auto nk = nearly_kahler_check();
  o.below(nk.dK, 1e-12, "|dK_2 - 3 Re rho|");
  o.below(nk.dIm, 1e-12, "|d Im rho + 2 K_2^K_2|");
}

void criterion2(Outcome& o) {
  const HermitianSurface M = builtin(Builtin::CP2, 2.0);
  const TwistorChart chart(M);
  for (const Vec6& p : sample_twistor_points(M, 10, 2024)) {
    const auto dec = decompose(curvature_operator(levi_civita(M, p.head<4>()).R));
    o.below(dec.Wminus.norm(), 1e-6, "|W-|");
    o.below(dec.Ric0.norm(), 1e-6, "|Ric0|");
    o.below(std::abs(dec.s - 12.0), 1e-5, "|s - 12|");
    for (auto conn : {kL, kCh}) {
      const auto cf = twistor_coframe(chart, conn, p);
      const auto lam = critical_lambda(1, cf, 0.5, 3.0, 1e-10);
      o.require(lam.has_value(), "no zero crossing of dK_1 for " + conn.name());
      if (lam) o.below(std::abs(*lam * *lam - 2.0), 1e-5, "critical lambda^2 - 2 (" + conn.name() + ")");
      o.below(dK_formula(1, std::sqrt(2.0), cf).norm(), 1e-5, "dK_1 at lambda^2 = 2 (" + conn.name() + ")");
      for (int i = 1; i <= 4; ++i)
        for (double l : {0.5, 1.0, std::sqrt(2.0), 2.0}) {
          o.below(balanced_defect_formula(i, l, cf).norm(), 1e-6, "balanced defect (" + conn.name() + ")");
          o.below(wedge(kahler_form(i, Lambdas::single(l)), dK_oracle(i, Lambdas::single(l), chart, conn, p)).norm(),
                  1e-6, "balanced oracle (" + conn.name() + ")");
        }
    }
  }
}

void criterion3(Outcome& o) {
  for (const auto& name : kSurfaces) {
    const HermitianSurface M = builtin(name, {});
    const TwistorChart chart(M);
    for (const Vec6& p : sample_twistor_points(M, 5, 31)) {
      for (auto conn : {kL, kCh}) {
        const auto cf = twistor_coframe(chart, conn, p);
        const auto jet = coframe_jet(chart, conn, p);
        for (int i = 1; i <= 4; ++i)
          for (double lam : {0.5, 1.0, std::sqrt(2.0)})
            o.below((dK_formula(i, lam, cf) - dK_oracle(i, Lambdas::single(lam), jet)).norm(), 1e-4,
                    name + " " + conn.name() + " i=" + std::to_string(i));
      }
    }
  }
}

void criterion4(Outcome& o) {
  for (const auto& name : kSurfaces) {
    const HermitianSurface M = builtin(name, {});
    const TwistorChart chart(M);
    const bool kahler = name != "hopf";
    for (const Vec6& p : sample_twistor_points(M, 3, 41)) {
      const auto jl = coframe_jet(chart, kL, p);
      const auto jc = coframe_jet(chart, kCh, p);
      o.above(nijenhuis_oracle(2, jl), 0.1, name + " N(J2^L)");
      o.above(nijenhuis_oracle(2, jc), 0.1, name + " N(J2^Ch)");
      if (kahler) {
        // every Kähler built-in is self-dual here
        o.below(nijenhuis_oracle(1, jl), 1e-4, name + " N(J1^L)");
        o.below(nijenhuis_oracle(3, jl), 1e-4, name + " N(J3^L)");
      } else {
        o.below(nijenhuis_oracle(3, jc), 1e-4, "hopf N(J3^Ch)");
        o.below(nijenhuis_oracle(4, jc), 1e-4, "hopf N(J4^Ch)");
      }
    }
  }
}

void criterion5(Outcome& o) {
  const HermitianSurface M = builtin(Builtin::Hopf);
  for (const Vec4& x : latin_hypercube(M.chart(), 10, 5, 0.3)) {
    const auto lc = levi_civita(M, x);
    const auto aux = torsion_auxiliary(M, x, lc);
    o.below(max_abs_diff(chern_curvature_relation(lc, aux), *gauduchon(M, x, 1.0, true).K), 1e-5,
            "Chern curvature relation");
    o.below(max_abs_diff(bismut_curvature_relation(lc, aux), *gauduchon(M, x, -1.0, true).K), 1e-4,
            "Bismut curvature relation");
  }
}

double max_of(const std::array<double, 4>& a) { return *std::max_element(a.begin(), a.end()); }

void criterion6(Outcome& o) {
  const HermitianSurface M = builtin(Builtin::Hopf);
  auto linear = [](const Vec4& x) { return 0.1 * x(0); };
  auto constant = [](const Vec4&) { return 0.3; };
  for (const Vec6& p : sample_twistor_points(M, 5, 61)) {
    o.below(max_of(conformal_compare(M, linear, kCh, p)), 1e-6, "J_i^Ch under f = 0.1 x1");
    o.below(conformal_compare(M, linear, kL, p)[0], 1e-6, "J_1^L under f = 0.1 x1");
    o.below(max_of(conformal_compare(M, constant, kL, p)), 1e-8, "J_i^L under constant f");
    o.below(max_of(conformal_compare(M, constant, kCh, p)), 1e-8, "J_i^Ch under constant f");
  }
}

void criterion7(Outcome& o) {
  const HermitianSurface M = builtin(Builtin::Hopf);
  const TwistorChart chart(M);
  for (const Vec6& p : sample_twistor_points(M, 5, 71)) {
    const CMat6 C0 = coframe_matrix(chart, ConnectionChoice::gauduchon(0.0), p);
    const CMat6 C1 = coframe_matrix(chart, ConnectionChoice::gauduchon(1.0), p);
    const Mat6 J0 = acs_endomorphism(1, C0);
    for (double t : {-1.0, 0.0, 0.5, 1.0}) {
      const CMat6 Ct = coframe_matrix(chart, ConnectionChoice::gauduchon(t), p);
      o.below((Ct - ((1.0 - t) * C0 + t * C1)).cwiseAbs().maxCoeff(), 1e-9, "affine interpolation in t");
      o.below((acs_endomorphism(1, Ct) - J0).cwiseAbs().maxCoeff(), 1e-8, "J_1 across t");
    }
  }
}

ComplexForm random_form(std::mt19937& rng, int dim, int deg) {
  std::normal_distribution<double> n;
  std::vector<ComplexForm::Term> raw;
  for (ComplexForm::Mask m = 0; m < (1u << dim); ++m)
    if (std::popcount(m) == deg) raw.push_back({m, Complex(n(rng), n(rng))});
  return ComplexForm::from_terms(dim, deg, raw);
}

void criterion8(Outcome& o) {
  std::mt19937 rng(81);
  for (int trial = 0; trial < 50; ++trial) {
    const int p = 1 + trial % 3, q = 1 + (trial / 3) % 3;
    const auto a = random_form(rng, 7, p), a2 = random_form(rng, 7, p);
    const auto b = random_form(rng, 7, q), c = random_form(rng, 7, 1);
    o.below((wedge(wedge(a, b), c) - wedge(a, wedge(b, c))).norm(), 1e-11, "associativity");
    o.below((wedge(a, b) - ((p * q) % 2 ? -1.0 : 1.0) * wedge(b, a)).norm(), 1e-11, "graded commutativity");
    o.below((wedge(a + a2, b) - wedge(a, b) - wedge(a2, b)).norm(), 1e-11, "distributivity");
    o.require(wedge(c, c).norm() < 1e-12, "c ^ c != 0 for a 1-form");
    for (int k = 0; k <= 4; ++k) {
      const auto w = random_form(rng, 4, k);
      o.below((hodge_star_4(hodge_star_4(w)) - ((k * (4 - k)) % 2 ? -1.0 : 1.0) * w).norm(), 1e-12, "** sign");
    }
  }
  for (const auto& name : kSurfaces) {
    const HermitianSurface M = builtin(name, {});
    for (const Vec4& x : latin_hypercube(M.chart(), 8, 83, 0.3)) {
      const Mat4 g = M.metric(x), J = M.J(x);
      o.below((g - g.transpose()).cwiseAbs().maxCoeff(), 1e-12, name + " metric symmetry");
      o.above(Eigen::SelfAdjointEigenSolver<Mat4>(g).eigenvalues().minCoeff(), 0.0, name + " metric positivity");
      o.below((J * J + Mat4::Identity()).cwiseAbs().maxCoeff(), 1e-12, name + " J^2 = -1");
      o.below((J.transpose() * g * J - g).cwiseAbs().maxCoeff(), 1e-12, name + " J-compatibility");
      const Curvature4 R = levi_civita(M, x).R;
      const double scale = std::max(1.0, R.max_abs());
      double sym = 0.0, bianchi = 0.0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l) {
              sym = std::max({sym, std::abs(R(i, j, k, l) + R(j, i, k, l)), std::abs(R(i, j, k, l) + R(i, j, l, k)),
                              std::abs(R(i, j, k, l) - R(k, l, i, j))});
              bianchi = std::max(bianchi, std::abs(R(i, j, k, l) + R(i, k, l, j) + R(i, l, j, k)));
            }
      o.below(sym / scale, 1e-6, name + " curvature symmetries");
      o.below(bianchi / scale, 1e-6, name + " first Bianchi identity");
    }
  }
}

}  // namespace

int main() {
  run(1, "flag manifold appendix identities", 1.0, criterion1);
  run(2, "CP2 pipeline", 30.0, criterion2);
  run(3, "dK formulas agree with the finite-difference oracle", 300.0, criterion3);
  run(4, "integrability by the Nijenhuis oracle", 120.0, criterion4);
  run(5, "Chern and Bismut curvature relations on the Hopf surface", 0.0, criterion5);
  run(6, "conformal behaviour on the Hopf surface", 0.0, criterion6);
  run(7, "Gauduchon family on the Hopf surface", 0.0, criterion7);
  run(8, "exterior algebra, curvature and surface invariants", 0.0, criterion8);
  return failures == 0 ? 0 : 1;
}
