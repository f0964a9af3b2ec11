#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "commands.hpp"

namespace twistorlab::cli {

namespace {

struct Check {
  std::string suite;
  std::string name;
  double value;
  double tolerance;
  bool pass;
};

class Battery {
 public:
  explicit Battery(std::string suite) : suite_(std::move(suite)) {}

  /// Passes when value < tol.
  void below(const std::string& name, double value, double tol) {
    checks_.push_back({suite_, name, value, tol, std::isfinite(value) && value < tol});
  }
  /// Passes when value > tol.
  void above(const std::string& name, double value, double tol) {
    checks_.push_back({suite_, name, value, tol, std::isfinite(value) && value > tol});
  }
  void truth(const std::string& name, bool ok) { checks_.push_back({suite_, name, ok ? 0.0 : 1.0, 0.5, ok}); }

  std::vector<Check> take() { return std::move(checks_); }

 private:
  std::string suite_;
  std::vector<Check> checks_;
};

const std::vector<std::string> kBuiltins{"flat_c2", "cp2_fs", "ch2", "hopf"};

std::vector<Check> appendix_suite() {
  Battery b("appendix");
  const FlagParams a{1.0, 2.0, 3.0};
  double disp = 0.0, bal = 0.0;
  for (int i = 1; i <= 4; ++i)
    for (const FlagParams& p : {a, FlagParams::single(0.7), FlagParams{0.3, 1.1, 2.0}}) {
      disp = std::max(disp, (flag_dK(i, p) - flag_dK_structural(i, p)).norm());
      bal = std::max(bal, flag_balanced(i, p).norm());
    }
  b.below("displayed dK equals structural d", disp, 1e-12);
  b.below("K_i ^ dK_i vanishes", bal, 1e-12);
  b.below("dK_1 = 0 at lambda^2 = 2", flag_dK(1, FlagParams::single(std::sqrt(2.0))).norm(), 1e-12);
  b.above("dK_1 != 0 at lambda = 1", flag_dK(1, FlagParams::single(1.0)).norm(), 0.1);
  b.below("dK_1 = 0 when l1^2 + l2^2 = l3^2", flag_dK(1, {3.0, 4.0, 5.0}).norm(), 1e-12);
  b.below("dK_3 = 0 when l1^2 = l2^2 + l3^2", flag_dK(3, {5.0, 3.0, 4.0}).norm(), 1e-12);
  b.below("dK_4 = 0 when l2^2 = l1^2 + l3^2", flag_dK(4, {3.0, 5.0, 4.0}).norm(), 1e-12);
  b.above("dK_2 never vanishes", flag_dK(2, {0.2, 0.2, 0.2}).norm(), 0.0);
  b.below("(1,2)-part of dK_2 vanishes", flag_bidegree(flag_dK(2, a), 2, 1, 2).norm(), 1e-12);
  double dd = 0.0;
  for (int i : {1, 3, 4}) dd = std::max(dd, (flag_ddbar(i, a) - flag_ddbar_structural(i, a)).norm());
  b.below("ddbar displays equal structural ddbar", dd, 1e-12);
  int integrable = 0;
  for (int i = 1; i <= 8; ++i) integrable += flag_nijenhuis(i) == 0.0;
  b.truth("exactly six integrable structures", integrable == 6);
  b.above("J_2 is not integrable", flag_nijenhuis(2), 0.5);
  const NearlyKahlerResidual nk = nearly_kahler_check();
  b.below("dK_2 = 3 Re rho", nk.dK, 1e-12);
  b.below("d Im rho = -2 K_2 ^ K_2", nk.dIm, 1e-12);
  const SU3Element g = SU3Element::random(7);
  std::mt19937 rng(11);
  std::normal_distribution<double> n;
  auto rnd = [&] {
    Eigen::Matrix3cd X = Eigen::Matrix3cd::Zero();
    for (const auto& e : su3_basis()) X += n(rng) * e;
    return X;
  };
  b.below("dw + w^w = 0 along random curves", structure_equation_residual(g, rnd(), rnd()), 1e-6);
  double fd = 0.0;
  for (int i = 1; i <= 4; ++i) fd = std::max(fd, fd_d_residual(flag_kahler(i, a), g, rnd(), rnd(), rnd()));
  b.below("structural dK matches differences along SU(3)", fd, 1e-6);
  return b.take();
}

std::vector<Check> pipeline_suite(const Options& o) {
  Battery b("pipeline");
  const HermitianSurface M = builtin(Builtin::CP2, 2.0);
  const TwistorChart chart(M);
  const auto pts = sample_twistor_points(M, 10, o.seed);
  double wminus = 0.0, ric0 = 0.0, s_err = 0.0, crit_L = 0.0, crit_Ch = 0.0, bal = 0.0;
  bool found = true;
  for (const Vec6& p : pts) {
    const auto lc = levi_civita(M, p.head<4>());
    const auto dec = decompose(curvature_operator(lc.R));
    wminus = std::max(wminus, dec.Wminus.norm());
    ric0 = std::max(ric0, dec.Ric0.norm());
    s_err = std::max(s_err, std::abs(dec.s - 12.0));
    for (auto conn : {ConnectionChoice::lichnerowicz(), ConnectionChoice::chern()}) {
      const auto cf = twistor_coframe(chart, conn, p);
      const auto l = critical_lambda(1, cf, 0.5, 3.0);
      found = found && l.has_value();
      double& crit = conn.kind == ConnectionKind::Chern ? crit_Ch : crit_L;
      if (l) crit = std::max(crit, std::abs((*l) * (*l) - 2.0));
      for (int i = 1; i <= 4; ++i)
        for (double lam : {0.5, 1.0, std::sqrt(2.0)}) bal = std::max(bal, balanced_defect_formula(i, lam, cf).norm());
    }
  }
  b.below("|W-| on cp2_fs", wminus, 1e-6);
  b.below("|Ric0| on cp2_fs", ric0, 1e-6);
  b.below("|s - 12| on cp2_fs", s_err, 1e-5);
  b.truth("dK_1 has a zero crossing for both connections", found);
  b.below("Lichnerowicz critical lambda^2 = 2", crit_L, 1e-5);
  b.below("Chern critical lambda^2 = 2", crit_Ch, 1e-5);
  b.below("balanced defects", bal, 1e-6);
  return b.take();
}

std::vector<Check> oracle_suite(const Options& o) {
  Battery b("oracle");
  for (const auto& name : kBuiltins) {
    const HermitianSurface M = builtin(name, {});
    const TwistorChart chart(M);
    const auto pts = sample_twistor_points(M, o.points, o.seed);
    for (auto conn : {ConnectionChoice::lichnerowicz(), ConnectionChoice::chern()}) {
      std::vector<double> worst(pts.size(), 0.0);
      parallel_for(static_cast<int>(pts.size()), thread_budget(), [&](int k) {
        const auto cf = twistor_coframe(chart, conn, pts[k]);
        const auto jet = coframe_jet(chart, conn, pts[k]);
        for (int i = 1; i <= 4; ++i)
          for (double lam : {0.5, 1.0, std::sqrt(2.0)})
            worst[k] = std::max(worst[k], (dK_formula(i, lam, cf) - dK_oracle(i, Lambdas::single(lam), jet)).norm());
      });
      b.below(name + " " + conn.name() + " dK formula vs oracle", *std::max_element(worst.begin(), worst.end()),
              o.tol);
    }
  }
  return b.take();
}

std::vector<Check> integrability_suite(const Options& o) {
  Battery b("integrability");
  const int npts = std::max(1, std::min(o.points, 3));
  for (const auto& name : kBuiltins) {
    const HermitianSurface M = builtin(name, {});
    const TwistorChart chart(M);
    const auto pts = sample_twistor_points(M, npts, o.seed);
    for (auto conn : {ConnectionChoice::lichnerowicz(), ConnectionChoice::chern()}) {
      std::array<double, 4> hi{}, lo{1e300, 1e300, 1e300, 1e300};
      for (const Vec6& p : pts) {
        const auto jet = coframe_jet(chart, conn, p);
        for (int i = 1; i <= 4; ++i) {
          const double n = nijenhuis_oracle(i, jet);
          hi[i - 1] = std::max(hi[i - 1], n);
          lo[i - 1] = std::min(lo[i - 1], n);
        }
      }
      const bool L = conn.kind == ConnectionKind::Lichnerowicz;
      b.above(name + " J2 " + conn.name() + " not integrable", lo[1], 0.1);
      if (L && name != "hopf") b.below(name + " J1 lichnerowicz integrable", hi[0], 1e-4);
      if (L && name != "hopf") b.below(name + " J3 lichnerowicz integrable", hi[2], 1e-4);
      if (!L && name == "hopf") {
        b.below("hopf J3 chern integrable", hi[2], 1e-4);
        b.below("hopf J4 chern integrable", hi[3], 1e-4);
      }
    }
  }
  return b.take();
}

std::vector<Check> curvature_suite(const Options& o) {
  Battery b("curvature");
  const HermitianSurface M = builtin(Builtin::Hopf);
  double chern = 0.0, bismut = 0.0;
  for (const Vec4& x : latin_hypercube(M.chart(), 10, o.seed, 0.3)) {
    const auto lc = levi_civita(M, x);
    const auto aux = torsion_auxiliary(M, x, lc);
    chern = std::max(chern, max_abs_diff(chern_curvature_relation(lc, aux), *gauduchon(M, x, 1.0, true).K));
    bismut = std::max(bismut, max_abs_diff(bismut_curvature_relation(lc, aux), *gauduchon(M, x, -1.0, true).K));
  }
  b.below("hopf Chern curvature relation", chern, 1e-5);
  b.below("hopf Bismut curvature relation", bismut, 1e-4);
  return b.take();
}

std::vector<Check> conformal_suite(const Options& o) {
  Battery b("conformal");
  const HermitianSurface M = builtin(Builtin::Hopf);
  const auto pts = sample_twistor_points(M, std::max(1, std::min(o.points, 3)), o.seed);
  double ch = 0.0, l1 = 0.0, cst = 0.0;
  auto linear = [](const Vec4& x) { return 0.1 * x(0); };
  auto constant = [](const Vec4&) { return 0.3; };
  for (const Vec6& p : pts) {
    const auto dc = conformal_compare(M, linear, ConnectionChoice::chern(), p);
    ch = std::max(ch, *std::max_element(dc.begin(), dc.end()));
    l1 = std::max(l1, conformal_compare(M, linear, ConnectionChoice::lichnerowicz(), p)[0]);
    for (auto conn : {ConnectionChoice::lichnerowicz(), ConnectionChoice::chern()}) {
      const auto d = conformal_compare(M, constant, conn, p);
      cst = std::max(cst, *std::max_element(d.begin(), d.end()));
    }
  }
  b.below("J_i chern conformally invariant", ch, 1e-6);
  b.below("J_1 lichnerowicz conformally invariant", l1, 1e-6);
  b.below("all structures invariant under constant rescaling", cst, 1e-8);
  return b.take();
}

std::vector<Check> gauduchon_suite(const Options& o) {
  Battery b("gauduchon");
  const HermitianSurface M = builtin(Builtin::Hopf);
  const TwistorChart chart(M);
  double affine = 0.0, j1 = 0.0;
  for (const Vec6& p : sample_twistor_points(M, std::max(1, std::min(o.points, 3)), o.seed)) {
    const CMat6 C0 = coframe_matrix(chart, ConnectionChoice::lichnerowicz(), p);
    const CMat6 C1 = coframe_matrix(chart, ConnectionChoice::chern(), p);
    const Mat6 J0 = acs_endomorphism(1, C0);
    for (double t : {-1.0, 0.0, 0.5, 1.0}) {
      const CMat6 Ct = coframe_matrix(chart, ConnectionChoice::gauduchon(t), p);
      affine = std::max(affine, (Ct - ((1.0 - t) * C0 + t * C1)).cwiseAbs().maxCoeff());
      j1 = std::max(j1, (acs_endomorphism(1, Ct) - J0).cwiseAbs().maxCoeff());
    }
  }
  b.below("coframe affine in t", affine, 1e-9);
  b.below("J_1 independent of t", j1, 1e-8);
  return b.take();
}

std::vector<Check> algebra_suite(const Options& o) {
  Battery b("algebra");
  std::mt19937 rng(o.seed);
  std::normal_distribution<double> n;
  auto random_form = [&](int dim, int deg) {
    std::vector<ComplexForm::Term> raw;
    for (ComplexForm::Mask m = 0; m < (1u << dim); ++m)
      if (std::popcount(m) == deg) raw.push_back({m, Complex(n(rng), n(rng))});
    return ComplexForm::from_terms(dim, deg, raw);
  };
  double assoc = 0.0, comm = 0.0, dist = 0.0, star = 0.0, split = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_form(6, 1 + trial % 3), c = random_form(6, 1), d = random_form(6, 2);
    const auto e = random_form(6, a.degree());
    assoc = std::max(assoc, (wedge(wedge(a, c), d) - wedge(a, wedge(c, d))).norm());
    const double sign = (a.degree() * d.degree()) % 2 ? -1.0 : 1.0;
    comm = std::max(comm, (wedge(a, d) - sign * wedge(d, a)).norm());
    dist = std::max(dist, (wedge(a + e, d) - wedge(a, d) - wedge(e, d)).norm());
    for (int p = 0; p <= 4; ++p) {
      const auto w = random_form(4, p);
      const double s2 = (p * (4 - p)) % 2 ? -1.0 : 1.0;
      star = std::max(star, (hodge_star_4(hodge_star_4(w)) - s2 * w).norm());
    }
    const auto w2 = random_form(4, 2);
    const auto parts = sd_asd_split(w2);
    split = std::max({split, (parts.plus + parts.minus - w2).norm(), (hodge_star_4(parts.plus) - parts.plus).norm(),
                      (hodge_star_4(parts.minus) + parts.minus).norm()});
  }
  b.below("wedge associativity", assoc, 1e-12);
  b.below("graded commutativity", comm, 1e-12);
  b.below("wedge distributivity", dist, 1e-12);
  b.below("** = (-1)^{p(4-p)}", star, 1e-12);
  b.below("self-dual / anti-self-dual split", split, 1e-12);

  for (const auto& name : kBuiltins) {
    const HermitianSurface M = builtin(name, {});
    double sym = 0.0, bianchi = 0.0;
    bool invariants = true;
    for (const Vec4& x : latin_hypercube(M.chart(), 4, o.seed, 0.3)) {
      invariants = invariants && !M.check_at(x).has_value();
      const Curvature4 R = levi_civita(M, x).R;
      const double scale = std::max(1.0, R.max_abs());
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l) {
              sym = std::max({sym, std::abs(R(i, j, k, l) + R(j, i, k, l)) / scale,
                              std::abs(R(i, j, k, l) + R(i, j, l, k)) / scale,
                              std::abs(R(i, j, k, l) - R(k, l, i, j)) / scale});
              bianchi = std::max(bianchi, std::abs(R(i, j, k, l) + R(i, k, l, j) + R(i, l, j, k)) / scale);
            }
    }
    b.truth(name + " metric SPD and J-compatible", invariants);
    b.below(name + " curvature symmetries", sym, 1e-6);
    b.below(name + " first Bianchi identity", bianchi, 1e-6);
  }
  return b.take();
}

}  // namespace

VerifyOutcome run_verify(const Options& o) {
  using Suite = std::function<std::vector<Check>()>;
  const std::vector<std::pair<std::string, Suite>> suites{
      {"appendix", [] { return appendix_suite(); }},
      {"pipeline", [&] { return pipeline_suite(o); }},
      {"oracle", [&] { return oracle_suite(o); }},
      {"integrability", [&] { return integrability_suite(o); }},
      {"curvature", [&] { return curvature_suite(o); }},
      {"conformal", [&] { return conformal_suite(o); }},
      {"gauduchon", [&] { return gauduchon_suite(o); }},
      {"algebra", [&] { return algebra_suite(o); }},
  };
  std::vector<Check> checks;
  bool known = o.suite == "all";
  for (const auto& [name, run] : suites) {
    if (o.suite != "all" && o.suite != name) continue;
    known = true;
    auto c = run();
    checks.insert(checks.end(), c.begin(), c.end());
  }
  if (!known) throw Error("unknown suite '" + o.suite + "'");
  const bool passed = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });

  if (o.format == "json") {
    Json doc{{"schema", 1}, {"tool", "twistorlab"}, {"command", "verify"}, {"suite", o.suite}};
    Json arr = Json::array();
    for (const auto& c : checks)
      arr.push_back({{"suite", c.suite}, {"check", c.name}, {"pass", c.pass}, {"value", c.value},
                     {"tolerance", c.tolerance}});
    doc["checks"] = arr;
    doc["passed"] = passed;
    return {to_json_text(doc), passed};
  }
  std::ostringstream os;
  int failures = 0;
  for (const auto& c : checks) {
    char line[256];
    std::snprintf(line, sizeof line, "%s  %-14s %-52s %.3e (tol %.1e)\n", c.pass ? "PASS" : "FAIL", c.suite.c_str(),
                  c.name.c_str(), c.value, c.tolerance);
    os << line;
    failures += !c.pass;
  }
  os << (passed ? "all " + std::to_string(checks.size()) + " checks passed\n"
                : std::to_string(failures) + " of " + std::to_string(checks.size()) + " checks failed\n");
  return {os.str(), passed};
}

}  // namespace twistorlab::cli
