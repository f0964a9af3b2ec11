#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "doctest.h"
#include "twistorlab/twistor.hpp"

using namespace twistorlab;

namespace {

const ConnectionChoice kL = ConnectionChoice::lichnerowicz();
const ConnectionChoice kCh = ConnectionChoice::chern();

Vec6 sample(const HermitianSurface& M, unsigned seed = 1) { return sample_twistor_points(M, 1, seed)[0]; }

}  // namespace

TEST_SUITE("twistor") {
  TEST_CASE("almost complex structures square to -1") {
    for (const char* name : {"cp2_fs", "hopf"}) {
      const auto M = builtin(name, {});
      const TwistorChart chart(M);
      for (auto conn : {kL, kCh}) {
        const CMat6 C = coframe_matrix(chart, conn, sample(M));
        for (int i = 1; i <= 4; ++i) {
          const Mat6 J = acs_endomorphism(i, C);
          CHECK((J * J + Mat6::Identity()).cwiseAbs().maxCoeff() < 1e-10);
        }
      }
    }
  }

  TEST_CASE("holomorphic patterns") {
    CHECK(holomorphic_pattern(1) == std::array<bool, 3>{true, false, true});
    CHECK(holomorphic_pattern(2) == std::array<bool, 3>{true, false, false});
    CHECK(holomorphic_pattern(3) == std::array<bool, 3>{true, true, true});
    CHECK(holomorphic_pattern(4) == std::array<bool, 3>{true, true, false});
  }

  TEST_CASE("chart and parameter errors") {
    const auto M = builtin(Builtin::CP2);
    const TwistorChart chart(M);
    Vec6 p = sample(M);
    p(4) = 5.0;
    try {
      chart.check(p);
      FAIL("expected a chart error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("fiber coordinate out of chart") != std::string::npos);
    }
    CHECK_THROWS_AS(Lambdas::single(5e-4).validate(), Error);
    CHECK_NOTHROW(Lambdas::single(kMinLambda).validate());
    CHECK_THROWS_AS(parse_connection("weitzenbock"), Error);
    CHECK(parse_connection("bismut").parameter() == -1.0);
  }

  TEST_CASE("chart points round trip") {
    const auto M = builtin(Builtin::Hopf);
    const TwistorChart chart(M);
    for (const Vec6& p : sample_twistor_points(M, 5, 3)) CHECK((chart.coordinates(chart.point(p)) - p).norm() < 1e-10);
  }

  TEST_CASE("Kaehler base: Chern and Lichnerowicz coincide") {
    const auto M = builtin(Builtin::CP2);
    const TwistorChart chart(M);
    const Vec6 p = sample(M, 4);
    const CMat6 CL = coframe_matrix(chart, kL, p), CC = coframe_matrix(chart, kCh, p);
    for (int i = 1; i <= 4; ++i)
      CHECK((acs_endomorphism(i, CL) - acs_endomorphism(i, CC)).cwiseAbs().maxCoeff() < 1e-7);
  }

  TEST_CASE("symplectic parameter on the projective plane") {
    const auto M = builtin(Builtin::CP2, 2.0);
    const TwistorChart chart(M);
    for (const Vec6& p : sample_twistor_points(M, 3, 5)) {
      const auto cf = twistor_coframe(chart, kL, p);
      CHECK(dK_formula(1, std::sqrt(2.0), cf).norm() < 1e-6);
      CHECK(dK_formula(1, 1.0, cf).norm() > 0.5);
      const auto l = critical_lambda(1, cf, 0.5, 3.0);
      REQUIRE(l.has_value());
      CHECK(*l * *l == doctest::Approx(2.0).epsilon(1e-7));
      for (int i = 1; i <= 4; ++i) CHECK(balanced_defect_formula(i, 0.7, cf).norm() < 1e-7);
    }
    for (double c : {1.0, 4.0}) {
      const auto N = builtin(Builtin::CP2, c);
      const auto cf = twistor_coframe(TwistorChart(N), kCh, sample(N));
      const auto l = critical_lambda(1, cf, 0.1, 10.0);
      REQUIRE(l.has_value());
      CHECK(*l * *l == doctest::Approx(4.0 / c).epsilon(1e-7));
    }
  }

  TEST_CASE("flat base with the Chern connection") {
    const auto M = builtin(Builtin::FlatC2);
    const auto cf = twistor_coframe(TwistorChart(M), kCh, sample(M));
    CHECK(dK_formula(3, 1.0, cf).norm() < 1e-9);
    CHECK(dK_formula(4, 1.0, cf).norm() < 1e-9);
  }

  TEST_CASE("dK formulas against finite differences") {
    for (const char* name : {"cp2_fs", "ch2", "hopf"}) {
      const auto M = builtin(name, {});
      const TwistorChart chart(M);
      const Vec6 p = sample(M, 7);
      for (auto conn : {kL, kCh}) {
        const auto cf = twistor_coframe(chart, conn, p);
        const auto jet = coframe_jet(chart, conn, p);
        for (int i = 1; i <= 4; ++i) {
          CHECK((dK_formula(i, 0.8, cf) - dK_oracle(i, Lambdas::single(0.8), jet)).norm() < 1e-5);
          const Lambdas three{0.7, 1.3, 0.9};
          CHECK((dK_formula(i, three, cf) - dK_oracle(i, three, jet)).norm() < 1e-5);
        }
      }
    }
  }

  TEST_CASE("ddbar formulas against nested differences") {
    for (const char* name : {"cp2_fs", "ch2"}) {
      const auto M = builtin(name, {});
      const TwistorChart chart(M);
      const Vec6 p = sample(M, 2);
      const auto cf = twistor_coframe(chart, kL, p);
      DdbarRequest req;
      req.constant_scalar_curvature = true;
      for (int i : {1, 3, 4})
        CHECK((ddbar_formula(i, 0.9, cf, req) - ddbar_oracle(i, 0.9, chart, kL, p)).norm() < 1e-5);
      const auto cc = twistor_coframe(chart, kCh, p);
      for (int i : {3, 4}) CHECK((ddbar_formula(i, 0.9, cc) - ddbar_oracle(i, 0.9, chart, kCh, p)).norm() < 1e-5);
      CHECK_THROWS_AS(ddbar_formula(1, 0.9, cc), Error);
    }
  }

  TEST_CASE("ddbar formulas refuse missing hypotheses") {
    const auto M = builtin(Builtin::Hopf);
    const auto cf = twistor_coframe(TwistorChart(M), kL, sample(M));
    try {
      ddbar_formula(3, 1.0, cf);
      FAIL("expected a refusal");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("missing hypothesis") != std::string::npos);
    }
  }

  TEST_CASE("sign of ddbar K_1 at small parameter") {
    DdbarRequest req;
    req.constant_scalar_curvature = true;
    const auto H = builtin(Builtin::CH2);
    const auto cfh = twistor_coframe(TwistorChart(H), kL, sample(H));
    CHECK(ddbar_positivity(1, ddbar_formula(1, 0.1, cfh, req)) > 0.0);
    const auto P = builtin(Builtin::CP2);
    const auto cfp = twistor_coframe(TwistorChart(P), kL, sample(P));
    CHECK(ddbar_positivity(1, ddbar_formula(1, 0.1, cfp, req)) < 0.0);
  }

  TEST_CASE("integrability") {
    const auto M = builtin(Builtin::CP2);
    const TwistorChart chart(M);
    const Vec6 p = sample(M, 6);
    CHECK(nijenhuis_oracle(1, chart, kL, p) < 1e-4);
    CHECK(nijenhuis_oracle(2, chart, kL, p) > 0.1);
  }

  TEST_CASE("conformal behaviour on the Hopf surface") {
    const auto M = builtin(Builtin::Hopf);
    const Vec6 p = sample(M, 8);
    auto f = [](const Vec4& x) { return 0.1 * x(0); };
    const auto ch = conformal_compare(M, f, kCh, p);
    CHECK(*std::max_element(ch.begin(), ch.end()) < 1e-7);
    const auto l = conformal_compare(M, f, kL, p);
    CHECK(l[0] < 1e-7);
    CHECK(std::max({l[1], l[2], l[3]}) > 1e-3);
  }

  TEST_CASE("projective bundle form") {
    const auto M = builtin(Builtin::CP2);
    const TwistorChart chart(M);
    const Vec6 p = sample(M, 9);
    const auto form = projective_bundle_form(chart, 10.0, p);
    CHECK(projective_bundle_positivity(chart, form, p) > 0.0);
    const CMat6 C = coframe_matrix(chart, kCh, p);
    CHECK((form - to_chart(kahler_form(3, Lambdas{}), C)).norm() > 0.01);

    // Flat base: the fiber part is the Fubini-Study form of the projective line.
    const auto F = builtin(Builtin::FlatC2);
    const TwistorChart flat(F);
    const Vec6 q = sample(F, 2);
    const double r2 = q(4) * q(4) + q(5) * q(5);
    const auto ff = projective_bundle_form(flat, 1.0, q);
    CHECK(std::abs(ff.coeff({4, 5}) - 2.0 / ((1 + r2) * (1 + r2))) < 1e-6);

    CHECK_THROWS_AS(projective_bundle_form(TwistorChart(builtin(Builtin::Hopf)), 1.0, sample(builtin(Builtin::Hopf))),
                    Error);
  }

  TEST_CASE("condition report") {
    const auto M = builtin(Builtin::CP2);
    ReportOptions opt;
    opt.lambdas = {Lambdas::single(1.0), Lambdas::single(std::sqrt(2.0))};
    opt.points = 2;
    const auto rep = condition_report(M, kL, opt);
    REQUIRE(rep.records.size() == 2 * 4 * 2);
    for (const auto& r : rep.records) {
      const bool critical = r.lambdas.l3 > 1.2;
      if (r.i == 1) CHECK(r.symplectic == critical);
      CHECK(r.balanced);
      REQUIRE(r.formula_oracle_residual.has_value());
      CHECK(*r.formula_oracle_residual < 1e-4);
    }
    opt.threads = 3;
    const auto again = condition_report(M, kL, opt);
    for (std::size_t k = 0; k < rep.records.size(); ++k)
      CHECK(rep.records[k].symplectic_oracle == again.records[k].symplectic_oracle);
  }

  TEST_CASE("parallel_for visits every index once") {
    std::array<std::atomic<int>, 37> hits{};
    parallel_for(37, 4, [&](int k) { ++hits[k]; });
    for (const auto& h : hits) CHECK(h.load() == 1);
  }
}
