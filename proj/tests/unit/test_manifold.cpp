#include <cmath>
#include <string>

#include "doctest.h"
#include "twistorlab/manifold.hpp"

using namespace twistorlab;

namespace {

const char* kFlatSpec =
    "coords x1 x2 x3 x4\n"
    "domain x1 -1 1\ndomain x2 -1 1\ndomain x3 -1 1\ndomain x4 -1 1\n"
    "g 1 1 = 1\ng 2 2 = 1\ng 3 3 = 1\ng 4 4 = 1\n"
    "J standard\n";

}  // namespace

TEST_SUITE("manifold") {
  TEST_CASE("flat surface text parses to the identity metric") {
    const auto M = parse_surface_spec(kFlatSpec);
    const Vec4 x(0.1, -0.3, 0.5, 0.2);
    CHECK((M.metric(x) - Mat4::Identity()).norm() == 0.0);
    CHECK((M.J(x) - standard_J()).norm() == 0.0);
    CHECK(dF_coords(M, x).norm() < 1e-12);
    CHECK(lee_form(M, x).norm() < 1e-12);
  }

  TEST_CASE("nonsymmetric metric is rejected") {
    const std::string text = std::string(kFlatSpec) + "g 1 2 = 0.5 * x1\ng 2 1 = 0\n";
    try {
      parse_surface_spec(text);
      FAIL("expected an invariant violation");
    } catch (const InvariantError& e) {
      CHECK(std::string(e.what()).find("metric not symmetric") != std::string::npos);
    }
  }

  TEST_CASE("surface text errors") {
    CHECK_THROWS_AS(parse_surface_spec("coords x1 x2 x3\n"), ParseError);
    CHECK_THROWS_AS(parse_surface_spec("coords x1 x2 x3 x4\ndomain x1 1 -1\n"), ParseError);
    CHECK_THROWS_AS(parse_surface_spec(std::string(kFlatSpec) + "frobnicate 1\n"), ParseError);
    CHECK_THROWS_AS(parse_surface_spec(std::string(kFlatSpec) + "J 1 2 = -1\n"), ParseError);
  }

  TEST_CASE("built-in surface texts round trip") {
    for (const char* name : {"flat_c2", "cp2_fs", "ch2", "hopf"}) {
      const auto M = builtin(name, {});
      REQUIRE(M.spec_text().has_value());
      const auto N = parse_surface_spec(*M.spec_text(), name);
      for (const Vec4& x : latin_hypercube(M.chart(), 10, 9, 0.0)) {
        CHECK((M.metric(x) - N.metric(x)).norm() < 1e-12);
        CHECK((M.J(x) - N.J(x)).norm() < 1e-12);
      }
    }
  }

  TEST_CASE("built-in parameters") {
    CHECK(builtin("cp2_fs", {{"c", 4.0}}).params().at("c") == 4.0);
    CHECK_THROWS_AS(builtin("cp2_fs", {{"q", 1.0}}), Error);
    CHECK_THROWS_AS(builtin("hopf", {{"c", 1.0}}), Error);
    CHECK_THROWS_AS(builtin("cp2_fs", {{"c", -1.0}}), Error);
    CHECK_THROWS_AS(builtin("nowhere", {}), Error);
  }

  TEST_CASE("adapted frames") {
    const auto flat = builtin(Builtin::FlatC2);
    const auto f = adapted_frame(flat, Vec4::Zero());
    CHECK((f.e - Mat4::Identity()).norm() < 1e-15);

    // Fubini-Study with c = 2 is (4/c)·Id at the chart origin.
    const auto cp2 = builtin(Builtin::CP2, 2.0);
    const auto g = adapted_frame(cp2, Vec4::Zero());
    CHECK((g.e - std::sqrt(2.0 / 4.0) * Mat4::Identity()).norm() < 1e-14);

    for (const char* name : {"flat_c2", "cp2_fs", "ch2", "hopf"}) {
      const auto M = builtin(name, {});
      for (const Vec4& x : latin_hypercube(M.chart(), 5, 2, 0.0)) {
        const auto fr = adapted_frame(M, x);
        const Mat4 gram = fr.e.transpose() * M.metric(x) * fr.e;
        CHECK((gram - Mat4::Identity()).norm() < 1e-10);
        CHECK((M.J(x) * fr.e.col(0) - fr.e.col(1)).norm() < 1e-12);
      }
    }
  }

  TEST_CASE("Kaehler and non-Kaehler built-ins") {
    const auto cp2 = builtin(Builtin::CP2);
    const auto hopf = builtin(Builtin::Hopf);
    for (const Vec4& x : latin_hypercube(cp2.chart(), 5, 3, 0.1)) {
      CHECK(dF_coords(cp2, x).norm() < 1e-8);
      CHECK(lee_form(cp2, x).norm() < 1e-8);
    }
    for (const Vec4& x : latin_hypercube(hopf.chart(), 5, 3, 0.1)) CHECK(dF_coords(hopf, x).norm() > 0.1);
    // Same |z|, different direction: the Lee form has equal norm.
    const Vec4 a(1.0, 0.2, 0.1, 0.0);
    Vec4 b(1.0, 0.0, 0.2, 0.1);
    b *= a.norm() / b.norm();
    const auto na = std::sqrt(lee_form(hopf, a).dot(hopf.metric(a).inverse() * lee_form(hopf, a)));
    const auto nb = std::sqrt(lee_form(hopf, b).dot(hopf.metric(b).inverse() * lee_form(hopf, b)));
    CHECK(na > 0.1);
    CHECK(na == doctest::Approx(nb).epsilon(1e-8));
  }

  TEST_CASE("d(dF) vanishes") {
    for (const char* name : {"flat_c2", "cp2_fs", "ch2", "hopf"}) {
      const auto M = builtin(name, {});
      const DiffBackend& b = M.backend();
      for (const Vec4& x : latin_hypercube(M.chart(), 4, 5, 0.1)) {
        Eigen::Matrix<double, 64, 4> grad;
        for (int a = 0; a < 4; ++a)
          grad.col(a) = partial(
              [&](const Vec4& y) { return Eigen::Matrix<double, 64, 1>(dF_coords(M, y).c.data()); }, x, a, b);
        auto T = [&](int d, int i, int j, int k) { return grad(16 * i + 4 * j + k, d); };
        const double v = T(0, 1, 2, 3) - T(1, 0, 2, 3) + T(2, 0, 1, 3) - T(3, 0, 1, 2);
        CHECK(std::abs(v) < 1e-4);
      }
    }
  }

  TEST_CASE("dF converges at fourth order") {
    // F = |z|^-2 F0 on the Hopf chart, so dF = -2|z|^-4 (x.dx)^F0.
    const auto M = builtin(Builtin::Hopf);
    const Vec4 x(1.1, 0.2, -0.15, 0.1);
    const double r2 = x.squaredNorm();
    const Mat4 F0 = M.fundamental_matrix(x) * r2;
    Alt3 exact;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c)
          exact(a, b, c) = -2.0 / (r2 * r2) * (x(a) * F0(b, c) - x(b) * F0(a, c) + x(c) * F0(a, b));
    auto error = [&](double h) {
      const Alt3 d = dF_coords(M.with_backend(DiffBackend{4, h}), x);
      double e = 0.0;
      for (int k = 0; k < 64; ++k) e = std::max(e, std::abs(d.c[k] - exact.c[k]));
      return e;
    };
    const double coarse = error(4e-2), fine = error(2e-2);
    CHECK(coarse > 1e-9);
    CHECK(coarse / fine >= 8.0);
  }

  TEST_CASE("latin hypercube stays inside") {
    const auto M = builtin(Builtin::Hopf);
    for (const Vec4& x : latin_hypercube(M.chart(), 32, 1, 0.05)) CHECK(M.chart().contains(x, 0.05));
    CHECK_THROWS_AS(M.require_interior(Vec4(0.6, 0.0, 0.0, 0.0)), Error);
  }
}
