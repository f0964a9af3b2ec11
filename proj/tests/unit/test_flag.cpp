#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "twistorlab/flag.hpp"

using namespace twistorlab;

namespace {

Eigen::Matrix3cd random_direction(std::mt19937& rng) {
  std::normal_distribution<double> n;
  Eigen::Matrix3cd X = Eigen::Matrix3cd::Zero();
  for (const auto& E : su3_basis()) X += n(rng) * E;
  return X;
}

}  // namespace

TEST_SUITE("flag") {
  TEST_CASE("Maurer-Cartan form at the identity") {
    const SU3Element id;
    for (const auto& X : su3_basis()) CHECK((maurer_cartan(id, X) - X).norm() < 1e-15);
    const auto ev = maurer_cartan_eval(id);
    // w¹₂ against E₁₂−E₂₁ and i(E₁₂+E₂₁)
    CHECK(std::abs(ev.covector(1, 2)(0) - 1.0) < 1e-15);
    CHECK(std::abs(ev.covector(1, 2)(1) - Complex(0, 1)) < 1e-15);
  }

  TEST_CASE("Maurer-Cartan form along curves") {
    const auto g = SU3Element::random(7);
    std::mt19937 rng(7);
    for (int k = 0; k < 4; ++k) {
      const Eigen::Matrix3cd X = random_direction(rng);
      // d/dt g·exp(tX) at t = 0 by central differences
      const double h = 1e-5;
      const Eigen::Matrix3cd V = (g.g * (h * X).exp() - g.g * (-h * X).exp()) / (2 * h);
      CHECK((maurer_cartan(g, V) - X).norm() < 1e-8);
    }
    const auto ev = maurer_cartan_eval(g);
    for (const auto& w : ev.values) {
      CHECK((w + w.adjoint()).norm() < 1e-12);
      CHECK(std::abs(w.trace()) < 1e-12);
    }
    CHECK((ev.covector(1, 1) + ev.covector(2, 2) + ev.covector(3, 3)).norm() < 1e-12);
    CHECK((ev.covector(2, 1) + ev.covector(1, 2).conjugate()).norm() < 1e-12);
  }

  TEST_CASE("element validation") {
    Eigen::Matrix3cd m = Eigen::Matrix3cd::Identity();
    m(0, 0) = 2.0;
    CHECK_THROWS_AS(SU3Element::from_matrix(m), Error);
    m = Eigen::Matrix3cd::Identity();
    m(0, 0) = -1.0;
    CHECK_THROWS_AS(SU3Element::from_matrix(m), Error);
    const auto g = SU3Element::random(3);
    CHECK((g.g.adjoint() * g.g - Eigen::Matrix3cd::Identity()).norm() < 1e-12);
    CHECK(std::abs(g.g.determinant() - 1.0) < 1e-12);
    CHECK_THROWS_AS(FlagParams({1.0, 0.0, 1.0}).validate(), Error);
  }

  TEST_CASE("structure equations against finite differences") {
    std::mt19937 rng(11);
    for (unsigned seed : {7u, 8u}) {
      const auto g = SU3Element::random(seed);
      const auto A = random_direction(rng), B = random_direction(rng), C = random_direction(rng);
      CHECK(structure_equation_residual(g, A, B) < 1e-6);
      for (int i = 1; i <= 4; ++i) CHECK(fd_d_residual(flag_kahler(i, {0.7, 1.1, 1.6}), g, A, B, C) < 1e-6);
    }
  }

  TEST_CASE("d squared vanishes") {
    for (int l = 1; l <= 3; ++l)
      for (int m = 1; m <= 3; ++m) CHECK(structural_d(structural_d(mc_form(l, m))).norm() < 1e-12);
    for (int i = 1; i <= 4; ++i) CHECK(structural_d(flag_dK_structural(i, {1.0, 2.0, 3.0})).norm() < 1e-12);
  }

  TEST_CASE("dK coefficients") {
    const FlagParams p{1.0, 2.0, 3.0};
    CHECK(flag_dK_coefficient(1, p) == -4.0);
    CHECK(flag_dK_coefficient(2, p) == 14.0);
    for (int i = 1; i <= 4; ++i) CHECK((flag_dK(i, p) - flag_dK_structural(i, p)).norm() == 0.0);
    CHECK(flag_dK(1, FlagParams::single(std::sqrt(2.0))).norm() < 1e-15);
    CHECK(flag_dK(3, {std::sqrt(5.0), 1.0, 2.0}).norm() < 1e-14);
    CHECK(flag_dK(4, {1.0, std::sqrt(5.0), 2.0}).norm() < 1e-14);
    CHECK(flag_dK(2, {0.3, 0.2, 0.1}).norm() > 0.1);
    CHECK(flag_bidegree(flag_dK(2, p), 2, 1, 2).norm() < 1e-15);
    CHECK(flag_bidegree(flag_dK(2, p), 2, 3, 0).norm() > 1.0);
  }

  TEST_CASE("balanced and ddbar") {
    for (int i = 1; i <= 4; ++i) {
      CHECK(flag_balanced(i, {1.0, 2.0, 3.0}).is_zero());
      CHECK(flag_balanced(i, FlagParams::single(0.4)).is_zero());
    }
    for (int i : {1, 3, 4}) CHECK((flag_ddbar(i, {0.5, 1.5, 1.2}) - flag_ddbar_structural(i, {0.5, 1.5, 1.2})).norm() < 1e-12);
    CHECK(flag_ddbar(1, {1.0, 1.0, std::sqrt(2.0)}).norm() < 1e-14);
    CHECK_THROWS_AS(flag_ddbar(2, FlagParams{}), Error);
  }

  TEST_CASE("integrable invariant structures") {
    int integrable = 0;
    for (int i = 1; i <= 8; ++i) {
      const double n = flag_nijenhuis(i);
      if (n < 1e-12) ++integrable;
      if (i == 2 || i == 6) CHECK(n > 0.5);
    }
    CHECK(integrable == 6);
  }

  TEST_CASE("nearly Kaehler structure") {
    const auto r = nearly_kahler_check();
    CHECK(r.dK < 1e-12);
    CHECK(r.dIm < 1e-12);
  }

  TEST_CASE("normalization against the twistor module") {
    const auto x = normalization_crosscheck();
    REQUIRE(x.twistor_lambda_sq.has_value());
    CHECK(std::abs(*x.twistor_lambda_sq - 2.0) < 1e-6);
    CHECK(x.flag_lambda_sq == 2.0);
    const auto y = normalization_crosscheck(4.0);
    REQUIRE(y.twistor_lambda_sq.has_value());
    CHECK(std::abs(*y.twistor_lambda_sq - 1.0) < 1e-6);
  }
}
