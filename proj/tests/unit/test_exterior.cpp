#include <cmath>
#include <random>

#include "doctest.h"
#include "twistorlab/exterior.hpp"

using namespace twistorlab;

namespace {

const Complex I(0.0, 1.0);

ComplexForm e(int dim, int k) { return ComplexForm::basis(dim, {k}); }

ComplexForm random_form(std::mt19937& rng, int dim, int deg) {
  std::normal_distribution<double> n;
  std::vector<ComplexForm::Term> raw;
  for (ComplexForm::Mask m = 0; m < (1u << dim); ++m)
    if (__builtin_popcount(m) == deg) raw.push_back({m, Complex(n(rng), n(rng))});
  return ComplexForm::from_terms(dim, deg, raw);
}

}  // namespace

TEST_SUITE("exterior") {
  TEST_CASE("wedge basics") {
    const auto w = wedge(e(4, 0), e(4, 1));
    CHECK(w.degree() == 2);
    CHECK(w.terms().size() == 1);
    CHECK(std::abs(w.coeff({0, 1}) - 1.0) < 1e-15);
    CHECK(wedge(e(4, 0), e(4, 0)).is_zero());
    // (ε¹ + iε²)∧(ε¹ − iε²) = −iε¹∧ε² + iε²∧ε¹ = −2i ε¹∧ε²
    const auto p = wedge(e(4, 0) + I * e(4, 1), e(4, 0) - I * e(4, 1));
    CHECK(std::abs(p.coeff({0, 1}) - Complex(0, -2)) < 1e-15);
  }

  TEST_CASE("canonical storage") {
    const auto a = ComplexForm::basis(5, {3, 1, 4});
    REQUIRE(a.terms().size() == 1);
    // (3,1,4) → (1,3,4) is one transposition
    CHECK(std::abs(a.coeff({1, 3, 4}) + 1.0) < 1e-15);
    const auto tiny = ComplexForm::basis(5, {0, 1}, 1e-16);
    CHECK(tiny.is_zero());
    const auto sum = a + ComplexForm::basis(5, {4, 3, 1}, 0.5);
    for (const auto& t : sum.terms()) CHECK(std::popcount(t.mask) == 3);
  }

  TEST_CASE("evaluation uses the determinant convention") {
    const auto w = wedge(e(3, 0), e(3, 1));
    Eigen::VectorXcd v(3), u(3);
    v << 2.0, 3.0, 0.0;
    u << 5.0, 7.0, 1.0;
    const std::array<Eigen::VectorXcd, 2> vs{v, u};
    CHECK(std::abs(w.evaluate(vs) - Complex(2.0 * 7.0 - 3.0 * 5.0)) < 1e-14);
  }

  TEST_CASE("algebra laws on random forms") {
    std::mt19937 rng(42);
    for (int trial = 0; trial < 10; ++trial) {
      const auto a = random_form(rng, 6, 2), b = random_form(rng, 6, 1), c = random_form(rng, 6, 3);
      CHECK((wedge(wedge(a, b), c) - wedge(a, wedge(b, c))).norm() < 1e-12);
      CHECK((wedge(a, b) - wedge(b, a)).norm() < 1e-12);
      CHECK((wedge(b, c) + wedge(c, b)).norm() < 1e-12);
      CHECK((wedge(b, b)).norm() < 1e-12);
    }
  }

  TEST_CASE("degree overflow gives zero") {
    const auto a = ComplexForm::basis(4, {0, 1, 2});
    const auto w = wedge(a, ComplexForm::basis(4, {0, 3}));
    CHECK(w.is_zero());
  }

  TEST_CASE("pullback is an algebra map") {
    std::mt19937 rng(3);
    std::normal_distribution<double> n;
    Eigen::MatrixXcd m(4, 4);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m(r, c) = Complex(n(rng), n(rng));
    const auto a = random_form(rng, 4, 1), b = random_form(rng, 4, 2);
    CHECK((pullback(wedge(a, b), m) - wedge(pullback(a, m), pullback(b, m))).norm() < 1e-11);
  }

  TEST_CASE("hodge star") {
    const auto s = hodge_star_4(ComplexForm::basis(4, {0, 1}));
    CHECK(std::abs(s.coeff({2, 3}) - 1.0) < 1e-15);
    const auto basis = SdAsdBasis::standard();
    for (int k = 0; k < 3; ++k) {
      CHECK((hodge_star_4(basis.plus[k]) - basis.plus[k]).norm() < 1e-15);
      CHECK((hodge_star_4(basis.minus[k]) + basis.minus[k]).norm() < 1e-15);
    }
    std::mt19937 rng(5);
    for (int p = 0; p <= 4; ++p) {
      const auto a = random_form(rng, 4, p);
      const double sign = (p * (4 - p)) % 2 ? -1.0 : 1.0;
      CHECK((hodge_star_4(hodge_star_4(a)) - sign * a).norm() < 1e-13);
    }
  }

  TEST_CASE("self-dual split") {
    const auto basis = SdAsdBasis::standard();
    const double r = 1.0 / std::sqrt(2.0);
    const auto parts = sd_asd_split(ComplexForm::basis(4, {0, 1}));
    CHECK((parts.plus - r * basis.plus[0]).norm() < 1e-15);
    CHECK((parts.minus - r * basis.minus[0]).norm() < 1e-15);
    const auto p2 = sd_asd_split(basis.plus[1]);
    CHECK((p2.plus - basis.plus[1]).norm() < 1e-15);
    CHECK(p2.minus.norm() < 1e-15);
    std::mt19937 rng(42);
    const auto a = random_form(rng, 4, 2);
    const auto split = sd_asd_split(a);
    CHECK((split.plus + split.minus - a).norm() < 1e-14);
  }

  TEST_CASE("bidegree projection") {
    // η¹, η², η̄¹, η̄² as ε⁰..ε³
    const auto pairing = ComplexPairing::split_halves(4);
    const auto a = ComplexForm::basis(4, {0, 2});
    CHECK((bidegree_project(a, pairing, 1, 1).form - a).norm() < 1e-15);
    CHECK(bidegree_project(ComplexForm::basis(4, {0, 1}), pairing, 1, 1).form.is_zero());
    // α₊¹ = (i/√2)(η¹∧η̄¹ + η²∧η̄²) is of type (1,1)
    const auto alpha = (I / std::sqrt(2.0)) * (ComplexForm::basis(4, {0, 2}) + ComplexForm::basis(4, {1, 3}));
    CHECK((bidegree_project(alpha, pairing, 1, 1).form - alpha).norm() < 1e-15);
    CHECK(bidegree_project(alpha, pairing, 2, 0).form.is_zero());
  }

  TEST_CASE("conjugation on a paired basis") {
    const auto inv = ComplexPairing::split_halves(4).involution(4);
    const auto a = I * ComplexForm::basis(4, {0, 1});
    const auto c = a.conjugate(inv);
    CHECK(std::abs(c.coeff({2, 3}) - Complex(0, -1)) < 1e-15);
  }
}
