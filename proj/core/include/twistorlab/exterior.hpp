#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace twistorlab {

using Complex = std::complex<double>;

/// Coefficients with modulus below this are dropped after every operation.
inline constexpr double kZeroThreshold = 1e-14;

/// Largest supported basis dimension (SU(3) computations need 8).
inline constexpr int kMaxFormDim = 8;

/// Homogeneous complex differential form over an ordered coframe basis
/// ε^0, ..., ε^{dim-1}.  Terms are stored canonically: each index tuple is
/// strictly increasing (encoded as a bit mask) and any permutation sign is
/// absorbed into the coefficient.
class ComplexForm {
 public:
  using Mask = std::uint32_t;

  struct Term {
    Mask mask;
    Complex coeff;
  };

  ComplexForm() = default;
  ComplexForm(int dim, int degree);

  static ComplexForm scalar(int dim, Complex value);
  /// c · ε^{i_1} ∧ ... ∧ ε^{i_k}; indices may come in any order.
  static ComplexForm basis(int dim, std::initializer_list<int> indices, Complex coeff = 1.0);
  static ComplexForm basis(int dim, std::span<const int> indices, Complex coeff = 1.0);
  /// Σ_j coeffs[j] ε^j.
  static ComplexForm one_form(std::span<const Complex> coeffs);
  static ComplexForm one_form(const Eigen::VectorXcd& coeffs);
  /// Σ_{i<j} comps(i,j) ε^i ∧ ε^j for an antisymmetric component matrix.
  static ComplexForm two_form(const Eigen::MatrixXcd& comps);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Complex coeff(std::initializer_list<int> increasing_indices) const;
  Complex coeff_mask(Mask mask) const;

  /// Euclidean norm of the canonical coefficient vector.
  double norm() const;
  double max_abs() const;

  /// Conjugates coefficients only (correct for real coframe bases).
  ComplexForm conj() const;
  /// Complex conjugation on a basis closed under conjugation:
  /// conj(ε^j) = ε^{involution[j]}.
  ComplexForm conjugate(std::span<const int> involution) const;

  /// ω(v_1, ..., v_k) with the determinant convention
  /// (ε^1∧ε^2)(v,w) = ε^1(v)ε^2(w) − ε^2(v)ε^1(w).
  /// Each vector is given by its components against the dual basis.
  Complex evaluate(std::span<const Eigen::VectorXcd> vectors) const;

  ComplexForm& operator+=(const ComplexForm& other);
  ComplexForm& operator-=(const ComplexForm& other);
  ComplexForm& operator*=(Complex s);

  friend ComplexForm operator+(ComplexForm a, const ComplexForm& b) { return a += b; }
  friend ComplexForm operator-(ComplexForm a, const ComplexForm& b) { return a -= b; }
  friend ComplexForm operator*(Complex s, ComplexForm a) { return a *= s; }
  friend ComplexForm operator*(ComplexForm a, Complex s) { return a *= s; }
  friend ComplexForm operator*(double s, ComplexForm a) { return a *= Complex(s); }
  friend ComplexForm operator-(ComplexForm a) { return a *= -1.0; }

  static std::vector<int> indices_of(Mask mask);
  std::string to_string(std::span<const std::string> basis_names = {}) const;

  /// Builds a form from raw (mask, coeff) contributions, summing duplicates
  /// and dropping coefficients below kZeroThreshold.
  static ComplexForm from_terms(int dim, int degree, std::vector<Term> raw);

 private:
  void normalize();

  int dim_ = 0;
  int degree_ = 0;
  std::vector<Term> terms_;
};

/// ‖a − b‖ ≤ tol (dimensions and degrees must agree).
bool approx_equal(const ComplexForm& a, const ComplexForm& b, double tol);

/// Exterior product; returns the zero form of degree deg a + deg b when that
/// exceeds the basis dimension.
ComplexForm wedge(const ComplexForm& a, const ComplexForm& b);

template <typename... Rest>
ComplexForm wedge(const ComplexForm& a, const ComplexForm& b, const Rest&... rest) {
  return wedge(wedge(a, b), rest...);
}

/// Substitutes each basis 1-form ε^k = Σ_j m(k, j) ν^j and re-expands over the
/// new basis ν (dimension m.cols()).
ComplexForm pullback(const ComplexForm& a, const Eigen::MatrixXcd& m);

/// Hodge star against an orthonormal coframe of a 4-dimensional space.
ComplexForm hodge_star_4(const ComplexForm& a, int orientation = +1);

struct SdAsdParts {
  ComplexForm plus;
  ComplexForm minus;
};

/// Splits a 2-form into self-dual and anti-self-dual parts.
SdAsdParts sd_asd_split(const ComplexForm& a);

/// Orthonormal bases α±^k of Λ± over θ^1..θ^4 (0-based ε^0..ε^3):
///   α±^1 = (θ12 ± θ34)/√2, α±^2 = (θ13 ± θ42)/√2, α±^3 = (θ14 ± θ23)/√2.
struct SdAsdBasis {
  std::array<ComplexForm, 3> plus;
  std::array<ComplexForm, 3> minus;

  static SdAsdBasis standard();
  /// (α₊¹, α₊², α₊³, α₋¹, α₋², α₋³).
  std::array<ComplexForm, 6> ordered() const;
};

/// Which basis indices are of type (1,0) and which are their conjugates.
struct ComplexPairing {
  std::vector<std::pair<int, int>> pairs;  // (holomorphic, antiholomorphic)

  /// Pairs (k, k + n) for k < n on a basis of dimension 2n.
  static ComplexPairing split_halves(int dim);
  /// Conjugation involution of the basis.
  std::vector<int> involution(int dim) const;
};

struct BidegreeResult {
  ComplexForm form;
  bool degree_mismatch = false;
};

/// (p,q)-component of a with respect to a pairing that covers every basis index.
BidegreeResult bidegree_project(const ComplexForm& a, const ComplexPairing& pairing, int p, int q);

}  // namespace twistorlab
