#pragma once

#include <array>
#include <optional>

#include <Eigen/Dense>

#include "twistorlab/error.hpp"
#include "twistorlab/exterior.hpp"

namespace twistorlab {

/// Basis of left-invariant 1-forms on SU(3): w^l_m is entry (l, m) of g⁻¹dg.
///   0: w¹₂  1: w¹₃  2: w²₃  3: w̄¹₂  4: w̄¹₃  5: w̄²₃  6: w¹₁  7: w²₂
/// with w³₃ = −w¹₁ − w²₂ and w^m_l = −w̄^l_m.  The first six are horizontal for
/// SU(3) → SU(3)/T².
namespace fl {
inline constexpr int kDim = 8;
inline constexpr int W12 = 0, W13 = 1, W23 = 2, B12 = 3, B13 = 4, B23 = 5, W11 = 6, W22 = 7;
}  // namespace fl

struct SU3Element {
  Eigen::Matrix3cd g = Eigen::Matrix3cd::Identity();

  /// Throws unless g is unitary with determinant 1 (tol 1e-12).
  static SU3Element from_matrix(const Eigen::Matrix3cd& g);
  static SU3Element random(unsigned seed);
};

/// The eight su(3) directions, in order:
/// E₁₂−E₂₁, i(E₁₂+E₂₁), E₁₃−E₃₁, i(E₁₃+E₃₁), E₂₃−E₃₂, i(E₂₃+E₃₂), i(E₁₁−E₂₂), i(E₂₂−E₃₃).
const std::array<Eigen::Matrix3cd, 8>& su3_basis();

/// g⁻¹V for a tangent vector V at g.
Eigen::Matrix3cd maurer_cartan(const SU3Element& g, const Eigen::Matrix3cd& V);

/// w(g·X_k) for the eight basis directions.
struct MaurerCartanEval {
  std::array<Eigen::Matrix3cd, 8> values;

  /// Covector of w^l_m (1-based) against the eight directions.
  Eigen::Matrix<Complex, 8, 1> covector(int l, int m) const;
};

MaurerCartanEval maurer_cartan_eval(const SU3Element& g);

/// Components ε^k(X) of an su(3) element against the form basis.
Eigen::VectorXcd su3_components(const Eigen::Matrix3cd& X);

/// w^l_m (1-based) over the form basis.
ComplexForm mc_form(int l, int m);

/// Complex conjugation (w̄¹₁ = −w¹₁).
ComplexForm flag_conjugate(const ComplexForm& a);

/// d from dw = −w∧w and the Leibniz rule.
ComplexForm structural_d(const ComplexForm& a);

/// max |(dw + w∧w)(A, B)| with dw from differences along g·exp(sA)·exp(tB).
double structure_equation_residual(const SU3Element& g, const Eigen::Matrix3cd& A, const Eigen::Matrix3cd& B);

/// |structural dα(A, B, C) − dα(A, B, C)| for a left-invariant 2-form α, the
/// latter by differences along g·exp(rA)·exp(sB)·exp(tC).
double fd_d_residual(const ComplexForm& alpha, const SU3Element& g, const Eigen::Matrix3cd& A,
                     const Eigen::Matrix3cd& B, const Eigen::Matrix3cd& C);

struct FlagParams {
  double l1 = 1.0;
  double l2 = 1.0;
  double l3 = 1.0;

  static FlagParams single(double lambda) { return {1.0, 1.0, lambda}; }
  /// Throws "parameters must be positive".
  void validate() const;
};

/// For J_1..J_8, whether the (1,0) member of each pair (w¹₂, w¹₃, w²₃) is the form itself.
std::array<bool, 3> flag_pattern(int i);

/// The (1,0) basis of J_i, i = 1..8.
std::array<ComplexForm, 3> flag_holomorphic_forms(int i);

/// (p, q)-part of a horizontal form for J_i; terms with a vertical factor are dropped.
ComplexForm flag_bidegree(const ComplexForm& a, int i, int p, int q);

/// K_i(λ₁, λ₂, λ₃), i = 1..4.
ComplexForm flag_kahler(int i, const FlagParams& params);

/// Coefficient c_i with dK_i = √−1 c_i (w̄¹₂∧w¹₃∧w̄²₃ − w¹₂∧w̄¹₃∧w²₃).
double flag_dK_coefficient(int i, const FlagParams& params);

/// The displayed dK_i.
ComplexForm flag_dK(int i, const FlagParams& params);
/// d K_i from the structure equations.
ComplexForm flag_dK_structural(int i, const FlagParams& params);

/// K_i ∧ dK_i.
ComplexForm flag_balanced(int i, const FlagParams& params);

/// The displayed √−1∂∂̄K_i for i = 1, 3, 4.
ComplexForm flag_ddbar(int i, const FlagParams& params);
/// √−1 [d((dK_i)^{1,2})]^{2,2} from the structure equations.
ComplexForm flag_ddbar_structural(int i, const FlagParams& params);

/// Largest coefficient of dα free of (1,0) factors, over the (1,0) basis of J_i; zero iff integrable.
double flag_nijenhuis(int i);

struct NearlyKahlerResidual {
  double dK;    // ‖dK₂ − 3 Re ρ‖
  double dIm;   // ‖d Im ρ + 2 K₂∧K₂‖
};

/// At λ₁ = λ₂ = λ₃ = 1/√2, with ρ = (√−1)³ w¹₂∧w̄¹₃∧w²₃.
NearlyKahlerResidual nearly_kahler_check();

struct NormalizationCrosscheck {
  std::optional<double> twistor_lambda_sq;
  double flag_lambda_sq;
};

/// Symplectic λ² for K₁ from the twistor module on cp2_fs(c) and from the flag coefficient.
NormalizationCrosscheck normalization_crosscheck(double c = 2.0);

}  // namespace twistorlab
