#pragma once

#include <Eigen/Dense>

#include "twistorlab/connection.hpp"

namespace twistorlab {

using Operator6 = Eigen::Matrix<double, 6, 6>;

/// R̂ in the ordered basis (α₊¹, α₊², α₊³, α₋¹, α₋², α₋³):
/// M_AB = Σ_{i<j, k<l} α_A^{ij} α_B^{kl} R_ijkl, so that tr M = s/2.
Operator6 curvature_operator(const Curvature4& R);

struct WeylDecomposition {
  Eigen::Matrix3d Wplus;
  Eigen::Matrix3d Wminus;
  /// Lower-left block, mapping Λ⁺ to Λ⁻.
  Eigen::Matrix3d Ric0;
  double s = 0.0;
  /// s* = 4⟨R̂Φ, Φ⟩ with Φ = F/|F| = α₊¹, so that s* = s on Kähler surfaces.
  double sstar = 0.0;

  Operator6 reassemble() const;
};

WeylDecomposition decompose(const Operator6& op);

struct Flag {
  bool value = false;
  double defect = 0.0;
};

struct ConditionFlags {
  Flag self_dual;
  Flag anti_self_dual;
  Flag einstein;
  Flag kahler;
  Flag ricci_J_invariant;
  double s = 0.0;
  double sstar = 0.0;
  double tolerance = 1e-6;
};

/// Ric∘J − J∘Ric from the contracted Ricci tensor, in the adapted frame.
double ricci_J_defect(const Curvature4& R);

/// Frobenius norm of the trace-free Ricci tensor.
double traceless_ricci_norm(const Curvature4& R);

/// `dF_norm` is the Kähler defect ‖dF‖ measured by the caller.
ConditionFlags predicates(const WeylDecomposition& dec, const Curvature4& R, double dF_norm, double tol = 1e-6);

/// Levi-Civita curvature, decomposition and flags at x.
ConditionFlags analyze_point(const HermitianSurface& M, const Vec4& x, double tol = 1e-6);

}  // namespace twistorlab
