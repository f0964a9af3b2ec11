#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "twistorlab/connection.hpp"
#include "twistorlab/curvature_analysis.hpp"

namespace twistorlab {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using CMat6 = Eigen::Matrix<Complex, 6, 6>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Coframe basis indices on Z: φ¹, φ², φ³, φ̄¹, φ̄², φ̄³.
namespace tw {
inline constexpr int kDim = 6;
inline constexpr int P1 = 0, P2 = 1, P3 = 2, B1 = 3, B2 = 4, B3 = 5;
}  // namespace tw

/// conj(φ^k) as a basis index.
std::array<int, 6> twistor_involution();

enum class ConnectionKind { Lichnerowicz, Chern, Gauduchon };

struct ConnectionChoice {
  ConnectionKind kind = ConnectionKind::Lichnerowicz;
  double t = 0.0;

  static ConnectionChoice lichnerowicz() { return {ConnectionKind::Lichnerowicz, 0.0}; }
  static ConnectionChoice chern() { return {ConnectionKind::Chern, 1.0}; }
  static ConnectionChoice gauduchon(double t);

  /// The Gauduchon parameter of the connection.
  double parameter() const;
  bool has_formulas() const { return kind != ConnectionKind::Gauduchon; }
  std::string name() const;
};

/// Accepts lichnerowicz, chern, bismut (t = −1) and gauduchon (uses t).
ConnectionChoice parse_connection(std::string_view name, double t = 0.0);

/// Metric parameters; the one-parameter family is (1, 1, λ).
struct Lambdas {
  double l1 = 1.0;
  double l2 = 1.0;
  double l3 = 1.0;

  static Lambdas single(double lambda) { return {1.0, 1.0, lambda}; }
  /// Throws unless every parameter is at least kMinLambda.
  void validate() const;
};

inline constexpr double kMinLambda = 1e-3;

/// A point of Z: a base point and a complex line of T^{1,0}.
struct TwistorPoint {
  Vec4 x;
  /// Coordinate components, unit length for h, first nonvanishing component positive real.
  Eigen::Vector4cd line;

  static TwistorPoint from_vector(const HermitianSurface& M, const Vec4& x, const Eigen::Vector4cd& v);
};

/// Chart (x¹..x⁴, Re ζ, Im ζ) on Z with line [u₁ + ζ u₂] over the canonical frame field.
class TwistorChart {
 public:
  explicit TwistorChart(const HermitianSurface& M, FrameSeeds seeds = {}, double zeta_max = 4.0);

  const HermitianSurface& surface() const { return *M_; }
  const FrameSeeds& seeds() const { return seeds_; }
  double zeta_max() const { return zeta_max_; }

  /// Throws "fiber coordinate out of chart" when |ζ| exceeds the bound.
  void check(const Vec6& p) const;
  Vec6 coordinates(const TwistorPoint& z) const;
  TwistorPoint point(const Vec6& p) const;

 private:
  const HermitianSurface* M_;
  FrameSeeds seeds_;
  double zeta_max_;
};

/// The section matrix a(ζ): (û₁, û₂) = (u₁, u₂)·a.
Eigen::Matrix2cd section_matrix(Complex zeta);
/// ∂a/∂(Re ζ) and ∂a/∂(Im ζ).
std::array<Eigen::Matrix2cd, 2> section_derivatives(Complex zeta);

/// Curvature and torsion of the chosen connection against the twistor coframe.
struct TwistorStructure {
  /// curvature[a][b] = Ψ^{a+1}_{b+1}, a 2-form; for the Lichnerowicz choice this is
  /// the Levi-Civita curvature, so curvature[0][1] = τ³.
  std::array<std::array<ComplexForm, 2>, 2> curvature;
  /// Levi-Civita curvature blocks R(ū_a, u_b, ·, ·), used by the ∂∂̄ formulas.
  std::array<std::array<ComplexForm, 2>, 2> riemann;
  /// Torsion 2-forms 𝐓¹, 𝐓².
  std::array<ComplexForm, 2> torsion;
  /// μ = −h(∇ū₂, ū₁) from the Levi-Civita connection.
  ComplexForm mu;
  Complex R_1b21_1b = 0.0;  // 𝐑_{1̄21 1̄}
  Complex R_1b22_2b = 0.0;  // 𝐑_{1̄22 2̄}
  double s = 0.0;
  double sstar = 0.0;
  ConditionFlags flags;
};

struct TwistorCoframe {
  ConnectionChoice connection;
  Vec6 p;
  /// Rows φ¹, φ², φ³, φ̄¹, φ̄², φ̄³ against the chart coordinate directions.
  CMat6 C;
  /// û₁, û₂ in frame components.
  Eigen::Matrix<Complex, 4, 2> uhat;
  std::optional<TwistorStructure> structure;

  /// Gram determinant |det C|.
  double gram() const { return std::abs(C.determinant()); }
};

/// Only the coframe matrix; cheap enough for finite-difference stencils.
CMat6 coframe_matrix(const TwistorChart& chart, const ConnectionChoice& conn, const Vec6& p);

TwistorCoframe twistor_coframe(const TwistorChart& chart, const ConnectionChoice& conn, const Vec6& p,
                               bool with_structure = true);

/// (1,0) flags of J_i over the coframe basis (true = the (1,0) member is φ^k itself).
std::array<bool, 3> holomorphic_pattern(int i);

/// J_i in chart coordinates.
Mat6 acs_endomorphism(int i, const CMat6& C);

/// K_i(λ₁, λ₂, λ₃) over the coframe basis.
ComplexForm kahler_form(int i, const Lambdas& lambdas);

/// h_λ = Σ λ_a² Re(φ^a ⊗ φ̄^a) in chart coordinates.
Mat6 twistor_metric(const Lambdas& lambdas, const CMat6& C);

/// Re-expresses a coframe-basis form in chart coordinates and back.
ComplexForm to_chart(const ComplexForm& a, const CMat6& C);
ComplexForm from_chart(const ComplexForm& a, const CMat6& C);

/// The displayed dK formulas of the one-parameter family.
ComplexForm dK_formula(int i, double lambda, const TwistorCoframe& cf);
/// Three-parameter version assembled from d(√−1 φ^a∧φ̄^a).
ComplexForm dK_formula(int i, const Lambdas& lambdas, const TwistorCoframe& cf);
ComplexForm balanced_defect_formula(int i, double lambda, const TwistorCoframe& cf);

struct DdbarRequest {
  /// Asserted by the caller for the (i = 1, Lichnerowicz) case.
  bool constant_scalar_curvature = false;
};

ComplexForm ddbar_formula(int i, double lambda, const TwistorCoframe& cf, const DdbarRequest& req = {});

/// Smallest value of −Θ(v, v̄, w, w̄) over pairs of J_i-(1,0) test vectors.
double ddbar_positivity(int i, const ComplexForm& theta);

/// C at p together with its partial derivatives in the six chart directions.
struct CoframeJet {
  Vec6 p;
  CMat6 C;
  std::array<CMat6, 6> dC;
};

CoframeJet coframe_jet(const TwistorChart& chart, const ConnectionChoice& conn, const Vec6& p);

/// dK over the coframe basis from finite differences of the chart components of K.
ComplexForm dK_oracle(int i, const Lambdas& lambdas, const CoframeJet& jet);
ComplexForm dK_oracle(int i, const Lambdas& lambdas, const TwistorChart& chart, const ConnectionChoice& conn,
                      const Vec6& p);

/// max over coordinate pairs of |N(∂a, ∂b)|.
double nijenhuis_oracle(int i, const CoframeJet& jet);
double nijenhuis_oracle(int i, const TwistorChart& chart, const ConnectionChoice& conn, const Vec6& p);

/// √−1 ∂∂̄K_i as √−1 [d((dK)^{1,2})]^{2,2}, by nested differences.
ComplexForm ddbar_oracle(int i, double lambda, const TwistorChart& chart, const ConnectionChoice& conn,
                         const Vec6& p);

/// Max entry differences |J_i(h) − J_i(e^{2f}h)| at the same point of Z, i = 1..4.
std::array<double, 4> conformal_compare(const HermitianSurface& M, const std::function<double(const Vec4&)>& f,
                                        const ConnectionChoice& conn, const Vec6& p);

/// λ p*F + √−1∂∂̄ log h(s, s) in chart coordinates, for a Kähler surface in holomorphic
/// coordinates (standard J); s is the local holomorphic section ∂_{z1} + w ∂_{z2}.
ComplexForm projective_bundle_form(const TwistorChart& chart, double lambda, const Vec6& p);

/// Smallest Φ(X, JX) over chart test directions, with J the holomorphic structure of P(T^{1,0}M).
double projective_bundle_positivity(const TwistorChart& chart, const ComplexForm& form, const Vec6& p);

/// Random chart points: base points from a Latin hypercube, ζ uniform in the unit disc.
std::vector<Vec6> sample_twistor_points(const HermitianSurface& M, int count, unsigned seed);

/// Signed measure of dK_i(λ) along dK_i at a reference λ; changes sign at a symplectic value.
double symplectic_signature(int i, double lambda, double lambda_ref, const TwistorCoframe& cf);

/// λ in [lo, hi] where the signature changes sign, found by bisection; nullopt without a crossing.
std::optional<double> critical_lambda(int i, const TwistorCoframe& cf, double lo, double hi, double tol = 1e-9);

struct ConditionRecord {
  int point_index = 0;
  int i = 0;
  Lambdas lambdas;
  std::optional<double> symplectic_formula;
  double symplectic_oracle = 0.0;
  std::optional<double> balanced_formula;
  double balanced_oracle = 0.0;
  double nijenhuis = 0.0;
  std::optional<double> formula_oracle_residual;
  bool symplectic = false;
  bool balanced = false;
  bool integrable = false;
};

struct PointRecord {
  Vec6 p;
  ConditionFlags flags;
};

struct ConditionReport {
  std::string surface;
  std::string connection;
  double tolerance = 1e-4;
  double nijenhuis_tolerance = 1e-4;
  unsigned seed = 0;
  std::vector<PointRecord> points;
  std::vector<ConditionRecord> records;  // sorted by (point, i, λ₃, λ₁, λ₂)
};

struct ReportOptions {
  std::vector<Lambdas> lambdas{Lambdas{}};
  int points = 5;
  unsigned seed = 1;
  double tolerance = 1e-4;
  double nijenhuis_tolerance = 1e-4;
  int threads = 1;
};

ConditionReport condition_report(const HermitianSurface& M, const ConnectionChoice& conn, const ReportOptions& opt);

/// Runs f(0..n−1) on up to `threads` workers.
void parallel_for(int n, int threads, const std::function<void(int)>& f);

}  // namespace twistorlab
