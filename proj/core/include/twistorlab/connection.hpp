#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string_view>

#include "twistorlab/manifold.hpp"

namespace twistorlab {

/// Coordinate components of a gl(4)-valued 1-form in a frame: w[c](i, j) = ω^i_j(∂c).
using ConnectionCoords = std::array<Mat4, 4>;

/// Σ_c X^c w[c].
Mat4 along(const ConnectionCoords& w, const Vec4& X);

/// Real 4-tensor in frame components, R(i,j,k,l) = R(e_i, e_j, e_k, e_l) with
/// R(X1, X2, X3, X4) = h(R(X3, X4) X2, X1).
struct Curvature4 {
  std::array<double, 256> r{};

  double& operator()(int i, int j, int k, int l) { return r[64 * i + 16 * j + 4 * k + l]; }
  double operator()(int i, int j, int k, int l) const { return r[64 * i + 16 * j + 4 * k + l]; }
  /// Multilinear extension to complex arguments given in frame components.
  Complex eval(const Eigen::Vector4cd& a, const Eigen::Vector4cd& b, const Eigen::Vector4cd& c,
               const Eigen::Vector4cd& d) const;
  double max_abs() const;
  /// Ric_{jk} = Σ_i R_{ijik}.
  Mat4 ricci() const;
};

double max_abs_diff(const Curvature4& a, const Curvature4& b);

/// One slot of a complexified index pattern: u_a, or ū_a when conjugated.
struct Slot {
  int index;  // 1 or 2
  bool bar = false;
};

/// Frame components of u_a (or ū_a).
Eigen::Vector4cd slot_vector(Slot s);

/// Parses a pattern such as "1*212" (a '*' after a digit conjugates it).
std::array<Slot, 4> parse_pattern(std::string_view pattern);

/// 𝐑_{s1 s2 s3 s4} = R(s1, s2, s3, s4) expanded over u_a = (e_{2a−1} − i e_{2a})/√2.
Complex complexify(const Curvature4& R, const std::array<Slot, 4>& pattern);
Complex complexify(const Curvature4& R, std::string_view pattern);

/// christoffel[a](b, c) = Γ^a_bc.
std::array<Mat4, 4> christoffel(const HermitianSurface& M, const Vec4& x);

/// The canonical frame field near x: same seeds at every point.
std::function<UnitaryFrame(const Vec4&)> frame_field(const HermitianSurface& M, const FrameSeeds& seeds = {});

struct LeviCivitaData {
  Vec4 point;
  UnitaryFrame frame;
  std::array<Mat4, 4> gamma;
  ConnectionCoords omega;
  Curvature4 R;

  /// ω^i_j(e_k).
  Mat4 omega_on(int k) const { return along(omega, frame.e.col(k)); }
};

/// Levi-Civita data; R comes from the coordinate Riemann tensor of the Christoffels.
LeviCivitaData levi_civita(const HermitianSurface& M, const Vec4& x, const FrameSeeds& seeds = {});

/// ω^i_j(∂c) = θ^i(∇_{∂c} e_j) for the canonical frame field.
ConnectionCoords levi_civita_forms(const HermitianSurface& M, const Vec4& x, const FrameSeeds& seeds = {});

/// The correction h(D^t_X Y, Z) − h(∇_X Y, Z) as a function of coordinate vectors.
struct GauduchonTerm {
  Alt3 dF;
  Mat4 J;
  double t;

  double operator()(const Vec4& X, const Vec4& Y, const Vec4& Z) const;
};

/// Coordinate components of the D^t connection matrix in the canonical frame.
ConnectionCoords gauduchon_forms(const HermitianSurface& M, const Vec4& x, double t, const FrameSeeds& seeds = {});

/// Curvature from Ω = dω + ω∧ω, differentiating a field of connection matrices.
Curvature4 curvature_from_forms(const std::function<ConnectionCoords(const Vec4&)>& forms, const Vec4& x,
                                const UnitaryFrame& frame, const DiffBackend& backend);

struct HermitianConnectionData {
  double t = 0.0;
  Vec4 point;
  UnitaryFrame frame;
  ConnectionCoords omega;
  /// ψ^a_b(∂c) for the unitary frame (u1, u2).
  std::array<Eigen::Matrix2cd, 4> psi;
  /// torsion[i](k, l) = θ^i(T(e_k, e_l)).
  std::array<Mat4, 4> torsion;
  /// Direct curvature of D^t; filled only on request.
  std::optional<Curvature4> K;

  /// η^a(T(s, r)).
  Complex torsion_component(int a, Slot s, Slot r) const;
  Eigen::Matrix2cd psi_on(const Vec4& X) const;
};

HermitianConnectionData gauduchon(const HermitianSurface& M, const Vec4& x, double t, bool with_curvature = false,
                                  const FrameSeeds& seeds = {});

/// ψ^a_b = ½[ω^{2a−1}_{2b−1} + ω^{2a}_{2b} + i(ω^{2a}_{2b−1} − ω^{2a−1}_{2b})].
Eigen::Matrix2cd unitary_part(const Mat4& w);

/// The u(2)-projection of an so(4) matrix in a J-adapted frame.
Mat4 u2_projection(const Mat4& w);

/// Fields entering the curvature relations, in frame components.
struct TorsionAuxiliary {
  Mat4 L;          // L(e_i, e_j) = (∇_{e_i} α) e_j + ½ α(e_i) α(e_j)
  Mat4 d_alpha_J;  // d(α∘J)(e_i, e_j)
  double alpha_sq = 0.0;
  Mat4 F;          // F(e_i, e_j)
  /// σ = (α∘J)∧F: sigma[i*16+j*4+k] = σ(e_i, e_j, e_k)
  std::array<double, 64> sigma{};
  /// (∇_{e_m} σ)(e_i, e_j, e_k) at index m*64 + i*16 + j*4 + k
  std::array<double, 256> nabla_sigma{};
};

TorsionAuxiliary torsion_auxiliary(const HermitianSurface& M, const Vec4& x, const LeviCivitaData& lc);

/// Chern curvature from the Levi-Civita curvature and the Lee form.
Curvature4 chern_curvature_relation(const LeviCivitaData& lc, const TorsionAuxiliary& aux);
/// Bismut curvature from the Levi-Civita curvature and ∇((α∘J)∧F).
Curvature4 bismut_curvature_relation(const LeviCivitaData& lc, const TorsionAuxiliary& aux);

}  // namespace twistorlab
