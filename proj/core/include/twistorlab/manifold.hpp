#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "twistorlab/error.hpp"
#include "twistorlab/expression.hpp"
#include "twistorlab/exterior.hpp"
#include "twistorlab/finite_difference.hpp"

namespace twistorlab {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using CVec4 = Eigen::Vector4cd;

/// The standard complex structure: J∂1 = ∂2, J∂3 = ∂4.
Mat4 standard_J();

struct ChartSpec {
  std::array<std::string, 4> coords{"x1", "x2", "x3", "x4"};
  std::array<std::pair<double, double>, 4> box{};

  /// True when every coordinate is at least `margin` away from the walls.
  bool contains(const Vec4& x, double margin = 0.0) const;
};

/// Fully antisymmetric 3-tensor on R^4; c(a,b,c) = T(∂a, ∂b, ∂c).
struct Alt3 {
  std::array<double, 64> c{};

  double& operator()(int a, int b, int d) { return c[16 * a + 4 * b + d]; }
  double operator()(int a, int b, int d) const { return c[16 * a + 4 * b + d]; }
  double eval(const Vec4& x, const Vec4& y, const Vec4& z) const;
  double norm() const;
};

/// Which check failed when a surface violates its invariants.
struct InvariantViolation {
  Vec4 point;
  std::string check;
};

class HermitianSurface {
 public:
  using MatrixField = std::function<Mat4(const Vec4&)>;

  HermitianSurface(std::string name, ChartSpec chart, MatrixField metric, MatrixField J,
                   std::map<std::string, double> params = {}, DiffBackend backend = {});

  const std::string& name() const { return name_; }
  const std::map<std::string, double>& params() const { return params_; }
  const ChartSpec& chart() const { return chart_; }
  const DiffBackend& backend() const { return backend_; }
  HermitianSurface with_backend(const DiffBackend& backend) const;

  Mat4 metric(const Vec4& x) const { return metric_(x); }
  Mat4 J(const Vec4& x) const { return J_(x); }
  /// Coordinate components F_ab = F(∂a, ∂b) = h(J∂a, ∂b).
  Mat4 fundamental_matrix(const Vec4& x) const;

  /// The same surface with metric e^{2f} h.
  HermitianSurface conformal(std::function<double(const Vec4&)> f, const std::string& label) const;

  /// Throws "point too close to boundary" unless `levels` nested stencils fit.
  void require_interior(const Vec4& x, int levels = 1) const;

  std::optional<InvariantViolation> check_at(const Vec4& x, double tol = 1e-10) const;
  /// Checks the invariants at `count` Latin-hypercube points; throws on failure.
  void validate(int count = 16, unsigned seed = 0x5eed) const;

  /// Spec text reproducing this surface, if it came from expressions.
  const std::optional<std::string>& spec_text() const { return spec_text_; }
  void set_spec_text(std::string text) { spec_text_ = std::move(text); }

 private:
  std::string name_;
  ChartSpec chart_;
  MatrixField metric_;
  MatrixField J_;
  std::map<std::string, double> params_;
  DiffBackend backend_;
  std::optional<std::string> spec_text_;
};

/// Latin-hypercube points strictly inside the chart, `margin` away from the walls.
std::vector<Vec4> latin_hypercube(const ChartSpec& chart, int count, unsigned seed, double margin);

/// Parses the line-oriented surface format:
///   coords x1 x2 x3 x4
///   domain x1 -1 1
///   g 1 1 = <expr>
///   J standard | J i j = <expr>
HermitianSurface parse_surface_spec(std::string_view text, const std::string& name = "custom");
HermitianSurface load_surface_file(const std::string& path);

enum class Builtin { FlatC2, CP2, CH2, Hopf };

std::optional<Builtin> builtin_from_name(std::string_view name);
std::string builtin_name(Builtin b);

/// Built-in surfaces; `c` is the holomorphic sectional curvature magnitude
/// for cp2_fs and ch2 and is ignored otherwise.
HermitianSurface builtin(Builtin which, double c = 2.0);
HermitianSurface builtin(std::string_view name, const std::map<std::string, double>& params = {});

/// e_1..e_4 as matrix columns (coordinate components).
struct UnitaryFrame {
  Vec4 point;
  Mat4 e;
  Eigen::Matrix<std::complex<double>, 4, 2> u;
  /// θ^i as rows: θ^i(∂a) = theta(i, a).
  Mat4 theta;
  /// η^a as rows over coordinates.
  Eigen::Matrix<std::complex<double>, 2, 4> eta;
};

struct FrameSeeds {
  Vec4 first = Vec4::UnitX();
  Vec4 second = Vec4(0, 0, 1, 0);
};

UnitaryFrame adapted_frame(const HermitianSurface& M, const Vec4& x, const FrameSeeds& seeds = {});

/// F = θ¹∧θ² + θ³∧θ⁴ over the frame's coframe (dim 4).
ComplexForm fundamental_form(const HermitianSurface& M, const Vec4& x, const UnitaryFrame& frame);

/// dF in coordinates, dF_abc = ∂aF_bc − ∂bF_ac + ∂cF_ab.
Alt3 dF_coords(const HermitianSurface& M, const Vec4& x);

/// Lee form α = JδF with δ = −∗d∗, as coordinate components α(∂a).
Vec4 lee_form(const HermitianSurface& M, const Vec4& x);

/// Components of a coordinate covector against the frame: β(e_i).
inline Vec4 to_frame(const Vec4& covector, const UnitaryFrame& f) { return f.e.transpose() * covector; }

}  // namespace twistorlab
