#include "twistorlab/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace twistorlab {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string point_string(const Vec4& x) {
  return "(" + fmt(x(0)) + ", " + fmt(x(1)) + ", " + fmt(x(2)) + ", " + fmt(x(3)) + ")";
}

// Real 4x4 matrix of X, Y ↦ Re Σ H_ab̄ v_a w̄_b with v_a = X^{2a-1} + i X^{2a}.
Mat4 realify(const Eigen::Matrix2cd& H) {
  Mat4 g;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double A = H(a, b).real();
      const double B = H(a, b).imag();
      g(2 * a, 2 * b) = A;
      g(2 * a + 1, 2 * b + 1) = A;
      g(2 * a, 2 * b + 1) = B;
      g(2 * a + 1, 2 * b) = -B;
    }
  }
  return g;
}

// Constant holomorphic sectional curvature ±c on an affine chart / ball.
Mat4 constant_hsc_metric(const Vec4& x, double c, double sign) {
  const Complex z[2] = {{x(0), x(1)}, {x(2), x(3)}};
  const double r = x.squaredNorm();
  const double q = 1.0 + sign * r;
  Eigen::Matrix2cd H;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      H(a, b) = (a == b ? 1.0 / q : 0.0) - sign * std::conj(z[a]) * z[b] / (q * q);
  return (4.0 / c) * realify(H);
}

// The same metric as expression text in x1..x4, in the surface-file format.
std::string constant_hsc_spec(double c, double sign, const ChartSpec& chart) {
  const std::string r = "(x1^2 + x2^2 + x3^2 + x4^2)";
  const std::string q = "(1 " + std::string(sign > 0 ? "+" : "-") + " " + r + ")";
  const std::string k = "(" + fmt(4.0 / c) + ")";
  const std::string s = sign > 0 ? "-" : "+";
  auto A = [&](const std::string& re_zz, bool diag) {
    return k + " * (" + (diag ? "1 / " + q : "0") + " " + s + " " + re_zz + " / " + q + "^2)";
  };
  // Im(z̄1 z2) = x1 x4 − x2 x3 and Re(z̄1 z2) = x1 x3 + x2 x4.
  const std::string A11 = A("(x1^2 + x2^2)", true);
  const std::string A22 = A("(x3^2 + x4^2)", true);
  const std::string A12 = A("(x1*x3 + x2*x4)", false);
  const std::string B12 = k + " * (0 " + s + " (x1*x4 - x2*x3) / " + q + "^2)";
  std::ostringstream os;
  os << "# constant holomorphic sectional curvature " << (sign > 0 ? "" : "-") << fmt(c) << "\n";
  os << "coords x1 x2 x3 x4\n";
  for (int a = 0; a < 4; ++a)
    os << "domain " << chart.coords[a] << ' ' << fmt(chart.box[a].first) << ' ' << fmt(chart.box[a].second)
       << "\n";
  os << "g 1 1 = " << A11 << "\n";
  os << "g 2 2 = " << A11 << "\n";
  os << "g 3 3 = " << A22 << "\n";
  os << "g 4 4 = " << A22 << "\n";
  os << "g 1 3 = " << A12 << "\n";
  os << "g 2 4 = " << A12 << "\n";
  os << "g 1 4 = " << B12 << "\n";
  os << "g 2 3 = (-1) * " << B12 << "\n";
  os << "J standard\n";
  return os.str();
}

ChartSpec box_chart(std::array<std::pair<double, double>, 4> box) {
  ChartSpec c;
  c.box = box;
  return c;
}

}  // namespace

Mat4 standard_J() {
  Mat4 J = Mat4::Zero();
  J(1, 0) = 1.0;
  J(0, 1) = -1.0;
  J(3, 2) = 1.0;
  J(2, 3) = -1.0;
  return J;
}

bool ChartSpec::contains(const Vec4& x, double margin) const {
  for (int a = 0; a < 4; ++a) {
    if (!(x(a) - margin > box[a].first && x(a) + margin < box[a].second)) return false;
  }
  return true;
}

double Alt3::eval(const Vec4& x, const Vec4& y, const Vec4& z) const {
  double acc = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int d = 0; d < 4; ++d) acc += (*this)(a, b, d) * x(a) * y(b) * z(d);
  return acc;
}

double Alt3::norm() const {
  // Norm of the form Σ_{a<b<d}, i.e. each independent component once.
  double acc = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      for (int d = b + 1; d < 4; ++d) acc += (*this)(a, b, d) * (*this)(a, b, d);
  return std::sqrt(acc);
}

HermitianSurface::HermitianSurface(std::string name, ChartSpec chart, MatrixField metric, MatrixField J,
                                   std::map<std::string, double> params, DiffBackend backend)
    : name_(std::move(name)),
      chart_(std::move(chart)),
      metric_(std::move(metric)),
      J_(std::move(J)),
      params_(std::move(params)),
      backend_(backend) {
  backend_.validate();
  for (const auto& [lo, hi] : chart_.box) {
    if (!(hi > lo)) throw Error("chart domain has empty interior");
  }
}

HermitianSurface HermitianSurface::with_backend(const DiffBackend& backend) const {
  HermitianSurface s = *this;
  backend.validate();
  s.backend_ = backend;
  return s;
}

Mat4 HermitianSurface::fundamental_matrix(const Vec4& x) const { return J_(x).transpose() * metric_(x); }

HermitianSurface HermitianSurface::conformal(std::function<double(const Vec4&)> f, const std::string& label) const {
  auto g = metric_;
  HermitianSurface s(name_ + "*" + label, chart_, [g, f](const Vec4& x) -> Mat4 { return std::exp(2.0 * f(x)) * g(x); },
                     J_, params_, backend_);
  return s;
}

void HermitianSurface::require_interior(const Vec4& x, int levels) const {
  if (!chart_.contains(x, levels * backend_.reach())) throw Error("point too close to boundary");
}

std::optional<InvariantViolation> HermitianSurface::check_at(const Vec4& x, double tol) const {
  const Mat4 g = metric_(x);
  const Mat4 J = J_(x);
  if (!g.allFinite() || !J.allFinite()) return InvariantViolation{x, "metric or J not finite"};
  const double scale = std::max(1.0, g.norm());
  if ((g - g.transpose()).norm() > tol * scale) return InvariantViolation{x, "metric not symmetric"};
  Eigen::SelfAdjointEigenSolver<Mat4> es(g);
  if (es.eigenvalues().minCoeff() <= 1e-10) return InvariantViolation{x, "metric not positive definite"};
  if ((J * J + Mat4::Identity()).norm() > tol * std::max(1.0, J.squaredNorm()))
    return InvariantViolation{x, "J^2 != -Id"};
  if ((J.transpose() * g * J - g).norm() > tol * scale) return InvariantViolation{x, "metric not J-compatible"};
  return std::nullopt;
}

void HermitianSurface::validate(int count, unsigned seed) const {
  for (const Vec4& x : latin_hypercube(chart_, count, seed, 0.0)) {
    if (auto v = check_at(x)) {
      throw InvariantError("invariant violation at point " + point_string(v->point) + ": " + v->check);
    }
  }
}

std::vector<Vec4> latin_hypercube(const ChartSpec& chart, int count, unsigned seed, double margin) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec4> pts(count);
  for (int a = 0; a < 4; ++a) {
    std::vector<int> perm(count);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const double lo = chart.box[a].first + margin;
    const double hi = chart.box[a].second - margin;
    if (!(hi > lo)) throw Error("chart too small for the requested margin");
    for (int k = 0; k < count; ++k) {
      // Stay off the walls of each stratum so points are strictly interior.
      const double t = (perm[k] + 0.05 + 0.9 * unit(rng)) / count;
      pts[k](a) = lo + t * (hi - lo);
    }
  }
  return pts;
}

HermitianSurface parse_surface_spec(std::string_view text, const std::string& name) {
  ChartSpec chart;
  bool have_coords = false;
  std::array<bool, 4> have_domain{};
  std::array<std::array<std::optional<Expression>, 4>, 4> g_expr;
  std::array<std::array<std::optional<Expression>, 4>, 4> J_expr;
  bool J_standard = false;
  bool J_entries = false;

  struct Pending {
    char kind;
    int i, j;
    std::string rhs;
    int line;
    int col;
  };
  std::vector<Pending> pending;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream is(line);
    std::string key;
    if (!(is >> key)) {
      if (end == text.size()) break;
      continue;
    }
    auto col_of = [&](const std::string& token) {
      const auto p = line.find(token);
      return p == std::string::npos ? 1 : static_cast<int>(p) + 1;
    };
    if (key == "coords") {
      for (int a = 0; a < 4; ++a) {
        if (!(is >> chart.coords[a])) throw ParseError("expected four coordinate names", line_no, col_of(key));
      }
      std::string extra;
      if (is >> extra) throw ParseError("expected four coordinate names", line_no, col_of(extra));
      have_coords = true;
    } else if (key == "domain") {
      if (!have_coords) throw ParseError("'coords' must precede 'domain'", line_no, col_of(key));
      std::string cname, lo_s, hi_s;
      if (!(is >> cname >> lo_s >> hi_s)) throw ParseError("expected 'domain <coord> <lo> <hi>'", line_no, 1);
      int a = -1;
      for (int k = 0; k < 4; ++k)
        if (chart.coords[k] == cname) a = k;
      if (a < 0) throw ParseError("unknown coordinate '" + cname + "'", line_no, col_of(cname));
      try {
        std::size_t used_lo = 0, used_hi = 0;
        chart.box[a] = {std::stod(lo_s, &used_lo), std::stod(hi_s, &used_hi)};
        if (used_lo != lo_s.size() || used_hi != hi_s.size()) throw std::invalid_argument("trailing");
      } catch (const std::logic_error&) {
        throw ParseError("malformed domain bound", line_no, col_of(lo_s));
      }
      if (!(chart.box[a].second > chart.box[a].first))
        throw ParseError("domain interval is empty", line_no, col_of(lo_s));
      have_domain[a] = true;
    } else if (key == "g" || key == "J") {
      std::string first;
      if (!(is >> first)) throw ParseError("incomplete '" + key + "' line", line_no, col_of(key));
      if (key == "J" && first == "standard") {
        J_standard = true;
        continue;
      }
      std::string second, eq;
      if (!(is >> second >> eq) || eq != "=")
        throw ParseError("expected '" + key + " i j = <expr>'", line_no, col_of(key));
      int i = 0, j = 0;
      try {
        i = std::stoi(first);
        j = std::stoi(second);
      } catch (const std::logic_error&) {
        throw ParseError("matrix index must be an integer", line_no, col_of(first));
      }
      if (i < 1 || i > 4 || j < 1 || j > 4) throw ParseError("matrix index out of range 1..4", line_no, col_of(first));
      const std::size_t eq_pos = line.find('=');
      pending.push_back({key[0], i - 1, j - 1, line.substr(eq_pos + 1), line_no, static_cast<int>(eq_pos) + 1});
      if (key == "J") J_entries = true;
    } else {
      throw ParseError("unknown directive '" + key + "'", line_no, col_of(key));
    }
    if (end == text.size()) break;
  }
  if (!have_coords) throw ParseError("missing 'coords' line", line_no, 1);
  for (int a = 0; a < 4; ++a) {
    if (!have_domain[a]) throw ParseError("missing domain for '" + chart.coords[a] + "'", line_no, 1);
  }
  if (J_standard && J_entries) throw ParseError("'J standard' conflicts with explicit J entries", line_no, 1);
  if (!J_standard && !J_entries) throw ParseError("missing complex structure 'J'", line_no, 1);

  const std::vector<std::string> names(chart.coords.begin(), chart.coords.end());
  for (const Pending& p : pending) {
    auto& slot = (p.kind == 'g' ? g_expr : J_expr)[p.i][p.j];
    if (slot) throw ParseError("duplicate entry", p.line, 1);
    slot = Expression::parse(p.rhs, names, p.line, p.col);
  }

  auto metric = [g_expr](const Vec4& x) {
    const double xs[4] = {x(0), x(1), x(2), x(3)};
    Mat4 g;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        if (g_expr[i][j]) {
          g(i, j) = g_expr[i][j]->evaluate(xs);
        } else if (g_expr[j][i]) {
          g(i, j) = g_expr[j][i]->evaluate(xs);
        } else {
          g(i, j) = i == j ? 1.0 : 0.0;
        }
      }
    }
    return g;
  };
  HermitianSurface::MatrixField J;
  if (J_standard) {
    J = [](const Vec4&) { return standard_J(); };
  } else {
    J = [J_expr](const Vec4& x) {
      const double xs[4] = {x(0), x(1), x(2), x(3)};
      Mat4 m = Mat4::Zero();
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          if (J_expr[i][j]) m(i, j) = J_expr[i][j]->evaluate(xs);
      return m;
    };
  }
  HermitianSurface s(name, chart, metric, J);
  s.validate();
  s.set_spec_text(std::string(text));
  return s;
}

HermitianSurface load_surface_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open surface file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_surface_spec(ss.str(), path);
}

std::optional<Builtin> builtin_from_name(std::string_view name) {
  if (name == "flat_c2") return Builtin::FlatC2;
  if (name == "cp2_fs") return Builtin::CP2;
  if (name == "ch2") return Builtin::CH2;
  if (name == "hopf") return Builtin::Hopf;
  return std::nullopt;
}

std::string builtin_name(Builtin b) {
  switch (b) {
    case Builtin::FlatC2: return "flat_c2";
    case Builtin::CP2: return "cp2_fs";
    case Builtin::CH2: return "ch2";
    case Builtin::Hopf: return "hopf";
  }
  return "?";
}

HermitianSurface builtin(Builtin which, double c) {
  auto J0 = [](const Vec4&) { return standard_J(); };
  switch (which) {
    case Builtin::FlatC2: {
      const ChartSpec chart = box_chart({{{-1, 1}, {-1, 1}, {-1, 1}, {-1, 1}}});
      HermitianSurface s("flat_c2", chart, [](const Vec4&) -> Mat4 { return Mat4::Identity(); }, J0);
      s.set_spec_text(
          "coords x1 x2 x3 x4\ndomain x1 -1 1\ndomain x2 -1 1\ndomain x3 -1 1\ndomain x4 -1 1\nJ standard\n");
      return s;
    }
    case Builtin::CP2:
    case Builtin::CH2: {
      if (!(c > 0.0)) throw Error("holomorphic sectional curvature magnitude c must be positive");
      const bool cp2 = which == Builtin::CP2;
      const double sign = cp2 ? 1.0 : -1.0;
      const ChartSpec chart = cp2 ? box_chart({{{-1, 1}, {-1, 1}, {-1, 1}, {-1, 1}}})
                                  : box_chart({{{-0.45, 0.45}, {-0.45, 0.45}, {-0.45, 0.45}, {-0.45, 0.45}}});
      HermitianSurface s(cp2 ? "cp2_fs" : "ch2", chart,
                         [c, sign](const Vec4& x) { return constant_hsc_metric(x, c, sign); }, J0, {{"c", c}});
      s.set_spec_text(constant_hsc_spec(c, sign, chart));
      return s;
    }
    case Builtin::Hopf: {
      const ChartSpec chart = box_chart({{{0.6, 1.6}, {-0.6, 0.6}, {-0.6, 0.6}, {-0.6, 0.6}}});
      HermitianSurface s("hopf", chart, [](const Vec4& x) -> Mat4 { return Mat4::Identity() / x.squaredNorm(); }, J0);
      s.set_spec_text(
          "coords x1 x2 x3 x4\ndomain x1 0.6 1.6\ndomain x2 -0.6 0.6\ndomain x3 -0.6 0.6\ndomain x4 -0.6 0.6\n"
          "g 1 1 = 1 / (x1^2 + x2^2 + x3^2 + x4^2)\ng 2 2 = 1 / (x1^2 + x2^2 + x3^2 + x4^2)\n"
          "g 3 3 = 1 / (x1^2 + x2^2 + x3^2 + x4^2)\ng 4 4 = 1 / (x1^2 + x2^2 + x3^2 + x4^2)\nJ standard\n");
      return s;
    }
  }
  throw Error("unknown builtin surface");
}

HermitianSurface builtin(std::string_view name, const std::map<std::string, double>& params) {
  const auto which = builtin_from_name(name);
  if (!which) throw Error("unknown builtin surface '" + std::string(name) + "'");
  double c = 2.0;
  for (const auto& [k, v] : params) {
    if (k == "c" && (*which == Builtin::CP2 || *which == Builtin::CH2)) {
      c = v;
    } else {
      throw Error("unknown parameter '" + k + "' for surface " + std::string(name));
    }
  }
  return builtin(*which, c);
}

UnitaryFrame adapted_frame(const HermitianSurface& M, const Vec4& x, const FrameSeeds& seeds) {
  const Mat4 g = M.metric(x);
  const Mat4 J = M.J(x);
  auto ip = [&](const Vec4& a, const Vec4& b) { return a.dot(g * b); };
  UnitaryFrame f;
  f.point = x;
  const double n1 = std::sqrt(ip(seeds.first, seeds.first));
  if (n1 < 1e-8) throw Error("seed degenerate at point " + point_string(x));
  const Vec4 e1 = seeds.first / n1;
  const Vec4 e2 = J * e1;
  Vec4 w = seeds.second - ip(seeds.second, e1) * e1;
  w -= ip(w, e2) * e2;
  const double n3 = std::sqrt(std::max(0.0, ip(w, w)));
  if (n3 < 1e-8) throw Error("seed degenerate at point " + point_string(x));
  const Vec4 e3 = w / n3;
  f.e.col(0) = e1;
  f.e.col(1) = e2;
  f.e.col(2) = e3;
  f.e.col(3) = J * e3;
  f.theta = f.e.inverse();
  const double r = 1.0 / std::sqrt(2.0);
  const Complex I(0.0, 1.0);
  for (int a = 0; a < 2; ++a) {
    f.u.col(a) = r * (f.e.col(2 * a).cast<Complex>() - I * f.e.col(2 * a + 1).cast<Complex>());
    f.eta.row(a) = r * (f.theta.row(2 * a).cast<Complex>() + I * f.theta.row(2 * a + 1).cast<Complex>());
  }
  return f;
}

ComplexForm fundamental_form(const HermitianSurface& M, const Vec4& x, const UnitaryFrame& frame) {
  const Mat4 Fc = M.fundamental_matrix(x);
  const Mat4 Ff = frame.e.transpose() * Fc * frame.e;
  return ComplexForm::two_form(Ff.cast<Complex>());
}

Alt3 dF_coords(const HermitianSurface& M, const Vec4& x) {
  M.require_interior(x);
  std::array<Mat4, 4> dF;
  for (int a = 0; a < 4; ++a) dF[a] = partial([&](const Vec4& y) { return M.fundamental_matrix(y); }, x, a, M.backend());
  Alt3 out;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) out(a, b, c) = dF[a](b, c) - dF[b](a, c) + dF[c](a, b);
  return out;
}

Vec4 lee_form(const HermitianSurface& M, const Vec4& x) {
  const UnitaryFrame f = adapted_frame(M, x);
  const Alt3 dF = dF_coords(M, x);
  std::vector<ComplexForm::Term> terms;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      for (int k = j + 1; k < 4; ++k)
        terms.push_back({(1u << i) | (1u << j) | (1u << k), dF.eval(f.e.col(i), f.e.col(j), f.e.col(k))});
  const ComplexForm star = hodge_star_4(ComplexForm::from_terms(4, 3, terms));
  Vec4 deltaF;  // δF(e_i) = −(∗dF)(e_i), using ∗F = F
  for (int i = 0; i < 4; ++i) deltaF(i) = -star.coeff({i}).real();
  // α(e_i) = −δF(J e_i) with J e1 = e2, J e2 = −e1, J e3 = e4, J e4 = −e3.
  const Vec4 alpha_frame(-deltaF(1), deltaF(0), -deltaF(3), deltaF(2));
  return f.theta.transpose() * alpha_frame;
}

}  // namespace twistorlab
