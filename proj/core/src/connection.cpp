#include "twistorlab/connection.hpp"

#include <cmath>

namespace twistorlab {

namespace {

using Packed = Eigen::Matrix<double, 4, 16>;

Packed pack(const ConnectionCoords& w) {
  Packed p;
  for (int c = 0; c < 4; ++c) p.middleCols<4>(4 * c) = w[c];
  return p;
}

ConnectionCoords unpack(const Packed& p) {
  ConnectionCoords w;
  for (int c = 0; c < 4; ++c) w[c] = p.middleCols<4>(4 * c);
  return w;
}

const Complex kI(0.0, 1.0);

}  // namespace

Mat4 along(const ConnectionCoords& w, const Vec4& X) {
  Mat4 m = Mat4::Zero();
  for (int c = 0; c < 4; ++c) m += X(c) * w[c];
  return m;
}

Complex Curvature4::eval(const Eigen::Vector4cd& a, const Eigen::Vector4cd& b, const Eigen::Vector4cd& c,
                         const Eigen::Vector4cd& d) const {
  Complex acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (a(i) == 0.0) continue;
    for (int j = 0; j < 4; ++j) {
      if (b(j) == 0.0) continue;
      const Complex ab = a(i) * b(j);
      for (int k = 0; k < 4; ++k) {
        if (c(k) == 0.0) continue;
        for (int l = 0; l < 4; ++l) acc += ab * c(k) * d(l) * (*this)(i, j, k, l);
      }
    }
  }
  return acc;
}

double Curvature4::max_abs() const {
  double m = 0.0;
  for (double v : r) m = std::max(m, std::abs(v));
  return m;
}

Mat4 Curvature4::ricci() const {
  Mat4 ric = Mat4::Zero();
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i) ric(j, k) += (*this)(i, j, i, k);
  return ric;
}

double max_abs_diff(const Curvature4& a, const Curvature4& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.r.size(); ++n) m = std::max(m, std::abs(a.r[n] - b.r[n]));
  return m;
}

Eigen::Vector4cd slot_vector(Slot s) {
  if (s.index != 1 && s.index != 2) throw Error("malformed index pattern");
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  const double r = 1.0 / std::sqrt(2.0);
  v(2 * s.index - 2) = r;
  v(2 * s.index - 1) = s.bar ? r * kI : -r * kI;
  return v;
}

std::array<Slot, 4> parse_pattern(std::string_view pattern) {
  std::array<Slot, 4> out{};
  int n = 0;
  for (std::size_t k = 0; k < pattern.size(); ++k) {
    const char c = pattern[k];
    if (c == ' ') continue;
    if ((c != '1' && c != '2') || n == 4) throw Error("malformed index pattern '" + std::string(pattern) + "'");
    out[n] = {c - '0', false};
    if (k + 1 < pattern.size() && pattern[k + 1] == '*') {
      out[n].bar = true;
      ++k;
    }
    ++n;
  }
  if (n != 4) throw Error("malformed index pattern '" + std::string(pattern) + "'");
  return out;
}

Complex complexify(const Curvature4& R, const std::array<Slot, 4>& p) {
  return R.eval(slot_vector(p[0]), slot_vector(p[1]), slot_vector(p[2]), slot_vector(p[3]));
}

Complex complexify(const Curvature4& R, std::string_view pattern) { return complexify(R, parse_pattern(pattern)); }

std::array<Mat4, 4> christoffel(const HermitianSurface& M, const Vec4& x) {
  M.require_interior(x);
  std::array<Mat4, 4> dg;
  for (int c = 0; c < 4; ++c) dg[c] = partial([&](const Vec4& y) { return M.metric(y); }, x, c, M.backend());
  const Mat4 ginv = M.metric(x).inverse();
  std::array<Mat4, 4> gamma;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      for (int c = 0; c < 4; ++c) {
        double acc = 0.0;
        for (int d = 0; d < 4; ++d) acc += ginv(a, d) * (dg[b](d, c) + dg[c](d, b) - dg[d](b, c));
        gamma[a](b, c) = 0.5 * acc;
      }
    }
  }
  return gamma;
}

std::function<UnitaryFrame(const Vec4&)> frame_field(const HermitianSurface& M, const FrameSeeds& seeds) {
  return [&M, seeds](const Vec4& y) { return adapted_frame(M, y, seeds); };
}

ConnectionCoords levi_civita_forms(const HermitianSurface& M, const Vec4& x, const FrameSeeds& seeds) {
  const auto gamma = christoffel(M, x);
  const UnitaryFrame f = adapted_frame(M, x, seeds);
  ConnectionCoords w;
  for (int c = 0; c < 4; ++c) {
    const Mat4 de = partial([&](const Vec4& y) { return adapted_frame(M, y, seeds).e; }, x, c, M.backend());
    Mat4 gc;  // gc(b, d) = Γ^b_cd
    for (int b = 0; b < 4; ++b) gc.row(b) = gamma[b].row(c);
    w[c] = f.theta * (de + gc * f.e);
  }
  return w;
}

LeviCivitaData levi_civita(const HermitianSurface& M, const Vec4& x, const FrameSeeds& seeds) {
  M.require_interior(x, 2);
  LeviCivitaData lc;
  lc.point = x;
  lc.frame = adapted_frame(M, x, seeds);
  lc.gamma = christoffel(M, x);
  lc.omega = levi_civita_forms(M, x, seeds);

  using Packed16 = Eigen::Matrix<double, 4, 16>;
  auto gamma_packed = [&](const Vec4& y) {
    const auto g = christoffel(M, y);
    Packed16 p;
    for (int a = 0; a < 4; ++a) p.middleCols<4>(4 * a) = g[a];
    return p;
  };
  std::array<std::array<Mat4, 4>, 4> dgamma;  // dgamma[c][a](b, d) = ∂c Γ^a_bd
  for (int c = 0; c < 4; ++c) {
    const Packed16 p = partial(gamma_packed, x, c, M.backend());
    for (int a = 0; a < 4; ++a) dgamma[c][a] = p.middleCols<4>(4 * a);
  }
  const auto& G = lc.gamma;
  // Rc(a, b, c, d) = R^a_bcd, so that R(∂c, ∂d)∂b = R^a_bcd ∂a.
  std::array<double, 256> Rc{};
  auto at = [](int a, int b, int c, int d) { return 64 * a + 16 * b + 4 * c + d; };
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          double v = dgamma[c][a](d, b) - dgamma[d][a](c, b);
          for (int e = 0; e < 4; ++e) v += G[a](c, e) * G[e](d, b) - G[a](d, e) * G[e](c, b);
          Rc[at(a, b, c, d)] = v;
        }
  const Mat4 g = M.metric(x);
  std::array<double, 256> low{};
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 64; ++n) {
      double v = 0.0;
      for (int a = 0; a < 4; ++a) v += g(m, a) * Rc[64 * a + n];
      low[64 * m + n] = v;
    }
  // Transform each slot to the frame in turn.
  const Mat4& E = lc.frame.e;
  std::array<double, 256> tmp = low;
  for (int slot = 0; slot < 4; ++slot) {
    std::array<double, 256> next{};
    const int stride = 1 << (2 * (3 - slot));
    for (int n = 0; n < 256; ++n) {
      const int idx = (n / stride) % 4;
      const int base = n - idx * stride;
      double v = 0.0;
      for (int a = 0; a < 4; ++a) v += E(a, idx) * tmp[base + a * stride];
      next[n] = v;
    }
    tmp = next;
  }
  lc.R.r = tmp;
  return lc;
}

double GauduchonTerm::operator()(const Vec4& X, const Vec4& Y, const Vec4& Z) const {
  const Vec4 JX = J * X;
  const double a = dF.eval(JX, J * Y, J * Z);
  const double b = dF.eval(JX, Y, Z);
  return 0.25 * (a - b) - 0.25 * t * (a + b);
}

ConnectionCoords gauduchon_forms(const HermitianSurface& M, const Vec4& x, double t, const FrameSeeds& seeds) {
  ConnectionCoords w = levi_civita_forms(M, x, seeds);
  const UnitaryFrame f = adapted_frame(M, x, seeds);
  const GauduchonTerm A{dF_coords(M, x), M.J(x), t};
  for (int c = 0; c < 4; ++c) {
    const Vec4 dc = Vec4::Unit(c);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) w[c](i, j) += A(dc, f.e.col(j), f.e.col(i));
  }
  return w;
}

Curvature4 curvature_from_forms(const std::function<ConnectionCoords(const Vec4&)>& forms, const Vec4& x,
                                const UnitaryFrame& frame, const DiffBackend& backend) {
  const ConnectionCoords w = forms(x);
  std::array<ConnectionCoords, 4> dw;
  for (int c = 0; c < 4; ++c)
    dw[c] = unpack(partial([&](const Vec4& y) { return pack(forms(y)); }, x, c, backend));
  Curvature4 K;
  std::array<std::array<Mat4, 4>, 4> omega2;  // Ω(∂c, ∂d)
  for (int c = 0; c < 4; ++c)
    for (int d = 0; d < 4; ++d) omega2[c][d] = dw[c][d] - dw[d][c] + w[c] * w[d] - w[d] * w[c];
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l) {
      Mat4 m = Mat4::Zero();
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) m += frame.e(c, k) * frame.e(d, l) * omega2[c][d];
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) K(i, j, k, l) = m(i, j);
    }
  return K;
}

Eigen::Matrix2cd unitary_part(const Mat4& w) {
  Eigen::Matrix2cd p;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      p(a, b) = 0.5 * (w(2 * a, 2 * b) + w(2 * a + 1, 2 * b + 1) + kI * (w(2 * a + 1, 2 * b) - w(2 * a, 2 * b + 1)));
  return p;
}

Mat4 u2_projection(const Mat4& w) {
  const Mat4 J0 = standard_J();
  return 0.5 * (w - J0 * w * J0);
}

Complex HermitianConnectionData::torsion_component(int a, Slot s, Slot r) const {
  const Eigen::Vector4cd vs = slot_vector(s);
  const Eigen::Vector4cd vr = slot_vector(r);
  Eigen::Vector4cd T;
  for (int i = 0; i < 4; ++i) T(i) = vs.transpose() * torsion[i].cast<Complex>() * vr;
  return (T(2 * a - 2) + kI * T(2 * a - 1)) / std::sqrt(2.0);
}

Eigen::Matrix2cd HermitianConnectionData::psi_on(const Vec4& X) const {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  for (int c = 0; c < 4; ++c) m += X(c) * psi[c];
  return m;
}

HermitianConnectionData gauduchon(const HermitianSurface& M, const Vec4& x, double t, bool with_curvature,
                                  const FrameSeeds& seeds) {
  M.require_interior(x, with_curvature ? 2 : 1);
  HermitianConnectionData h;
  h.t = t;
  h.point = x;
  h.frame = adapted_frame(M, x, seeds);
  h.omega = gauduchon_forms(M, x, t, seeds);
  for (int c = 0; c < 4; ++c) h.psi[c] = unitary_part(h.omega[c]);
  const GauduchonTerm A{dF_coords(M, x), M.J(x), t};
  const Mat4& E = h.frame.e;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k)
      for (int l = 0; l < 4; ++l)
        h.torsion[i](k, l) = A(E.col(k), E.col(l), E.col(i)) - A(E.col(l), E.col(k), E.col(i));
  if (with_curvature) {
    h.K = curvature_from_forms([&](const Vec4& y) { return gauduchon_forms(M, y, t, seeds); }, x, h.frame,
                               M.backend());
  }
  return h;
}

TorsionAuxiliary torsion_auxiliary(const HermitianSurface& M, const Vec4& x, const LeviCivitaData& lc) {
  M.require_interior(x, 3);
  TorsionAuxiliary aux;
  const Mat4& E = lc.frame.e;
  const Mat4 g = M.metric(x);
  const Vec4 alpha = lee_form(M, x);
  const auto& G = lc.gamma;

  Mat4 dalpha;  // dalpha(a, b) = ∂a α_b
  for (int a = 0; a < 4; ++a)
    dalpha.row(a) = partial([&](const Vec4& y) { return lee_form(M, y); }, x, a, M.backend()).transpose();
  Mat4 L;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double v = dalpha(a, b);
      for (int c = 0; c < 4; ++c) v -= G[c](a, b) * alpha(c);
      L(a, b) = v + 0.5 * alpha(a) * alpha(b);
    }
  aux.L = E.transpose() * L * E;

  auto beta_field = [&](const Vec4& y) -> Vec4 { return M.J(y).transpose() * lee_form(M, y); };
  Mat4 dbeta;
  for (int a = 0; a < 4; ++a) dbeta.row(a) = partial(beta_field, x, a, M.backend()).transpose();
  aux.d_alpha_J = E.transpose() * (dbeta - dbeta.transpose()) * E;
  aux.alpha_sq = alpha.dot(g.inverse() * alpha);
  aux.F = E.transpose() * M.fundamental_matrix(x) * E;

  using V64 = Eigen::Matrix<double, 64, 1>;
  auto sigma_field = [&](const Vec4& y) {
    const Vec4 beta = beta_field(y);
    const Mat4 F = M.fundamental_matrix(y);
    V64 s;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c) s(16 * a + 4 * b + c) = beta(a) * F(b, c) - beta(b) * F(a, c) + beta(c) * F(a, b);
    return s;
  };
  const V64 sigma = sigma_field(x);
  std::array<V64, 4> nabla;
  for (int m = 0; m < 4; ++m) {
    V64 d = partial(sigma_field, x, m, M.backend());
    V64 out;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c) {
          double v = d(16 * a + 4 * b + c);
          for (int e = 0; e < 4; ++e) {
            v -= G[e](m, a) * sigma(16 * e + 4 * b + c);
            v -= G[e](m, b) * sigma(16 * a + 4 * e + c);
            v -= G[e](m, c) * sigma(16 * a + 4 * b + e);
          }
          out(16 * a + 4 * b + c) = v;
        }
    nabla[m] = out;
  }
  auto to_frame3 = [&](const V64& s) {
    std::array<double, 64> f{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
          double v = 0.0;
          for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
              for (int c = 0; c < 4; ++c) v += s(16 * a + 4 * b + c) * E(a, i) * E(b, j) * E(c, k);
          f[16 * i + 4 * j + k] = v;
        }
    return f;
  };
  aux.sigma = to_frame3(sigma);
  for (int m = 0; m < 4; ++m) {
    V64 along_em = V64::Zero();
    for (int c = 0; c < 4; ++c) along_em += E(c, m) * nabla[c];
    const auto f = to_frame3(along_em);
    std::copy(f.begin(), f.end(), aux.nabla_sigma.begin() + 64 * m);
  }
  return aux;
}

Curvature4 chern_curvature_relation(const LeviCivitaData& lc, const TorsionAuxiliary& aux) {
  Curvature4 K;
  auto d = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  const Mat4& L = aux.L;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          K(i, j, k, l) = lc.R(i, j, k, l) + 0.5 * aux.d_alpha_J(k, l) * aux.F(i, j) +
                          0.5 * (L(l, j) * d(k, i) + L(k, i) * d(l, j)) -
                          0.5 * (L(k, j) * d(l, i) + L(l, i) * d(k, j)) +
                          0.25 * aux.alpha_sq * (d(k, j) * d(l, i) - d(l, j) * d(k, i));
        }
  return K;
}

Curvature4 bismut_curvature_relation(const LeviCivitaData& lc, const TorsionAuxiliary& aux) {
  Curvature4 K;
  auto s = [&](int a, int b, int c) { return aux.sigma[16 * a + 4 * b + c]; };
  auto ns = [&](int m, int a, int b, int c) { return aux.nabla_sigma[64 * m + 16 * a + 4 * b + c]; };
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          double v = lc.R(i, j, k, l) + 0.5 * ns(k, l, j, i) - 0.5 * ns(l, k, j, i);
          for (int m = 0; m < 4; ++m) v += 0.25 * (s(l, i, m) * s(k, j, m) - s(k, i, m) * s(l, j, m));
          K(i, j, k, l) = v;
        }
  return K;
}

}  // namespace twistorlab
