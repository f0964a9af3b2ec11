#pragma once

#include <array>
#include <span>
#include <type_traits>

#include <Eigen/Dense>

#include "twistorlab/error.hpp"

namespace twistorlab {

/// Central finite-difference scheme: order 2 or 4, uniform step per coordinate.
struct DiffBackend {
  int order = 4;
  double step = 1e-3;

  void validate() const {
    if (order != 2 && order != 4) throw Error("finite-difference order must be 2 or 4");
    if (!(step > 0.0)) throw Error("finite-difference step must be positive");
  }
  /// Largest offset the stencil reaches, in units of coordinates.
  double reach() const { return (order == 4 ? 2.0 : 1.0) * step; }
};

/// Central-difference weights: f'(x) ≈ Σ_k w_k f(x + o_k h) / h.
struct Stencil {
  int size;
  std::array<double, 4> offsets;
  std::array<double, 4> weights;
};

inline Stencil stencil_for(const DiffBackend& b) {
  if (b.order == 2) return {2, {-1.0, 1.0, 0.0, 0.0}, {-0.5, 0.5, 0.0, 0.0}};
  return {4, {-2.0, -1.0, 1.0, 2.0}, {1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0}};
}

/// ∂f/∂x^a; f may return a scalar or any Eigen dense type.
template <typename F, typename V>
auto partial(const F& f, const V& x, int a, const DiffBackend& b) {
  const Stencil s = stencil_for(b);
  V y = x;
  y(a) = x(a) + s.offsets[0] * b.step;
  using Result = std::decay_t<decltype(f(y))>;
  Result acc = s.weights[0] * f(y);
  for (int k = 1; k < s.size; ++k) {
    y(a) = x(a) + s.offsets[k] * b.step;
    acc += s.weights[k] * f(y);
  }
  acc = acc / b.step;
  return acc;
}

}  // namespace twistorlab
