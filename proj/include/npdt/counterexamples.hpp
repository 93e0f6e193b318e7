#pragma once

#include <numbers>
#include <string>

#include "npdt/model.hpp"

namespace npdt {

enum class Counterexample { instability_one, instability_two, angle_sine };

/// Three-state circulant model whose constant equilibrium is unstable.
inline ModelSpec instability_one() {
  Matrix m(3, 3);
  m << -1, 1, 0,  //
      0, -1, 1,   //
      1, 0, -1;
  Vector b(3);
  b << 10.0, 0.001, 0.001;
  b *= 1.0002;
  Vector c(3);
  c << 0.0001, 1.0, 0.0001;
  c /= 1.0002;
  const Vector r = b;
  return ModelSpec(FellerMatrix(m), r, b, c, 1.0, "instability_one");
}

/// Equilibrium of instability_two, 1000 * (1, 100, 10000).
inline Vector instability_two_equilibrium() {
  Vector u(3);
  u << 1.0, 100.0, 10000.0;
  return 1000.0 * u;
}

/// Tridiagonal model with a non-normal reduced generator; r is rebuilt from
/// the prescribed equilibrium as r = -(M u*)/u* + b (c|u*).
inline ModelSpec instability_two() {
  Matrix m(3, 3);
  m << -1, 1, 0,  //
      1, -2, 1,   //
      0, 1, -1;
  m *= 0.01;
  Vector b(3);
  b << 0.001, 0.001, 10.0;
  Vector c(3);
  c << 1.0, 1e-6, 1e-8;
  const Vector u = instability_two_equilibrium();
  const double competition = c.dot(u);
  const Vector r = -(m * u).cwiseQuotient(u) + b * competition;
  return ModelSpec(FellerMatrix(m), r, b, c, 1.0, "instability_two");
}

/// Grid model on (0, 2 pi) with b and c supported on opposite half periods
/// (up to eps), uniform kernel 1/(2 pi), r = b.
inline ModelSpec angle_sine(double eps, Eigen::Index n = 256) {
  if (!(eps > 0.0)) throw Error(ErrorKind::domain, "angle_sine needs eps > 0");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const GridSpec grid{0.0, two_pi, n};
  KernelSpec kernel;
  kernel.kind = KernelKind::uniform;
  kernel.params["height"] = 1.0 / two_pi;
  const Vector x = grid.nodes();
  Vector b(n), c(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    b[i] = eps + std::max(std::sin(x[i]), 0.0);
    c[i] = eps + std::max(std::sin(std::numbers::pi + x[i]), 0.0);
  }
  return ModelSpec(build_nonlocal_diffusion(grid, kernel), b, b, c, 1.0, "angle_sine", Origin::grid);
}

inline ModelSpec build_counterexample(Counterexample id, double eps = 1e-3) {
  switch (id) {
    case Counterexample::instability_one: return instability_one();
    case Counterexample::instability_two: return instability_two();
    case Counterexample::angle_sine: return angle_sine(eps);
  }
  throw Error(ErrorKind::input, "unknown counterexample");
}

}  // namespace npdt
