#pragma once

#include <cmath>
#include <numbers>

#include "npdt/model.hpp"
#include "npdt/operator.hpp"

namespace npdt {

struct StationaryState {
  Vector u_star;
  double lambda1 = 0.0;
  double amplitude = 0.0;
  double residual = 0.0;
};

/// ||M u + u o (r - b (c|u^p))||_inf
inline double stationarity_residual(const ModelSpec& spec, const Vector& u) {
  detail::require_same_size(static_cast<std::size_t>(u.size()), static_cast<std::size_t>(spec.n()),
                            "stationarity_residual");
  const double competition = inner_product(spec.c(), power(u, spec.p()), spec.measure());
  const Vector f = spec.M() * u + u.cwiseProduct(spec.r() - spec.b() * competition);
  return norm_inf(f);
}

/// Operator whose principal eigenpair yields the equilibrium:
/// -diag(1/b) M - diag(r/b).
inline Matrix stationary_operator(const ModelSpec& spec) {
  const Vector inv_b = spec.b().cwiseInverse();
  Matrix a = -(inv_b.asDiagonal() * spec.M());
  a.diagonal() -= spec.r().cwiseProduct(inv_b);
  return a;
}

/// The unique positive equilibrium u* = A v, with (lambda1, v) the principal
/// eigenpair of the stationary operator and A = (-lambda1 / (c|v^p))^{1/p}.
inline StationaryState solve_stationary(const ModelSpec& spec) {
  require_valid(spec);
  const auto pair = principal_eigenpair(stationary_operator(spec), spec.measure());
  if (!(pair.lambda1 < 0.0)) {
    throw Error(ErrorKind::no_equilibrium,
                "principal eigenvalue " + std::to_string(pair.lambda1) + " is not negative; no positive equilibrium");
  }
  const Vector& v = pair.eigvec;
  const double p = spec.p();
  const double denom = inner_product(spec.c(), power(v, p), spec.measure());

  StationaryState st;
  st.lambda1 = pair.lambda1;
  st.amplitude = std::pow(-pair.lambda1 / denom, 1.0 / p);
  st.u_star = st.amplitude * v;
  st.residual = stationarity_residual(spec, st.u_star);
  const double scale = norm_inf(spec.r()) * norm_inf(st.u_star);
  if (!(st.residual <= 1e-8 * scale)) {
    throw Error(ErrorKind::numeric, "stationary residual " + std::to_string(st.residual) +
                                        " exceeds 1e-8 * ||r|| * ||u*|| = " + std::to_string(1e-8 * scale));
  }
  return st;
}

// ---------------------------------------------------------------------------
// Closed-form nonexistence example (radial diffusion on a 4-d domain)
// ---------------------------------------------------------------------------

/// D * int_0^1 (2 pi^2 rho^3 + 4 pi rho^2) / (A + rho^2) d rho in closed form.
inline double characteristic_integral(double a, double d) {
  if (!(a > 0.0)) throw Error(ErrorKind::domain, "characteristic_integral needs A > 0");
  if (!(d > 0.0)) throw Error(ErrorKind::domain, "characteristic_integral needs D > 0");
  constexpr double pi = std::numbers::pi;
  const double sa = std::sqrt(a);
  return 2.0 * pi * d *
         (pi / 2.0 - (pi * a / 2.0) * std::log(a + 1.0) + (pi * a / 2.0) * std::log(a) + 2.0 -
          2.0 * sa * std::atan(1.0 / sa));
}

/// Integrand of characteristic_integral at rho (for quadrature checks).
inline double characteristic_integrand(double rho, double a, double d) {
  constexpr double pi = std::numbers::pi;
  return d * (2.0 * pi * pi * rho * rho * rho + 4.0 * pi * rho * rho) / (a + rho * rho);
}

struct NonexistenceReport {
  double D = 0.0;
  double omega_volume = 0.0;
  double total_mass = 0.0;
  double density_l1 = 0.0;
  double atomic_mass = 0.0;
  bool valid = false;
};

inline NonexistenceReport nonexistence_report(double d) {
  if (!(d > 0.0) || !std::isfinite(d)) throw Error(ErrorKind::domain, "nonexistence_report needs D > 0");
  constexpr double pi = std::numbers::pi;
  const double k = pi * pi + 4.0 * pi;
  NonexistenceReport rep;
  rep.D = d;
  rep.omega_volume = pi * pi / 2.0 + 4.0 * pi / 3.0;
  rep.total_mass = 2.0 - d * rep.omega_volume;
  rep.density_l1 = d * rep.total_mass * k;
  rep.atomic_mass = rep.total_mass * (1.0 - d * k);
  rep.valid = d < 1.0 / k && rep.total_mass > 0.0 && rep.atomic_mass > 0.0;
  return rep;
}

}  // namespace npdt
