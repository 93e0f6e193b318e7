#pragma once

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "npdt/model.hpp"
#include "npdt/reduction.hpp"
#include "npdt/stability.hpp"
#include "npdt/stationary.hpp"

namespace npdt {

struct IntegratorStats {
  std::size_t steps = 0;
  std::size_t rejections = 0;  // estimated from the evaluation count (6 per attempt, FSAL)
  std::size_t rhs_evaluations = 0;
  double min_component = std::numeric_limits<double>::infinity();
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  ModelSpec model;
  IntegratorStats stats;

  [[nodiscard]] std::size_t size() const { return times.size(); }
};

using RhsFunction = std::function<void(const Vector& x, Vector& dx, double t)>;

struct IntegrationResult {
  std::vector<Vector> states;
  IntegratorStats stats;
};

inline std::vector<double> uniform_samples(double t_end, std::size_t count) {
  if (count < 2) count = 2;
  std::vector<double> t(count);
  for (std::size_t k = 0; k < count; ++k) t[k] = t_end * static_cast<double>(k) / static_cast<double>(count - 1);
  t.back() = t_end;
  return t;
}

/// Dormand-Prince 5(4) with dense output, sampled at the given increasing
/// times (the first one is the initial time). Positivity is monitored but
/// never enforced.
inline IntegrationResult integrate_system(const RhsFunction& rhs, const Vector& u0,
                                          const std::vector<double>& sample_times, double rtol, double atol,
                                          bool check_positivity = true) {
  namespace ode = boost::numeric::odeint;
  using state = std::vector<double>;
  if (sample_times.size() < 2) throw Error(ErrorKind::domain, "integrate: need at least two sample times");
  for (std::size_t k = 1; k < sample_times.size(); ++k)
    if (!(sample_times[k] > sample_times[k - 1])) throw Error(ErrorKind::domain, "sample times must increase");
  if (!(rtol > 1e-13 && rtol < 1e-3) || !(atol > 1e-13 && atol < 1e-3))
    throw Error(ErrorKind::domain, "rtol and atol must lie in (1e-13, 1e-3)");
  if (!u0.allFinite()) throw Error(ErrorKind::domain, "initial state is not finite");

  const auto n = static_cast<std::size_t>(u0.size());
  IntegrationResult out;
  std::size_t evals = 0;
  Vector xv(u0.size()), dxv(u0.size());
  auto system = [&](const state& x, state& dx, double t) {
    ++evals;
    xv = Eigen::Map<const Vector>(x.data(), static_cast<Eigen::Index>(n));
    rhs(xv, dxv, t);
    dx.assign(dxv.data(), dxv.data() + n);
  };

  auto check_state = [&](const Vector& u, double t) {
    const double big = norm_inf(u);
    if (!std::isfinite(big) || big > 1e12) {
      throw Error(ErrorKind::numeric, "blow-up: state norm " + std::to_string(big) + " at t = " + std::to_string(t));
    }
    const double low = u.size() ? u.minCoeff() : 0.0;
    out.stats.min_component = std::min(out.stats.min_component, low);
    if (check_positivity && low < -1e-9 * big) {
      throw Error(ErrorKind::numeric, "positivity violated: min component " + std::to_string(low) +
                                          " at t = " + std::to_string(t) + " (step-size failure)");
    }
  };

  const double t0 = sample_times.front();
  const double t_end = sample_times.back();
  state x(u0.data(), u0.data() + n);
  auto stepper = ode::make_dense_output(atol, rtol, ode::runge_kutta_dopri5<state>());
  const double dt0 = std::min(1e-3, 1e-3 * (t_end - t0));

  try {
    stepper.initialize(x, t0, dt0);
    out.states.push_back(u0);
    check_state(u0, t0);
    state buf(n);
    std::size_t next = 1;
    while (next < sample_times.size()) {
      if (stepper.current_time() >= sample_times[next]) {
        stepper.calc_state(sample_times[next], buf);
        Vector u = Eigen::Map<const Vector>(buf.data(), static_cast<Eigen::Index>(n));
        check_state(u, sample_times[next]);
        out.states.push_back(std::move(u));
        ++next;
        continue;
      }
      const auto [ta, tb] = stepper.do_step(system);
      ++out.stats.steps;
      if (tb - ta < 1e-14 * std::max(1.0, std::abs(tb))) {
        throw Error(ErrorKind::numeric, "step size underflow at t = " + std::to_string(tb) + " (stiffness)");
      }
      if (out.stats.steps > 50'000'000) throw Error(ErrorKind::numeric, "step budget exhausted");
      const state& cur = stepper.current_state();
      check_state(Eigen::Map<const Vector>(cur.data(), static_cast<Eigen::Index>(n)), tb);
    }
  } catch (const ode::odeint_error& e) {
    throw Error(ErrorKind::numeric, std::string("integrator failure: ") + e.what());
  }
  out.stats.rhs_evaluations = evals;
  const std::size_t accepted_cost = 1 + 6 * out.stats.steps;
  out.stats.rejections = evals > accepted_cost ? (evals - accepted_cost) / 6 : 0;
  return out;
}

/// Right-hand side M u + u (r - b (c|u^p)).
inline RhsFunction model_rhs(const ModelSpec& spec) {
  return [&spec](const Vector& u, Vector& du, double) {
    const double competition = inner_product(spec.c(), power(u, spec.p()), spec.measure());
    du = spec.M() * u + u.cwiseProduct(spec.r() - spec.b() * competition);
  };
}

inline Trajectory integrate(const ModelSpec& spec, const Vector& u0, const std::vector<double>& sample_times,
                            double rtol = 1e-9, double atol = 1e-12) {
  detail::require_same_size(static_cast<std::size_t>(u0.size()), static_cast<std::size_t>(spec.n()), "integrate");
  if (!((u0.array() >= 0.0).all())) throw Error(ErrorKind::domain, "initial state must be nonnegative");
  if (!(sample_times.back() > 0.0)) throw Error(ErrorKind::domain, "t_end must be positive");
  auto res = integrate_system(model_rhs(spec), u0, sample_times, rtol, atol);
  Trajectory traj{sample_times, std::move(res.states), spec, res.stats};
  return traj;
}

inline Trajectory integrate(const ModelSpec& spec, const Vector& u0, double t_end, double rtol = 1e-9,
                            double atol = 1e-12, std::size_t samples = 1001) {
  if (!(t_end > 0.0)) throw Error(ErrorKind::domain, "t_end must be positive");
  return integrate(spec, u0, uniform_samples(t_end, samples), rtol, atol);
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

struct DiagnosticsSeries {
  std::vector<double> l1_norm;
  std::vector<double> competition;
  std::vector<double> lyapunov_h;
  std::optional<std::vector<double>> energy_f;  // p = 2 only
  std::vector<double> adjoint_mass;
};

/// psi > 0 with M* psi = 0 and (psi|1) = 1.
inline Vector adjoint_kernel_vector(const ModelSpec& spec) {
  const auto pair = principal_eigenpair(-adjoint(spec.M(), spec.measure()), spec.measure());
  Vector psi = pair.eigvec;
  return psi / inner_product(psi, Vector::Ones(spec.n()), spec.measure());
}

/// F(v) = (1/2)(v|(c~/b~) M~ v) + (1/2)(c~|v^2) - (1/4)(c~|v^2)^2, which is
/// nondecreasing along the p = 2 reduced flow when (c~/b~) M~ is self-adjoint.
inline double gradient_energy(const ReducedModel& red, const Vector& v) {
  const Measure& m = red.measure;
  const Vector kv = red.c_tilde.cwiseQuotient(red.b_tilde).cwiseProduct(red.m_tilde * v);
  const double cv2 = inner_product(red.c_tilde, v.cwiseProduct(v), m);
  return 0.5 * inner_product(v, kv, m) + 0.5 * cv2 - 0.25 * cv2 * cv2;
}

inline DiagnosticsSeries diagnostics(const Trajectory& traj, const StationaryState& st, const ReducedModel& red) {
  const ModelSpec& spec = traj.model;
  const Measure& m = spec.measure();
  detail::require_same_size(static_cast<std::size_t>(st.u_star.size()), static_cast<std::size_t>(spec.n()),
                            "diagnostics");
  const Vector psi = adjoint_kernel_vector(spec);
  const Vector ratio = red.c_tilde.cwiseQuotient(red.b_tilde);
  const Vector ones = Vector::Ones(spec.n());
  DiagnosticsSeries d;
  if (spec.p() == 2.0) d.energy_f.emplace();
  for (const auto& u : traj.states) {
    d.l1_norm.push_back(inner_product(ones, u, m));
    d.competition.push_back(inner_product(spec.c(), power(u, spec.p()), m));
    const Vector v = u.cwiseQuotient(st.u_star);
    const Vector h = v - ones;
    d.lyapunov_h.push_back(inner_product(ratio, h.cwiseProduct(h), m));
    if (d.energy_f) d.energy_f->push_back(gradient_energy(red, v));
    d.adjoint_mass.push_back(inner_product(psi, u, m));
  }
  return d;
}

// ---------------------------------------------------------------------------
// Runtime checks of the a-priori bound and persistence
// ---------------------------------------------------------------------------

/// (mu^{p-1} |1/c|_inf |1/b|_inf (|M* 1|_inf + |r|_inf))^{1/p}
inline double apriori_stationary_bound(const ModelSpec& spec) {
  const Measure& m = spec.measure();
  const double mstar1 = norm_inf(adjoint(spec.M(), m) * Vector::Ones(spec.n()));
  const double inner = std::pow(m.total(), spec.p() - 1.0) * norm_inf(spec.c().cwiseInverse()) *
                       norm_inf(spec.b().cwiseInverse()) * (mstar1 + norm_inf(spec.r()));
  return std::pow(inner, 1.0 / spec.p());
}

inline double apriori_bound(const ModelSpec& spec, const Vector& u0) {
  return std::max(norm1(u0, spec.measure()), apriori_stationary_bound(spec));
}

inline bool check_apriori_bound(const Trajectory& traj, const ModelSpec& spec) {
  if (traj.states.empty()) return true;
  const double bound = apriori_bound(spec, traj.states.front()) * (1.0 + 1e-6);
  for (const auto& u : traj.states)
    if (!(norm1(u, spec.measure()) <= bound)) return false;
  return true;
}

namespace detail {
inline std::size_t trailing_start(const std::vector<double>& times, double fraction = 0.2) {
  const double t_cut = times.back() - fraction * (times.back() - times.front());
  std::size_t k = 0;
  while (k < times.size() && times[k] < t_cut) ++k;
  return std::min(k, times.size() - 1);
}
}  // namespace detail

/// Mass stays positive and (1|u^p) keeps a nonvanishing maximum over the
/// trailing 20% of the horizon.
inline bool check_persistence(const Trajectory& traj, const ModelSpec& spec) {
  if (traj.states.empty()) return false;
  const Measure& m = spec.measure();
  const Vector ones = Vector::Ones(spec.n());
  const double initial = inner_product(ones, power(traj.states.front(), spec.p()), m);
  if (!(initial > 0.0)) return false;
  for (const auto& u : traj.states)
    if (!(norm1(u, m) > 0.0)) return false;
  double tail_max = 0.0;
  for (std::size_t k = detail::trailing_start(traj.times); k < traj.size(); ++k)
    tail_max = std::max(tail_max, inner_product(ones, power(traj.states[k], spec.p()), m));
  return tail_max >= 1e-6 * initial;
}

// ---------------------------------------------------------------------------
// Limit sets
// ---------------------------------------------------------------------------

enum class LimitKind { converged_to_equilibrium, converged_to_zero, periodic_like, non_convergent_bounded, unbounded,
                       undetermined };

constexpr std::string_view to_string(LimitKind k) {
  switch (k) {
    case LimitKind::converged_to_equilibrium: return "converged-to-equilibrium";
    case LimitKind::converged_to_zero: return "converged-to-zero";
    case LimitKind::periodic_like: return "periodic-like";
    case LimitKind::non_convergent_bounded: return "non-convergent-bounded";
    case LimitKind::unbounded: return "unbounded";
    case LimitKind::undetermined: return "undetermined";
  }
  return "?";
}

struct LimitSetVerdict {
  LimitKind kind = LimitKind::undetermined;
  std::map<std::string, double> metrics;
};

inline LimitSetVerdict classify_limit_set(const Trajectory& traj, const Vector& u_star, double eps) {
  LimitSetVerdict out;
  if (traj.size() < 10) return out;
  const std::size_t start = detail::trailing_start(traj.times);
  if (traj.size() - start < 10) return out;

  double final_distance = 0.0, peak_norm = 0.0;
  std::vector<double> comp;
  const ModelSpec& spec = traj.model;
  for (std::size_t k = start; k < traj.size(); ++k) {
    const Vector& u = traj.states[k];
    if (!u.allFinite()) {
      out.kind = LimitKind::unbounded;
      return out;
    }
    final_distance = std::max(final_distance, norm_inf(u - u_star));
    peak_norm = std::max(peak_norm, norm_inf(u));
    comp.push_back(inner_product(spec.c(), power(u, spec.p()), spec.measure()));
  }
  out.metrics["final_distance"] = final_distance;
  if (peak_norm > 1e12) {
    out.kind = LimitKind::unbounded;
    return out;
  }
  if (final_distance < eps) {
    out.kind = LimitKind::converged_to_equilibrium;
    return out;
  }
  if (peak_norm < eps) {
    out.kind = LimitKind::converged_to_zero;
    return out;
  }

  const auto [lo, hi] = std::minmax_element(comp.begin(), comp.end());
  const double amplitude = *hi - *lo;
  out.metrics["oscillation_amplitude"] = amplitude;
  std::vector<double> peaks;
  for (std::size_t k = 1; k + 1 < comp.size(); ++k)
    if (comp[k] > comp[k - 1] && comp[k] >= comp[k + 1]) peaks.push_back(traj.times[start + k]);
  if (peaks.size() >= 5 && amplitude > 10.0 * eps) {
    std::vector<double> periods;
    for (std::size_t k = 1; k < peaks.size(); ++k) periods.push_back(peaks[k] - peaks[k - 1]);
    double mean = 0.0;
    for (double p : periods) mean += p;
    mean /= static_cast<double>(periods.size());
    double var = 0.0;
    for (double p : periods) var += (p - mean) * (p - mean);
    var /= static_cast<double>(periods.size());
    out.metrics["estimated_period"] = mean;
    if (std::sqrt(var) < 0.05 * mean) {
      out.kind = LimitKind::periodic_like;
      return out;
    }
  }
  out.kind = LimitKind::non_convergent_bounded;
  return out;
}

/// 50 / (smallest nonzero |Re| in the linearization spectrum), capped at 1e4.
inline double default_horizon(const SpectrumReport& lin) {
  const double tol = 1e-8 * std::max(lin.spectral_radius(), std::numeric_limits<double>::min());
  double slowest = std::numeric_limits<double>::infinity();
  for (const auto& z : lin.eigenvalues)
    if (std::abs(z.real()) > tol) slowest = std::min(slowest, std::abs(z.real()));
  if (!std::isfinite(slowest)) return 1e4;
  return std::min(50.0 / slowest, 1e4);
}

// ---------------------------------------------------------------------------
// CSV output
// ---------------------------------------------------------------------------

namespace detail {
inline std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace detail

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t";
  for (Eigen::Index i = 0; i < traj.model.n(); ++i) os << ",u_" << (i + 1);
  os << "\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    os << detail::fmt17(traj.times[k]);
    for (Eigen::Index i = 0; i < traj.states[k].size(); ++i) os << "," << detail::fmt17(traj.states[k][i]);
    os << "\n";
  }
}

inline void write_diagnostics_csv(std::ostream& os, const Trajectory& traj, const DiagnosticsSeries& d) {
  os << "t,l1,competition,lyapunov_h,energy_f,adjoint_mass\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    os << detail::fmt17(traj.times[k]) << "," << detail::fmt17(d.l1_norm[k]) << "," << detail::fmt17(d.competition[k])
       << "," << detail::fmt17(d.lyapunov_h[k]) << ",";
    if (d.energy_f) os << detail::fmt17((*d.energy_f)[k]);
    os << "," << detail::fmt17(d.adjoint_mass[k]) << "\n";
  }
}

}  // namespace npdt
