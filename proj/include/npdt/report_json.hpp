#pragma once

#include <cmath>
#include <string>

#include "npdt/dynamics.hpp"
#include "npdt/hopf.hpp"
#include "npdt/krein.hpp"
#include "npdt/model_io.hpp"
#include "npdt/stability.hpp"
#include "npdt/stationary.hpp"

namespace npdt::report {

/// Finite reals as numbers, the rest as the strings "inf", "-inf", "nan".
inline Json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

inline Json vec(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
  return a;
}

inline Json mat(const Matrix& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec(m.row(i).transpose()));
  return a;
}

inline Json complex_list(const std::vector<Complex>& zs) {
  Json a = Json::array();
  for (const auto& z : zs) a.push_back(Json::array({num(z.real()), num(z.imag())}));
  return a;
}

inline Json spectrum(const SpectrumReport& s) {
  return {{"eigenvalues", complex_list(s.eigenvalues)},
          {"max_real_part", num(s.max_real_part)},
          {"min_real_part", num(s.min_real_part)},
          {"gap", num(s.gap)},
          {"max_residual", num(s.max_residual)}};
}

inline Json validation(const ValidationReport& r) {
  Json j{{"essentially_nonnegative", r.essentially_nonnegative},
         {"irreducible", r.irreducible},
         {"zero_row_sum", r.zero_row_sum},
         {"positive_coefficients", r.positive_coefficients},
         {"passed", r.passed()},
         {"messages", r.messages}};
  if (r.normality_defect) j["normality_defect"] = num(*r.normality_defect);
  return j;
}

inline Json stationary(const StationaryState& st) {
  return {{"u_star", vec(st.u_star)},
          {"lambda1", num(st.lambda1)},
          {"amplitude", num(st.amplitude)},
          {"residual", num(st.residual)}};
}

inline Json reduced(const ReducedModel& red) {
  return {{"m_tilde", mat(red.m_tilde)},
          {"b_tilde", vec(red.b_tilde)},
          {"c_tilde", vec(red.c_tilde)},
          {"p", red.p},
          {"origin", std::string(to_string(red.origin))}};
}

inline Json check(const ConditionCheck& c) {
  Json ev = Json::object();
  for (const auto& [k, v] : c.numeric_evidence) ev[k] = num(v);
  Json j{{"id", std::string(to_string(c.id))}, {"holds", std::string(to_string(c.holds))}, {"numeric_evidence", ev}};
  if (!c.note.empty()) j["note"] = c.note;
  if (c.witness) j["witness"] = vec(*c.witness);
  return j;
}

inline Json stability(const StabilityReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(check(c));
  return {{"stationary", stationary(r.stationary)},
          {"linearization_spectrum", spectrum(r.linearization_spectrum)},
          {"min_real_part", num(r.min_real_part)},
          {"tol", num(r.tol)},
          {"linearly_stable", r.linearly_stable},
          {"sigma2", num(r.sigma2)},
          {"checks", checks},
          {"verdict", std::string(to_string(r.verdict))},
          {"cross_check_ok", r.cross_check_ok},
          {"compactness", "automatic (finite dimension)"}};
}

inline Json krein(const KreinReport& k) {
  return {{"roots", complex_list(k.roots)},
          {"retained", complex_list(k.retained)},
          {"combined", complex_list(k.combined)},
          {"direct", complex_list(k.direct)},
          {"max_mismatch", num(k.max_mismatch)},
          {"scale", num(k.scale)},
          {"refinement_seeds", k.refinement_seeds}};
}

inline Json nonexistence(const NonexistenceReport& r) {
  return {{"D", num(r.D)},
          {"omega_volume", num(r.omega_volume)},
          {"total_mass", num(r.total_mass)},
          {"density_l1", num(r.density_l1)},
          {"atomic_mass", num(r.atomic_mass)},
          {"valid", r.valid}};
}

inline Json limit_set(const LimitSetVerdict& v) {
  Json m = Json::object();
  for (const auto& [k, x] : v.metrics) m[k] = num(x);
  return {{"kind", std::string(to_string(v.kind))}, {"metrics", m}};
}

inline Json integrator(const IntegratorStats& s) {
  return {{"steps", s.steps},
          {"rejections", s.rejections},
          {"rhs_evaluations", s.rhs_evaluations},
          {"min_component", num(s.min_component)}};
}

inline Json scan(const ScanResult& r) {
  Json samples = Json::array();
  for (const auto& s : r.samples) {
    Json j{{"theta", num(s.theta)}, {"ok", s.ok}};
    if (s.ok) {
      j["min_real_part"] = num(s.min_real_part);
      j["critical"] = Json::array({num(s.critical.real()), num(s.critical.imag())});
    } else {
      j["error"] = s.error;
    }
    samples.push_back(j);
  }
  Json crossings = Json::array();
  for (const auto& c : r.crossings) {
    crossings.push_back({{"theta", num(c.theta)},
                         {"theta_lo", num(c.theta_lo)},
                         {"theta_hi", num(c.theta_hi)},
                         {"kind", std::string(to_string(c.kind))},
                         {"eigenvalue", Json::array({num(c.eigenvalue.real()), num(c.eigenvalue.imag())})},
                         {"destabilizing", c.destabilizing}});
  }
  Json gaps = Json::array();
  for (double g : r.gaps) gaps.push_back(num(g));
  return {{"samples", samples}, {"crossings", crossings}, {"gaps", gaps}};
}

}  // namespace npdt::report
