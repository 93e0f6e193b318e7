#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "npdt/conditions.hpp"
#include "npdt/cs_estimator.hpp"
#include "npdt/krein.hpp"
#include "npdt/reduction.hpp"
#include "npdt/stationary.hpp"

namespace npdt {

enum class Verdict { certified_gas, certified_las, linearly_stable_uncertified, unstable, inconclusive };

constexpr std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::certified_gas: return "certified-GAS";
    case Verdict::certified_las: return "certified-LAS";
    case Verdict::linearly_stable_uncertified: return "linearly-stable-uncertified";
    case Verdict::unstable: return "unstable";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct GasOptions {
  int cs_budget = 64;
  std::uint64_t seed = 0;
};

/// GAS1..GAS4 in order. GAS2 inherits the heuristic status of (CS).
inline std::vector<ConditionCheck> check_gas(const ReducedModel& red, const GasOptions& opt = {},
                                             std::optional<double> sigma2_hint = std::nullopt) {
  const bool p1 = red.p == 1.0;
  const bool b_const = is_constant(red.b_tilde);
  std::vector<ConditionCheck> out;

  {
    ConditionCheck gas1{ConditionId::GAS1};
    const auto las1 = check_las1(red);
    gas1.numeric_evidence["p_is_1"] = p1;
    gas1.numeric_evidence["b_constant"] = b_const;
    gas1.numeric_evidence["las1_residual"] = las1.numeric_evidence.at("residual");
    gas1.holds = holds_if(p1 && b_const && las1.certified());
    out.push_back(std::move(gas1));
  }
  {
    ConditionCheck gas2{ConditionId::GAS2};
    const double s2 = sigma2_hint ? *sigma2_hint : spectral_gap_sigma2(red);
    const auto las2 = check_las2(red, s2);
    gas2.numeric_evidence["p_is_1"] = p1;
    gas2.numeric_evidence["las2"] = las2.certified();
    gas2.holds = Holds::no;
    if (p1 && las2.certified()) {
      const auto cs = estimate_cs_condition(red, opt.cs_budget, opt.seed, s2);
      gas2.numeric_evidence["cs_estimate"] = cs.numeric_evidence.count("estimate") ? cs.numeric_evidence.at("estimate")
                                                                                     : std::nan("");
      gas2.numeric_evidence["sqrt_sigma2"] = std::sqrt(s2);
      gas2.holds = cs.holds;
      gas2.witness = cs.witness;
      gas2.note = "via (CS): " + cs.note;
    }
    out.push_back(std::move(gas2));
  }
  {
    ConditionCheck gas3{ConditionId::GAS3};
    const double defect = normality_defect(-red.m_tilde, red.measure);
    const bool finite = red.origin == Origin::matrix;
    gas3.numeric_evidence["b_constant"] = b_const;
    gas3.numeric_evidence["normality_defect"] = defect;
    gas3.numeric_evidence["finite_dimensional"] = finite;
    gas3.holds = holds_if(b_const && defect <= 1e-9 && (finite || red.p <= 2.0));
    out.push_back(std::move(gas3));
  }
  {
    ConditionCheck gas4{ConditionId::GAS4};
    const Matrix k = red.c_tilde.cwiseQuotient(red.b_tilde).asDiagonal() * red.m_tilde;
    const double defect = self_adjointness_defect(k, red.measure);
    gas4.numeric_evidence["p_is_2"] = red.p == 2.0;
    gas4.numeric_evidence["self_adjointness_defect"] = defect;
    gas4.holds = holds_if(red.p == 2.0 && defect <= 1e-9);
    out.push_back(std::move(gas4));
  }
  return out;
}

struct StabilityReport {
  StationaryState stationary;
  SpectrumReport linearization_spectrum;
  double min_real_part = 0.0;
  double tol = 0.0;
  bool linearly_stable = false;
  double sigma2 = std::numeric_limits<double>::infinity();
  std::vector<ConditionCheck> checks;
  Verdict verdict = Verdict::inconclusive;
  /// False when a certified LAS/GAS condition contradicts the spectrum.
  bool cross_check_ok = true;

  [[nodiscard]] const ConditionCheck* find(ConditionId id) const {
    for (const auto& c : checks)
      if (c.id == id) return &c;
    return nullptr;
  }
};

inline StabilityReport analyze_reduced(const ReducedModel& red, const GasOptions& opt = {}) {
  StabilityReport rep;
  rep.linearization_spectrum = spectrum(linearization(red));
  rep.min_real_part = rep.linearization_spectrum.min_real_part;
  rep.tol = 1e-8 * std::max(rep.linearization_spectrum.spectral_radius(), std::numeric_limits<double>::min());
  rep.linearly_stable = rep.min_real_part > rep.tol;
  rep.sigma2 = spectral_gap_sigma2(red);

  rep.checks.push_back(check_las1(red));
  rep.checks.push_back(check_las2(red, rep.sigma2));
  rep.checks.push_back(check_las3(red));
  rep.checks.push_back(check_sigma_condition(spectrum(-red.m_tilde, false)));
  rep.checks.push_back(check_angle_condition(red.b_tilde, red.c_tilde, red.measure));
  for (auto& g : check_gas(red, opt, rep.sigma2)) rep.checks.push_back(std::move(g));

  auto holds = [&](ConditionId id) { return rep.find(id)->certified(); };
  const bool gas = holds(ConditionId::GAS1) || holds(ConditionId::GAS3) || holds(ConditionId::GAS4);
  const bool las = holds(ConditionId::LAS1) || holds(ConditionId::LAS2) || holds(ConditionId::LAS3);
  // Certified stability must not contradict the spectrum beyond roundoff.
  rep.cross_check_ok = !((gas || las) && !(rep.min_real_part > -rep.tol));

  if (gas)
    rep.verdict = Verdict::certified_gas;
  else if (las)
    rep.verdict = Verdict::certified_las;
  else if (rep.linearly_stable)
    rep.verdict = Verdict::linearly_stable_uncertified;
  else if (rep.min_real_part < -rep.tol)
    rep.verdict = Verdict::unstable;
  else
    rep.verdict = Verdict::inconclusive;
  return rep;
}

/// Equilibrium, reduction, linearization and the full condition ladder.
inline StabilityReport stability_verdict(const ModelSpec& spec, const GasOptions& opt = {}) {
  const auto st = solve_stationary(spec);
  auto rep = analyze_reduced(reduce(spec, st), opt);
  rep.stationary = st;
  return rep;
}

}  // namespace npdt
