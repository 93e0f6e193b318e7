#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "npdt/conditions.hpp"

namespace npdt {

namespace detail {

/// Objective of the (CS) supremum and its feasibility margin for h >= 0.
struct CsObjective {
  const Vector& w;
  const Vector& c;
  double mu;
  double sigma2;

  struct Value {
    double ratio = -std::numeric_limits<double>::infinity();
    double margin = -1.0;  // > 0 iff feasible
    Vector grad;
  };

  [[nodiscard]] Value eval(const Vector& h, bool with_grad) const {
    Value v;
    const double ch2 = (w.array() * c.array() * h.array().square()).sum();
    const double ch = (w.array() * c.array() * h.array()).sum();
    const double h2 = (w.array() * h.array().square()).sum();
    const double h1 = (w.array() * h.array()).sum();
    const double d2 = mu * h2 - h1 * h1;
    v.margin = ch2 + ch * ch - sigma2 * d2;
    if (!(d2 > 1e-14 * mu * h2) || !(ch2 > 0.0)) return v;
    const double sq = std::sqrt(ch2);
    const double num = sq - ch;
    const double den = std::sqrt(d2);
    v.ratio = num / den;
    if (with_grad) {
      const Vector dnum = (w.array() * c.array() * (h.array() / sq - 1.0)).matrix();
      const Vector dden = (w.array() * (mu * h.array() - h1)).matrix() / den;
      v.grad = (dnum * den - num * dden) / d2;
    }
    return v;
  }
};

}  // namespace detail

/// Heuristic estimate of
///   sup { (sqrt(c~|h^2) - (c~|h)) / sqrt(mu |h|_2^2 - |h|_1^2) }
/// over nonnegative, nonconstant h with
///   sigma2 (mu |h|_2^2 - |h|_1^2) < (c~|h^2) + (c~|h)^2,
/// by multi-start projected gradient ascent. Never certifies; a feasible h
/// reaching sqrt(sigma2) is returned as a witness of failure.
inline ConditionCheck estimate_cs_condition(const ReducedModel& red, int budget = 64, std::uint64_t seed = 0,
                                            std::optional<double> sigma2_hint = std::nullopt) {
  ConditionCheck out{ConditionId::CS};
  const double sigma2 = sigma2_hint ? *sigma2_hint : spectral_gap_sigma2(red);
  out.numeric_evidence["sigma2"] = sigma2;
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    out.note = "not applicable: sigma2 outside (0, inf)";
    return out;
  }
  const Eigen::Index n = red.n();
  const Vector& w = red.measure.weights();
  const detail::CsObjective obj{w, red.c_tilde, red.measure.total(), sigma2};
  const double target = std::sqrt(sigma2);

  double best = -std::numeric_limits<double>::infinity();
  Vector best_h;
  int feasible_starts = 0;

  auto normalize = [&](Vector& h) {
    const double s = std::sqrt((w.array() * h.array().square()).sum());
    if (s > 0.0) h /= s;
  };

  for (int k = 0; k < std::max(budget, 1); ++k) {
    std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(k));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vector dir(n);
    if (k < n) {
      dir = Vector::Zero(n);
      dir[k] = 1.0;  // point masses first
    } else {
      for (Eigen::Index i = 0; i < n; ++i) dir[i] = std::pow(unif(rng), 3.0);
    }
    // Pull toward constants until feasible (the constraint holds near 1).
    Vector h = dir;
    double t = 1.0;
    bool feasible = false;
    for (int tries = 0; tries < 60; ++tries) {
      h = (1.0 - t) * Vector::Ones(n) + t * dir / std::max(dir.maxCoeff(), 1e-300);
      if (obj.eval(h, false).margin > 0.0 && std::isfinite(obj.eval(h, false).ratio)) {
        feasible = true;
        break;
      }
      t *= 0.5;
    }
    if (!feasible) continue;
    ++feasible_starts;
    normalize(h);
    auto cur = obj.eval(h, true);
    double step = 0.1;
    for (int it = 0; it < 400 && step > 1e-12; ++it) {
      bool improved = false;
      while (step > 1e-12) {
        Vector trial = (h + step * cur.grad).cwiseMax(0.0);
        normalize(trial);
        const auto next = obj.eval(trial, true);
        if (next.margin > 0.0 && next.ratio > cur.ratio) {
          const double gain = next.ratio - cur.ratio;
          h = trial;
          cur = next;
          step *= 2.0;
          improved = true;
          if (gain <= 1e-13 * std::max(1.0, std::abs(cur.ratio))) step = 0.0;
          break;
        }
        step *= 0.5;
      }
      if (!improved) break;
    }
    if (cur.ratio > best) {
      best = cur.ratio;
      best_h = h;
    }
  }

  out.numeric_evidence["estimate"] = best;
  out.numeric_evidence["sqrt_sigma2"] = target;
  out.numeric_evidence["restarts"] = static_cast<double>(std::max(budget, 1));
  out.numeric_evidence["feasible_starts"] = feasible_starts;
  if (best >= target) {
    out.holds = Holds::no;
    out.witness = best_h;
    out.note = "feasible witness attains sqrt(sigma2)";
  } else if (best < target * (1.0 - 1e-3)) {
    out.holds = Holds::heuristic;
    out.note = "no witness found; estimate is not a proof";
  } else {
    out.holds = Holds::no;
    out.note = "estimate within 1e-3 of sqrt(sigma2); undecided";
  }
  return out;
}

}  // namespace npdt
