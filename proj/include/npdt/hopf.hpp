#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "npdt/parallel.hpp"
#include "npdt/stability.hpp"

namespace npdt {

using ModelFamily = std::function<ModelSpec(double theta)>;

struct ScanSample {
  double theta = 0.0;
  bool ok = false;
  double min_real_part = 0.0;  // of the linearization; < 0 means unstable
  Complex critical;            // eigenvalue attaining the minimal real part
  std::string error;
};

enum class CrossingKind { hopf, steady };

constexpr std::string_view to_string(CrossingKind k) { return k == CrossingKind::hopf ? "hopf" : "steady"; }

struct Crossing {
  double theta = 0.0;
  double theta_lo = 0.0;
  double theta_hi = 0.0;
  CrossingKind kind = CrossingKind::steady;
  Complex eigenvalue;
  bool destabilizing = true;  // stable below theta_lo, unstable above
};

struct ScanResult {
  std::vector<ScanSample> samples;
  std::vector<Crossing> crossings;
  std::vector<double> gaps;  // theta values where the equilibrium could not be computed
};

inline ScanSample scan_point(const ModelFamily& family, double theta) {
  ScanSample s;
  s.theta = theta;
  try {
    const ModelSpec spec = family(theta);
    const auto st = solve_stationary(spec);
    const auto lin = spectrum(linearization(reduce(spec, st)), false);
    s.min_real_part = lin.min_real_part;
    s.critical = lin.eigenvalues.front();
    s.ok = true;
  } catch (const Error& e) {
    s.error = e.what();
  }
  return s;
}

/// Tracks the rightmost-unstable eigenvalue of the linearization along the
/// family and refines every sign change of min Re by bisection to 1e-6.
inline ScanResult hopf_scan(const ModelFamily& family, double theta_lo, double theta_hi, int steps) {
  if (!(theta_lo < theta_hi) || steps < 1) throw Error(ErrorKind::domain, "scan needs theta_lo < theta_hi, steps >= 1");
  ScanResult out;
  out.samples.resize(static_cast<std::size_t>(steps) + 1);
  parallel_for(out.samples.size(), [&](std::size_t k) {
    const double theta = theta_lo + (theta_hi - theta_lo) * static_cast<double>(k) / steps;
    out.samples[k] = scan_point(family, theta);
  });
  for (const auto& s : out.samples)
    if (!s.ok) out.gaps.push_back(s.theta);

  for (std::size_t k = 0; k + 1 < out.samples.size(); ++k) {
    ScanSample a = out.samples[k];
    ScanSample b = out.samples[k + 1];
    if (!a.ok || !b.ok) continue;
    if ((a.min_real_part < 0.0) == (b.min_real_part < 0.0)) continue;
    const bool destabilizing = b.min_real_part < 0.0;
    bool broken = false;
    while (b.theta - a.theta > 1e-6) {
      const ScanSample mid = scan_point(family, 0.5 * (a.theta + b.theta));
      if (!mid.ok) {
        out.gaps.push_back(mid.theta);
        broken = true;
        break;
      }
      if ((mid.min_real_part < 0.0) == (a.min_real_part < 0.0))
        a = mid;
      else
        b = mid;
    }
    if (broken) continue;
    Crossing c;
    c.theta_lo = a.theta;
    c.theta_hi = b.theta;
    c.theta = 0.5 * (a.theta + b.theta);
    c.destabilizing = destabilizing;
    c.eigenvalue = std::abs(a.min_real_part) < std::abs(b.min_real_part) ? a.critical : b.critical;
    const double tol = 1e-6 * std::max(1.0, std::abs(c.eigenvalue));
    c.kind = std::abs(c.eigenvalue.imag()) > tol ? CrossingKind::hopf : CrossingKind::steady;
    out.crossings.push_back(c);
  }
  std::sort(out.gaps.begin(), out.gaps.end());
  return out;
}

}  // namespace npdt
