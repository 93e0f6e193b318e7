#pragma once

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "npdt/conditions.hpp"
#include "npdt/operator.hpp"
#include "npdt/reduction.hpp"

namespace npdt {

/// chi(lambda) = p (c~ | (-M~ - lambda)^{-1} b~) + 1
inline Complex krein_characteristic(const ReducedModel& red, Complex lambda) {
  const CVector v = resolvent_solve(-red.m_tilde, lambda, red.b_tilde.cast<Complex>());
  const Vector wc = red.measure.weights().cwiseProduct(red.c_tilde);
  return red.p * wc.cast<Complex>().dot(v) + 1.0;  // c~ is real, so no conjugation issue
}

/// chi and chi' at many points in O(n^2) each via a Hessenberg frame of -M~.
class KreinFunction {
 public:
  explicit KreinFunction(const ReducedModel& red) : resolvent_(-red.m_tilde), p_(red.p) {
    g_ = resolvent_.to_frame(red.b_tilde.cast<Complex>());
    h_ = resolvent_.to_frame(red.measure.weights().cwiseProduct(red.c_tilde).cast<Complex>());
  }

  /// False at (numerical) poles.
  bool evaluate(Complex lambda, Complex& chi, Complex& dchi) const {
    const auto f = resolvent_.factor(lambda);
    if (!f.ok) return false;
    const CVector z = f.solve(g_);
    const CVector z2 = f.solve(z);
    chi = p_ * (h_.transpose() * z)(0) + 1.0;
    dchi = p_ * (h_.transpose() * z2)(0);
    return std::isfinite(chi.real()) && std::isfinite(chi.imag());
  }

 private:
  HessenbergResolvent resolvent_;
  double p_;
  CVector g_, h_;
};

struct KreinReport {
  std::vector<Complex> roots;      // zeros of chi
  std::vector<Complex> retained;   // eigenvalues of -M~ that stay eigenvalues of L
  std::vector<Complex> combined;   // roots + retained, sorted
  std::vector<Complex> direct;     // dense spectrum of L, sorted
  double max_mismatch = 0.0;
  double scale = 1.0;
  int refinement_seeds = 0;        // Newton starts placed at unmatched direct eigenvalues
};

namespace detail {

inline void sort_complex(std::vector<Complex>& v) { std::sort(v.begin(), v.end(), complex_less); }

/// Greedy nearest matching of two multisets; returns the largest pair
/// distance (+inf when sizes differ) and flags unmatched entries of `a`.
inline double match_multisets(const std::vector<Complex>& a, const std::vector<Complex>& b,
                              std::vector<char>* a_unmatched = nullptr, double tol = 0.0) {
  std::vector<char> used(b.size(), 0);
  double worst = 0.0;
  if (a_unmatched) a_unmatched->assign(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = b.size();
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(a[i] - b[j]);
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    if (arg < b.size() && (a_unmatched == nullptr || best <= tol)) used[arg] = 1;
    if (a_unmatched && !(best <= tol)) (*a_unmatched)[i] = 1;
    worst = std::max(worst, best);
  }
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  return worst;
}

/// Damped Newton on chi; returns true with the root when converged.
inline bool newton_root(const KreinFunction& chi, Complex start, double window, double scale, Complex& root) {
  Complex z = start;
  Complex f, df;
  for (int it = 0; it < 100; ++it) {
    if (!chi.evaluate(z, f, df)) return false;
    if (df == Complex(0.0)) return false;
    Complex step = f / df;
    const double cap = 0.25 * window;
    if (std::abs(step) > cap) step *= cap / std::abs(step);
    z -= step;
    if (std::abs(z.real()) > 1.5 * window || std::abs(z.imag()) > 1.5 * window) return false;
    if (std::abs(step) <= 1e-14 * scale) break;
  }
  if (!chi.evaluate(z, f, df)) return false;
  if (!(std::abs(f) <= 1e-8)) return false;
  root = z;
  return true;
}

inline void add_unique(std::vector<Complex>& roots, Complex z, double tol) {
  for (const auto& r : roots)
    if (std::abs(r - z) <= tol) return;
  roots.push_back(z);
}

}  // namespace detail

/// Locates the zeros of chi by Newton from a seed grid over
/// [-2 rho, 2 rho]^2, around and between the poles, then compares
/// zeros + retained eigenvalues of -M~ with the dense spectrum of L.
inline KreinReport krein_roots(const ReducedModel& red) {
  const Eigen::Index n = red.n();
  const Matrix lin = linearization(red);
  const Matrix minus_m = -red.m_tilde;
  const SpectrumReport direct = spectrum(lin, false);
  const SpectrumReport poles_report = spectrum(minus_m, false);

  KreinReport rep;
  rep.direct = direct.eigenvalues;
  const double rho = std::max(direct.spectral_radius(), poles_report.spectral_radius());
  rep.scale = std::max(rho, std::numeric_limits<double>::min());
  const double window = std::max(2.0 * rho, 1e-12);
  const double dedup = 1e-8 * rep.scale;
  const KreinFunction chi(red);

  auto try_seed = [&](Complex s) {
    Complex root;
    if (detail::newton_root(chi, s, window, rep.scale, root)) detail::add_unique(rep.roots, root, dedup);
  };

  constexpr int grid = 12;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j)
      try_seed(Complex(-window + 2.0 * window * (i + 0.5) / grid, -window + 2.0 * window * (j + 0.5) / grid));
  const auto& poles = poles_report.eigenvalues;
  const double offset = 1e-3 * rep.scale;
  for (const auto& mu : poles)
    for (const Complex d : {Complex(offset, 0), Complex(-offset, 0), Complex(0, offset), Complex(0, -offset)})
      try_seed(mu + d);
  for (std::size_t k = 0; k + 1 < poles.size(); ++k) try_seed(0.5 * (poles[k] + poles[k + 1]));

  // Eigenvalues of -M~ that L keeps: kernel test on L - lambda I, capped by
  // the multiplicity of the cluster in sp(-M~).
  const double cluster_tol = 1e-6 * rep.scale;
  // Roots of chi closer than this to a pole cannot be resolved from chi itself;
  // such eigenvalues count as retained.
  const double kernel_tol = 1e-8 * rep.scale;
  std::vector<char> done(poles.size(), 0);
  for (std::size_t k = 0; k < poles.size(); ++k) {
    if (done[k]) continue;
    std::vector<std::size_t> members;
    for (std::size_t j = k; j < poles.size(); ++j)
      if (!done[j] && std::abs(poles[j] - poles[k]) <= cluster_tol) {
        members.push_back(j);
        done[j] = 1;
      }
    CMatrix shifted = lin.cast<Complex>();
    shifted.diagonal().array() -= poles[k];
    const Eigen::VectorXd sv = Eigen::JacobiSVD<CMatrix>(shifted).singularValues();
    std::size_t nullity = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv[i] <= kernel_tol) ++nullity;
    for (std::size_t i = 0; i < std::min(nullity, members.size()); ++i) rep.retained.push_back(poles[members[i]]);
  }

  auto rebuild = [&] {
    std::erase_if(rep.roots, [&](const Complex& z) {
      for (const auto& r : rep.retained)
        if (std::abs(z - r) <= cluster_tol) return true;
      return false;
    });
    rep.combined = rep.roots;
    rep.combined.insert(rep.combined.end(), rep.retained.begin(), rep.retained.end());
    detail::sort_complex(rep.combined);
  };
  rebuild();

  // Refinement: Newton started at direct eigenvalues the seeds missed.
  const double match_tol = 1e-6 * rep.scale;
  std::vector<char> unmatched;
  detail::match_multisets(rep.direct, rep.combined, &unmatched, match_tol);
  for (std::size_t i = 0; i < unmatched.size(); ++i) {
    if (!unmatched[i]) continue;
    ++rep.refinement_seeds;
    try_seed(rep.direct[i]);
  }
  if (rep.refinement_seeds > 0) rebuild();
  detail::sort_complex(rep.roots);

  rep.max_mismatch = detail::match_multisets(rep.direct, rep.combined, &unmatched, match_tol);
  if (rep.combined.size() != static_cast<std::size_t>(n)) {
    std::string msg = "krein_roots: found " + std::to_string(rep.combined.size()) + " of " + std::to_string(n) +
                      " eigenvalues; unmatched:";
    for (std::size_t i = 0; i < unmatched.size(); ++i)
      if (unmatched[i])
        msg += " (" + std::to_string(rep.direct[i].real()) + ", " + std::to_string(rep.direct[i].imag()) + ")";
    throw Error(ErrorKind::numeric, msg);
  }
  return rep;
}

}  // namespace npdt
