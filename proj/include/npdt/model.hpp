#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "npdt/errors.hpp"
#include "npdt/measure.hpp"
#include "npdt/operator.hpp"

namespace npdt {

/// Where a model's generator came from. Grid models approximate a continuum
/// operator and are treated as infinite-dimensional by the GAS checks.
enum class Origin { matrix, grid };

constexpr std::string_view to_string(Origin o) { return o == Origin::grid ? "grid" : "matrix"; }

/// One instance of du/dt = M u + u (r - b (c|u^p)).
///
/// Construction checks shapes, finiteness and p >= 1. Sign conditions on
/// r, b, c and the structure of M are reported by validate_model.
class ModelSpec {
 public:
  ModelSpec(FellerMatrix generator, Vector r, Vector b, Vector c, double p, std::string name = "model",
            Origin origin = Origin::matrix)
      : generator_(std::move(generator)),
        r_(std::move(r)),
        b_(std::move(b)),
        c_(std::move(c)),
        p_(p),
        name_(std::move(name)),
        origin_(origin) {
    const auto n = static_cast<std::size_t>(generator_.size());
    detail::require_same_size(static_cast<std::size_t>(r_.size()), n, "model r");
    detail::require_same_size(static_cast<std::size_t>(b_.size()), n, "model b");
    detail::require_same_size(static_cast<std::size_t>(c_.size()), n, "model c");
    if (!(p_ >= 1.0) || !std::isfinite(p_)) throw Error(ErrorKind::domain, "exponent p must be a finite real >= 1");
    if (!generator_.entries().allFinite() || !r_.allFinite() || !b_.allFinite() || !c_.allFinite()) {
      throw Error(ErrorKind::domain, "model data contains non-finite values");
    }
  }

  [[nodiscard]] Eigen::Index n() const noexcept { return generator_.size(); }
  [[nodiscard]] const FellerMatrix& generator() const noexcept { return generator_; }
  [[nodiscard]] const Matrix& M() const noexcept { return generator_.entries(); }
  [[nodiscard]] const Measure& measure() const noexcept { return generator_.measure(); }
  [[nodiscard]] const Vector& r() const noexcept { return r_; }
  [[nodiscard]] const Vector& b() const noexcept { return b_; }
  [[nodiscard]] const Vector& c() const noexcept { return c_; }
  [[nodiscard]] double p() const noexcept { return p_; }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] Origin origin() const noexcept { return origin_; }

 private:
  FellerMatrix generator_;
  Vector r_, b_, c_;
  double p_;
  std::string name_;
  Origin origin_;
};

struct ValidationReport {
  bool essentially_nonnegative = true;
  bool irreducible = true;
  bool zero_row_sum = true;
  bool positive_coefficients = true;
  /// Only meaningful for reduced models: (1|c~) = 1.
  bool mass_normalized = true;
  std::optional<double> normality_defect;
  std::vector<std::string> messages;

  [[nodiscard]] bool passed() const {
    return essentially_nonnegative && irreducible && zero_row_sum && positive_coefficients && mass_normalized;
  }
};

namespace detail {

inline void check_generator(const Matrix& m, ValidationReport& rep) {
  const double violation = metzler_violation(m);
  rep.essentially_nonnegative = violation <= 1e-12 * std::max(infinity_norm(m), 1.0);
  if (!rep.essentially_nonnegative)
    rep.messages.push_back("negative off-diagonal entry (magnitude " + std::to_string(violation) + ")");
  rep.zero_row_sum = has_zero_row_sums(m);
  if (!rep.zero_row_sum) rep.messages.push_back("row sums of the generator are not zero");
  rep.irreducible = is_strongly_connected(m);
  if (!rep.irreducible) rep.messages.push_back("generator is reducible (graph not strongly connected)");
}

inline bool all_positive(const Vector& v) { return v.size() > 0 && (v.array() > 0.0).all(); }

}  // namespace detail

inline ValidationReport validate_model(const ModelSpec& spec) {
  ValidationReport rep;
  detail::check_generator(spec.M(), rep);
  const std::pair<const char*, const Vector*> coeffs[] = {{"r", &spec.r()}, {"b", &spec.b()}, {"c", &spec.c()}};
  for (const auto& [label, v] : coeffs) {
    if (!detail::all_positive(*v)) {
      rep.positive_coefficients = false;
      rep.messages.push_back(std::string("coefficient ") + label + " is not strictly positive");
    }
  }
  return rep;
}

/// Throws a structural error listing the failures when validation fails.
inline void require_valid(const ModelSpec& spec) {
  const auto rep = validate_model(spec);
  if (rep.passed()) return;
  std::string msg = "model '" + spec.name() + "' failed validation:";
  for (const auto& m : rep.messages) msg += " " + m + ";";
  throw Error(rep.positive_coefficients ? ErrorKind::structural : ErrorKind::domain, msg);
}

// ---------------------------------------------------------------------------
// Grid discretization of nonlocal diffusion
// ---------------------------------------------------------------------------

struct GridSpec {
  double x_lo = 0.0;
  double x_hi = 1.0;
  Eigen::Index n = 2;

  void check() const {
    if (!(x_lo < x_hi) || !std::isfinite(x_lo) || !std::isfinite(x_hi))
      throw Error(ErrorKind::domain, "grid requires finite x_lo < x_hi");
    if (n < 2) throw Error(ErrorKind::domain, "grid requires at least 2 nodes");
  }
  [[nodiscard]] double spacing() const { return (x_hi - x_lo) / static_cast<double>(n); }
  /// Cell midpoints.
  [[nodiscard]] Vector nodes() const {
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = x_lo + (static_cast<double>(i) + 0.5) * spacing();
    return x;
  }
  [[nodiscard]] Measure measure() const { return Measure(Vector::Constant(n, spacing())); }
};

enum class KernelKind { uniform, gaussian, table };

/// J(x, y). Parameters by kind:
///   uniform:  height (default 1), radius (default: unbounded support)
///   gaussian: height (default 1), sigma (required)
///   table:    explicit node values, n x n
struct KernelSpec {
  KernelKind kind = KernelKind::uniform;
  std::map<std::string, double> params;
  Matrix table;
  bool symmetric = true;

  [[nodiscard]] double param(const std::string& key, double fallback) const {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }

  [[nodiscard]] double operator()(const Vector& x, Eigen::Index i, Eigen::Index j) const {
    switch (kind) {
      case KernelKind::uniform: {
        const double radius = param("radius", std::numeric_limits<double>::infinity());
        return std::abs(x[i] - x[j]) <= radius ? param("height", 1.0) : 0.0;
      }
      case KernelKind::gaussian: {
        const double sigma = param("sigma", std::numeric_limits<double>::quiet_NaN());
        if (!(sigma > 0.0)) throw Error(ErrorKind::domain, "gaussian kernel needs sigma > 0");
        const double d = x[i] - x[j];
        return param("height", 1.0) * std::exp(-d * d / (2.0 * sigma * sigma));
      }
      case KernelKind::table: return table(i, j);
    }
    return 0.0;
  }
};

inline FellerMatrix build_nonlocal_diffusion(const GridSpec& grid, const KernelSpec& kernel) {
  grid.check();
  const Eigen::Index n = grid.n;
  if (kernel.kind == KernelKind::table && (kernel.table.rows() != n || kernel.table.cols() != n)) {
    throw Error(ErrorKind::dimension, "kernel table must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  const Vector x = grid.nodes();
  const Measure mu = grid.measure();
  const Vector& w = mu.weights();
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double k = kernel(x, i, j);
      if (!(k >= 0.0) || !std::isfinite(k)) {
        throw Error(ErrorKind::domain, "kernel value at node pair (" + std::to_string(i) + ", " + std::to_string(j) +
                                           ") is negative or not finite");
      }
      if (kernel.symmetric && kernel.kind == KernelKind::table && kernel.table(i, j) != kernel.table(j, i)) {
        throw Error(ErrorKind::domain, "kernel table flagged symmetric but is not");
      }
      m(i, j) = w[j] * k;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) off += m(i, j);
    m(i, i) = -off;
  }
  return FellerMatrix(std::move(m), mu);
}

}  // namespace npdt
