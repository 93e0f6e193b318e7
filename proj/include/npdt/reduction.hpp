#pragma once

#include "npdt/model.hpp"
#include "npdt/stationary.hpp"

namespace npdt {

/// Model in the coordinates v = u / u*, whose equilibrium is the constant 1.
struct ReducedModel {
  Matrix m_tilde;
  Vector b_tilde;
  Vector c_tilde;
  Measure measure;
  double p = 1.0;
  Origin origin = Origin::matrix;

  [[nodiscard]] Eigen::Index n() const { return m_tilde.rows(); }
};

/// M~ = diag(1/u*) M diag(u*) - diag((M u*)/u*), b~ = k b, c~ = u*^p c / k
/// with k = (c|u*^p).
inline ReducedModel reduce(const ModelSpec& spec, const StationaryState& st) {
  const Vector& u = st.u_star;
  detail::require_same_size(static_cast<std::size_t>(u.size()), static_cast<std::size_t>(spec.n()), "reduce");
  if (!(u.array() > 0.0).all()) throw Error(ErrorKind::domain, "reduce: equilibrium has a nonpositive component");
  const Eigen::Index n = spec.n();
  const Matrix& m = spec.M();

  Matrix mt(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      mt(i, j) = m(i, j) * u[j] / u[i];
      off += mt(i, j);
    }
    // Equal to M_ii - (M u*)_i / u*_i; summing the off-diagonal keeps M~ 1 = 0 exact.
    mt(i, i) = -off;
  }
  const Vector up = power(u, spec.p());
  const double kappa = inner_product(spec.c(), up, spec.measure());
  ReducedModel red{std::move(mt), kappa * spec.b(), up.cwiseProduct(spec.c()) / kappa, spec.measure(), spec.p(),
                   spec.origin()};
  return red;
}

/// The reduced model as a ModelSpec with r = b~, so that its equilibrium is 1.
inline ModelSpec as_model(const ReducedModel& red, const std::string& name = "reduced") {
  return ModelSpec(FellerMatrix(red.m_tilde, red.measure), red.b_tilde, red.b_tilde, red.c_tilde, red.p, name,
                   red.origin);
}

inline ValidationReport verify_reduced(const ReducedModel& red) {
  ValidationReport rep;
  if (red.m_tilde.rows() != red.m_tilde.cols() || red.m_tilde.rows() != red.measure.size() ||
      red.b_tilde.size() != red.measure.size() || red.c_tilde.size() != red.measure.size()) {
    rep.zero_row_sum = rep.irreducible = rep.essentially_nonnegative = rep.positive_coefficients = false;
    rep.messages.push_back("reduced model dimensions are inconsistent");
    return rep;
  }
  detail::check_generator(red.m_tilde, rep);
  if (!detail::all_positive(red.b_tilde) || !detail::all_positive(red.c_tilde)) {
    rep.positive_coefficients = false;
    rep.messages.push_back("reduced coefficients are not strictly positive");
  }
  const double mass = inner_product(Vector::Ones(red.n()), red.c_tilde, red.measure);
  rep.mass_normalized = std::abs(mass - 1.0) <= 1e-12;
  if (!rep.mass_normalized) rep.messages.push_back("(1|c~) = " + std::to_string(mass) + " differs from 1");
  rep.normality_defect = normality_defect(red.m_tilde, red.measure);
  return rep;
}

}  // namespace npdt
