#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>

#include "npdt/errors.hpp"

namespace npdt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Discrete reference measure: positive weights w_i attached to the nodes.
///
/// Matrix models use unit weights (counting measure); grid models carry the
/// quadrature weights of the discretization.
class Measure {
 public:
  explicit Measure(Vector weights) : weights_(std::move(weights)) {
    if (weights_.size() == 0) throw Error(ErrorKind::dimension, "measure needs at least one node");
    for (Eigen::Index i = 0; i < weights_.size(); ++i) {
      if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) {
        throw Error(ErrorKind::domain, "measure weight " + std::to_string(i) + " is not strictly positive");
      }
    }
    total_ = weights_.sum();
  }

  static Measure unit(Eigen::Index n) { return Measure(Vector::Ones(n)); }

  [[nodiscard]] Eigen::Index size() const noexcept { return weights_.size(); }
  [[nodiscard]] const Vector& weights() const noexcept { return weights_; }
  /// mu(Omega)
  [[nodiscard]] double total() const noexcept { return total_; }
  [[nodiscard]] bool is_unit() const { return (weights_.array() == 1.0).all(); }

  friend bool operator==(const Measure& a, const Measure& b) { return a.weights_ == b.weights_; }

 private:
  Vector weights_;
  double total_ = 0.0;
};

/// (u|v) = sum_i w_i u_i v_i
inline double inner_product(const Vector& u, const Vector& v, const Measure& m) {
  detail::require_same_size(static_cast<std::size_t>(u.size()), static_cast<std::size_t>(v.size()),
                            "inner_product");
  detail::require_same_size(static_cast<std::size_t>(u.size()), static_cast<std::size_t>(m.size()),
                            "inner_product");
  return (m.weights().array() * u.array() * v.array()).sum();
}

/// Complex L2(mu) product, antilinear in the first slot.
inline Complex inner_product(const CVector& u, const CVector& v, const Measure& m) {
  detail::require_same_size(static_cast<std::size_t>(u.size()), static_cast<std::size_t>(v.size()),
                            "inner_product");
  detail::require_same_size(static_cast<std::size_t>(u.size()), static_cast<std::size_t>(m.size()),
                            "inner_product");
  Complex s = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) s += m.weights()[i] * std::conj(u[i]) * v[i];
  return s;
}

inline double norm1(const Vector& u, const Measure& m) {
  detail::require_same_size(static_cast<std::size_t>(u.size()), static_cast<std::size_t>(m.size()), "norm1");
  return (m.weights().array() * u.array().abs()).sum();
}

inline double norm2(const Vector& u, const Measure& m) { return std::sqrt(inner_product(u, u, m)); }

inline double norm_inf(const Vector& u) { return u.size() == 0 ? 0.0 : u.cwiseAbs().maxCoeff(); }

/// Componentwise x^p, sign-extended so that tiny negative roundoff stays finite.
/// Integer exponents use exact powers.
inline double signed_power(double x, double p) {
  if (p == std::floor(p) && std::abs(p) < 64) return std::pow(x, static_cast<int>(p));
  if (x > 0.0) return std::exp(p * std::log(x));
  if (x < 0.0) return -std::exp(p * std::log(-x));
  return 0.0;
}

inline Vector power(const Vector& u, double p) {
  Vector out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = signed_power(u[i], p);
  return out;
}

/// max - min <= 1e-12 * max|.|
inline bool is_constant(const Vector& v, double rel_tol = 1e-12) {
  if (v.size() <= 1) return true;
  const double spread = v.maxCoeff() - v.minCoeff();
  return spread <= rel_tol * v.cwiseAbs().maxCoeff();
}

}  // namespace npdt
