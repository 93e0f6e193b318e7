#pragma once

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>

#include "npdt/operator.hpp"
#include "npdt/reduction.hpp"

namespace npdt {

enum class ConditionId { LAS1, LAS2, LAS3, GAS1, GAS2, GAS3, GAS4, SIGMA, ANGLE, CS };
enum class Holds { no, yes, heuristic };

constexpr std::string_view to_string(ConditionId id) {
  switch (id) {
    case ConditionId::LAS1: return "LAS1";
    case ConditionId::LAS2: return "LAS2";
    case ConditionId::LAS3: return "LAS3";
    case ConditionId::GAS1: return "GAS1";
    case ConditionId::GAS2: return "GAS2";
    case ConditionId::GAS3: return "GAS3";
    case ConditionId::GAS4: return "GAS4";
    case ConditionId::SIGMA: return "SIGMA";
    case ConditionId::ANGLE: return "ANGLE";
    case ConditionId::CS: return "CS";
  }
  return "?";
}

constexpr std::string_view to_string(Holds h) {
  switch (h) {
    case Holds::no: return "false";
    case Holds::yes: return "true";
    case Holds::heuristic: return "heuristic-true";
  }
  return "?";
}

struct ConditionCheck {
  explicit ConditionCheck(ConditionId which = ConditionId::LAS1) : id(which) {}

  ConditionId id;
  Holds holds = Holds::no;
  std::map<std::string, double> numeric_evidence;
  std::optional<Vector> witness;
  std::string note;

  [[nodiscard]] bool certified() const { return holds == Holds::yes; }
};

inline Holds holds_if(bool b) { return b ? Holds::yes : Holds::no; }

/// L = -M~ + p b~ (c~|.), the generator of the linearized reduced flow.
inline Matrix linearization(const ReducedModel& red) {
  const Vector wc = red.measure.weights().cwiseProduct(red.c_tilde);
  return -red.m_tilde + red.p * red.b_tilde * wc.transpose();
}

/// inf of (v| -(c~/b~) M~ v) over ||v|| = 1, (v|1) = 0; +inf for n = 1.
inline double spectral_gap_sigma2(const ReducedModel& red) {
  const Eigen::Index n = red.n();
  if (n <= 1) return std::numeric_limits<double>::infinity();
  const Vector& w = red.measure.weights();
  const Vector ratio = red.c_tilde.cwiseQuotient(red.b_tilde);
  // Quadratic form v^T G v with G = -W diag(c~/b~) M~, symmetrized, in the
  // orthonormal frame y = W^{1/2} v.
  const Vector wr = w.cwiseProduct(ratio);
  const Matrix g = -(wr.asDiagonal() * red.m_tilde);
  const Vector sw = w.cwiseSqrt();
  const Vector isw = sw.cwiseInverse();
  const Matrix t = isw.asDiagonal() * (0.5 * (g + g.transpose())) * isw.asDiagonal();
  // Householder reflector mapping e1 to -q, q = W^{1/2} 1 / |.|; its last
  // n - 1 columns span the complement of constants.
  const Vector q = sw / sw.norm();
  Vector u = q;
  u[0] += 1.0;
  const Matrix h = Matrix::Identity(n, n) - 2.0 * u * u.transpose() / u.squaredNorm();
  const Matrix basis = h.rightCols(n - 1);
  const Matrix projected = basis.transpose() * t * basis;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (projected + projected.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline ConditionCheck check_las1(const ReducedModel& red) {
  ConditionCheck out{ConditionId::LAS1};
  const double residual = norm2(adjoint(red.m_tilde, red.measure) * red.c_tilde, red.measure);
  const double scale = operator_norm(red.m_tilde, red.measure) * norm2(red.c_tilde, red.measure);
  out.numeric_evidence["residual"] = residual;
  out.numeric_evidence["scale"] = scale;
  out.holds = holds_if(residual <= 1e-9 * scale);
  return out;
}

inline ConditionCheck check_las2(const ReducedModel& red, std::optional<double> sigma2 = std::nullopt) {
  ConditionCheck out{ConditionId::LAS2};
  const Matrix k = red.c_tilde.cwiseQuotient(red.b_tilde).asDiagonal() * red.m_tilde;
  const Vector ones = Vector::Ones(red.n());
  const double residual = norm2(adjoint(k, red.measure) * ones, red.measure);
  const double knorm = operator_norm(k, red.measure);
  const double scale = knorm * norm2(ones, red.measure);
  const double s2 = sigma2 ? *sigma2 : spectral_gap_sigma2(red);
  const bool kernel_ok = residual <= 1e-9 * scale;
  const bool gap_ok = s2 > 1e-8 * std::max(knorm, std::numeric_limits<double>::min());
  out.numeric_evidence["residual"] = residual;
  out.numeric_evidence["scale"] = scale;
  out.numeric_evidence["sigma2"] = s2;
  out.numeric_evidence["kernel_clause"] = kernel_ok ? 1.0 : 0.0;
  out.numeric_evidence["gap_clause"] = gap_ok ? 1.0 : 0.0;
  out.holds = holds_if(kernel_ok && gap_ok);
  return out;
}

/// Every eigenvalue of -M~ in the cone Re >= |Im|.
inline ConditionCheck check_sigma_condition(const SpectrumReport& spec_of_minus_m_tilde) {
  ConditionCheck out{ConditionId::SIGMA};
  const double scale = spec_of_minus_m_tilde.spectral_radius();
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& z : spec_of_minus_m_tilde.eigenvalues) worst = std::max(worst, std::abs(z.imag()) - z.real());
  out.numeric_evidence["max_abs_im_minus_re"] = worst;
  out.numeric_evidence["scale"] = scale;
  out.holds = holds_if(worst <= 1e-9 * scale);
  return out;
}

/// (b|c) + |b|_1 |c|_1 / mu  >  sqrt((|b|_2^2 - |b|_1^2/mu)(|c|_2^2 - |c|_1^2/mu))
inline ConditionCheck check_angle_condition(const Vector& b, const Vector& c, const Measure& m) {
  ConditionCheck out{ConditionId::ANGLE};
  const double mu = m.total();
  const double b1 = norm1(b, m), c1 = norm1(c, m);
  const double b2 = inner_product(b, b, m), c2 = inner_product(c, c, m);
  const double lhs = inner_product(b, c, m) + b1 * c1 / mu;
  const double rhs = std::sqrt(std::max(b2 - b1 * b1 / mu, 0.0) * std::max(c2 - c1 * c1 / mu, 0.0));
  out.numeric_evidence["lhs"] = lhs;
  out.numeric_evidence["rhs"] = rhs;
  out.numeric_evidence["lhs_minus_rhs"] = lhs - rhs;
  out.holds = holds_if(lhs > rhs);
  return out;
}

inline ConditionCheck check_las3(const ReducedModel& red) {
  ConditionCheck out{ConditionId::LAS3};
  const double defect = normality_defect(-red.m_tilde, red.measure);
  const bool normal = defect <= 1e-9;
  const bool b_const = is_constant(red.b_tilde);
  const bool c_const = is_constant(red.c_tilde);
  const auto sigma = check_sigma_condition(spectrum(-red.m_tilde, false));
  const auto angle = check_angle_condition(red.b_tilde, red.c_tilde, red.measure);
  out.numeric_evidence["normality_defect"] = defect;
  out.numeric_evidence["b_constant"] = b_const ? 1.0 : 0.0;
  out.numeric_evidence["c_constant"] = c_const ? 1.0 : 0.0;
  out.numeric_evidence["sigma"] = sigma.certified() ? 1.0 : 0.0;
  out.numeric_evidence["angle_lhs_minus_rhs"] = angle.numeric_evidence.at("lhs_minus_rhs");
  out.numeric_evidence["compact_resolvent"] = 1.0;
  out.note = "compactness: automatic (finite dimension)";
  out.holds = holds_if(normal && (b_const || c_const || (sigma.certified() && angle.certified())));
  return out;
}

}  // namespace npdt
