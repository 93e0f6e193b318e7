#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <vector>

#include "npdt/errors.hpp"
#include "npdt/measure.hpp"

namespace npdt {

/// Generator matrix of a finite jump process together with its reference
/// measure. Construction only checks shapes; the structural properties
/// (Metzler, zero row sums, irreducibility) are reported by validation so
/// that malformed inputs can be diagnosed rather than rejected outright.
class FellerMatrix {
 public:
  FellerMatrix(Matrix entries, Measure measure) : entries_(std::move(entries)), measure_(std::move(measure)) {
    if (entries_.rows() != entries_.cols()) throw Error(ErrorKind::dimension, "generator matrix is not square");
    detail::require_same_size(static_cast<std::size_t>(entries_.rows()),
                              static_cast<std::size_t>(measure_.size()), "generator vs measure");
  }

  explicit FellerMatrix(Matrix entries) : FellerMatrix(entries, Measure::unit(entries.rows())) {}

  [[nodiscard]] Eigen::Index size() const noexcept { return entries_.rows(); }
  [[nodiscard]] const Matrix& entries() const noexcept { return entries_; }
  [[nodiscard]] const Measure& measure() const noexcept { return measure_; }

 private:
  Matrix entries_;
  Measure measure_;
};

// ---------------------------------------------------------------------------
// Structure checks
// ---------------------------------------------------------------------------

inline double infinity_norm(const Matrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Largest off-diagonal violation of the Metzler sign pattern (0 when none).
inline double metzler_violation(const Matrix& a) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (i != j) worst = std::max(worst, -a(i, j));
  return worst;
}

inline bool is_essentially_nonnegative(const Matrix& a) {
  return metzler_violation(a) <= 1e-12 * std::max(infinity_norm(a), 1.0);
}

/// ||A 1||_inf <= 1e-10 ||A||_inf, with 0 <= 0 accepted for A = 0.
inline bool has_zero_row_sums(const Matrix& a, double rel_tol = 1e-10) {
  const double defect = a.size() == 0 ? 0.0 : a.rowwise().sum().cwiseAbs().maxCoeff();
  return defect <= rel_tol * infinity_norm(a);
}

/// Strong connectivity of the digraph i -> j for A_ij > 0, i != j.
inline bool is_strongly_connected(const Matrix& a) {
  const Eigen::Index n = a.rows();
  if (n <= 1) return true;
  auto reach_all = [&](bool forward) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::queue<Eigen::Index> queue;
    queue.push(0);
    seen[0] = 1;
    Eigen::Index count = 1;
    while (!queue.empty()) {
      const Eigen::Index i = queue.front();
      queue.pop();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i || seen[static_cast<std::size_t>(j)]) continue;
        const double e = forward ? a(i, j) : a(j, i);
        if (e > 0.0) {
          seen[static_cast<std::size_t>(j)] = 1;
          ++count;
          queue.push(j);
        }
      }
    }
    return count == n;
  };
  return reach_all(true) && reach_all(false);
}

// ---------------------------------------------------------------------------
// L2(mu) geometry
// ---------------------------------------------------------------------------

namespace detail {

/// D A D^{-1} with D = diag(sqrt(w)): the unitary picture of A in L2(mu).
inline Matrix symmetric_frame(const Matrix& a, const Measure& m) {
  const Vector s = m.weights().cwiseSqrt();
  return s.asDiagonal() * a * s.cwiseInverse().asDiagonal();
}

inline void require_square_with(const Matrix& a, const Measure& m, const char* context) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::dimension, std::string(context) + ": matrix is not square");
  require_same_size(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(m.size()), context);
}

}  // namespace detail

/// L2(mu) adjoint: (A u|v) = (u|A* v), A*_ij = A_ji w_j / w_i.
inline Matrix adjoint(const Matrix& a, const Measure& m) {
  detail::require_square_with(a, m, "adjoint");
  const Vector& w = m.weights();
  return w.cwiseInverse().asDiagonal() * a.transpose() * w.asDiagonal();
}

/// Induced operator norm on L2(mu).
inline double operator_norm(const Matrix& a, const Measure& m) {
  detail::require_square_with(a, m, "operator_norm");
  if (a.size() == 0) return 0.0;
  const Matrix s = detail::symmetric_frame(a, m);
  if (s.rows() <= 64) return Eigen::JacobiSVD<Matrix>(s).singularValues()(0);
  return Eigen::BDCSVD<Matrix>(s).singularValues()(0);
}

inline double operator_norm(const Matrix& a) { return operator_norm(a, Measure::unit(a.rows())); }

/// ||A A* - A* A||_F / ||A||_F^2 in L2(mu); zero iff A is normal.
inline double normality_defect(const Matrix& a, const Measure& m) {
  detail::require_square_with(a, m, "normality_defect");
  const Matrix s = detail::symmetric_frame(a, m);
  const double scale = std::max(s.squaredNorm(), std::numeric_limits<double>::min());
  return (s * s.transpose() - s.transpose() * s).norm() / scale;
}

/// ||A - A*||_F / ||A||_F in L2(mu); zero iff A is self-adjoint.
inline double self_adjointness_defect(const Matrix& a, const Measure& m) {
  detail::require_square_with(a, m, "self_adjointness_defect");
  const Matrix s = detail::symmetric_frame(a, m);
  const double scale = std::max(s.norm(), std::numeric_limits<double>::min());
  return (s - s.transpose()).norm() / scale;
}

// ---------------------------------------------------------------------------
// Dense spectra
// ---------------------------------------------------------------------------

struct SpectrumReport {
  std::vector<Complex> eigenvalues;          // sorted by (Re, Im)
  std::vector<CVector> right_eigenvectors;   // unit 2-norm, same order
  double max_real_part = 0.0;
  double min_real_part = 0.0;
  /// min{Re lambda : Re lambda > tol}; +inf when no eigenvalue qualifies.
  double gap = std::numeric_limits<double>::infinity();
  double max_residual = 0.0;
  double matrix_norm = 0.0;

  [[nodiscard]] double spectral_radius() const {
    double r = 0.0;
    for (const auto& z : eigenvalues) r = std::max(r, std::abs(z));
    return r;
  }
};

namespace detail {
inline bool complex_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}
}  // namespace detail

/// All eigenvalues of a real square matrix via Hessenberg + shifted QR.
inline SpectrumReport spectrum(const Matrix& a, bool with_vectors = true) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::dimension, "spectrum: matrix is not square");
  SpectrumReport out;
  const Eigen::Index n = a.rows();
  if (n == 0) return out;

  Eigen::EigenSolver<Matrix> solver;
  solver.setMaxIterations(std::max<Eigen::Index>(40 * n, 400));
  solver.compute(a, with_vectors);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::numeric, "spectrum: QR iteration did not converge for a " + std::to_string(n) + "x" +
                                        std::to_string(n) + " matrix");
  }
  const CVector values = solver.eigenvalues();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return detail::complex_less(values[i], values[j]); });

  out.matrix_norm = n <= 400 ? operator_norm(a) : a.norm();
  CMatrix vectors;
  if (with_vectors) vectors = solver.eigenvectors();
  const CMatrix ac = a.cast<Complex>();
  for (auto idx : order) {
    out.eigenvalues.push_back(values[idx]);
    if (with_vectors) {
      CVector v = vectors.col(idx);
      const double nv = v.norm();
      if (nv > 0.0) v /= nv;
      const double res = (ac * v - values[idx] * v).norm();
      out.max_residual = std::max(out.max_residual, res);
      out.right_eigenvectors.push_back(std::move(v));
    }
  }
  out.max_real_part = -std::numeric_limits<double>::infinity();
  out.min_real_part = std::numeric_limits<double>::infinity();
  const double tol = 1e-8 * std::max(1.0, out.spectral_radius());
  for (const auto& z : out.eigenvalues) {
    out.max_real_part = std::max(out.max_real_part, z.real());
    out.min_real_part = std::min(out.min_real_part, z.real());
    if (z.real() > tol) out.gap = std::min(out.gap, z.real());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Resolvents
// ---------------------------------------------------------------------------

/// Solves (A - shift I) v = f. Throws a singularity error when the shift is
/// within 1e-10 (relative) of the spectrum, as estimated from the LU
/// reciprocal condition number.
inline CVector resolvent_solve(const Matrix& a, Complex shift, const CVector& f) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::dimension, "resolvent_solve: matrix is not square");
  detail::require_same_size(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(f.size()),
                            "resolvent_solve");
  const Eigen::Index n = a.rows();
  CMatrix shifted = a.cast<Complex>();
  shifted.diagonal().array() -= shift;
  Eigen::PartialPivLU<CMatrix> lu(shifted);
  const double norm1 = shifted.cwiseAbs().colwise().sum().maxCoeff();
  const double distance = lu.rcond() * norm1;
  const double scale = std::max(1.0, a.cwiseAbs().colwise().sum().maxCoeff());
  if (!(distance > 1e-10 * scale) || n == 0) {
    throw Error(ErrorKind::singularity, "resolvent_solve: shift (" + std::to_string(shift.real()) + ", " +
                                            std::to_string(shift.imag()) + ") is at or near an eigenvalue");
  }
  CVector v = lu.solve(f);
  return v;
}

inline Vector resolvent_solve(const Matrix& a, double shift, const Vector& f) {
  return resolvent_solve(a, Complex(shift, 0.0), f.cast<Complex>()).real();
}

/// Repeated resolvent solves at many complex shifts in O(n^2) each, through
/// a one-time orthogonal reduction A = Q H Q^T to upper Hessenberg form.
class HessenbergResolvent {
 public:
  explicit HessenbergResolvent(const Matrix& a) {
    if (a.rows() != a.cols()) throw Error(ErrorKind::dimension, "HessenbergResolvent: matrix is not square");
    Eigen::HessenbergDecomposition<Matrix> hd(a);
    h_ = hd.matrixH();
    q_ = hd.matrixQ();
    scale_ = std::max(1.0, infinity_norm(a));
  }

  /// Q^T x, for projecting right-hand sides once.
  [[nodiscard]] CVector to_frame(const CVector& x) const { return q_.transpose().cast<Complex>() * x; }
  [[nodiscard]] CVector from_frame(const CVector& y) const { return q_.cast<Complex>() * y; }

  /// LU factors of H - shift I with adjacent-row pivoting.
  struct Factor {
    CMatrix upper;
    std::vector<char> swapped;
    CVector multiplier;
    bool ok = true;

    /// Solves (H - shift I) y = g in the Hessenberg frame.
    [[nodiscard]] CVector solve(const CVector& g) const {
      const Eigen::Index n = upper.rows();
      CVector y = g;
      for (Eigen::Index k = 0; k + 1 < n; ++k) {
        if (swapped[static_cast<std::size_t>(k)]) std::swap(y[k], y[k + 1]);
        y[k + 1] -= multiplier[k] * y[k];
      }
      for (Eigen::Index k = n - 1; k >= 0; --k) {
        Complex s = y[k];
        for (Eigen::Index j = k + 1; j < n; ++j) s -= upper(k, j) * y[j];
        y[k] = s / upper(k, k);
      }
      return y;
    }
  };

  /// ok is false when a pivot underflows relative to the matrix scale.
  [[nodiscard]] Factor factor(Complex shift) const {
    const Eigen::Index n = h_.rows();
    Factor f;
    f.upper = h_.cast<Complex>();
    f.upper.diagonal().array() -= shift;
    f.swapped.assign(static_cast<std::size_t>(std::max<Eigen::Index>(n, 1)), 0);
    f.multiplier = CVector::Zero(std::max<Eigen::Index>(n, 1));
    CMatrix& t = f.upper;
    const double tiny = 1e-15 * (scale_ + std::abs(shift));
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
      if (std::abs(t(k + 1, k)) > std::abs(t(k, k))) {
        t.row(k).tail(n - k).swap(t.row(k + 1).tail(n - k));
        f.swapped[static_cast<std::size_t>(k)] = 1;
      }
      if (std::abs(t(k, k)) <= tiny) {
        f.ok = false;
        return f;
      }
      const Complex m = t(k + 1, k) / t(k, k);
      f.multiplier[k] = m;
      if (m != Complex(0.0)) t.row(k + 1).tail(n - k) -= m * t.row(k).tail(n - k);
    }
    if (n > 0 && std::abs(t(n - 1, n - 1)) <= tiny) f.ok = false;
    return f;
  }

 private:
  Matrix h_;
  Matrix q_;
  double scale_ = 1.0;
};

// ---------------------------------------------------------------------------
// Principal eigenpair
// ---------------------------------------------------------------------------

struct PrincipalEigenpair {
  double lambda1 = 0.0;
  Vector eigvec;  // strictly positive, ||.||_{L2(mu)} = 1
  int iterations = 0;
};

/// Eigenvalue of minimal real part of a Z-matrix A (off-diagonals <= 0 with
/// sI - A irreducible) and its positive eigenvector, by power iteration on
/// sI - A with s = 2 max|A_ii| + 1, followed by two steps of inverse
/// iteration to remove the slow-convergence tail.
inline PrincipalEigenpair principal_eigenpair(const Matrix& a, const Measure& m, double tol = 1e-12,
                                              int max_iterations = 100000) {
  detail::require_square_with(a, m, "principal_eigenpair");
  const Eigen::Index n = a.rows();
  const double scale = std::max(infinity_norm(a), 1.0);
  if (metzler_violation(-a) > 1e-12 * scale) {
    throw Error(ErrorKind::structural, "principal_eigenpair: positive off-diagonal entry in a Z-matrix argument");
  }
  PrincipalEigenpair out;
  if (n == 1) {
    out.lambda1 = a(0, 0);
    out.eigvec = Vector::Constant(1, 1.0 / std::sqrt(m.weights()[0]));
    return out;
  }

  const double shift = 2.0 * a.diagonal().cwiseAbs().maxCoeff() + 1.0;
  Matrix b = -a;
  b.diagonal().array() += shift;

  Vector x = Vector::Ones(n);
  x /= norm2(x, m);
  double mu = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  int it = 0;
  for (; it < max_iterations; ++it) {
    const Vector y = b * x;
    const double next = inner_product(x, y, m);
    const double ny = norm2(y, m);
    if (!(ny > 0.0) || !std::isfinite(ny)) break;
    x = y / ny;
    if (std::abs(next - mu) <= tol * std::max(1.0, std::abs(next))) {
      mu = next;
      converged = true;
      break;
    }
    mu = next;
  }
  if (!converged) {
    throw Error(ErrorKind::numeric,
                "principal_eigenpair: power iteration did not converge in " + std::to_string(max_iterations) + " steps");
  }
  double lambda = shift - mu;

  // Inverse iteration slightly to the left of the estimate.
  const double offset = 1e-9 * scale;
  for (int k = 0; k < 2; ++k) {
    Matrix shifted = a;
    shifted.diagonal().array() -= (lambda - offset);
    Eigen::PartialPivLU<Matrix> lu(shifted);
    Vector z = lu.solve(x);
    const double nz = norm2(z, m);
    if (!(nz > 0.0) || !std::isfinite(nz)) break;
    x = z / nz;
    lambda = inner_product(x, a * x, m);
  }
  if (x.sum() < 0.0) x = -x;

  const double residual = norm2(a * x - lambda * x, m);
  if (!(residual <= 1e-8 * scale)) {
    throw Error(ErrorKind::numeric, "principal_eigenpair: residual " + std::to_string(residual) + " too large");
  }
  // Reducible blocks leave components at roundoff level after inverse iteration.
  if (!(x.minCoeff() > 1e-14 * x.maxCoeff())) {
    throw Error(ErrorKind::structural, "principal_eigenpair: eigenvector has a vanishing component "
                                       "(irreducibility violated)");
  }
  out.lambda1 = lambda;
  out.eigvec = x;
  out.iterations = it + 1;
  return out;
}

}  // namespace npdt
