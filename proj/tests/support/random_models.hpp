#pragma once
// Random model generators with a prescribed reduced structure. Each builds
// (M~, b~, c~) first, then maps back to original coordinates through a
// random positive equilibrium u*, so the pipeline has a known answer.

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "npdt/npdt.hpp"

namespace gen {

using npdt::Matrix;
using npdt::Measure;
using npdt::ModelSpec;
using npdt::Vector;

struct Rng {
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  std::mt19937_64 eng;
  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }
  Vector positive(Eigen::Index n, double lo = 0.2, double hi = 2.0) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }
};

inline void fix_diagonal(Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (j != i) off += m(i, j);
    m(i, i) = -off;
  }
}

/// Irreducible Feller matrix: a random cycle plus random extra edges.
inline Matrix feller(Rng& rng, Eigen::Index n, double density = 0.7) {
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && rng.uniform() < density) m(i, j) = rng.uniform(0.05, 1.5);
  for (Eigen::Index i = 0; i < n && n > 1; ++i) m(i, (i + 1) % n) = std::max(m(i, (i + 1) % n), rng.uniform(0.1, 1.0));
  fix_diagonal(m);
  return m;
}

/// Symmetric irreducible Feller matrix (self-adjoint for unit weights).
inline Matrix symmetric_feller(Rng& rng, Eigen::Index n) {
  Matrix a = feller(rng, n);
  a.diagonal().setZero();
  Matrix s = a + a.transpose();
  fix_diagonal(s);
  return s;
}

/// Zero row and column sums: positive combination of (P - I) over
/// permutations, including the full cycle.
inline Matrix doubly_stochastic_generator(Rng& rng, Eigen::Index n) {
  Matrix s = Matrix::Zero(n, n);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  for (int k = 0; k < 3; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = (i + 1) % n;
    if (k > 0) std::shuffle(perm.begin(), perm.end(), rng.eng);
    const double a = rng.uniform(0.2, 1.5);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index j = perm[static_cast<std::size_t>(i)];
      if (j != i) {
        s(i, j) += a;
        s(i, i) -= a;
      }
    }
  }
  return s;
}

/// Circulant Feller matrix (normal, generally not symmetric).
inline Matrix circulant(Rng& rng, Eigen::Index n) {
  Vector row = Vector::Zero(n);
  for (Eigen::Index k = 1; k < n; ++k) row[k] = rng.uniform() < 0.7 || k == 1 ? rng.uniform(0.05, 1.5) : 0.0;
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = row[(j - i + n) % n];
  fix_diagonal(m);
  return m;
}

/// Stationary density pi > 0 with M^T pi = 0, sum pi = 1.
inline Vector left_null(const Matrix& m) {
  const auto pair = npdt::principal_eigenpair(-m.transpose(), Measure::unit(m.rows()));
  return pair.eigvec / pair.eigvec.sum();
}

/// Normalize c~ so that (c~|1) = 1.
inline Vector normalized(const Vector& c, const Measure& mu) { return c / npdt::norm1(c, mu); }

/// Original-coordinate model whose equilibrium is u_star and whose reduction
/// is (mt, bt, ct). Returns nullopt when the implied r is not positive.
inline std::optional<ModelSpec> from_reduced(const Matrix& mt, const Vector& bt, const Vector& ct, double p,
                                             const Measure& mu, const Vector& u_star, double kappa,
                                             npdt::Origin origin = npdt::Origin::matrix) {
  const Eigen::Index n = mt.rows();
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) m(i, j) = mt(i, j) * u_star[i] / u_star[j];
  fix_diagonal(m);
  const Vector b = bt / kappa;
  const Vector c = kappa * ct.cwiseQuotient(npdt::power(u_star, p));
  const Vector r = bt - (m * u_star).cwiseQuotient(u_star);
  if (!(r.minCoeff() > 1e-3 * r.cwiseAbs().maxCoeff())) return std::nullopt;
  return ModelSpec(npdt::FellerMatrix(m, mu), r, b, c, p, "random", origin);
}

/// Reduced data plus a random equilibrium; retries the equilibrium until r > 0,
/// falling back to u* = 1 (always admissible since r = b~ there).
inline ModelSpec embed(Rng& rng, const Matrix& mt, const Vector& bt, const Vector& ct, double p, const Measure& mu,
                       npdt::Origin origin = npdt::Origin::matrix, double spread = 0.3) {
  const double kappa = rng.uniform(0.5, 2.0);
  for (int attempt = 0; attempt < 20; ++attempt) {
    Vector u(mt.rows());
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = std::exp(spread * rng.uniform(-1.0, 1.0));
    if (auto s = from_reduced(mt, bt, ct, p, mu, u, kappa, origin)) return *s;
  }
  return *from_reduced(mt, bt, ct, p, mu, Vector::Ones(mt.rows()), kappa, origin);
}

inline double random_p(Rng& rng) { return static_cast<double>(rng.integer(1, 3)); }

// --- structured families -----------------------------------------------------

inline ModelSpec generic(Rng& rng, Eigen::Index n, double p) {
  const Measure mu = Measure::unit(n);
  return embed(rng, feller(rng, n), rng.positive(n), normalized(rng.positive(n), mu), p, mu);
}

/// c~ in ker(M~*).
inline ModelSpec las1(Rng& rng, Eigen::Index n, double p) {
  const Measure mu = Measure::unit(n);
  const Matrix mt = feller(rng, n);
  return embed(rng, mt, rng.positive(n), normalized(left_null(mt), mu), p, mu);
}

/// (c~/b~) M~ has 1 in the kernel of its adjoint.
inline ModelSpec las2(Rng& rng, Eigen::Index n, double p) {
  const Measure mu = Measure::unit(n);
  const Vector bt = rng.positive(n);
  const Vector ct = normalized(rng.positive(n), mu);
  const Matrix s = rng.uniform() < 0.5 ? doubly_stochastic_generator(rng, n) : symmetric_feller(rng, n);
  const Matrix mt = bt.cwiseQuotient(ct).asDiagonal() * s;
  return embed(rng, mt, bt, ct, p, mu);
}

/// Normal M~ with constant b~ or constant c~.
inline ModelSpec las3(Rng& rng, Eigen::Index n, double p) {
  const Measure mu = Measure::unit(n);
  const Matrix mt = rng.uniform() < 0.5 ? circulant(rng, n) : symmetric_feller(rng, n);
  Vector bt = rng.positive(n);
  Vector ct = normalized(rng.positive(n), mu);
  if (rng.uniform() < 0.5)
    bt = Vector::Constant(n, rng.uniform(0.2, 2.0));
  else
    ct = Vector::Constant(n, 1.0 / mu.total());
  return embed(rng, mt, bt, ct, p, mu);
}

/// p = 1, b~ constant, c~ in ker(M~*).
inline ModelSpec gas1(Rng& rng, Eigen::Index n) {
  const Measure mu = Measure::unit(n);
  const Matrix mt = feller(rng, n);
  return embed(rng, mt, Vector::Constant(n, rng.uniform(0.3, 2.0)), normalized(left_null(mt), mu), 1.0, mu);
}

/// b~ constant, M~ normal (matrix origin, any p).
inline ModelSpec gas3(Rng& rng, Eigen::Index n, double p) {
  const Measure mu = Measure::unit(n);
  const Matrix mt = rng.uniform() < 0.5 ? circulant(rng, n) : symmetric_feller(rng, n);
  return embed(rng, mt, Vector::Constant(n, rng.uniform(0.3, 2.0)), normalized(rng.positive(n), mu), p, mu);
}

/// p = 2, (c~/b~) M~ self-adjoint in L2(mu).
inline ModelSpec gas4(Rng& rng, Eigen::Index n) {
  const Measure mu = Measure::unit(n);
  const Vector bt = rng.positive(n);
  const Vector ct = normalized(rng.positive(n), mu);
  const Matrix mt = bt.cwiseQuotient(ct).asDiagonal() * symmetric_feller(rng, n);
  return embed(rng, mt, bt, ct, 2.0, mu);
}

// --- grid-origin models ----------------------------------------------------------

inline npdt::FellerMatrix grid_symmetric(Rng& rng, Eigen::Index n) {
  npdt::KernelSpec k;
  k.kind = npdt::KernelKind::gaussian;
  k.params["sigma"] = rng.uniform(0.1, 0.5);
  k.params["height"] = rng.uniform(0.5, 3.0);
  return npdt::build_nonlocal_diffusion({0.0, 1.0, n}, k);
}

inline npdt::FellerMatrix grid_table(Rng& rng, Eigen::Index n) {
  npdt::KernelSpec k;
  k.kind = npdt::KernelKind::table;
  k.symmetric = false;
  k.table = Matrix(n, n);
  const npdt::GridSpec g{0.0, 1.0, n};
  const Vector x = g.nodes();
  const double sigma = rng.uniform(0.1, 0.4);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = x[i] - x[j];
      k.table(i, j) = (1.0 + 0.8 * std::sin(3.0 * x[j] + rng.uniform())) * std::exp(-d * d / (2 * sigma * sigma));
    }
  return npdt::build_nonlocal_diffusion(g, k);
}

inline Vector smooth_positive(Rng& rng, Eigen::Index n, double lo = 0.3) {
  const Vector x = npdt::GridSpec{0.0, 1.0, n}.nodes();
  const double a = rng.uniform(0.5, 4.0), ph = rng.uniform(0.0, 6.28), amp = rng.uniform(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = lo + amp * (1.0 + std::sin(a * x[i] + ph));
  return v;
}

/// Grid model of a given reduced type: 0 generic, 1 LAS1, 2 LAS2/GAS4, 3 LAS3/GAS3.
inline ModelSpec grid_model(Rng& rng, Eigen::Index n, double p, int kind) {
  const npdt::FellerMatrix sym = grid_symmetric(rng, n);
  const Measure& mu = sym.measure();
  Vector bt = smooth_positive(rng, n);
  Vector ct = normalized(smooth_positive(rng, n), mu);
  Matrix mt = sym.entries();
  switch (kind) {
    case 0: mt = grid_table(rng, n).entries(); break;
    case 1: {
      mt = grid_table(rng, n).entries();
      const Vector pi = left_null(mt);
      ct = normalized(pi.cwiseQuotient(mu.weights()), mu);
      break;
    }
    case 2: mt = bt.cwiseQuotient(ct).asDiagonal() * sym.entries(); break;
    default: bt = Vector::Constant(n, rng.uniform(0.3, 2.0)); break;
  }
  return embed(rng, mt, bt, ct, p, mu, npdt::Origin::grid, 0.1);
}

}  // namespace gen
