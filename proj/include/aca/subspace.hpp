#pragma once

// Orthonormal bases of search subspaces: completion to a complement, lifting
// coefficient vectors back to the ambient space, and uniform sampling on
// spheres and spherical caps.

#include "aca/types.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace aca {

/// Largest entry of |Q'Q - I|.
template <typename Derived>
typename Derived::Scalar gram_deviation(const Eigen::MatrixBase<Derived>& q) {
  using Scalar = typename Derived::Scalar;
  if (q.cols() == 0) return Scalar(0);
  const Matrix<Scalar> gram = q.transpose() * q;
  return (gram - Matrix<Scalar>::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

/// Modified Gram-Schmidt with a second pass, column order preserved.
template <typename Scalar>
Matrix<Scalar> reorthonormalize(Matrix<Scalar> q) {
  for (Index j = 0; j < q.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
    }
    const Scalar norm = q.col(j).norm();
    if (!(norm > Scalar(0))) throw NumericFailure("reorthonormalize: rank-deficient column set");
    q.col(j) /= norm;
  }
  return q;
}

/// Columns spanning the orthogonal complement of span(found) in R^ambient_dim.
///
/// Greedy completion of [found | I]: at each step the unit vector e_k whose
/// residual after projecting out the current set is largest (lowest k on ties)
/// is orthogonalized and appended. `found` must already be orthonormal.
template <typename Derived>
Matrix<typename Derived::Scalar> orthonormal_complement(const Eigen::MatrixBase<Derived>& found,
                                                        Index ambient_dim) {
  using Scalar = typename Derived::Scalar;
  if (found.rows() != ambient_dim && found.cols() > 0) {
    throw InvalidInput("orthonormal_complement: basis has wrong ambient dimension");
  }
  if (found.cols() > ambient_dim) {
    throw InvalidInput("orthonormal_complement: more columns than ambient dimension");
  }
  const Index rank = found.cols();
  const Index out_cols = ambient_dim - rank;
  Matrix<Scalar> q(ambient_dim, ambient_dim);
  if (rank > 0) q.leftCols(rank) = found;
  Index filled = rank;

  // residual[k] = e_k minus its projection on the first `filled` columns.
  Matrix<Scalar> residual = Matrix<Scalar>::Identity(ambient_dim, ambient_dim);
  auto deflate = [&](Index col) {
    for (int pass = 0; pass < 2; ++pass) {
      const Vector<Scalar> coef = residual.transpose() * q.col(col);
      residual -= q.col(col) * coef.transpose();
    }
  };
  for (Index c = 0; c < rank; ++c) deflate(c);

  while (filled < ambient_dim) {
    Index best = 0;
    Scalar best_norm = Scalar(-1);
    for (Index k = 0; k < ambient_dim; ++k) {
      const Scalar nk = residual.col(k).norm();
      if (nk > best_norm) {
        best_norm = nk;
        best = k;
      }
    }
    if (!(best_norm > Scalar(0))) throw NumericFailure("orthonormal_complement: degenerate basis");
    Vector<Scalar> v = residual.col(best);
    for (int pass = 0; pass < 2; ++pass) v -= q.leftCols(filled) * (q.leftCols(filled).transpose() * v);
    q.col(filled) = v.normalized();
    deflate(filled);
    ++filled;
  }
  return q.rightCols(out_cols);
}

/// B·coeffs. Unit-norm whenever B is orthonormal and coeffs is unit-norm.
template <typename DerivedC, typename DerivedB>
Vector<typename DerivedB::Scalar> lift(const Eigen::MatrixBase<DerivedC>& coeffs,
                                       const Eigen::MatrixBase<DerivedB>& basis) {
  if (basis.cols() == 0) throw InvalidInput("lift: empty basis");
  if (coeffs.size() != basis.cols()) throw InvalidInput("lift: coefficient length differs from basis rank");
  return basis * coeffs;
}

/// Uniform draw on S^{r-1} (normalized isotropic Gaussian).
template <typename Scalar, typename Rng>
Vector<Scalar> random_unit(Index r, Rng& rng) {
  if (r < 1) throw InvalidInput("random_unit: dimension must be >= 1");
  std::normal_distribution<Scalar> gauss(Scalar(0), Scalar(1));
  Vector<Scalar> v(r);
  Scalar norm = 0;
  do {
    for (Index i = 0; i < r; ++i) v[i] = gauss(rng);
    norm = v.norm();
  } while (!(norm > Scalar(1e-300)));
  return v / norm;
}

/// Geodesic from `from` towards `to`, travelling `scale` times their angle.
/// Both inputs are unit vectors; scale < 0 walks away from `to`.
template <typename Scalar>
Vector<Scalar> geodesic_step(const Vector<Scalar>& from, const Vector<Scalar>& to, Scalar scale) {
  const Scalar c = std::clamp(from.dot(to), Scalar(-1), Scalar(1));
  Vector<Scalar> tangent = to - c * from;
  const Scalar tn = tangent.norm();
  if (!(tn > Scalar(1e-14))) return from;
  tangent /= tn;
  const Scalar theta = scale * std::acos(c);
  Vector<Scalar> out = std::cos(theta) * from + std::sin(theta) * tangent;
  return out / out.norm();
}

/// Uniform draw from the spherical cap {v : angle(v, center) <= radius} on
/// S^{r-1}. A radius of pi or more covers the whole sphere.
template <typename Scalar, typename Rng>
Vector<Scalar> random_in_cap(const Vector<Scalar>& center, Scalar radius, Rng& rng) {
  const Index r = center.size();
  if (radius >= std::numbers::pi_v<Scalar>) return random_unit<Scalar>(r, rng);
  std::uniform_real_distribution<Scalar> unif(Scalar(0), Scalar(1));
  if (r == 1) return center;
  // Polar angle has density proportional to sin^{r-2}(theta) on [0, radius].
  Scalar theta = 0;
  if (r == 2) {
    theta = radius * unif(rng);
  } else {
    const Scalar peak = radius < std::numbers::pi_v<Scalar> / 2 ? std::sin(radius) : Scalar(1);
    while (true) {
      theta = radius * unif(rng);
      const Scalar accept = std::pow(std::sin(theta) / peak, Scalar(r - 2));
      if (unif(rng) <= accept) break;
    }
  }
  Vector<Scalar> tangent = random_unit<Scalar>(r, rng);
  tangent -= tangent.dot(center) * center;
  Scalar tn = tangent.norm();
  while (!(tn > Scalar(1e-12))) {
    tangent = random_unit<Scalar>(r, rng);
    tangent -= tangent.dot(center) * center;
    tn = tangent.norm();
  }
  tangent /= tn;
  Vector<Scalar> out = std::cos(theta) * center + std::sin(theta) * tangent;
  return out / out.norm();
}

}  // namespace aca
