#pragma once

// Abnormal component analysis: a sequence of orthonormal directions, each
// the depth-minimizing direction of the least deep observation within the
// orthogonal complement of the directions already found.

#include "aca/depth.hpp"
#include "aca/robust_stats.hpp"
#include "aca/subspace.hpp"
#include "aca/types.hpp"

#include <cstdint>
#include <vector>

namespace aca {

template <typename Scalar>
struct AcaModel {
  Index ambient_dim = 0;
  /// d x p, column i is the i-th abnormal component.
  Matrix<Scalar> components;
  /// Depth of the anchor row along each component when it was extracted.
  Vector<Scalar> min_depths;
  /// Index of the least deep row for each component.
  std::vector<Index> anchor_rows;
  DepthNotion notion = DepthNotion::projection;
  OptimizerConfig config;

  Index size() const { return components.cols(); }
};

/// u or -u, whichever puts `anchor` on or above the median projection.
template <typename Scalar>
Vector<Scalar> orient(const Vector<Scalar>& u, const Vector<Scalar>& anchor, const Matrix<Scalar>& data) {
  Vector<Scalar> proj = data * u;
  const Scalar med = median<Scalar>(std::span<const Scalar>(proj.data(), proj.size()));
  if (anchor.dot(u) < med) return -u;
  return u;
}

/// Extracts `p` abnormal components of `data`.
///
/// Component i (0-based) searches all rows with seed derive_seed(seed, i), so
/// a fit is reproducible bit for bit and independent of thread scheduling.
template <typename Scalar>
AcaModel<Scalar> fit(const Matrix<Scalar>& data, Index p, DepthNotion notion, const OptimizerConfig& cfg) {
  cfg.validate();
  const Index d = data.cols();
  if (data.rows() < 2) throw InvalidInput("fit: need at least 2 observations");
  if (p < 1 || p > d) throw InvalidInput("fit: number of components must lie in [1, d]");
  if (!all_finite(data)) throw InvalidInput("fit: data contains non-finite values");

  AcaModel<Scalar> model;
  model.ambient_dim = d;
  model.notion = notion;
  model.config = cfg;
  model.components.resize(d, 0);
  model.min_depths.resize(p);
  model.anchor_rows.reserve(static_cast<std::size_t>(p));

  Matrix<Scalar> basis = Matrix<Scalar>::Identity(d, d);
  for (Index i = 0; i < p; ++i) {
    OptimizerConfig step_cfg = cfg;
    step_cfg.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
    auto [anchor, result] = min_depth_over_dataset(data, basis, notion, step_cfg);

    const Vector<Scalar> anchor_row = data.row(anchor).transpose();
    Vector<Scalar> u = orient(result.direction, anchor_row, data);
    // Orientation never changes a projection depth value; an asymmetric depth
    // is recomputed along the kept sign.
    const Scalar depth = notion == DepthNotion::projection ? result.depth
                                                           : projected_depth(notion, anchor_row, data, u);

    model.components.conservativeResize(d, i + 1);
    model.components.col(i) = u;
    if (gram_deviation(model.components) > Scalar(1e-10)) {
      model.components = reorthonormalize<Scalar>(model.components);
    }
    model.min_depths[i] = depth;
    model.anchor_rows.push_back(anchor);
    if (i + 1 < p) basis = orthonormal_complement(model.components, d);
  }
  return model;
}

/// Scores of each row on each component: data · A.
template <typename Scalar>
Matrix<Scalar> transform(const AcaModel<Scalar>& model, const Matrix<Scalar>& data) {
  if (data.cols() != model.ambient_dim) {
    throw InvalidInput("transform: data has " + std::to_string(data.cols()) + " columns, model expects " +
                       std::to_string(model.ambient_dim));
  }
  return data * model.components;
}

}  // namespace aca
