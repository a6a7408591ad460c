#pragma once

// Variable-level explanations: loadings of a component, the AC1 importance
// ranking, and per-variable (cell) anomaly scores of a single point.

#include "aca/aca.hpp"
#include "aca/depth.hpp"
#include "aca/types.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace aca {

template <typename Scalar>
struct Loading {
  Index variable;
  Scalar loading;
  Scalar share;
};

template <typename Scalar>
struct LoadingReport {
  Index component_index;  // 0-based
  std::vector<Loading<Scalar>> entries;
};

namespace detail {

/// Indices sorted by decreasing |v|, lower index first on ties.
template <typename Scalar>
std::vector<Index> order_by_magnitude(const Vector<Scalar>& v) {
  std::vector<Index> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(v[a]) > std::abs(v[b]); });
  return order;
}

}  // namespace detail

/// Loadings of component `i` (0-based) sorted by decreasing magnitude, with
/// each variable's share of the total absolute loading.
template <typename Scalar>
LoadingReport<Scalar> component_loadings(const AcaModel<Scalar>& model, Index i) {
  if (i < 0 || i >= model.size()) throw InvalidInput("component_loadings: component index out of range");
  const Vector<Scalar> u = model.components.col(i);
  const Scalar total = u.cwiseAbs().sum();
  LoadingReport<Scalar> report{i, {}};
  for (Index v : detail::order_by_magnitude(u)) {
    report.entries.push_back({v, u[v], total > 0 ? std::abs(u[v]) / total : Scalar(0)});
  }
  return report;
}

/// Variables ranked by |AC1 loading|, most important first (0-based indices).
template <typename Scalar>
std::vector<Index> variable_importance(const AcaModel<Scalar>& model) {
  if (model.size() < 1) throw InvalidInput("variable_importance: model has no components");
  return detail::order_by_magnitude<Scalar>(model.components.col(0));
}

template <typename Scalar>
struct CellScores {
  Vector<Scalar> scores;
  /// Minimizing direction of the projection depth.
  Vector<Scalar> direction;
  /// Asymmetric projection depth of the point.
  Scalar apd = Scalar(1);
};

/// Per-variable anomaly score |u_pd[i]| * (1 / D_apd(y) - 1), where u_pd
/// minimizes the projection depth of y and D_apd is its asymmetric projection
/// depth, both searched over the full space.
template <typename Scalar>
CellScores<Scalar> cell_scores(const Vector<Scalar>& y, const Matrix<Scalar>& data, const OptimizerConfig& cfg) {
  if (data.cols() < 1) throw InvalidInput("cell_scores: data has no variables");
  const Index d = data.cols();
  const Matrix<Scalar> full = Matrix<Scalar>::Identity(d, d);
  const DepthResult<Scalar> pd = proj_depth(y, data, full, DepthNotion::projection, cfg);
  const DepthResult<Scalar> apd = proj_depth(y, data, full, DepthNotion::asymmetric_projection, cfg);
  if (apd.depth <= Scalar(0)) {
    throw NumericFailure("cell_scores: asymmetric depth is 0 (no spread above the median along the minimizing direction)");
  }
  CellScores<Scalar> out;
  out.direction = pd.direction;
  out.apd = apd.depth;
  const Scalar factor = apd.depth >= Scalar(1) ? Scalar(0) : Scalar(1) / apd.depth - Scalar(1);
  out.scores = pd.direction.cwiseAbs() * factor;
  return out;
}

}  // namespace aca
