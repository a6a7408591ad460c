#pragma once

// PCA baseline and the alignment / detection metrics used in benchmarks.

#include "aca/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace aca {

struct ComponentSet {
  /// d x m, columns ordered by decreasing importance.
  MatrixXd components;
  std::string method_tag;
};

/// Leading `m` eigenvectors of the sample covariance, by decreasing
/// eigenvalue, each with its largest-magnitude coordinate positive.
ComponentSet pca_components(const MatrixXd& data, Index m);

/// Sigma^{-1} center, normalized.
VectorXd oracle_direction(const MatrixXd& cov, const VectorXd& center);

struct Alignment {
  Index index = 0;     // 0-based index of the best-aligned component
  double angle = 0.0;  // radians in [0, pi/2]
};

/// Component with the smallest unsigned angle arccos|u_i' u*| to `target`;
/// ties go to the lowest index.
Alignment best_aligned(const MatrixXd& components, const VectorXd& target);

/// Area under the ROC curve of `scores` for the positives in `labels`
/// (Mann-Whitney statistic, ties count one half).
double auc(std::span<const double> scores, const std::vector<bool>& labels);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace aca
