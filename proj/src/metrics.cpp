#include "aca/metrics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aca {

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

ComponentSet pca_components(const MatrixXd& data, Index m) {
  const Index n = data.rows();
  const Index d = data.cols();
  if (m < 1 || m > d) throw InvalidInput("pca_components: m must lie in [1, d]");
  if (n < 2) throw InvalidInput("pca_components: need at least 2 observations");
  const MatrixXd centered = data.rowwise() - data.colwise().mean();
  const MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(cov);
  if (es.info() != Eigen::Success) throw NumericFailure("pca_components: eigendecomposition failed");

  struct Axis {
    double value;
    VectorXd vec;
  };
  std::vector<Axis> axes;
  for (Index j = 0; j < d; ++j) {
    VectorXd v = es.eigenvectors().col(j);
    Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0) v = -v;
    axes.push_back({es.eigenvalues()[j], std::move(v)});
  }
  std::stable_sort(axes.begin(), axes.end(), [](const Axis& a, const Axis& b) {
    if (std::abs(a.value - b.value) > 1e-12) return a.value > b.value;
    return std::lexicographical_compare(b.vec.begin(), b.vec.end(), a.vec.begin(), a.vec.end());
  });

  ComponentSet out;
  out.method_tag = "pca";
  out.components.resize(d, m);
  for (Index j = 0; j < m; ++j) out.components.col(j) = axes[static_cast<std::size_t>(j)].vec;
  return out;
}

VectorXd oracle_direction(const MatrixXd& cov, const VectorXd& center) {
  if (cov.rows() != cov.cols() || cov.rows() != center.size()) {
    throw InvalidInput("oracle_direction: dimension mismatch");
  }
  if (!(center.norm() > 0)) throw InvalidInput("oracle_direction: zero center");
  Eigen::LLT<MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw InvalidInput("oracle_direction: covariance is not positive definite");
  const VectorXd w = llt.solve(center);
  return w / w.norm();
}

Alignment best_aligned(const MatrixXd& components, const VectorXd& target) {
  if (components.cols() < 1) throw InvalidInput("best_aligned: no components");
  if (components.rows() != target.size()) throw InvalidInput("best_aligned: dimension mismatch");
  const VectorXd u = target.normalized();
  Alignment best{0, 10.0};
  for (Index i = 0; i < components.cols(); ++i) {
    const double c = std::min(1.0, std::abs(components.col(i).normalized().dot(u)));
    const double angle = std::acos(c);
    if (angle < best.angle) best = {i, angle};
  }
  return best;
}

double auc(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw InvalidInput("auc: scores and labels differ in length");
  const std::vector<double> ranks = average_ranks(scores);
  double pos = 0, rank_sum = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i]) {
      pos += 1;
      rank_sum += ranks[i];
    }
  }
  const double neg = static_cast<double>(scores.size()) - pos;
  if (pos == 0 || neg == 0) throw InvalidInput("auc: need both positive and negative labels");
  return (rank_sum - pos * (pos + 1) / 2) / (pos * neg);
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw InvalidInput("spearman: need two equal-length samples of size >= 2");
  const std::vector<double> ra = average_ranks(a);
  const std::vector<double> rb = average_ranks(b);
  const auto n = static_cast<double>(a.size());
  const double mean = (n + 1) / 2;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (ra[i] - mean) * (rb[i] - mean);
    saa += (ra[i] - mean) * (ra[i] - mean);
    sbb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (saa == 0 || sbb == 0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace aca
