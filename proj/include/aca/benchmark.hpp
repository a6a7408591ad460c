#pragma once

// One draw of the alignment benchmark: simulate a contaminated dataset, fit
// ACA and PCA, and compare both against the oracle direction.

#include "aca/aca.hpp"
#include "aca/datagen.hpp"

#include <cstdint>
#include <vector>

namespace aca {

struct MethodAlignment {
  /// 1-based index of the best-aligned component, and its unsigned angle.
  Index j_hat = 1;
  double alpha_hat = 0.0;
  /// True when j_hat is provably the best over all d components, not only
  /// over the ones that were fitted.
  bool certified = true;
};

struct BenchmarkRecord {
  std::uint64_t data_seed = 0;
  std::uint64_t fit_seed = 0;
  MethodAlignment aca;
  MethodAlignment pca;
  /// Anomaly-detection AUC of the AC1 scores.
  double aca_auc = 0.0;
};

struct BenchmarkConfig {
  datagen::SimulationSpec spec;
  Index components = 2;
  DepthNotion notion = DepthNotion::projection;
  OptimizerConfig optimizer;
  std::int64_t runs = 50;
  std::uint64_t seed = 0;
};

/// Best alignment among fitted components. At most one unit vector of an
/// orthonormal set can lie within pi/4 of a target, so an angle below pi/4
/// certifies the choice even when only a prefix of the basis was fitted.
MethodAlignment align_prefix(const MatrixXd& components, const VectorXd& target, Index ambient_dim);

BenchmarkRecord benchmark_run(const BenchmarkConfig& cfg, std::int64_t run);

std::vector<BenchmarkRecord> benchmark(const BenchmarkConfig& cfg);

}  // namespace aca
