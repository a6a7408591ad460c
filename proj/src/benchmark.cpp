#include "aca/benchmark.hpp"

#include "aca/metrics.hpp"

#include <numbers>

namespace aca {

MethodAlignment align_prefix(const MatrixXd& components, const VectorXd& target, Index ambient_dim) {
  const Alignment a = best_aligned(components, target);
  MethodAlignment out;
  out.j_hat = a.index + 1;
  out.alpha_hat = a.angle;
  out.certified = components.cols() == ambient_dim || a.angle < std::numbers::pi / 4;
  return out;
}

BenchmarkRecord benchmark_run(const BenchmarkConfig& cfg, std::int64_t run) {
  if (run < 0) throw InvalidInput("benchmark: run index must be >= 0");
  if (cfg.spec.anomaly_count() < 1) throw InvalidInput("benchmark: contamination yields no anomalies");
  BenchmarkRecord rec;
  rec.data_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(run), 0);
  rec.fit_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(run), 1);

  datagen::SimulationSpec spec = cfg.spec;
  spec.seed = rec.data_seed;
  const datagen::LabeledDataset ds = datagen::simulate(spec);
  const VectorXd target = oracle_direction(ds.normal_cov, ds.anomaly_center);

  OptimizerConfig opt = cfg.optimizer;
  opt.seed = rec.fit_seed;
  const AcaModel<double> model = fit<double>(ds.data, cfg.components, cfg.notion, opt);
  rec.aca = align_prefix(model.components, target, spec.d);

  const VectorXd scores = ds.data * model.components.col(0);
  rec.aca_auc = auc(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())), ds.labels);

  rec.pca = align_prefix(pca_components(ds.data, spec.d).components, target, spec.d);
  return rec;
}

std::vector<BenchmarkRecord> benchmark(const BenchmarkConfig& cfg) {
  if (cfg.runs < 1) throw InvalidInput("benchmark: runs must be >= 1");
  std::vector<BenchmarkRecord> out;
  out.reserve(static_cast<std::size_t>(cfg.runs));
  for (std::int64_t r = 0; r < cfg.runs; ++r) out.push_back(benchmark_run(cfg, r));
  return out;
}

}  // namespace aca
