#pragma once

// Synthetic benchmarks under Huber contamination: normal data from one of
// five distributional settings plus a tight cluster of anomalies placed at a
// controlled Mahalanobis distance.

#include "aca/types.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace aca::datagen {

enum class Setting { mvn_a09, mvn_hcn, ell_t, exp, mv_sk };

std::string_view to_string(Setting s);
Setting setting_from_string(std::string_view name);

struct SimulationSpec {
  Setting setting = Setting::mvn_a09;
  Index n = 1000;
  Index d = 10;
  double eps = 0.05;
  std::uint64_t seed = 0;
  /// Degrees of freedom of the elliptical Student setting.
  int df = 5;
  /// Use 0.9^|i-j| instead of (-0.9)^|i-j| for the Toeplitz scatter.
  bool unsigned_toeplitz = false;

  void validate() const;
  Index anomaly_count() const;
  Index normal_count() const { return n - anomaly_count(); }
};

/// Normal rows together with the population scatter that generated them.
struct NormalSample {
  MatrixXd data;
  MatrixXd cov;
};

struct LabeledDataset {
  MatrixXd data;
  std::vector<bool> labels;  // true = anomaly
  VectorXd anomaly_center;
  MatrixXd normal_cov;
};

/// Anomaly cluster center placed along the last principal axis (default), or
/// in a planar angular sector around the vertical axis at gamma times the
/// largest normal Mahalanobis distance.
struct SectorPlacement {
  double gamma = 1.0;
  /// Half-width of each of the two sectors measured from the ordinate, degrees.
  double half_angle_deg = 45.0;
};

/// Covariance of the anomaly cluster N(center, I * anomaly_variance).
inline constexpr double kAnomalyVariance = 1.0 / 20.0;
inline constexpr double kMahalanobisFactor = 1.25;

/// Toeplitz matrix with entries (-0.9)^|i-j|, or 0.9^|i-j| when `unsigned_entries`.
MatrixXd toeplitz_a09(Index d, bool unsigned_entries = false);

/// Random correlation matrix with the given condition number (within 0.1%).
MatrixXd hcn_cov(Index d, double cond, std::mt19937_64& rng);

NormalSample gen_normal(const SimulationSpec& spec, std::mt19937_64& rng);

/// Appends `n_anomalies` rows drawn from N(center, variance * I) to `normal`
/// and shuffles. With no explicit center the cluster sits at Mahalanobis
/// distance 1.25 * max_i MD(x_i) from the sample mean along the smallest
/// eigenvector of the sample covariance.
LabeledDataset contaminate(const MatrixXd& normal, Index n_anomalies, std::mt19937_64& rng,
                           std::optional<SectorPlacement> sector = std::nullopt,
                           double variance = kAnomalyVariance);

/// Same with an explicitly given cluster center.
LabeledDataset contaminate_at(const MatrixXd& normal, Index n_anomalies, const VectorXd& center,
                              std::mt19937_64& rng, double variance = kAnomalyVariance);

/// gen_normal + contaminate with the counts from `spec`; normal_cov is the
/// generating scatter.
LabeledDataset simulate(const SimulationSpec& spec);

/// Sample mean, unbiased sample covariance, and largest Mahalanobis distance.
struct SampleMoments {
  VectorXd mean;
  MatrixXd cov;
  double max_mahalanobis = 0.0;
};

SampleMoments sample_moments(const MatrixXd& data);

double mahalanobis(const VectorXd& x, const VectorXd& center, const MatrixXd& cov);

}  // namespace aca::datagen
