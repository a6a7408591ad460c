#include "aca/datagen.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace aca::datagen {

namespace {

constexpr double kHcnCondition = 100.0;
constexpr double kSkewness = 10.0;

MatrixXd gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixXd z(rows, cols);
  // Row-major fill keeps the draw order independent of Eigen's storage order.
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) z(i, j) = gauss(rng);
  return z;
}

MatrixXd cholesky_factor(const MatrixXd& cov) {
  Eigen::LLT<MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw NumericFailure("covariance is not positive definite");
  return llt.matrixL();
}

MatrixXd to_correlation(const MatrixXd& m) {
  const VectorXd inv_sd = m.diagonal().cwiseSqrt().cwiseInverse();
  MatrixXd c = inv_sd.asDiagonal() * m * inv_sd.asDiagonal();
  c = 0.5 * (c + c.transpose()).eval();
  c.diagonal().setOnes();
  return c;
}

// Largest-magnitude coordinate made positive.
VectorXd fix_sign(VectorXd v) {
  Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v[arg] < 0) v = -v;
  return v;
}

}  // namespace

std::string_view to_string(Setting s) {
  switch (s) {
    case Setting::mvn_a09: return "mvn_a09";
    case Setting::mvn_hcn: return "mvn_hcn";
    case Setting::ell_t: return "ell_t";
    case Setting::exp: return "exp";
    case Setting::mv_sk: return "mv_sk";
  }
  return "?";
}

Setting setting_from_string(std::string_view name) {
  for (Setting s : {Setting::mvn_a09, Setting::mvn_hcn, Setting::ell_t, Setting::exp, Setting::mv_sk}) {
    if (name == to_string(s)) return s;
  }
  throw InvalidInput("unknown setting '" + std::string(name) + "'");
}

void SimulationSpec::validate() const {
  if (n < 1) throw InvalidInput("simulation: n must be >= 1");
  if (d < 1) throw InvalidInput("simulation: d must be >= 1");
  if (!(eps >= 0.0 && eps < 1.0)) throw InvalidInput("simulation: eps must lie in [0, 1)");
  if (setting == Setting::mv_sk && d != 2) throw InvalidInput("simulation: mv_sk requires d = 2");
  if (setting == Setting::mvn_hcn && d < 2) throw InvalidInput("simulation: mvn_hcn requires d >= 2");
  if (setting == Setting::ell_t && df < 1) throw InvalidInput("simulation: ell_t requires df >= 1");
}

Index SimulationSpec::anomaly_count() const {
  const double raw = static_cast<double>(n) * eps;
  // Absorb representation error such as 1000 * 0.05 = 50.000000000000007.
  return static_cast<Index>(std::max(0.0, std::ceil(raw - 1e-9 * std::max(1.0, raw))));
}

MatrixXd toeplitz_a09(Index d, bool unsigned_entries) {
  if (d < 1) throw InvalidInput("toeplitz_a09: d must be >= 1");
  const double base = unsigned_entries ? 0.9 : -0.9;
  MatrixXd m(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = std::pow(base, static_cast<double>(std::abs(i - j)));
  return m;
}

MatrixXd hcn_cov(Index d, double cond, std::mt19937_64& rng) {
  if (d < 2) throw InvalidInput("hcn_cov: d must be >= 2");
  if (!(cond > 1.0)) throw InvalidInput("hcn_cov: condition number must exceed 1");

  // Haar-distributed orthogonal factor.
  Eigen::HouseholderQR<MatrixXd> qr(gaussian_matrix(d, d, rng));
  MatrixXd q = qr.householderQ();
  const MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < d; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);

  VectorXd spectrum(d);
  for (Index i = 0; i < d; ++i) spectrum[i] = std::pow(cond, -static_cast<double>(i) / static_cast<double>(d - 1));
  MatrixXd sigma = q * spectrum.asDiagonal() * q.transpose();

  // Rescaling to unit diagonal perturbs the spectrum; stretch the log-spectrum
  // back to the target span and repeat until the correlation matrix has it.
  for (int iter = 0; iter < 200; ++iter) {
    const MatrixXd corr = to_correlation(sigma);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(corr);
    const VectorXd ev = es.eigenvalues();
    const double current = ev.maxCoeff() / ev.minCoeff();
    if (std::abs(current - cond) <= 0.001 * cond) return corr;
    const double lmax = std::log(ev.maxCoeff());
    const double stretch = std::log(cond) / std::log(current);
    VectorXd adjusted(d);
    for (Index i = 0; i < d; ++i) adjusted[i] = std::exp(lmax + (std::log(ev[i]) - lmax) * stretch);
    sigma = es.eigenvectors() * adjusted.asDiagonal() * es.eigenvectors().transpose();
  }
  throw NumericFailure("hcn_cov: condition number adjustment did not converge");
}

NormalSample gen_normal(const SimulationSpec& spec, std::mt19937_64& rng) {
  spec.validate();
  const Index rows = spec.normal_count();
  const Index d = spec.d;
  NormalSample out;
  switch (spec.setting) {
    case Setting::mvn_a09:
    case Setting::mvn_hcn: {
      out.cov = spec.setting == Setting::mvn_a09 ? toeplitz_a09(d, spec.unsigned_toeplitz)
                                                 : hcn_cov(d, kHcnCondition, rng);
      const MatrixXd l = cholesky_factor(out.cov);
      out.data = gaussian_matrix(rows, d, rng) * l.transpose();
      break;
    }
    case Setting::ell_t: {
      // X = L U R with U uniform on the sphere and R the radial part of a
      // multivariate Student t: R = |Z| sqrt(df / W), W ~ chi2(df).
      out.cov = toeplitz_a09(d, spec.unsigned_toeplitz);
      const MatrixXd l = cholesky_factor(out.cov);
      std::chi_squared_distribution<double> chi2(spec.df);
      MatrixXd z = gaussian_matrix(rows, d, rng);
      for (Index i = 0; i < rows; ++i) z.row(i) *= std::sqrt(spec.df / chi2(rng));
      out.data = z * l.transpose();
      break;
    }
    case Setting::exp: {
      std::uniform_real_distribution<double> scale_dist(0.1, 1.0);
      VectorXd scales(d);
      for (Index j = 0; j < d; ++j) scales[j] = scale_dist(rng);
      out.data.resize(rows, d);
      std::vector<std::exponential_distribution<double>> exps;
      for (Index j = 0; j < d; ++j) exps.emplace_back(1.0 / scales[j]);
      for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < d; ++j) out.data(i, j) = exps[static_cast<std::size_t>(j)](rng);
      out.cov = scales.cwiseAbs2().asDiagonal();
      break;
    }
    case Setting::mv_sk: {
      const double delta = kSkewness / std::sqrt(1.0 + kSkewness * kSkewness);
      const double resid = std::sqrt(1.0 - delta * delta);
      std::normal_distribution<double> gauss(0.0, 1.0);
      out.data.resize(rows, 2);
      for (Index i = 0; i < rows; ++i) {
        const double z0 = gauss(rng);
        const double z1 = gauss(rng);
        const double z2 = gauss(rng);
        out.data(i, 0) = delta * std::abs(z0) + resid * z1;
        out.data(i, 1) = 0.5 * z2;
      }
      out.cov = MatrixXd::Zero(2, 2);
      out.cov(0, 0) = 1.0 - 2.0 * delta * delta / std::numbers::pi;
      out.cov(1, 1) = 0.25;
      break;
    }
  }
  return out;
}

double mahalanobis(const VectorXd& x, const VectorXd& center, const MatrixXd& cov) {
  Eigen::LLT<MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw InvalidInput("mahalanobis: covariance is not positive definite");
  const VectorXd w = llt.matrixL().solve(x - center);
  return w.norm();
}

SampleMoments sample_moments(const MatrixXd& data) {
  const Index n = data.rows();
  const Index d = data.cols();
  if (n < d + 1) throw InvalidInput("sample moments: need at least d + 1 rows");
  SampleMoments m;
  m.mean = data.colwise().mean().transpose();
  const MatrixXd centered = data.rowwise() - m.mean.transpose();
  m.cov = centered.transpose() * centered / static_cast<double>(n - 1);
  Eigen::LLT<MatrixXd> llt(m.cov);
  if (llt.info() != Eigen::Success) throw InvalidInput("sample covariance is singular");
  const MatrixXd w = llt.matrixL().solve(centered.transpose());
  m.max_mahalanobis = std::sqrt(w.colwise().squaredNorm().maxCoeff());
  return m;
}

LabeledDataset contaminate_at(const MatrixXd& normal, Index n_anomalies, const VectorXd& center,
                              std::mt19937_64& rng, double variance) {
  if (n_anomalies < 0) throw InvalidInput("contaminate: negative anomaly count");
  if (center.size() != normal.cols()) throw InvalidInput("contaminate: center dimension differs from data");
  const Index n0 = normal.rows();
  const Index d = normal.cols();
  LabeledDataset out;
  out.anomaly_center = center;
  if (n_anomalies == 0) {
    out.data = normal;
    out.labels.assign(static_cast<std::size_t>(n0), false);
    return out;
  }
  MatrixXd anomalies = gaussian_matrix(n_anomalies, d, rng) * std::sqrt(variance);
  anomalies.rowwise() += center.transpose();

  const Index n = n0 + n_anomalies;
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  out.data.resize(n, d);
  out.labels.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const Index src = order[static_cast<std::size_t>(i)];
    const bool anomalous = src >= n0;
    if (anomalous) {
      out.data.row(i) = anomalies.row(src - n0);
    } else {
      out.data.row(i) = normal.row(src);
    }
    out.labels[static_cast<std::size_t>(i)] = anomalous;
  }
  return out;
}

LabeledDataset contaminate(const MatrixXd& normal, Index n_anomalies, std::mt19937_64& rng,
                           std::optional<SectorPlacement> sector, double variance) {
  if (n_anomalies == 0) {
    LabeledDataset out;
    out.data = normal;
    out.labels.assign(static_cast<std::size_t>(normal.rows()), false);
    out.anomaly_center = VectorXd::Zero(normal.cols());
    out.normal_cov = normal.rows() > normal.cols() ? sample_moments(normal).cov : MatrixXd();
    return out;
  }
  const SampleMoments m = sample_moments(normal);
  VectorXd center;
  if (!sector) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m.cov);
    const VectorXd last = fix_sign(es.eigenvectors().col(0));
    center = m.mean + kMahalanobisFactor * m.max_mahalanobis * std::sqrt(es.eigenvalues()[0]) * last;
  } else {
    if (normal.cols() != 2) throw InvalidInput("contaminate: sector placement requires d = 2");
    std::uniform_real_distribution<double> angle(0.0, sector->half_angle_deg * std::numbers::pi / 180.0);
    std::bernoulli_distribution upward(0.5);
    const double phi = angle(rng);
    VectorXd u(2);
    u << std::sin(phi), (upward(rng) ? 1.0 : -1.0) * std::cos(phi);
    const double unit_md = mahalanobis(u, VectorXd::Zero(2), m.cov);
    center = m.mean + sector->gamma * m.max_mahalanobis * u / unit_md;
  }
  LabeledDataset out = contaminate_at(normal, n_anomalies, center, rng, variance);
  out.normal_cov = m.cov;
  return out;
}

LabeledDataset simulate(const SimulationSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  NormalSample normal = gen_normal(spec, rng);
  LabeledDataset out = contaminate(normal.data, spec.anomaly_count(), rng);
  out.normal_cov = std::move(normal.cov);
  return out;
}

}  // namespace aca::datagen
