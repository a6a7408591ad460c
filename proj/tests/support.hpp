#pragma once

// Shared fixtures and independent reference implementations for the tests.

#include "aca/types.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace testing {

using aca::Index;
using aca::MatrixXd;
using aca::VectorXd;

inline MatrixXd gaussian(Index n, Index d, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> g(0.0, sd);
  MatrixXd m(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = g(rng);
  return m;
}

inline MatrixXd random_orthonormal(Index d, Index k, std::mt19937_64& rng) {
  const MatrixXd g = gaussian(d, k, rng);
  Eigen::HouseholderQR<MatrixXd> qr(g);
  return qr.householderQ() * MatrixXd::Identity(d, k);
}

// Sort-based reference statistics, deliberately unrelated to the library's
// selection code.
inline double ref_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double ref_mad(const std::vector<double>& v) {
  const double m = ref_median(v);
  std::vector<double> dev;
  for (double x : v) dev.push_back(std::abs(x - m));
  return ref_median(dev);
}

inline double ref_mad_plus(const std::vector<double>& v) {
  const double m = ref_median(v);
  std::vector<double> dev;
  for (double x : v)
    if (x > m) dev.push_back(x - m);
  return dev.empty() ? 0.0 : ref_median(dev);
}

inline double ref_depth_pd(double z, const std::vector<double>& v) {
  const double m = ref_median(v), s = ref_mad(v);
  const double num = std::abs(z - m);
  if (s == 0) return num == 0 ? 1.0 : 0.0;
  return 1.0 / (num / s + 1.0);
}

inline double ref_depth_apd(double z, const std::vector<double>& v) {
  const double m = ref_median(v), s = ref_mad_plus(v);
  const double num = std::max(0.0, z - m);
  if (num == 0) return 1.0;
  if (s == 0) return 0.0;
  return 1.0 / (num / s + 1.0);
}

inline std::vector<double> project(const MatrixXd& x, const VectorXd& u) {
  const VectorXd p = x * u;
  return {p.data(), p.data() + p.size()};
}

/// Planar depth by dense angular scan with the reference kernels.
inline double ref_planar_depth(const VectorXd& z, const MatrixXd& x, bool asymmetric, int angles) {
  const double span = asymmetric ? 2 * M_PI : M_PI;
  double best = 1.0;
  VectorXd u(2);
  for (int k = 0; k < angles; ++k) {
    const double t = span * k / angles;
    u << std::cos(t), std::sin(t);
    const auto p = project(x, u);
    best = std::min(best, asymmetric ? ref_depth_apd(z.dot(u), p) : ref_depth_pd(z.dot(u), p));
  }
  return best;
}

struct PlantedGroups {
  MatrixXd data;
  std::vector<bool> group1;
  std::vector<bool> group2;
};

/// Two tight groups of 5 anomalies among 90 standard-normal rows in R^3: the
/// first far along e1, the second closer along e2, so that the first group
/// is the least deep and the second becomes least deep once e1 is removed.
inline PlantedGroups planted_groups(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  PlantedGroups out;
  out.data.resize(100, 3);
  std::vector<int> kind(100, 0);
  for (int i = 90; i < 95; ++i) kind[i] = 1;
  for (int i = 95; i < 100; ++i) kind[i] = 2;
  std::shuffle(kind.begin(), kind.end(), rng);
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 3; ++j) out.data(i, j) = kind[i] == 0 ? g(rng) : 0.1 * g(rng);
    if (kind[i] == 1) out.data(i, 0) += 10.0;
    if (kind[i] == 2) out.data(i, 1) += 7.0;
    out.group1.push_back(kind[i] == 1);
    out.group2.push_back(kind[i] == 2);
  }
  return out;
}

}  // namespace testing
