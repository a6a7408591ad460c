#pragma once

// Approximate projection depth restricted to a subspace.
//
// The depth of z w.r.t. X inside span(B) is min over unit u in span(B) of the
// univariate depth of z'u w.r.t. Xu. Directions are searched as unit
// coefficient vectors t with u = B·t, so every visited direction lies in the
// subspace exactly. Any direction visited gives an upper bound on the depth;
// the optimizers only ever lower the incumbent.

#include "aca/robust_stats.hpp"
#include "aca/subspace.hpp"
#include "aca/types.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <thread>
#include <utility>
#include <vector>

namespace aca {

enum class Optimizer { nelder_mead_sphere, refined_random_search };

/// Where the first restart of a depth query starts: "Mn" uses the direction
/// from the data mean to the query point, "Rn" a uniformly random direction.
enum class StartRule { mean, random };

struct OptimizerConfig {
  Optimizer algorithm = Optimizer::nelder_mead_sphere;
  /// Total univariate-depth evaluations per query, split evenly across restarts.
  std::int64_t budget_k = 1000;
  std::int64_t restarts = 10;
  /// Start simplex lies in a spherical cap of radius (pi/2)/beta.
  double beta = 6.0;
  double alpha = 1.0;  // reflection
  double gamma = 2.0;  // expansion
  double rho = 0.5;    // contraction
  double sigma = 0.5;  // shrink
  /// Stop a run once the simplex depth spread drops below tol.
  double tol = 1e-6;
  StartRule start = StartRule::mean;
  std::uint64_t seed = 0;

  void validate() const {
    if (restarts < 1) throw InvalidInput("optimizer config: restarts must be >= 1");
    if (budget_k < restarts) throw InvalidInput("optimizer config: budget_k must be >= restarts");
    if (!(beta > 0)) throw InvalidInput("optimizer config: beta must be positive");
    if (!(alpha > 0)) throw InvalidInput("optimizer config: alpha must be positive");
    if (!(gamma > 1)) throw InvalidInput("optimizer config: gamma must exceed 1");
    if (!(rho > 0 && rho < 1)) throw InvalidInput("optimizer config: rho must lie in (0,1)");
    if (!(sigma > 0 && sigma < 1)) throw InvalidInput("optimizer config: sigma must lie in (0,1)");
    if (!(tol > 0)) throw InvalidInput("optimizer config: tol must be positive");
  }

  /// Evaluation cap of restart `i`; the caps sum to budget_k.
  std::int64_t restart_budget(std::int64_t i) const {
    return budget_k / restarts + (i < budget_k % restarts ? 1 : 0);
  }
};

template <typename Scalar>
struct DepthResult {
  Scalar depth = Scalar(1);
  Vector<Scalar> direction;
  std::int64_t evaluations_used = 0;
};

/// Best value and direction found by a sphere search.
template <typename Scalar>
struct SearchResult {
  Scalar value = std::numeric_limits<Scalar>::infinity();
  Vector<Scalar> direction;
  std::int64_t evaluations_used = 0;
};

namespace detail {

/// Wraps an objective with an evaluation cap and best-so-far bookkeeping.
template <typename Scalar, typename Objective>
class BudgetedObjective {
 public:
  BudgetedObjective(Objective& f, std::int64_t cap) : f_(f), cap_(cap) {}

  bool exhausted() const { return used_ >= cap_; }

  Scalar operator()(const Vector<Scalar>& t) {
    ++used_;
    const Scalar v = f_(t);
    if (v < best_.value) {
      best_.value = v;
      best_.direction = t;
    }
    return v;
  }

  SearchResult<Scalar> result() const {
    SearchResult<Scalar> out = best_;
    out.evaluations_used = used_;
    return out;
  }

 private:
  Objective& f_;
  std::int64_t cap_;
  std::int64_t used_ = 0;
  SearchResult<Scalar> best_;
};

template <typename Scalar>
struct Vertex {
  Vector<Scalar> point;
  Scalar value;
};

/// One run of the spherical Nelder-Mead simplex method on S^{r-1}, r >= 2.
/// Simplex moves travel along great circles through the normalized centroid of
/// the non-worst vertices.
template <typename Scalar, typename Objective, typename Rng>
void nelder_mead_run(BudgetedObjective<Scalar, Objective>& f, const Vector<Scalar>& start,
                     const OptimizerConfig& cfg, Rng& rng) {
  const Index r = start.size();
  const Scalar cap = (std::numbers::pi_v<Scalar> / 2) / Scalar(cfg.beta);
  const auto alpha = Scalar(cfg.alpha), gamma = Scalar(cfg.gamma);
  const auto rho = Scalar(cfg.rho), sigma = Scalar(cfg.sigma);

  std::vector<Vertex<Scalar>> simplex;
  simplex.reserve(static_cast<std::size_t>(r));
  for (Index i = 0; i < r; ++i) {
    if (f.exhausted()) return;
    Vector<Scalar> p = random_in_cap(start, cap, rng);
    const Scalar v = f(p);
    simplex.push_back({std::move(p), v});
  }
  auto by_value = [](const Vertex<Scalar>& a, const Vertex<Scalar>& b) { return a.value < b.value; };
  std::stable_sort(simplex.begin(), simplex.end(), by_value);

  const std::size_t worst = simplex.size() - 1;
  while (simplex[worst].value - simplex[0].value >= Scalar(cfg.tol)) {
    Vector<Scalar> centroid = Vector<Scalar>::Zero(r);
    for (std::size_t i = 0; i < worst; ++i) centroid += simplex[i].point;
    const Scalar cn = centroid.norm();
    centroid = cn > Scalar(1e-14) ? Vector<Scalar>(centroid / cn) : simplex[0].point;

    if (f.exhausted()) return;
    Vector<Scalar> reflected = geodesic_step(centroid, simplex[worst].point, -alpha);
    const Scalar fr = f(reflected);

    if (simplex[0].value <= fr && fr < simplex[worst - 1].value) {
      simplex[worst] = {std::move(reflected), fr};
    } else if (fr < simplex[0].value) {
      if (f.exhausted()) return;
      Vector<Scalar> expanded = geodesic_step(centroid, reflected, gamma);
      const Scalar fe = f(expanded);
      if (fe < fr) {
        simplex[worst] = {std::move(expanded), fe};
      } else {
        simplex[worst] = {std::move(reflected), fr};
      }
    } else {
      const Vector<Scalar>& toward = fr < simplex[worst].value ? reflected : simplex[worst].point;
      if (f.exhausted()) return;
      Vector<Scalar> contracted = geodesic_step(centroid, toward, rho);
      const Scalar fc = f(contracted);
      if (fc < simplex[worst].value) {
        simplex[worst] = {std::move(contracted), fc};
      } else {
        for (std::size_t i = 1; i < simplex.size(); ++i) {
          if (f.exhausted()) return;
          simplex[i].point = geodesic_step(simplex[0].point, simplex[i].point, sigma);
          simplex[i].value = f(simplex[i].point);
        }
        std::stable_sort(simplex.begin(), simplex.end(), by_value);
        continue;
      }
    }
    // Move the replaced worst vertex to its sorted position.
    auto pos = std::upper_bound(simplex.begin(), simplex.begin() + static_cast<std::ptrdiff_t>(worst),
                                simplex[worst], by_value);
    std::rotate(pos, simplex.begin() + static_cast<std::ptrdiff_t>(worst), simplex.end());
  }
}

inline constexpr int kRefinementStages = 10;
inline constexpr std::int64_t kDrawsPerStage = 10;
inline constexpr double kRefinementShrink = 0.5;

/// One run of refined random search: evaluate the start, then draw batches of
/// directions in caps around the incumbent whose radius halves every stage,
/// beginning with the whole sphere. The stage size does not depend on the cap,
/// so a larger cap only extends the same stream; once the radius has shrunk
/// kRefinementStages times the schedule starts over around the incumbent.
template <typename Scalar, typename Objective, typename Rng>
void refined_random_run(BudgetedObjective<Scalar, Objective>& f, const Vector<Scalar>& start, Rng& rng) {
  if (f.exhausted()) return;
  Vector<Scalar> incumbent = start;
  Scalar best = f(start);
  for (int stage = 0; !f.exhausted(); ++stage) {
    const Scalar radius =
        std::numbers::pi_v<Scalar> * std::pow(Scalar(kRefinementShrink), Scalar(stage % kRefinementStages));
    Vector<Scalar> stage_best = incumbent;
    Scalar stage_value = best;
    for (std::int64_t k = 0; k < kDrawsPerStage && !f.exhausted(); ++k) {
      Vector<Scalar> cand = random_in_cap(incumbent, radius, rng);
      const Scalar v = f(cand);
      if (v < stage_value) {
        stage_value = v;
        stage_best = std::move(cand);
      }
    }
    incumbent = std::move(stage_best);
    best = stage_value;
  }
}

/// Runs the configured optimizer once over S^{r-1} within `cap` evaluations.
template <typename Scalar, typename Objective, typename Rng>
SearchResult<Scalar> sphere_search(Objective& objective, const Vector<Scalar>& start,
                                   const OptimizerConfig& cfg, std::int64_t cap, Rng& rng) {
  BudgetedObjective<Scalar, Objective> f(objective, cap);
  const Index r = start.size();
  if (r == 1) {
    // S^0 = {+1, -1}.
    Vector<Scalar> t(1);
    for (Scalar s : {Scalar(1), Scalar(-1)}) {
      if (f.exhausted()) break;
      t[0] = s;
      f(t);
    }
  } else if (cfg.algorithm == Optimizer::nelder_mead_sphere) {
    nelder_mead_run(f, start, cfg, rng);
  } else {
    refined_random_run(f, start, rng);
  }
  return f.result();
}

template <typename Scalar>
void require_basis(const Matrix<Scalar>& basis, Index ambient_dim) {
  if (basis.cols() < 1) throw InvalidInput("depth search: basis must have rank >= 1");
  if (basis.rows() != ambient_dim) throw InvalidInput("depth search: basis and data dimensions differ");
}

/// Ambient-space objective seen through the coefficient parametrization u = B·t.
template <typename Scalar, typename Objective>
struct LiftedObjective {
  Objective& f;
  const Matrix<Scalar>& basis;
  Scalar operator()(const Vector<Scalar>& t) { return f(Vector<Scalar>(basis * t)); }
};

template <typename Scalar, typename Objective, typename Rng>
SearchResult<Scalar> restarted_search(Objective&& objective, const Matrix<Scalar>& basis,
                                      const OptimizerConfig& cfg, Rng& rng) {
  cfg.validate();
  if (basis.cols() < 1) throw InvalidInput("sphere search: basis must have rank >= 1");
  LiftedObjective<Scalar, std::remove_reference_t<Objective>> lifted{objective, basis};
  SearchResult<Scalar> best;
  std::int64_t used = 0;
  for (std::int64_t i = 0; i < cfg.restarts; ++i) {
    const Vector<Scalar> start = random_unit<Scalar>(basis.cols(), rng);
    SearchResult<Scalar> run = sphere_search(lifted, start, cfg, cfg.restart_budget(i), rng);
    used += run.evaluations_used;
    if (run.value < best.value) best = std::move(run);
  }
  best.evaluations_used = used;
  best.direction = basis * best.direction;
  return best;
}

}  // namespace detail

/// Spherical restricted Nelder-Mead: minimizes `objective` (a function of a
/// unit ambient direction) over the unit sphere of span(basis). Restarts are
/// drawn uniformly from `rng`; the budget is split across them.
template <typename Scalar, typename Objective, typename Rng>
SearchResult<Scalar> nelder_mead_sphere(Objective&& objective, const Matrix<Scalar>& basis,
                                        OptimizerConfig cfg, Rng& rng) {
  cfg.algorithm = Optimizer::nelder_mead_sphere;
  return detail::restarted_search<Scalar>(objective, basis, cfg, rng);
}

/// Refined random search with the same contract as nelder_mead_sphere.
template <typename Scalar, typename Objective, typename Rng>
SearchResult<Scalar> refined_random_search(Objective&& objective, const Matrix<Scalar>& basis,
                                           OptimizerConfig cfg, Rng& rng) {
  cfg.algorithm = Optimizer::refined_random_search;
  return detail::restarted_search<Scalar>(objective, basis, cfg, rng);
}

/// Data projected once onto a search basis, so that many depth queries in
/// the same subspace cost O(n·rank) per direction instead of O(n·d).
template <typename Scalar>
class ProjectedData {
 public:
  ProjectedData(const Matrix<Scalar>& data, const Matrix<Scalar>& basis) : basis_(basis) {
    if (data.rows() < 2) throw InvalidInput("depth: data must have at least 2 rows");
    if (!all_finite(data)) throw InvalidInput("depth: data contains non-finite values");
    detail::require_basis(basis, data.cols());
    projected_ = data * basis;
    center_ = projected_.colwise().mean().transpose();
  }

  const Matrix<Scalar>& basis() const { return basis_; }
  const Matrix<Scalar>& projected() const { return projected_; }
  const Vector<Scalar>& center() const { return center_; }
  Index rows() const { return projected_.rows(); }
  Index rank() const { return basis_.cols(); }

 private:
  Matrix<Scalar> basis_;
  Matrix<Scalar> projected_;
  Vector<Scalar> center_;
};

namespace detail {

/// Depth of one query along coefficient directions t. When the query is a row
/// of the data its projection is read from the same projected vector, so the
/// point and the sample are rounded identically.
template <typename Scalar>
class QueryObjective {
 public:
  QueryObjective(const ProjectedData<Scalar>& pd, Vector<Scalar> query_coords, Index row,
                 DepthNotion notion)
      : pd_(pd), query_(std::move(query_coords)), row_(row), notion_(notion), proj_(pd.rows()) {}

  Scalar operator()(const Vector<Scalar>& t) {
    proj_.noalias() = pd_.projected() * t;
    const Scalar z = row_ >= 0 ? proj_[row_] : query_.dot(t);
    return depth1_inplace(notion_, z, std::span<Scalar>(proj_.data(), proj_.size()), &hint_);
  }

  const Vector<Scalar>& query() const { return query_; }

 private:
  const ProjectedData<Scalar>& pd_;
  Vector<Scalar> query_;
  Index row_;
  DepthNotion notion_;
  Vector<Scalar> proj_;
  SelectionHint<Scalar> hint_;
};

template <typename Scalar>
DepthResult<Scalar> query_depth(const ProjectedData<Scalar>& pd, Vector<Scalar> query_coords, Index row,
                                DepthNotion notion, const OptimizerConfig& cfg) {
  const Index r = pd.rank();
  QueryObjective<Scalar> objective(pd, std::move(query_coords), row, notion);
  SearchResult<Scalar> best;
  std::int64_t used = 0;
  for (std::int64_t i = 0; i < cfg.restarts; ++i) {
    // Each restart owns a stream, so a larger budget extends every restart's
    // evaluation sequence instead of reshuffling it.
    std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(i)));
    Vector<Scalar> start = random_unit<Scalar>(r, rng);
    if (i == 0 && cfg.start == StartRule::mean) {
      const Vector<Scalar> offset = objective.query() - pd.center();
      const Scalar norm = offset.norm();
      if (norm > Scalar(0) && std::isfinite(norm)) start = offset / norm;
    }
    SearchResult<Scalar> run = sphere_search(objective, start, cfg, cfg.restart_budget(i), rng);
    used += run.evaluations_used;
    if (run.value < best.value) best = std::move(run);
  }
  DepthResult<Scalar> out;
  out.depth = best.value;
  out.direction = pd.basis() * best.direction;
  out.direction /= out.direction.norm();
  out.evaluations_used = used;
  return out;
}

/// Calls fn(i) for i in [0, n), spread over hardware threads. fn must only
/// write to per-index state.
template <typename Fn>
void parallel_for(Index n, Fn&& fn) {
  const unsigned hw = std::thread::hardware_concurrency();
  const Index workers = std::min<Index>(n, hw > 1 ? static_cast<Index>(hw) : 1);
  if (workers <= 1) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (Index w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (Index i = w; i < n; i += workers) fn(i);
    });
  }
}

}  // namespace detail

/// Approximate depth of `z` w.r.t. `data` restricted to span(basis).
template <typename Scalar>
DepthResult<Scalar> proj_depth(const Vector<Scalar>& z, const Matrix<Scalar>& data, const Matrix<Scalar>& basis,
                               DepthNotion notion, const OptimizerConfig& cfg) {
  cfg.validate();
  if (z.size() != data.cols()) throw InvalidInput("proj_depth: point and data dimensions differ");
  if (!all_finite(z)) throw InvalidInput("proj_depth: point contains non-finite values");
  const ProjectedData<Scalar> pd(data, basis);
  return detail::query_depth(pd, Vector<Scalar>(basis.transpose() * z), -1, notion, cfg);
}

/// Depth of every row of `data` w.r.t. `data` inside span(basis). Row j uses
/// seed derive_seed(cfg.seed, j), so results do not depend on evaluation order.
template <typename Scalar>
std::vector<DepthResult<Scalar>> row_depths(const Matrix<Scalar>& data, const Matrix<Scalar>& basis,
                                            DepthNotion notion, const OptimizerConfig& cfg) {
  cfg.validate();
  const ProjectedData<Scalar> pd(data, basis);
  std::vector<DepthResult<Scalar>> out(static_cast<std::size_t>(data.rows()));
  detail::parallel_for(data.rows(), [&](Index j) {
    OptimizerConfig row_cfg = cfg;
    row_cfg.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(j));
    out[static_cast<std::size_t>(j)] =
        detail::query_depth(pd, Vector<Scalar>(pd.projected().row(j).transpose()), j, notion, row_cfg);
  });
  return out;
}

/// Row of minimal depth inside span(basis) and its depth result; ties go to
/// the lowest index.
template <typename Scalar>
std::pair<Index, DepthResult<Scalar>> min_depth_over_dataset(const Matrix<Scalar>& data, const Matrix<Scalar>& basis,
                                                             DepthNotion notion, const OptimizerConfig& cfg) {
  std::vector<DepthResult<Scalar>> all = row_depths(data, basis, notion, cfg);
  std::size_t best = 0;
  for (std::size_t j = 1; j < all.size(); ++j) {
    if (all[j].depth < all[best].depth) best = j;
  }
  return {static_cast<Index>(best), std::move(all[best])};
}

/// Brute-force planar depth: minimum univariate depth over `angles` equally
/// spaced directions on [0, pi) (projection depth) or [0, 2 pi) (asymmetric).
template <typename Scalar>
Scalar grid_depth_oracle(const Vector<Scalar>& z, const Matrix<Scalar>& data, DepthNotion notion, Index angles) {
  if (data.cols() != 2 || z.size() != 2) throw InvalidInput("grid_depth_oracle: requires d = 2");
  if (angles < 4) throw InvalidInput("grid_depth_oracle: requires at least 4 angles");
  if (data.rows() < 1) throw InvalidInput("grid_depth_oracle: empty data");
  const Scalar span = notion == DepthNotion::projection ? std::numbers::pi_v<Scalar> : 2 * std::numbers::pi_v<Scalar>;
  Vector<Scalar> u(2);
  Scalar best = Scalar(1);
  for (Index k = 0; k < angles; ++k) {
    const Scalar theta = span * Scalar(k) / Scalar(angles);
    u << std::cos(theta), std::sin(theta);
    best = std::min(best, projected_depth(notion, z, data, u));
  }
  return best;
}

}  // namespace aca
