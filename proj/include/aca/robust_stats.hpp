#pragma once

// Univariate robust location/scale and the univariate depth kernels.
//
// Every multivariate depth in this library reduces to these kernels through
// projections: D(z | X) = min_u depth1(z'u | Xu).
//
// The *_inplace variants clobber their buffer and are what the optimizers
// call on their hot path; the span-taking variants copy and never mutate.

#include "aca/types.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

namespace aca {

namespace detail {

template <typename Scalar>
void require_nonempty(std::span<const Scalar> sample, const char* what) {
  if (sample.empty()) throw InvalidInput(std::string(what) + ": empty sample");
}

}  // namespace detail

namespace detail {

template <typename Scalar>
Scalar median_of_three(Scalar a, Scalar b, Scalar c) {
  return std::max(std::min(a, b), std::min(std::max(a, b), c));
}

}  // namespace detail

/// Order statistics k1 and k2 (k2 == k1 or k1 + 1, zero-based) of `values`.
///
/// Three-way quickselect that partitions out of place into a thread-local
/// buffer, leaving the input untouched. Projected samples arrive in no useful
/// order, so the partition is written without data-dependent branches.
template <typename Scalar>
std::pair<Scalar, Scalar> order_statistic_pair(std::span<const Scalar> values, std::size_t k1, std::size_t k2) {
  const std::size_t n = values.size();
  if (k1 > k2 || k2 - k1 > 1 || k2 >= n) throw InvalidInput("order_statistic_pair: bad ranks");
  thread_local std::vector<Scalar> scratch;
  if (scratch.size() < 2 * n) scratch.resize(2 * n);
  // Smaller values go to `here`, larger ones to `there`; after the first
  // round `here` holds the current range, so it is compacted in place.
  Scalar* here = scratch.data();
  Scalar* there = scratch.data() + n;
  const Scalar* src = values.data();
  std::size_t m = n;
  if (m <= 24) {
    std::copy(values.begin(), values.end(), here);
    src = here;
  }
  while (m > 24) {
    Scalar pivot;
    if (m > 128) {
      const std::size_t e = m / 8;
      pivot = detail::median_of_three(detail::median_of_three(src[0], src[e], src[2 * e]),
                                      detail::median_of_three(src[3 * e], src[4 * e], src[5 * e]),
                                      detail::median_of_three(src[6 * e], src[7 * e], src[m - 1]));
    } else {
      pivot = detail::median_of_three(src[0], src[m / 2], src[m - 1]);
    }
    std::size_t nl = 0, nh = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const Scalar v = src[i];
      here[nl] = v;
      there[nh] = v;
      nl += static_cast<std::size_t>(v < pivot);
      nh += static_cast<std::size_t>(pivot < v);
    }
    const std::size_t ne = m - nl - nh;
    if (k2 < nl) {
      m = nl;
    } else if (k1 >= nl + ne) {
      k1 -= nl + ne;
      k2 -= nl + ne;
      m = nh;
      std::swap(here, there);
    } else {
      Scalar lower = pivot, upper = pivot;
      if (k1 < nl) lower = *std::max_element(here, here + nl);
      if (k2 >= nl + ne) upper = *std::min_element(there, there + nh);
      return {lower, upper};
    }
    src = here;
  }
  std::sort(here, here + m);
  return {here[k1], here[k2]};
}

/// Median of a non-empty sample. Even length averages the two middle order
/// statistics.
template <typename Scalar>
Scalar median_nonempty(std::span<const Scalar> values) {
  const std::size_t n = values.size();
  const std::size_t mid = n / 2;
  if (n % 2 == 1) return order_statistic_pair(values, mid, mid).second;
  const auto [lower, upper] = order_statistic_pair(values, mid - 1, mid);
  return Scalar(0.5) * (lower + upper);
}

namespace detail {

/// Median when it is expected near `guess`: one pass keeps the values within
/// `halfwidth` of the guess, and only those are searched if they bracket the
/// middle ranks. Otherwise falls back to a full selection, so the result
/// never depends on the guess.
template <typename Scalar>
Scalar median_near(std::span<const Scalar> values, Scalar guess, Scalar halfwidth) {
  const std::size_t n = values.size();
  if (!(halfwidth > Scalar(0)) || n < 64) return median_nonempty(values);
  const Scalar lo = guess - halfwidth, hi = guess + halfwidth;
  thread_local std::vector<Scalar> window;
  if (window.size() < n) window.resize(n);
  std::size_t below = 0, inside = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Scalar v = values[i];
    window[inside] = v;
    below += static_cast<std::size_t>(v < lo);
    inside += static_cast<std::size_t>((lo <= v) & (v <= hi));
  }
  const std::size_t mid = n / 2;
  const std::size_t k1 = n % 2 == 1 ? mid : mid - 1;
  if (below > k1 || mid >= below + inside) return median_nonempty(values);
  const auto [lower, upper] =
      order_statistic_pair(std::span<const Scalar>(window.data(), inside), k1 - below, mid - below);
  return n % 2 == 1 ? upper : Scalar(0.5) * (lower + upper);
}

}  // namespace detail

/// Location and spread from the previous evaluation of a slowly varying
/// sample (consecutive directions of one search). Only speeds up selection.
template <typename Scalar>
struct SelectionHint {
  Scalar center = Scalar(0);
  Scalar spread = Scalar(0);
  bool valid = false;

  /// Search window half-width as a fraction of the previous spread.
  static constexpr double kWindow = 0.25;

  Scalar halfwidth() const { return valid ? Scalar(kWindow) * spread : Scalar(0); }
};

template <typename Scalar>
Scalar median(std::span<const Scalar> sample) {
  detail::require_nonempty(sample, "median");
  return median_nonempty(sample);
}

/// MAD about a known center; overwrites `values` with absolute deviations.
template <typename Scalar>
Scalar mad_inplace(std::span<Scalar> values, Scalar center, const SelectionHint<Scalar>* hint = nullptr) {
  for (auto& v : values) v = std::abs(v - center);
  if (hint) return detail::median_near<Scalar>(values, hint->spread, hint->halfwidth());
  return median_nonempty<Scalar>(values);
}

template <typename Scalar>
Scalar mad(std::span<const Scalar> sample) {
  detail::require_nonempty(sample, "mad");
  std::vector<Scalar> buf(sample.begin(), sample.end());
  return mad_inplace(std::span<Scalar>(buf), median_nonempty(sample));
}

/// Median of the deviations of points strictly above `center`; 0 when none.
/// Compacts those deviations to the front of `values`.
template <typename Scalar>
Scalar mad_plus_inplace(std::span<Scalar> values, Scalar center, const SelectionHint<Scalar>* hint = nullptr) {
  std::size_t m = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Scalar v = values[i];
    values[m] = v - center;
    m += static_cast<std::size_t>(v > center);
  }
  if (m == 0) return Scalar(0);
  if (hint) return detail::median_near<Scalar>(values.first(m), hint->spread, hint->halfwidth());
  return median_nonempty<Scalar>(values.first(m));
}

template <typename Scalar>
Scalar mad_plus(std::span<const Scalar> sample) {
  detail::require_nonempty(sample, "mad_plus");
  std::vector<Scalar> buf(sample.begin(), sample.end());
  return mad_plus_inplace(std::span<Scalar>(buf), median_nonempty(sample));
}

/// 1 / (outlyingness + 1), with a zero spread mapped to 1 (point at the
/// center) or 0 (anywhere else).
template <typename Scalar>
Scalar depth_from_ratio(Scalar numerator, Scalar spread) {
  if (spread == Scalar(0)) return numerator == Scalar(0) ? Scalar(1) : Scalar(0);
  return Scalar(1) / (numerator / spread + Scalar(1));
}

namespace detail {

template <typename Scalar>
Scalar hinted_median(std::span<const Scalar> values, const SelectionHint<Scalar>* hint) {
  return hint ? median_near(values, hint->center, hint->halfwidth()) : median_nonempty(values);
}

template <typename Scalar>
void update_hint(SelectionHint<Scalar>* hint, Scalar center, Scalar spread) {
  if (!hint) return;
  hint->center = center;
  hint->spread = spread;
  hint->valid = spread > Scalar(0);
}

}  // namespace detail

/// Univariate projection depth of `z` w.r.t. `values`; `values` is clobbered.
/// An optional hint carries location and scale between calls.
template <typename Scalar>
Scalar depth1_pd_inplace(Scalar z, std::span<Scalar> values, SelectionHint<Scalar>* hint = nullptr) {
  const Scalar med = detail::hinted_median<Scalar>(values, hint);
  const Scalar spread = mad_inplace(values, med, hint);
  detail::update_hint(hint, med, spread);
  return depth_from_ratio(std::abs(z - med), spread);
}

/// Univariate asymmetric projection depth; `values` is clobbered.
template <typename Scalar>
Scalar depth1_apd_inplace(Scalar z, std::span<Scalar> values, SelectionHint<Scalar>* hint = nullptr) {
  const Scalar med = detail::hinted_median<Scalar>(values, hint);
  const Scalar excess = z > med ? z - med : Scalar(0);
  if (excess == Scalar(0)) {
    if (hint) hint->center = med;
    return Scalar(1);
  }
  const Scalar spread = mad_plus_inplace(values, med, hint);
  detail::update_hint(hint, med, spread);
  return depth_from_ratio(excess, spread);
}

template <typename Scalar>
Scalar depth1_inplace(DepthNotion notion, Scalar z, std::span<Scalar> values, SelectionHint<Scalar>* hint = nullptr) {
  return notion == DepthNotion::projection ? depth1_pd_inplace(z, values, hint)
                                           : depth1_apd_inplace(z, values, hint);
}

template <typename Scalar>
Scalar depth1_pd(Scalar z, std::span<const Scalar> sample) {
  detail::require_nonempty(sample, "depth1_pd");
  std::vector<Scalar> buf(sample.begin(), sample.end());
  return depth1_pd_inplace(z, std::span<Scalar>(buf));
}

template <typename Scalar>
Scalar depth1_apd(Scalar z, std::span<const Scalar> sample) {
  detail::require_nonempty(sample, "depth1_apd");
  std::vector<Scalar> buf(sample.begin(), sample.end());
  return depth1_apd_inplace(z, std::span<Scalar>(buf));
}

template <typename Scalar>
Scalar depth1(DepthNotion notion, Scalar z, std::span<const Scalar> sample) {
  return notion == DepthNotion::projection ? depth1_pd(z, sample) : depth1_apd(z, sample);
}

/// Univariate depth of z'u w.r.t. the projected sample X·u.
template <typename Scalar>
Scalar projected_depth(DepthNotion notion, const Vector<Scalar>& z, const Matrix<Scalar>& data,
                       const Vector<Scalar>& u) {
  Vector<Scalar> proj = data * u;
  return depth1_inplace(notion, z.dot(u), std::span<Scalar>(proj.data(), proj.size()));
}

}  // namespace aca
