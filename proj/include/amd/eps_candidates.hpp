#pragma once

#include "amd/dataset.hpp"
#include "amd/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace amd {

/// Distance from each point to its k-th nearest other point.
template <typename Scalar = double>
struct KdisValues {
  std::vector<Scalar> values;
  std::vector<Scalar> sorted;
  Index k = 0;
};

template <typename Scalar>
KdisValues<Scalar> compute_kdis(const SortedNeighborDistances<Scalar>& snd, Index k) {
  if (k < 1 || k > snd.row_length())
    throw InputError("k = " + std::to_string(k) + " outside [1, " + std::to_string(snd.row_length()) + "]");
  KdisValues<Scalar> out;
  out.k = k;
  out.values.resize(static_cast<std::size_t>(snd.size()));
  for (Index i = 0; i < snd.size(); ++i) out.values[static_cast<std::size_t>(i)] = snd.kth_distance(i, k);
  out.sorted = out.values;
  std::sort(out.sorted.begin(), out.sorted.end());
  return out;
}

struct KdisHistogram {
  std::vector<double> bin_edges;  // bins + 1 ascending edges
  std::vector<Index> counts;
  std::vector<double> smoothed;
  std::vector<Index> peaks;
  Index n_peaks = 0;

  Index bins() const noexcept { return static_cast<Index>(counts.size()); }
};

/// Share of the tallest smoothed bin a peak must rise above its higher base.
inline constexpr double kPeakProminence = 0.05;

/// Peaks of a series padded with a zero on each side: maximal runs of equal
/// values higher than both neighbours, kept when their topographic prominence
/// reaches `min_prominence`. Each run reports its middle index.
inline std::vector<Index> find_peaks(std::span<const double> y, double min_prominence) {
  const auto m = static_cast<Index>(y.size());
  auto at = [&](Index i) { return (i < 0 || i >= m) ? 0.0 : y[static_cast<std::size_t>(i)]; };
  std::vector<Index> peaks;
  Index i = 0;
  while (i < m) {
    Index j = i;
    while (j + 1 < m && at(j + 1) == at(i)) ++j;
    const double h = at(i);
    if (h > 0.0 && h > at(i - 1) && h > at(j + 1)) {
      double left_base = h;
      for (Index l = i - 1;; --l) {
        const double v = at(l);
        if (v > h) break;
        left_base = std::min(left_base, v);
        if (l < 0) break;
      }
      double right_base = h;
      for (Index r = j + 1;; ++r) {
        const double v = at(r);
        if (v > h) break;
        right_base = std::min(right_base, v);
        if (r >= m) break;
      }
      if (h - std::max(left_base, right_base) >= min_prominence) peaks.push_back((i + j) / 2);
    }
    i = j + 1;
  }
  return peaks;
}

/// Frequency histogram of k-dis values. Defaults to ceil(sqrt(n)) equal-width
/// bins over [min, max] (last bin closed), smoothed by a centred 3-bin moving
/// average that shrinks at the ends.
template <typename Scalar>
KdisHistogram build_histogram(const KdisValues<Scalar>& kdis, std::optional<Index> bins = std::nullopt) {
  const auto n = static_cast<Index>(kdis.sorted.size());
  if (n < 2) throw InputError("histogram needs at least 2 values");
  const double lo = static_cast<double>(kdis.sorted.front());
  const double hi = static_cast<double>(kdis.sorted.back());

  Index nb = bins.value_or(static_cast<Index>(std::ceil(std::sqrt(static_cast<double>(n)))));
  if (nb < 1) throw InputError("histogram bin count must be positive");
  if (hi == lo) nb = 1;

  KdisHistogram h;
  h.counts.assign(static_cast<std::size_t>(nb), 0);
  h.bin_edges.resize(static_cast<std::size_t>(nb + 1));
  const double width = (hi - lo) / static_cast<double>(nb);
  for (Index b = 0; b <= nb; ++b) h.bin_edges[static_cast<std::size_t>(b)] = lo + width * static_cast<double>(b);
  h.bin_edges.back() = hi;
  for (Scalar v : kdis.sorted) {
    Index b = width > 0.0 ? static_cast<Index>(std::floor((static_cast<double>(v) - lo) / width)) : 0;
    b = std::clamp<Index>(b, 0, nb - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }

  h.smoothed.resize(static_cast<std::size_t>(nb));
  for (Index b = 0; b < nb; ++b) {
    double sum = 0.0;
    int terms = 0;
    for (Index o = b - 1; o <= b + 1; ++o) {
      if (o < 0 || o >= nb) continue;
      sum += static_cast<double>(h.counts[static_cast<std::size_t>(o)]);
      ++terms;
    }
    h.smoothed[static_cast<std::size_t>(b)] = sum / terms;
  }

  const double tallest = *std::max_element(h.smoothed.begin(), h.smoothed.end());
  h.peaks = find_peaks(h.smoothed, kPeakProminence * tallest);
  if (h.peaks.empty())
    h.peaks.push_back(static_cast<Index>(std::max_element(h.smoothed.begin(), h.smoothed.end()) - h.smoothed.begin()));
  h.n_peaks = static_cast<Index>(h.peaks.size());
  return h;
}

template <typename Scalar = double>
struct KMeans1d {
  std::vector<Scalar> centers;  // ascending
  std::vector<Index> assignment;  // per input value, index into centers
  Index iterations = 0;

  double sse(std::span<const Scalar> values) const {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double d = static_cast<double>(values[i]) - static_cast<double>(centers[static_cast<std::size_t>(assignment[i])]);
      s += d * d;
    }
    return s;
  }
};

inline constexpr Index kKMeansMaxIterations = 300;

namespace detail {

// Weighted 1-D k-means over sorted distinct values: optimal contiguous
// segmentation by dynamic programming with divide-and-conquer row minima.
struct SegmentCost {
  std::vector<double> w, s, q;  // prefix sums of weight, weight*x, weight*x^2

  double operator()(Index a, Index b) const {  // half-open [a, b)
    const double ww = w[static_cast<std::size_t>(b)] - w[static_cast<std::size_t>(a)];
    const double ss = s[static_cast<std::size_t>(b)] - s[static_cast<std::size_t>(a)];
    const double qq = q[static_cast<std::size_t>(b)] - q[static_cast<std::size_t>(a)];
    return std::max(0.0, qq - ss * ss / ww);
  }
};

inline void dp_row(const SegmentCost& cost, const std::vector<double>& prev, std::vector<double>& cur,
                   std::vector<Index>& arg, Index lo, Index hi, Index opt_lo, Index opt_hi) {
  if (lo > hi) return;
  const Index mid = lo + (hi - lo) / 2;
  double best = std::numeric_limits<double>::infinity();
  Index best_i = opt_lo;
  for (Index i = opt_lo; i <= std::min(mid - 1, opt_hi); ++i) {
    const double v = prev[static_cast<std::size_t>(i)] + cost(i, mid);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  cur[static_cast<std::size_t>(mid)] = best;
  arg[static_cast<std::size_t>(mid)] = best_i;
  dp_row(cost, prev, cur, arg, lo, mid - 1, opt_lo, best_i);
  dp_row(cost, prev, cur, arg, mid + 1, hi, best_i, opt_hi);
}

// Returns segment start offsets (size K) into the distinct-value array.
inline std::vector<Index> optimal_segments(const std::vector<double>& x, const std::vector<double>& weight, Index K) {
  const auto m = static_cast<Index>(x.size());
  SegmentCost cost;
  cost.w.assign(static_cast<std::size_t>(m + 1), 0.0);
  cost.s = cost.w;
  cost.q = cost.w;
  for (Index i = 0; i < m; ++i) {
    const auto u = static_cast<std::size_t>(i);
    cost.w[u + 1] = cost.w[u] + weight[u];
    cost.s[u + 1] = cost.s[u] + weight[u] * x[u];
    cost.q[u + 1] = cost.q[u] + weight[u] * x[u] * x[u];
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(static_cast<std::size_t>(m + 1), inf), cur(static_cast<std::size_t>(m + 1), inf);
  std::vector<std::vector<Index>> arg(static_cast<std::size_t>(K), std::vector<Index>(static_cast<std::size_t>(m + 1), 0));
  for (Index j = 1; j <= m; ++j) prev[static_cast<std::size_t>(j)] = cost(0, j);
  for (Index k = 1; k < K; ++k) {
    std::fill(cur.begin(), cur.end(), inf);
    // j elements into k+1 segments needs j >= k+1, previous split i in [k, j-1].
    dp_row(cost, prev, cur, arg[static_cast<std::size_t>(k)], k + 1, m, k, m - 1);
    std::swap(prev, cur);
  }
  std::vector<Index> starts(static_cast<std::size_t>(K), 0);
  Index end = m;
  for (Index k = K - 1; k >= 1; --k) {
    end = arg[static_cast<std::size_t>(k)][static_cast<std::size_t>(end)];
    starts[static_cast<std::size_t>(k)] = end;
  }
  return starts;
}

}  // namespace detail

/// One-dimensional K-means. The optimal solution is found exactly (1-D
/// clusters are contiguous intervals of the sorted values) and then passed
/// through Lloyd steps (nearest centre, lower centre on ties; empty clusters
/// re-seeded at the value farthest from its centre) until assignments stop
/// changing or kKMeansMaxIterations is reached, so every centre is the mean
/// of its members.
template <typename Scalar>
KMeans1d<Scalar> kmeans_1d(std::span<const Scalar> values, Index K) {
  if (K < 1) throw InputError("K must be at least 1");
  if (values.empty()) throw InputError("k-means needs at least one value");
  std::vector<Scalar> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct, weight;
  for (Scalar v : sorted) {
    if (distinct.empty() || static_cast<double>(v) != distinct.back()) {
      distinct.push_back(static_cast<double>(v));
      weight.push_back(1.0);
    } else {
      weight.back() += 1.0;
    }
  }
  if (K > static_cast<Index>(distinct.size()))
    throw InputError("K = " + std::to_string(K) + " exceeds the " + std::to_string(distinct.size()) +
                     " distinct values");

  const auto starts = detail::optimal_segments(distinct, weight, K);
  std::vector<double> centers(static_cast<std::size_t>(K));
  for (Index k = 0; k < K; ++k) {
    const Index a = starts[static_cast<std::size_t>(k)];
    const Index b = k + 1 < K ? starts[static_cast<std::size_t>(k + 1)] : static_cast<Index>(distinct.size());
    double ws = 0.0, wt = 0.0;
    for (Index i = a; i < b; ++i) {
      ws += weight[static_cast<std::size_t>(i)] * distinct[static_cast<std::size_t>(i)];
      wt += weight[static_cast<std::size_t>(i)];
    }
    centers[static_cast<std::size_t>(k)] = ws / wt;
  }

  KMeans1d<Scalar> out;
  out.assignment.assign(values.size(), -1);
  const auto nearest = [&](double v) {
    Index best = 0;
    for (Index k = 1; k < K; ++k)
      if (std::abs(v - centers[static_cast<std::size_t>(k)]) < std::abs(v - centers[static_cast<std::size_t>(best)]))
        best = k;
    return best;
  };
  for (Index it = 0; it < kKMeansMaxIterations; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const Index a = nearest(static_cast<double>(values[i]));
      if (a != out.assignment[i]) {
        out.assignment[i] = a;
        changed = true;
      }
    }
    out.iterations = it + 1;
    if (!changed) break;
    std::vector<double> sum(static_cast<std::size_t>(K), 0.0);
    std::vector<Index> cnt(static_cast<std::size_t>(K), 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
      sum[static_cast<std::size_t>(out.assignment[i])] += static_cast<double>(values[i]);
      ++cnt[static_cast<std::size_t>(out.assignment[i])];
    }
    for (Index k = 0; k < K; ++k) {
      const auto u = static_cast<std::size_t>(k);
      if (cnt[u] > 0) {
        centers[u] = sum[u] / static_cast<double>(cnt[u]);
        continue;
      }
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = std::abs(static_cast<double>(values[i]) - centers[static_cast<std::size_t>(out.assignment[i])]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      centers[u] = static_cast<double>(values[far]);
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(K));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return centers[static_cast<std::size_t>(a)] < centers[static_cast<std::size_t>(b)];
  });
  std::vector<Index> rank(static_cast<std::size_t>(K));
  out.centers.resize(static_cast<std::size_t>(K));
  for (Index r = 0; r < K; ++r) {
    rank[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = r;
    out.centers[static_cast<std::size_t>(r)] = static_cast<Scalar>(centers[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])]);
  }
  for (auto& a : out.assignment) a = rank[static_cast<std::size_t>(a)];
  return out;
}

template <typename Scalar = double>
struct CandidateEpsList {
  std::vector<Scalar> eps_values;  // ascending
  std::vector<Index> assignment;   // per point, index into eps_values
  Index n_peaks_used = 0;
};

/// K-means centres of the k-dis values with K = number of histogram peaks, or
/// `peaks_override` when given. Auto K is capped at the distinct value count.
template <typename Scalar>
CandidateEpsList<Scalar> candidate_eps(const KdisValues<Scalar>& kdis, const KdisHistogram& hist,
                                       std::optional<Index> peaks_override = std::nullopt) {
  Index distinct = 0;
  for (std::size_t i = 0; i < kdis.sorted.size(); ++i)
    distinct += (i == 0 || kdis.sorted[i] != kdis.sorted[i - 1]);
  Index n = hist.n_peaks;
  if (peaks_override) {
    n = *peaks_override;
    if (n < 1) throw InputError("peak count override must be at least 1");
    if (n > distinct)
      throw InputError("peak count override " + std::to_string(n) + " exceeds the " + std::to_string(distinct) +
                       " distinct k-dis values");
  }
  n = std::clamp<Index>(n, 1, distinct);
  auto km = kmeans_1d<Scalar>(kdis.values, n);
  return {std::move(km.centers), std::move(km.assignment), n};
}

}  // namespace amd
