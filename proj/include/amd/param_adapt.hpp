#pragma once

#include "amd/dataset.hpp"
#include "amd/dbscan.hpp"
#include "amd/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace amd {

/// round(mean) with halves rounded up, never below 1.
inline Index min_pts_from_mean(double mean) {
  return std::max<Index>(1, static_cast<Index>(std::floor(mean + 0.5)));
}

/// Paired sweep of DBSCAN parameters: entry k-1 holds the mean distance to the
/// k-th nearest other point and the rounded mean number of other points inside
/// that radius.
template <typename Scalar = double>
struct ParameterTable {
  std::vector<Scalar> eps_list;
  std::vector<Index> min_pts_list;

  Index size() const noexcept { return static_cast<Index>(eps_list.size()); }
  DbscanParams<Scalar> params(Index i) const {
    return {eps_list[static_cast<std::size_t>(i)], min_pts_list[static_cast<std::size_t>(i)]};
  }
};

template <typename Scalar>
ParameterTable<Scalar> build_parameter_table(const Dataset<Scalar>& ds,
                                             const SortedNeighborDistances<Scalar>& snd) {
  detail::check_sizes(ds, snd);
  const Index n = snd.size();
  if (n < 3) throw InputError("parameter table needs at least 3 points");
  const Index m = n - 1;

  ParameterTable<Scalar> table;
  table.eps_list.resize(static_cast<std::size_t>(m));
  const auto& dist = snd.matrix();
  for (Index k = 0; k < m; ++k) table.eps_list[static_cast<std::size_t>(k)] = dist.col(k).mean();

  // eps_list is nondecreasing, so each row is swept once with a moving cursor.
  std::vector<Index> totals(static_cast<std::size_t>(m), 0);
  for (Index i = 0; i < n; ++i) {
    const auto row = snd.distances(i);
    std::size_t cursor = 0;
    for (Index j = 0; j < m; ++j) {
      const Scalar eps = table.eps_list[static_cast<std::size_t>(j)];
      while (cursor < row.size() && row[cursor] <= eps) ++cursor;
      totals[static_cast<std::size_t>(j)] += static_cast<Index>(cursor);
    }
  }
  table.min_pts_list.resize(static_cast<std::size_t>(m));
  for (Index j = 0; j < m; ++j)
    table.min_pts_list[static_cast<std::size_t>(j)] =
        min_pts_from_mean(static_cast<double>(totals[static_cast<std::size_t>(j)]) / static_cast<double>(n));
  return table;
}

template <typename Scalar = double>
struct TraceEntry {
  Index index = 0;
  Scalar eps{};
  Index min_pts = 0;
  Label cluster_count = 0;
};

/// Memoized cluster counts along the table, with an evaluation log.
template <typename Scalar>
class SweepEvaluator {
 public:
  SweepEvaluator(const SortedNeighborDistances<Scalar>& snd, const ParameterTable<Scalar>& table)
      : snd_(&snd), table_(&table) {}

  Label operator()(Index i) {
    if (auto it = cache_.find(i); it != cache_.end()) return it->second;
    const auto p = table_->params(i);
    // A zero radius (every point has an exact duplicate at this rank) is scored as no clusters.
    const Label c = p.eps > Scalar(0) ? count_clusters(*snd_, p) : Label{0};
    cache_.emplace(i, c);
    trace_.push_back({i, p.eps, p.min_pts, c});
    return c;
  }

  Index size() const noexcept { return table_->size(); }
  Index invocations() const noexcept { return static_cast<Index>(trace_.size()); }
  const std::vector<TraceEntry<Scalar>>& trace() const noexcept { return trace_; }

 private:
  const SortedNeighborDistances<Scalar>* snd_;
  const ParameterTable<Scalar>* table_;
  std::unordered_map<Index, Label> cache_;
  std::vector<TraceEntry<Scalar>> trace_;
};

struct StablePlateau {
  Index first_index = 0;
  Label cluster_count = 0;
  int window = 3;
};

namespace detail {

template <typename CountFn>
bool scan_plateau(Index size, CountFn& count, int window, StablePlateau& out) {
  Index run_start = 0;
  int run_len = 0;
  Label prev = 0;
  for (Index i = 0; i < size; ++i) {
    const Label c = count(i);
    if (i > 0 && c == prev && c > 0) {
      ++run_len;
    } else {
      run_start = i;
      run_len = 1;
    }
    prev = c;
    if (c > 0 && run_len >= window) {
      out = {run_start, c, window};
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// First index where the cluster count is positive and repeats three times in
/// a row. Falls back to two in a row; throws NoStablePlateau otherwise.
template <typename CountFn>
StablePlateau find_stable_plateau(Index size, CountFn&& count) {
  StablePlateau out;
  if (detail::scan_plateau(size, count, 3, out)) return out;
  if (detail::scan_plateau(size, count, 2, out)) return out;
  std::vector<Label> counts;
  std::ostringstream msg;
  msg << "no stable cluster count along the parameter sweep; counts:";
  for (Index i = 0; i < size; ++i) {
    counts.push_back(count(i));
    msg << ' ' << counts.back();
  }
  throw NoStablePlateau(msg.str(), std::move(counts));
}

/// Walks forward from `first` while the count stays at `n_true` and returns the
/// last index of that run.
template <typename CountFn>
Index linear_best_index(Index size, Index first, Label n_true, CountFn&& count) {
  Index best = first;
  while (best + 1 < size && count(best + 1) == n_true) ++best;
  return best;
}

struct BestIndex {
  Index index = 0;
  bool fallback = false;
};

/// Rightmost index in [first, size) whose count equals n_true, by binary search
/// under the assumption that counts do not increase along the sweep. The
/// answer is checked (count(best + 1) must differ) and recomputed by the
/// forward walk when that check fails.
template <typename CountFn>
BestIndex locate_best_index(Index size, Index first, Label n_true, CountFn&& count) {
  if (first < 0 || first >= size) throw InputError("plateau start outside the parameter table");
  if (count(first) != n_true) throw InputError("count at plateau start differs from the plateau value");

  Index lo = first;
  Index hi = size - 1;
  Index best = first;
  while (lo <= hi) {
    const Index mid = lo + (hi - lo) / 2;
    const Label c = count(mid);
    if (c == n_true) {
      best = mid;
      lo = mid + 1;
    } else if (c < n_true) {
      hi = mid - 1;
    } else {
      lo = mid + 1;
    }
  }
  if (best + 1 < size && count(best + 1) == n_true)
    return {linear_best_index(size, first, n_true, count), true};
  return {best, false};
}

template <typename Scalar = double>
struct AdaptationResult {
  Index best_index = 0;
  Index adaptive_k = 0;
  Label stable_cluster_count = 0;
  Index first_stable_index = 0;
  int stability_window = 3;
  Index dbscan_invocations = 0;
  bool fallback_used = false;
  std::vector<TraceEntry<Scalar>> trace;
};

enum class SearchMode { Binary, Linear };

template <typename Scalar>
StablePlateau find_stable_count(const Dataset<Scalar>& ds, const SortedNeighborDistances<Scalar>& snd,
                                const ParameterTable<Scalar>& table) {
  detail::check_sizes(ds, snd);
  SweepEvaluator<Scalar> eval(snd, table);
  return find_stable_plateau(table.size(), eval);
}

/// Picks the adaptive k: scan the paired sweep until the cluster count
/// stabilises, then find the last index of that plateau (binary search or a
/// forward walk) and return its MinPts.
template <typename Scalar>
AdaptationResult<Scalar> adapt_k(const Dataset<Scalar>& ds, const SortedNeighborDistances<Scalar>& snd,
                                 SearchMode mode = SearchMode::Binary) {
  detail::check_sizes(ds, snd);
  if (ds.size() < 5) throw InputError("dataset too small: need at least 5 points");
  const auto table = build_parameter_table(ds, snd);
  SweepEvaluator<Scalar> eval(snd, table);
  const auto plateau = find_stable_plateau(table.size(), eval);

  AdaptationResult<Scalar> r;
  r.first_stable_index = plateau.first_index;
  r.stable_cluster_count = plateau.cluster_count;
  r.stability_window = plateau.window;
  if (mode == SearchMode::Binary) {
    const auto best = locate_best_index(table.size(), plateau.first_index, plateau.cluster_count, eval);
    r.best_index = best.index;
    r.fallback_used = best.fallback;
  } else {
    r.best_index = linear_best_index(table.size(), plateau.first_index, plateau.cluster_count, eval);
  }
  r.adaptive_k = table.min_pts_list[static_cast<std::size_t>(r.best_index)];
  r.dbscan_invocations = eval.invocations();
  r.trace = eval.trace();
  return r;
}

}  // namespace amd
