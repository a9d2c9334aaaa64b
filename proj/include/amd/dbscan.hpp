#pragma once

#include "amd/dataset.hpp"
#include "amd/types.hpp"

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

namespace amd {

template <typename Scalar = double>
struct DbscanParams {
  Scalar eps{};
  Index min_pts = 1;

  void validate() const {
    if (!(eps > Scalar(0))) throw InputError("eps must be positive");
    if (min_pts < 1) throw InputError("min_pts must be at least 1");
  }
};

/// Per-point cluster ids in [0, num_clusters) or kNoise. `layer_of` is filled
/// by multi-density clustering only (-1 for noise).
struct Clustering {
  LabelVector labels;
  Label num_clusters = 0;
  std::vector<int> layer_of;

  Index noise_count() const {
    Index c = 0;
    for (Label l : labels) c += (l == kNoise);
    return c;
  }
};

/// Which points take part in a run; empty means "all of them".
using ActiveMask = std::vector<std::uint8_t>;

namespace detail {

inline constexpr Label kUnassigned = -2;

template <typename Scalar>
void check_sizes(const Dataset<Scalar>& ds, const SortedNeighborDistances<Scalar>& snd) {
  if (ds.size() != snd.size())
    throw InputError("distance table has " + std::to_string(snd.size()) + " rows but dataset has " +
                     std::to_string(ds.size()) + " points");
}

/// Indices of the (active) points within eps of i, excluding i, ascending by distance.
template <typename Scalar, typename Fn>
void for_each_neighbor(const SortedNeighborDistances<Scalar>& snd, Index i, Scalar eps,
                       const ActiveMask& active, Fn&& fn) {
  const auto nb = snd.neighbors(i);
  const Index len = snd.count_within(i, eps);
  for (Index c = 0; c < len; ++c) {
    const auto q = static_cast<Index>(nb[static_cast<std::size_t>(c)]);
    if (active.empty() || active[static_cast<std::size_t>(q)]) fn(q);
  }
}

template <typename Scalar>
std::vector<std::uint8_t> core_flags(const SortedNeighborDistances<Scalar>& snd,
                                     const DbscanParams<Scalar>& params, const ActiveMask& active) {
  const Index n = snd.size();
  std::vector<std::uint8_t> core(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < n; ++i) {
    if (!active.empty() && !active[static_cast<std::size_t>(i)]) continue;
    Index members = 1;  // the point itself
    if (active.empty()) {
      members += snd.count_within(i, params.eps);
    } else {
      for_each_neighbor(snd, i, params.eps, active, [&](Index) { ++members; });
    }
    core[static_cast<std::size_t>(i)] = members >= params.min_pts;
  }
  return core;
}

}  // namespace detail

/// Classic DBSCAN over the precomputed neighbor table, restricted to `active`
/// points when a mask is given (inactive points come back as kNoise).
///
/// A point is core when its eps-ball, itself included, holds at least min_pts
/// active points. Clusters are seeded from cores in ascending index order and
/// expanded breadth-first, so cluster ids follow the lowest core index of each
/// cluster and a border point reachable from several clusters joins the one
/// with the smallest id.
template <typename Scalar>
Clustering dbscan_masked(const SortedNeighborDistances<Scalar>& snd, const DbscanParams<Scalar>& params,
                         const ActiveMask& active = {}) {
  params.validate();
  const Index n = snd.size();
  if (!active.empty() && static_cast<Index>(active.size()) != n)
    throw InputError("active mask size does not match the dataset");

  const auto core = detail::core_flags(snd, params, active);
  Clustering out;
  out.labels.assign(static_cast<std::size_t>(n), detail::kUnassigned);
  std::deque<Index> queue;
  for (Index seed = 0; seed < n; ++seed) {
    const auto s = static_cast<std::size_t>(seed);
    if (!core[s] || out.labels[s] != detail::kUnassigned) continue;
    const Label id = out.num_clusters++;
    out.labels[s] = id;
    queue.push_back(seed);
    while (!queue.empty()) {
      const Index p = queue.front();
      queue.pop_front();
      detail::for_each_neighbor(snd, p, params.eps, active, [&](Index q) {
        auto& lq = out.labels[static_cast<std::size_t>(q)];
        if (lq != detail::kUnassigned) return;
        lq = id;
        if (core[static_cast<std::size_t>(q)]) queue.push_back(q);
      });
    }
  }
  for (auto& l : out.labels)
    if (l == detail::kUnassigned) l = kNoise;
  return out;
}

template <typename Scalar>
Clustering dbscan(const Dataset<Scalar>& ds, const SortedNeighborDistances<Scalar>& snd,
                  const DbscanParams<Scalar>& params) {
  detail::check_sizes(ds, snd);
  return dbscan_masked(snd, params);
}

/// Number of clusters DBSCAN would produce; only core connectivity is walked.
template <typename Scalar>
Label count_clusters(const SortedNeighborDistances<Scalar>& snd, const DbscanParams<Scalar>& params) {
  params.validate();
  const Index n = snd.size();
  const auto core = detail::core_flags(snd, params, ActiveMask{});
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(n), 0);
  std::vector<Index> stack;
  Label clusters = 0;
  for (Index seed = 0; seed < n; ++seed) {
    const auto s = static_cast<std::size_t>(seed);
    if (!core[s] || seen[s]) continue;
    ++clusters;
    seen[s] = 1;
    stack.push_back(seed);
    while (!stack.empty()) {
      const Index p = stack.back();
      stack.pop_back();
      detail::for_each_neighbor(snd, p, params.eps, ActiveMask{}, [&](Index q) {
        const auto u = static_cast<std::size_t>(q);
        if (core[u] && !seen[u]) {
          seen[u] = 1;
          stack.push_back(q);
        }
      });
    }
  }
  return clusters;
}

template <typename Scalar>
Label count_clusters(const Dataset<Scalar>& ds, const SortedNeighborDistances<Scalar>& snd,
                     const DbscanParams<Scalar>& params) {
  detail::check_sizes(ds, snd);
  return count_clusters(snd, params);
}

}  // namespace amd
