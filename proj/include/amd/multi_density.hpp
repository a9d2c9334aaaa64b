#pragma once

#include "amd/dataset.hpp"
#include "amd/dbscan.hpp"
#include "amd/eps_candidates.hpp"
#include "amd/param_adapt.hpp"
#include "amd/types.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace amd {

template <typename Scalar = double>
struct LayerReport {
  Index layer_index = 0;
  Scalar eps{};
  Index min_pts = 0;
  Index points_clustered = 0;
  Label clusters_found = 0;
};

/// Rounded mean number of other active points within eps of each active point.
template <typename Scalar>
Index obtain_min_pts(const SortedNeighborDistances<Scalar>& snd, const ActiveMask& active, Scalar eps) {
  const Index n = snd.size();
  Index members = 0;
  Index total = 0;
  for (Index i = 0; i < n; ++i) {
    if (!active.empty() && !active[static_cast<std::size_t>(i)]) continue;
    ++members;
    if (active.empty()) {
      total += snd.count_within(i, eps);
    } else {
      detail::for_each_neighbor(snd, i, eps, active, [&](Index) { ++total; });
    }
  }
  if (members < 2) throw InputError("MinPts estimation needs at least 2 active points");
  return min_pts_from_mean(static_cast<double>(total) / static_cast<double>(members));
}

/// Candidate radii closer than this (relative) are treated as one layer.
inline constexpr double kEpsMergeTolerance = 1e-9;

template <typename Scalar>
std::vector<Scalar> dedupe_candidates(std::vector<Scalar> eps) {
  std::sort(eps.begin(), eps.end());
  std::vector<Scalar> out;
  for (Scalar e : eps) {
    if (!(e > Scalar(0))) continue;  // zero radii (all-duplicate k-dis) cannot form a layer
    if (!out.empty() && std::abs(static_cast<double>(e - out.back())) <=
                            kEpsMergeTolerance * std::max(std::abs(static_cast<double>(e)), std::abs(static_cast<double>(out.back()))))
      continue;
    out.push_back(e);
  }
  return out;
}

template <typename Scalar = double>
struct MultiDensityResult {
  Clustering clustering;
  std::vector<LayerReport<Scalar>> layers;
};

/// Layered DBSCAN: radii in ascending order, each layer estimating its MinPts
/// on the points still unclustered and freezing whatever it clusters.
/// Whatever survives the last layer is noise.
template <typename Scalar>
MultiDensityResult<Scalar> multi_density_cluster(const Dataset<Scalar>& ds, const SortedNeighborDistances<Scalar>& snd,
                                                 const std::vector<Scalar>& candidates) {
  detail::check_sizes(ds, snd);
  const auto radii = dedupe_candidates(candidates);
  if (radii.empty()) throw InputError("no positive candidate Eps");

  const Index n = snd.size();
  MultiDensityResult<Scalar> out;
  auto& cl = out.clustering;
  cl.labels.assign(static_cast<std::size_t>(n), kNoise);
  cl.layer_of.assign(static_cast<std::size_t>(n), -1);
  ActiveMask active(static_cast<std::size_t>(n), 1);
  Index remaining = n;

  for (std::size_t layer = 0; layer < radii.size(); ++layer) {
    if (remaining < 2) break;
    const Scalar eps = radii[layer];
    const Index min_pts = obtain_min_pts(snd, active, eps);
    const auto local = dbscan_masked(snd, DbscanParams<Scalar>{eps, min_pts}, active);

    LayerReport<Scalar> rep{static_cast<Index>(layer), eps, min_pts, 0, local.num_clusters};
    for (Index i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      if (!active[u] || local.labels[u] == kNoise) continue;
      cl.labels[u] = cl.num_clusters + local.labels[u];
      cl.layer_of[u] = static_cast<int>(layer);
      active[u] = 0;
      ++rep.points_clustered;
    }
    cl.num_clusters += local.num_clusters;
    remaining -= rep.points_clustered;
    out.layers.push_back(rep);
  }
  return out;
}

struct PipelineOptions {
  std::optional<Index> peaks;  // manual N
  std::optional<Index> k;      // skip adaptation and use this k
  std::optional<Index> bins;   // histogram bin count
};

template <typename Scalar = double>
struct AmdResult {
  Clustering clustering;
  std::optional<AdaptationResult<Scalar>> adaptation;  // empty when k was forced
  Index k = 0;
  KdisValues<Scalar> kdis;
  KdisHistogram histogram;
  CandidateEpsList<Scalar> candidates;
  std::vector<LayerReport<Scalar>> layers;
};

/// The full pipeline: adaptive k, candidate radii from the k-dis histogram,
/// then layered DBSCAN.
template <typename Scalar>
AmdResult<Scalar> amd_dbscan(const Dataset<Scalar>& ds, const SortedNeighborDistances<Scalar>& snd,
                             const PipelineOptions& opt = {}) {
  detail::check_sizes(ds, snd);
  if (ds.size() < 5) throw InputError("dataset too small: need at least 5 points, got " + std::to_string(ds.size()));

  AmdResult<Scalar> r;
  if (opt.k) {
    r.k = *opt.k;
  } else {
    r.adaptation = adapt_k(ds, snd);
    r.k = r.adaptation->adaptive_k;
  }
  r.kdis = compute_kdis(snd, r.k);
  r.histogram = build_histogram(r.kdis, opt.bins);
  r.candidates = candidate_eps(r.kdis, r.histogram, opt.peaks);
  auto md = multi_density_cluster(ds, snd, r.candidates.eps_values);
  r.clustering = std::move(md.clustering);
  r.layers = std::move(md.layers);
  return r;
}

template <typename Scalar>
AmdResult<Scalar> amd_dbscan(const Dataset<Scalar>& ds, const PipelineOptions& opt = {}) {
  if (ds.size() < 5) throw InputError("dataset too small: need at least 5 points, got " + std::to_string(ds.size()));
  const SortedNeighborDistances<Scalar> snd(ds);
  return amd_dbscan(ds, snd, opt);
}

}  // namespace amd
