#pragma once

// Reference implementations used as test oracles. They favour directness over
// speed: distances are recomputed on every query and nothing is cached.

#include "amd/dataset.hpp"
#include "amd/dbscan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <vector>

namespace amd::testing {

inline double point_distance(const MatrixX<double>& p, Index a, Index b) {
  double s = 0.0;
  for (Index c = 0; c < p.cols(); ++c) {
    const double d = p(a, c) - p(b, c);
    s += d * d;
  }
  return std::sqrt(s);
}

/// DBSCAN via union-find over core points. Cluster ids are ordered by the
/// smallest core index of each component; a border point takes the smallest
/// id among the clusters of the cores within eps of it.
inline LabelVector reference_dbscan(const MatrixX<double>& p, double eps, Index min_pts) {
  const Index n = p.rows();
  std::vector<bool> core(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    Index members = 0;
    for (Index j = 0; j < n; ++j) members += point_distance(p, i, j) <= eps;
    core[static_cast<std::size_t>(i)] = members >= min_pts;
  }
  std::vector<Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Index{0});
  std::function<Index(Index)> find = [&](Index x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (core[static_cast<std::size_t>(i)] && core[static_cast<std::size_t>(j)] && point_distance(p, i, j) <= eps) {
        const Index a = find(i), b = find(j);
        parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
      }
  std::map<Index, Label> id_of_root;
  LabelVector labels(static_cast<std::size_t>(n), kNoise);
  for (Index i = 0; i < n; ++i) {
    if (!core[static_cast<std::size_t>(i)]) continue;
    const Index r = find(i);
    if (!id_of_root.count(r)) {
      const Label next = static_cast<Label>(id_of_root.size());
      id_of_root[r] = next;
    }
    labels[static_cast<std::size_t>(i)] = id_of_root[r];
  }
  for (Index i = 0; i < n; ++i) {
    if (core[static_cast<std::size_t>(i)]) continue;
    Label best = kNoise;
    for (Index j = 0; j < n; ++j)
      if (core[static_cast<std::size_t>(j)] && point_distance(p, i, j) <= eps) {
        const Label l = labels[static_cast<std::size_t>(j)];
        if (best == kNoise || l < best) best = l;
      }
    labels[static_cast<std::size_t>(i)] = best;
  }
  return labels;
}

inline Label reference_cluster_count(const MatrixX<double>& p, double eps, Index min_pts) {
  const auto labels = reference_dbscan(p, eps, min_pts);
  Label mx = -1;
  for (Label l : labels) mx = std::max(mx, l);
  return mx + 1;
}

/// Random points; with `grid` set they sit on an integer lattice so that many
/// pairwise distances coincide exactly.
inline MatrixX<double> random_points(std::mt19937_64& rng, Index n, Index d, bool grid) {
  MatrixX<double> p(n, d);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::uniform_int_distribution<int> g(0, 6);
  for (Index i = 0; i < n; ++i)
    for (Index c = 0; c < d; ++c) p(i, c) = grid ? static_cast<double>(g(rng)) : u(rng);
  return p;
}

/// Best number of matched points over every injective map of predicted
/// clusters into truth classes (noise excluded on both sides).
inline double brute_force_accuracy(const LabelVector& truth, const LabelVector& pred) {
  std::vector<Label> tc, pc;
  for (Label l : truth)
    if (l != kNoise && std::find(tc.begin(), tc.end(), l) == tc.end()) tc.push_back(l);
  for (Label l : pred)
    if (l != kNoise && std::find(pc.begin(), pc.end(), l) == pc.end()) pc.push_back(l);
  std::map<std::pair<Label, Label>, double> table;
  double noise_hits = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (pred[i] == kNoise) {
      noise_hits += truth[i] == kNoise;
    } else if (truth[i] != kNoise) {
      table[{pred[i], truth[i]}] += 1.0;
    }
  }
  double best = 0.0;
  std::vector<int> used(tc.size(), 0);
  std::function<void(std::size_t, double)> go = [&](std::size_t r, double acc) {
    if (r == pc.size()) {
      best = std::max(best, acc);
      return;
    }
    go(r + 1, acc);  // leave this predicted cluster unmatched
    for (std::size_t c = 0; c < tc.size(); ++c) {
      if (used[c]) continue;
      used[c] = 1;
      const auto it = table.find({pc[r], tc[c]});
      go(r + 1, acc + (it == table.end() ? 0.0 : it->second));
      used[c] = 0;
    }
  };
  go(0, 0.0);
  return (best + noise_hits) / static_cast<double>(truth.size());
}

/// Minimum SSE over every split of the sorted values into K contiguous
/// groups, equal values kept together.
inline double brute_force_kmeans_sse(std::vector<double> values, Index K) {
  std::sort(values.begin(), values.end());
  std::vector<std::size_t> breaks;  // indices where a new distinct value starts
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] != values[i - 1]) breaks.push_back(i);
  auto sse = [&](std::size_t a, std::size_t b) {
    double m = 0.0;
    for (std::size_t i = a; i < b; ++i) m += values[i];
    m /= static_cast<double>(b - a);
    double s = 0.0;
    for (std::size_t i = a; i < b; ++i) s += (values[i] - m) * (values[i] - m);
    return s;
  };
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> cut;
  std::function<void(std::size_t)> go = [&](std::size_t from) {
    if (static_cast<Index>(cut.size()) == K - 1) {
      double s = 0.0;
      std::size_t a = 0;
      for (std::size_t c : cut) {
        s += sse(a, c);
        a = c;
      }
      s += sse(a, values.size());
      best = std::min(best, s);
      return;
    }
    for (std::size_t b = from; b < breaks.size(); ++b) {
      cut.push_back(breaks[b]);
      go(b + 1);
      cut.pop_back();
    }
  };
  go(0);
  return best;
}

inline Dataset<double> two_blobs(std::uint64_t seed, Index per_blob = 30) {
  BlobsSpec spec;
  spec.seed = seed;
  spec.clusters = {{{0.0, 0.0}, 0.3, per_blob}, {{20.0, 0.0}, 0.3, per_blob}};
  return generate_blobs(spec);
}

}  // namespace amd::testing
