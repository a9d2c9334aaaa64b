#pragma once

#include "amd/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace amd {

/// n points in d-dimensional Euclidean space, one point per row, with optional
/// ground-truth labels (kNoise marks ground-truth noise). Immutable once built.
template <typename Scalar = double>
class Dataset {
 public:
  Dataset(MatrixX<Scalar> points, std::optional<LabelVector> truth = std::nullopt,
          std::string name = {})
      : points_(std::move(points)), truth_(std::move(truth)), name_(std::move(name)) {
    if (points_.rows() < 1) throw InputError("dataset is empty");
    if (points_.cols() < 1) throw InputError("dataset has zero dimensions");
    if (!points_.allFinite()) throw InputError("dataset contains non-finite coordinates");
    if (truth_ && static_cast<Index>(truth_->size()) != points_.rows())
      throw InputError("truth label count does not match point count");
  }

  const MatrixX<Scalar>& points() const noexcept { return points_; }
  const std::optional<LabelVector>& truth() const noexcept { return truth_; }
  const std::string& name() const noexcept { return name_; }
  Index size() const noexcept { return points_.rows(); }
  Index dim() const noexcept { return points_.cols(); }
  bool has_truth() const noexcept { return truth_.has_value(); }

  /// Rows picked (and reordered) by `order`; labels follow their points.
  Dataset select(std::span<const Index> order) const {
    MatrixX<Scalar> pts(static_cast<Index>(order.size()), dim());
    std::optional<LabelVector> labels;
    if (truth_) labels.emplace(order.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
      pts.row(static_cast<Index>(r)) = points_.row(order[r]);
      if (labels) (*labels)[r] = (*truth_)[static_cast<std::size_t>(order[r])];
    }
    return Dataset(std::move(pts), std::move(labels), name_);
  }

 private:
  MatrixX<Scalar> points_;
  std::optional<LabelVector> truth_;
  std::string name_;
};

/// For every point, the ascending Euclidean distances to all *other* points
/// together with the index of the point at each distance. Row i has n-1
/// entries; column k (1-based) is the distance to the k-th nearest other point.
/// Ties are ordered by neighbor index so the layout is fully deterministic.
template <typename Scalar = double>
class SortedNeighborDistances {
 public:
  explicit SortedNeighborDistances(const Dataset<Scalar>& ds) {
    const Index n = ds.size();
    if (n < 2) throw InputError("sorted neighbor distances need at least 2 points");
    dist_.resize(n, n - 1);
    idx_.resize(n, n - 1);

    const auto& pts = ds.points();
    std::vector<std::pair<Scalar, std::int32_t>> row(static_cast<std::size_t>(n - 1));
    for (Index i = 0; i < n; ++i) {
      std::size_t w = 0;
      for (Index j = 0; j < n; ++j) {
        if (j == i) continue;
        row[w++] = {(pts.row(j) - pts.row(i)).norm(), static_cast<std::int32_t>(j)};
      }
      std::sort(row.begin(), row.end());
      for (Index c = 0; c < n - 1; ++c) {
        dist_(i, c) = row[static_cast<std::size_t>(c)].first;
        idx_(i, c) = row[static_cast<std::size_t>(c)].second;
      }
    }
  }

  Index size() const noexcept { return dist_.rows(); }
  Index row_length() const noexcept { return dist_.cols(); }

  std::span<const Scalar> distances(Index i) const {
    return {dist_.data() + i * dist_.cols(), static_cast<std::size_t>(dist_.cols())};
  }
  std::span<const std::int32_t> neighbors(Index i) const {
    return {idx_.data() + i * idx_.cols(), static_cast<std::size_t>(idx_.cols())};
  }

  /// Distance from point i to its k-th nearest other point, k in [1, n-1].
  Scalar kth_distance(Index i, Index k) const { return dist_(i, k - 1); }

  /// The k-th column of the sorted matrix (k 1-based).
  VectorX<Scalar> column(Index k) const {
    if (k < 1 || k > row_length()) throw InputError("neighbor rank out of range");
    return dist_.col(k - 1);
  }

  /// Number of other points within `eps` (inclusive) of point i.
  Index count_within(Index i, Scalar eps) const {
    const auto row = distances(i);
    return std::upper_bound(row.begin(), row.end(), eps) - row.begin();
  }

  const MatrixX<Scalar>& matrix() const noexcept { return dist_; }

 private:
  MatrixX<Scalar> dist_;
  MatrixX<std::int32_t> idx_;
};

struct BlobCluster {
  std::vector<double> center;
  double std = 1.0;
  Index count = 1;
};

/// Isotropic Gaussian blobs plus optional uniform background noise.
struct BlobsSpec {
  std::string name = "blobs";
  std::vector<BlobCluster> clusters;
  Index noise_count = 0;
  std::vector<double> noise_min;
  std::vector<double> noise_max;
  std::uint64_t seed = 0;

  Index dim() const { return clusters.empty() ? 0 : static_cast<Index>(clusters.front().center.size()); }
  Index total() const;
};

/// Parse whitespace/comma separated numeric rows; a trailing integer column is
/// taken as the truth label when `labels` is unset and every row's last token
/// is an integer while the file has at least 3 columns. Lines starting with '#'
/// are skipped.
enum class LabelColumn { Auto, Present, Absent };

Dataset<double> load_dataset(const std::filesystem::path& path,
                             LabelColumn labels = LabelColumn::Auto);
Dataset<double> parse_dataset(const std::string& text, const std::string& name = {},
                              LabelColumn labels = LabelColumn::Auto);

/// Blob specs are JSON:
///   {"name": "...", "seed": 7,
///    "clusters": [{"center": [x, y], "std": 0.5, "count": 800}, ...],
///    "noise": {"count": 50, "min": [x0, y0], "max": [x1, y1]}}
BlobsSpec parse_blobs_spec(const std::string& text);
BlobsSpec load_blobs_spec(const std::filesystem::path& path);
std::string blobs_spec_to_json(const BlobsSpec& spec);

/// Deterministic generator: std::mt19937_64 seeded with spec.seed, 53-bit
/// uniform doubles and Box-Muller normals (no std::*_distribution, which is
/// not portable across standard libraries). Clusters are emitted in order,
/// then noise; truth labels are the cluster index and kNoise for noise.
Dataset<double> generate_blobs(const BlobsSpec& spec);

/// True when the file looks like a blob spec (JSON object) rather than point rows.
bool is_blobs_spec_file(const std::filesystem::path& path);

}  // namespace amd
