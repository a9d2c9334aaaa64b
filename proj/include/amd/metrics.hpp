#pragma once

#include "amd/dataset.hpp"
#include "amd/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace amd {

enum class DensityClass { Single, Multi, ExtremeMulti };

std::string to_string(DensityClass c);

/// Single below 10, ExtremeMulti above 100, Multi in between (10 inclusive).
DensityClass classify_vnn(double vnn);

template <typename Scalar = double>
struct VnnReport {
  Scalar eps1{};
  std::vector<Index> neighbor_counts;
  double vnn = 0.0;
  DensityClass density_class = DensityClass::Single;
};

/// Variance (population) of the number of other points within the mean
/// nearest-neighbour distance.
template <typename Scalar>
VnnReport<Scalar> vnn(const Dataset<Scalar>& ds, const SortedNeighborDistances<Scalar>& snd) {
  if (ds.size() != snd.size()) throw InputError("distance table does not match the dataset");
  const Index n = snd.size();
  if (n < 2) throw InputError("VNN needs at least 2 points");
  VnnReport<Scalar> r;
  r.eps1 = snd.matrix().col(0).mean();
  r.neighbor_counts.resize(static_cast<std::size_t>(n));
  double mean = 0.0;
  for (Index i = 0; i < n; ++i) {
    r.neighbor_counts[static_cast<std::size_t>(i)] = snd.count_within(i, r.eps1);
    mean += static_cast<double>(r.neighbor_counts[static_cast<std::size_t>(i)]);
  }
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (Index c : r.neighbor_counts) var += (static_cast<double>(c) - mean) * (static_cast<double>(c) - mean);
  r.vnn = var / static_cast<double>(n);
  r.density_class = classify_vnn(r.vnn);
  return r;
}

/// Normalised mutual information, arithmetic-mean normalisation, natural log.
/// Noise is an ordinary label value. Two single-cluster partitions score 1;
/// otherwise a zero-entropy side scores 0.
double nmi(std::span<const Label> truth, std::span<const Label> predicted);

/// Clustering accuracy under the best one-to-one matching of predicted
/// clusters to truth classes. Predicted noise is correct only where truth is
/// noise. With `exclude_noise`, points predicted as noise are dropped from the
/// denominator instead.
double accuracy(std::span<const Label> truth, std::span<const Label> predicted, bool exclude_noise = false);

/// Maximum-weight assignment on a rows x cols weight matrix (row-major).
/// Returns, for each row, the matched column or -1.
std::vector<Index> max_weight_assignment(const std::vector<double>& weights, Index rows, Index cols);

}  // namespace amd
