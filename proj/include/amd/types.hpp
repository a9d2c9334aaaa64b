#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace amd {

using Index = Eigen::Index;
using Label = std::int32_t;
using LabelVector = std::vector<Label>;

/// Label for points that belong to no cluster (also used for ground-truth noise).
inline constexpr Label kNoise = -1;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Bad input: malformed files, violated preconditions, out-of-range overrides.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The paired Eps/MinPts sweep never settled on a stable positive cluster count.
class NoStablePlateau : public std::runtime_error {
 public:
  NoStablePlateau(const std::string& what, std::vector<Label> counts)
      : std::runtime_error(what), counts_(std::move(counts)) {}

  const std::vector<Label>& counts() const noexcept { return counts_; }

 private:
  std::vector<Label> counts_;
};

}  // namespace amd
