#include "amd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace amd {

std::string to_string(DensityClass c) {
  switch (c) {
    case DensityClass::Single: return "Single";
    case DensityClass::Multi: return "Multi";
    case DensityClass::ExtremeMulti: return "ExtremeMulti";
  }
  return "?";
}

DensityClass classify_vnn(double v) {
  if (v > 100.0) return DensityClass::ExtremeMulti;
  if (v >= 10.0) return DensityClass::Multi;
  return DensityClass::Single;
}

namespace {

void check_pair(std::span<const Label> a, std::span<const Label> b) {
  if (a.size() != b.size())
    throw InputError("label sequences differ in length (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
}

// Dense ids for the distinct values of `labels`, in ascending label order.
std::vector<Index> densify(std::span<const Label> labels, Index& distinct) {
  std::map<Label, Index> ids;
  for (Label l : labels) ids.emplace(l, 0);
  Index next = 0;
  for (auto& [l, id] : ids) id = next++;
  distinct = next;
  std::vector<Index> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = ids[labels[i]];
  return out;
}

double entropy(const std::vector<double>& counts, double n) {
  double h = 0.0;
  for (double c : counts)
    if (c > 0.0) h -= (c / n) * std::log(c / n);
  return h;
}

}  // namespace

double nmi(std::span<const Label> truth, std::span<const Label> predicted) {
  check_pair(truth, predicted);
  if (truth.empty()) throw InputError("NMI of empty labelings");
  Index kt = 0, kp = 0;
  const auto t = densify(truth, kt);
  const auto p = densify(predicted, kp);
  const auto n = static_cast<double>(truth.size());

  std::vector<double> table(static_cast<std::size_t>(kt * kp), 0.0), rt(static_cast<std::size_t>(kt), 0.0),
      rp(static_cast<std::size_t>(kp), 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    table[static_cast<std::size_t>(t[i] * kp + p[i])] += 1.0;
    rt[static_cast<std::size_t>(t[i])] += 1.0;
    rp[static_cast<std::size_t>(p[i])] += 1.0;
  }
  const double ht = entropy(rt, n);
  const double hp = entropy(rp, n);
  if (kt == 1 && kp == 1) return 1.0;
  if (ht == 0.0 || hp == 0.0) return 0.0;

  double mi = 0.0;
  for (Index a = 0; a < kt; ++a)
    for (Index b = 0; b < kp; ++b) {
      const double c = table[static_cast<std::size_t>(a * kp + b)];
      if (c > 0.0) mi += (c / n) * std::log(c * n / (rt[static_cast<std::size_t>(a)] * rp[static_cast<std::size_t>(b)]));
    }
  return std::clamp(mi / (0.5 * (ht + hp)), 0.0, 1.0);
}

std::vector<Index> max_weight_assignment(const std::vector<double>& weights, Index rows, Index cols) {
  if (static_cast<Index>(weights.size()) != rows * cols) throw InputError("weight matrix size mismatch");
  const Index m = std::max(rows, cols);
  if (m == 0) return {};
  double wmax = 0.0;
  for (double w : weights) wmax = std::max(wmax, w);

  // Square cost matrix (1-based for the potentials formulation); padding costs wmax.
  auto cost = [&](Index r, Index c) {
    if (r >= rows || c >= cols) return wmax;
    return wmax - weights[static_cast<std::size_t>(r * cols + c)];
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(m + 1), 0.0), v(static_cast<std::size_t>(m + 1), 0.0);
  std::vector<Index> match(static_cast<std::size_t>(m + 1), 0), way(static_cast<std::size_t>(m + 1), 0);
  for (Index i = 1; i <= m; ++i) {
    match[0] = i;
    Index j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(m + 1), inf);
    std::vector<char> used(static_cast<std::size_t>(m + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const Index i0 = match[static_cast<std::size_t>(j0)];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= m; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        if (used[uj]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[uj];
        if (cur < minv[uj]) {
          minv[uj] = cur;
          way[uj] = j0;
        }
        if (minv[uj] < delta) {
          delta = minv[uj];
          j1 = j;
        }
      }
      for (Index j = 0; j <= m; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        if (used[uj]) {
          u[static_cast<std::size_t>(match[uj])] += delta;
          v[uj] -= delta;
        } else {
          minv[uj] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<std::size_t>(j0)] != 0);
    do {
      const Index j1 = way[static_cast<std::size_t>(j0)];
      match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<Index> row_to_col(static_cast<std::size_t>(rows), -1);
  for (Index j = 1; j <= m; ++j) {
    const Index r = match[static_cast<std::size_t>(j)] - 1;
    if (r >= 0 && r < rows && j - 1 < cols) row_to_col[static_cast<std::size_t>(r)] = j - 1;
  }
  return row_to_col;
}

double accuracy(std::span<const Label> truth, std::span<const Label> predicted, bool exclude_noise) {
  check_pair(truth, predicted);
  if (truth.empty()) throw InputError("accuracy of empty labelings");

  std::map<Label, Index> pred_ids, truth_ids;
  Index noise_hits = 0;
  Index denominator = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (predicted[i] == kNoise) {
      if (exclude_noise) continue;
      noise_hits += (truth[i] == kNoise);
      ++denominator;
      continue;
    }
    ++denominator;
    pred_ids.emplace(predicted[i], 0);
    if (truth[i] != kNoise) truth_ids.emplace(truth[i], 0);
  }
  if (denominator == 0) return 0.0;
  Index next = 0;
  for (auto& [l, id] : pred_ids) id = next++;
  next = 0;
  for (auto& [l, id] : truth_ids) id = next++;

  const auto rows = static_cast<Index>(pred_ids.size());
  const auto cols = static_cast<Index>(truth_ids.size());
  std::vector<double> table(static_cast<std::size_t>(rows * cols), 0.0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (predicted[i] == kNoise || truth[i] == kNoise) continue;
    table[static_cast<std::size_t>(pred_ids[predicted[i]] * cols + truth_ids[truth[i]])] += 1.0;
  }
  double matched = static_cast<double>(noise_hits);
  if (rows > 0 && cols > 0) {
    const auto assign = max_weight_assignment(table, rows, cols);
    for (Index r = 0; r < rows; ++r)
      if (assign[static_cast<std::size_t>(r)] >= 0)
        matched += table[static_cast<std::size_t>(r * cols + assign[static_cast<std::size_t>(r)])];
  }
  return matched / static_cast<double>(denominator);
}

}  // namespace amd
