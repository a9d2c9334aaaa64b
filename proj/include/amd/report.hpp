#pragma once

#include "amd/dataset.hpp"
#include "amd/metrics.hpp"
#include "amd/multi_density.hpp"

#include <json.hpp>

#include <optional>
#include <ostream>
#include <string>

namespace amd {

inline constexpr int kReportSchemaVersion = 1;

struct MetricsBlock {
  double vnn = 0.0;
  DensityClass density_class = DensityClass::Single;
  std::optional<double> nmi;
  std::optional<double> accuracy;
  Label clusters_found = 0;
  Index noise_count = 0;
};

MetricsBlock evaluate(const Dataset<double>& ds, const SortedNeighborDistances<double>& snd,
                      const Clustering& clustering, bool exclude_noise_accuracy = false);

nlohmann::json metrics_json(const MetricsBlock& m);

/// Full run report: adaptation trace, histogram, candidates, layers, metrics.
nlohmann::json run_report(const Dataset<double>& ds, const AmdResult<double>& result, const MetricsBlock& metrics,
                          const PipelineOptions& options);

/// index, x0..x{d-1}, [truth_label,] predicted_label, layer
void write_labels_csv(std::ostream& out, const Dataset<double>& ds, const Clustering& clustering);

/// index, eps, min_pts, cluster_count (in evaluation order)
void write_trace_csv(std::ostream& out, const AdaptationResult<double>& adaptation);

/// bin_left, bin_right, count, smoothed
void write_histogram_csv(std::ostream& out, const KdisHistogram& hist);

/// 2-D scatter, one circle per point, noise in grey, caption in the lower left.
void write_scatter_svg(std::ostream& out, const Dataset<double>& ds, const LabelVector& labels,
                       const std::string& caption);

/// Bars of the k-dis histogram with the smoothed curve and peak markers.
void write_histogram_svg(std::ostream& out, const KdisHistogram& hist, Index k);

}  // namespace amd
