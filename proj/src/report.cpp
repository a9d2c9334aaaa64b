#include "amd/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace amd {

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::string fmt_short(double v, int prec = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(prec) << v;
  return s.str();
}

// Evenly spread hues; ids beyond the palette wrap around.
std::string cluster_color(Label id) {
  if (id == kNoise) return "#b0b0b0";
  static constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                                             "#e377c2", "#bcbd22", "#17becf", "#393b79", "#637939", "#8c6d31",
                                             "#843c39", "#7b4173", "#3182bd", "#e6550d", "#31a354", "#756bb1"};
  return kPalette[static_cast<std::size_t>(id) % std::size(kPalette)];
}

}  // namespace

MetricsBlock evaluate(const Dataset<double>& ds, const SortedNeighborDistances<double>& snd,
                      const Clustering& clustering, bool exclude_noise_accuracy) {
  MetricsBlock m;
  const auto v = vnn(ds, snd);
  m.vnn = v.vnn;
  m.density_class = v.density_class;
  m.clusters_found = clustering.num_clusters;
  m.noise_count = clustering.noise_count();
  if (ds.truth()) {
    m.nmi = nmi(*ds.truth(), clustering.labels);
    m.accuracy = accuracy(*ds.truth(), clustering.labels, exclude_noise_accuracy);
  }
  return m;
}

nlohmann::json metrics_json(const MetricsBlock& m) {
  nlohmann::json j;
  j["vnn"] = m.vnn;
  j["density_class"] = to_string(m.density_class);
  j["nmi"] = m.nmi ? nlohmann::json(*m.nmi) : nlohmann::json(nullptr);
  j["accuracy"] = m.accuracy ? nlohmann::json(*m.accuracy) : nlohmann::json(nullptr);
  j["clusters_found"] = m.clusters_found;
  j["noise_count"] = m.noise_count;
  return j;
}

nlohmann::json run_report(const Dataset<double>& ds, const AmdResult<double>& r, const MetricsBlock& metrics,
                          const PipelineOptions& options) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["dataset"] = {{"name", ds.name()}, {"n", ds.size()}, {"d", ds.dim()}, {"has_truth", ds.has_truth()}};
  j["options"] = {{"peaks", options.peaks ? nlohmann::json(*options.peaks) : nlohmann::json(nullptr)},
                  {"k", options.k ? nlohmann::json(*options.k) : nlohmann::json(nullptr)},
                  {"bins", options.bins ? nlohmann::json(*options.bins) : nlohmann::json(nullptr)}};
  if (r.adaptation) {
    const auto& a = *r.adaptation;
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& t : a.trace)
      trace.push_back({{"index", t.index}, {"eps", t.eps}, {"min_pts", t.min_pts}, {"cluster_count", t.cluster_count}});
    j["adaptation"] = {{"best_index", a.best_index},
                       {"adaptive_k", a.adaptive_k},
                       {"stable_cluster_count", a.stable_cluster_count},
                       {"first_stable_index", a.first_stable_index},
                       {"stability_window", a.stability_window},
                       {"dbscan_invocations", a.dbscan_invocations},
                       {"fallback_used", a.fallback_used},
                       {"trace", trace}};
  } else {
    j["adaptation"] = nullptr;
  }
  j["k"] = r.k;
  j["histogram"] = {{"bin_edges", r.histogram.bin_edges},
                    {"counts", r.histogram.counts},
                    {"smoothed", r.histogram.smoothed},
                    {"peaks", r.histogram.peaks},
                    {"n_peaks", r.histogram.n_peaks}};
  j["candidates"] = r.candidates.eps_values;
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : r.layers)
    layers.push_back({{"layer_index", l.layer_index},
                      {"eps", l.eps},
                      {"min_pts", l.min_pts},
                      {"points_clustered", l.points_clustered},
                      {"clusters_found", l.clusters_found}});
  j["layers"] = layers;
  j["metrics"] = metrics_json(metrics);
  return j;
}

void write_labels_csv(std::ostream& out, const Dataset<double>& ds, const Clustering& cl) {
  out << "index";
  for (Index c = 0; c < ds.dim(); ++c) out << ",x" << c;
  if (ds.truth()) out << ",truth_label";
  out << ",predicted_label,layer\n";
  for (Index i = 0; i < ds.size(); ++i) {
    const auto u = static_cast<std::size_t>(i);
    out << i;
    for (Index c = 0; c < ds.dim(); ++c) out << ',' << fmt(ds.points()(i, c));
    if (ds.truth()) out << ',' << (*ds.truth())[u];
    out << ',' << cl.labels[u] << ',' << (cl.layer_of.empty() ? -1 : cl.layer_of[u]) << '\n';
  }
}

void write_trace_csv(std::ostream& out, const AdaptationResult<double>& a) {
  out << "index,eps,min_pts,cluster_count\n";
  for (const auto& t : a.trace) out << t.index << ',' << fmt(t.eps) << ',' << t.min_pts << ',' << t.cluster_count << '\n';
}

void write_histogram_csv(std::ostream& out, const KdisHistogram& h) {
  out << "bin_left,bin_right,count,smoothed\n";
  for (Index b = 0; b < h.bins(); ++b) {
    const auto u = static_cast<std::size_t>(b);
    out << fmt(h.bin_edges[u]) << ',' << fmt(h.bin_edges[u + 1]) << ',' << h.counts[u] << ',' << fmt(h.smoothed[u])
        << '\n';
  }
}

void write_scatter_svg(std::ostream& out, const Dataset<double>& ds, const LabelVector& labels,
                       const std::string& caption) {
  if (ds.dim() != 2) throw InputError("scatter plots need 2-D data");
  constexpr double kSize = 600.0;
  constexpr double kMargin = 20.0;
  const auto& p = ds.points();
  const double x0 = p.col(0).minCoeff(), x1 = p.col(0).maxCoeff();
  const double y0 = p.col(1).minCoeff(), y1 = p.col(1).maxCoeff();
  const double span = std::max({x1 - x0, y1 - y0, 1e-12});
  const double scale = (kSize - 2 * kMargin) / span;

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize
      << "\" viewBox=\"0 0 " << kSize << ' ' << kSize << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const double r = std::clamp(300.0 / std::sqrt(static_cast<double>(ds.size())), 0.8, 4.0);
  for (Index i = 0; i < ds.size(); ++i) {
    const double cx = kMargin + (p(i, 0) - x0) * scale;
    const double cy = kSize - kMargin - (p(i, 1) - y0) * scale;
    out << "<circle cx=\"" << fmt_short(cx, 2) << "\" cy=\"" << fmt_short(cy, 2) << "\" r=\"" << fmt_short(r, 2)
        << "\" fill=\"" << cluster_color(labels[static_cast<std::size_t>(i)]) << "\"/>\n";
  }
  out << "<text x=\"" << kMargin << "\" y=\"" << kSize - 4 << "\" font-family=\"sans-serif\" font-size=\"16\">"
      << caption << "</text>\n</svg>\n";
}

void write_histogram_svg(std::ostream& out, const KdisHistogram& h, Index k) {
  constexpr double kW = 640.0, kH = 360.0, kMargin = 30.0;
  const double tallest = std::max<double>(1.0, static_cast<double>(*std::max_element(h.counts.begin(), h.counts.end())));
  const double bw = (kW - 2 * kMargin) / static_cast<double>(h.bins());
  const double sy = (kH - 2 * kMargin) / tallest;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\" viewBox=\"0 0 "
      << kW << ' ' << kH << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (Index b = 0; b < h.bins(); ++b) {
    const double c = static_cast<double>(h.counts[static_cast<std::size_t>(b)]);
    out << "<rect x=\"" << fmt_short(kMargin + b * bw, 2) << "\" y=\"" << fmt_short(kH - kMargin - c * sy, 2)
        << "\" width=\"" << fmt_short(bw, 2) << "\" height=\"" << fmt_short(c * sy, 2) << "\" fill=\"#7fa7d1\"/>\n";
  }
  out << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" points=\"";
  for (Index b = 0; b < h.bins(); ++b)
    out << fmt_short(kMargin + (b + 0.5) * bw, 2) << ','
        << fmt_short(kH - kMargin - h.smoothed[static_cast<std::size_t>(b)] * sy, 2) << ' ';
  out << "\"/>\n";
  for (Index pk : h.peaks)
    out << "<circle cx=\"" << fmt_short(kMargin + (pk + 0.5) * bw, 2) << "\" cy=\""
        << fmt_short(kH - kMargin - h.smoothed[static_cast<std::size_t>(pk)] * sy, 2)
        << "\" r=\"4\" fill=\"#d62728\"/>\n";
  out << "<text x=\"" << kMargin << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">k-dis histogram (k = " << k
      << ", peaks = " << h.n_peaks << ")</text>\n</svg>\n";
}

}  // namespace amd
