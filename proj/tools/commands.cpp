#include "commands.hpp"

#include "amd/metrics.hpp"
#include "amd/param_adapt.hpp"
#include "amd/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace amd::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot write " + path.string());
  return f;
}

std::string mode_name(AblationMode m) {
  switch (m) {
    case AblationMode::FixedK4: return "fixed-k-4";
    case AblationMode::KHalfN: return "k-half-n";
    case AblationMode::Auto: return "auto";
  }
  return "?";
}

std::string opt_num(const std::optional<double>& v) {
  if (!v) return "-";
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << *v;
  return s.str();
}

struct RunOutcome {
  AmdResult<double> result;
  MetricsBlock metrics;
};

RunOutcome run_pipeline(const Dataset<double>& ds, const SortedNeighborDistances<double>& snd,
                        const PipelineOptions& opt, bool exclude_noise) {
  RunOutcome o{amd_dbscan(ds, snd, opt), {}};
  o.metrics = evaluate(ds, snd, o.result.clustering, exclude_noise);
  return o;
}

void write_outputs(const fs::path& dir, const Dataset<double>& ds, const RunOutcome& o, const PipelineOptions& opt) {
  fs::create_directories(dir);
  {
    auto f = open_out(dir / "report.json");
    f << run_report(ds, o.result, o.metrics, opt).dump(2) << '\n';
  }
  {
    auto f = open_out(dir / "labels.csv");
    write_labels_csv(f, ds, o.result.clustering);
  }
  if (o.result.adaptation) {
    auto f = open_out(dir / "trace.csv");
    write_trace_csv(f, *o.result.adaptation);
  }
  {
    auto f = open_out(dir / "histogram.csv");
    write_histogram_csv(f, o.result.histogram);
  }
  {
    auto f = open_out(dir / "histogram.svg");
    write_histogram_svg(f, o.result.histogram, o.result.k);
  }
  if (ds.dim() == 2) {
    auto f = open_out(dir / "scatter.svg");
    const std::string caption = o.metrics.accuracy ? "accuracy " + opt_num(o.metrics.accuracy) : ds.name();
    write_scatter_svg(f, ds, o.result.clustering.labels, caption);
  }
}

void print_summary(std::ostream& out, const Dataset<double>& ds, const RunOutcome& o) {
  const auto& r = o.result;
  out << "dataset " << ds.name() << ": n=" << ds.size() << " d=" << ds.dim() << '\n';
  if (r.adaptation)
    out << "adaptive k=" << r.k << " (best index " << r.adaptation->best_index << ", stable count "
        << r.adaptation->stable_cluster_count << ", " << r.adaptation->dbscan_invocations << " DBSCAN runs"
        << (r.adaptation->fallback_used ? ", linear fallback" : "") << ")\n";
  else
    out << "forced k=" << r.k << '\n';
  out << "histogram peaks=" << r.histogram.n_peaks << " candidates:";
  for (double e : r.candidates.eps_values) out << ' ' << e;
  out << '\n';
  for (const auto& l : r.layers)
    out << "  layer " << l.layer_index << ": eps=" << l.eps << " min_pts=" << l.min_pts
        << " clustered=" << l.points_clustered << " clusters=" << l.clusters_found << '\n';
  out << "clusters=" << o.metrics.clusters_found << " noise=" << o.metrics.noise_count << " vnn=" << o.metrics.vnn
      << " (" << to_string(o.metrics.density_class) << ") accuracy=" << opt_num(o.metrics.accuracy)
      << " nmi=" << opt_num(o.metrics.nmi) << '\n';
}

// Last column of each data line, or the named column of a CSV with a header.
LabelVector read_labels(const std::string& path, const std::string& preferred_column) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  LabelVector labels;
  std::string line;
  std::optional<std::size_t> column;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> tokens;
    std::string tok;
    std::istringstream ls(line);
    while (std::getline(ls, tok, ',')) {
      std::istringstream ws(tok);
      std::string piece;
      while (ws >> piece) tokens.push_back(piece);
    }
    if (tokens.empty()) continue;
    if (first) {
      first = false;
      const bool header = std::any_of(tokens.begin(), tokens.end(), [](const std::string& t) {
        return !t.empty() && (std::isalpha(static_cast<unsigned char>(t[0])) || t[0] == '_');
      });
      if (header) {
        auto it = std::find(tokens.begin(), tokens.end(), preferred_column);
        column = it == tokens.end() ? tokens.size() - 1 : static_cast<std::size_t>(it - tokens.begin());
        continue;
      }
    }
    const auto& cell = column ? tokens.at(*column) : tokens.back();
    try {
      std::size_t used = 0;
      const long v = std::stol(cell, &used);
      if (used != cell.size()) throw std::invalid_argument(cell);
      labels.push_back(static_cast<Label>(v));
    } catch (const std::exception&) {
      throw InputError(path + ": '" + cell + "' is not an integer label");
    }
  }
  if (labels.empty()) throw InputError(path + " holds no labels");
  return labels;
}

}  // namespace

Dataset<double> load_input(const std::string& path, const RunConfig& cfg, bool is_spec) {
  if (!fs::exists(path)) throw InputError("no such file: " + path);
  if (is_spec || is_blobs_spec_file(path)) {
    auto spec = load_blobs_spec(path);
    if (cfg.seed) spec.seed = *cfg.seed;
    return generate_blobs(spec);
  }
  return load_dataset(path, cfg.labels);
}

Dataset<double> single_input(const RunConfig& cfg) {
  if (cfg.data.size() + cfg.spec.size() != 1) throw InputError("give exactly one input (--data or --spec)");
  return cfg.data.empty() ? load_input(cfg.spec.front(), cfg, true) : load_input(cfg.data.front(), cfg, false);
}

PipelineOptions pipeline_options(const RunConfig& cfg) { return {cfg.peaks, cfg.k, cfg.bins}; }

int cmd_cluster(const RunConfig& cfg, std::ostream& out) {
  const auto ds = single_input(cfg);
  if (ds.size() < 5) throw InputError("dataset too small: need at least 5 points, got " + std::to_string(ds.size()));
  const SortedNeighborDistances<double> snd(ds);
  const auto opt = pipeline_options(cfg);
  const auto o = run_pipeline(ds, snd, opt, cfg.exclude_noise_accuracy);
  write_outputs(cfg.out, ds, o, opt);
  print_summary(out, ds, o);
  out << "wrote " << cfg.out << '\n';
  return kOk;
}

int cmd_ablate(const RunConfig& cfg, const std::vector<AblationMode>& modes, std::ostream& out) {
  const auto ds = single_input(cfg);
  if (ds.size() < 5) throw InputError("dataset too small: need at least 5 points, got " + std::to_string(ds.size()));
  const SortedNeighborDistances<double> snd(ds);

  std::vector<AblationMode> runs = modes;
  if (std::find(runs.begin(), runs.end(), AblationMode::Auto) == runs.end()) runs.insert(runs.begin(), AblationMode::Auto);

  out << std::left << std::setw(12) << "mode" << std::setw(8) << "k" << std::setw(10) << "clusters" << std::setw(10)
      << "accuracy" << "nmi\n";
  for (auto mode : runs) {
    auto opt = pipeline_options(cfg);
    if (mode == AblationMode::FixedK4) opt.k = 4;
    if (mode == AblationMode::KHalfN) opt.k = ds.size() / 2;
    const auto o = run_pipeline(ds, snd, opt, cfg.exclude_noise_accuracy);
    write_outputs(fs::path(cfg.out) / mode_name(mode), ds, o, opt);
    out << std::left << std::setw(12) << mode_name(mode) << std::setw(8) << o.result.k << std::setw(10)
        << o.metrics.clusters_found << std::setw(10) << opt_num(o.metrics.accuracy) << opt_num(o.metrics.nmi) << '\n';
  }
  return kOk;
}

BenchResult run_bench(const Dataset<double>& ds, const SortedNeighborDistances<double>& snd, Index repeats) {
  if (repeats < 1) throw InputError("repeats must be at least 1");
  BenchResult b;
  auto time_path = [&](SearchMode mode, BenchTiming& t) {
    double total = 0.0;
    t.min_seconds = std::numeric_limits<double>::infinity();
    for (Index r = 0; r < repeats; ++r) {
      const auto start = std::chrono::steady_clock::now();
      const auto a = adapt_k(ds, snd, mode);
      const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      total += s;
      t.min_seconds = std::min(t.min_seconds, s);
      t.invocations = a.dbscan_invocations;
      t.best_index = a.best_index;
      b.first_stable_index = a.first_stable_index;
      b.stable_cluster_count = a.stable_cluster_count;
    }
    t.mean_seconds = total / static_cast<double>(repeats);
  };
  time_path(SearchMode::Linear, b.linear);
  time_path(SearchMode::Binary, b.binary);
  return b;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out) {
  const auto ds = single_input(cfg);
  if (ds.size() < 5) throw InputError("dataset too small: need at least 5 points, got " + std::to_string(ds.size()));
  const SortedNeighborDistances<double> snd(ds);
  const auto b = run_bench(ds, snd, cfg.repeats);
  out << "dataset " << ds.name() << ": n=" << ds.size() << ", plateau starts at index " << b.first_stable_index
      << " with " << b.stable_cluster_count << " clusters, " << cfg.repeats << " repeats\n";
  out << std::left << std::setw(8) << "path" << std::setw(12) << "t_min(s)" << std::setw(12) << "t_mean(s)"
      << std::setw(10) << "dbscans" << "best_index\n";
  for (const auto& [name, t] : {std::pair{"linear", b.linear}, std::pair{"binary", b.binary}})
    out << std::left << std::setw(8) << name << std::setw(12) << std::setprecision(4) << t.min_seconds << std::setw(12)
        << t.mean_seconds << std::setw(10) << t.invocations << t.best_index << '\n';
  out << "binary/linear mean time ratio: " << b.binary.mean_seconds / b.linear.mean_seconds << '\n';
  if (b.binary.best_index != b.linear.best_index) {
    out << "MISMATCH: binary search and linear scan disagree on the best index\n";
    return kFailure;
  }
  return kOk;
}

int cmd_vnn(const RunConfig& cfg, std::ostream& out) {
  std::vector<std::pair<std::string, bool>> inputs;
  for (const auto& d : cfg.data) inputs.emplace_back(d, false);
  for (const auto& s : cfg.spec) inputs.emplace_back(s, true);
  if (inputs.empty()) throw InputError("vnn needs at least one --data or --spec input");

  out << std::left << std::setw(20) << "dataset" << std::setw(8) << "size" << std::setw(10) << "clusters"
      << std::setw(12) << "VNN" << std::setw(14) << "class" << "multi-density\n";
  for (const auto& [path, is_spec] : inputs) {
    const auto ds = load_input(path, cfg, is_spec);
    const SortedNeighborDistances<double> snd(ds);
    const auto v = vnn(ds, snd);
    std::string clusters = "-";
    if (ds.truth()) {
      LabelVector ids = *ds.truth();
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      ids.erase(std::remove(ids.begin(), ids.end(), kNoise), ids.end());
      clusters = std::to_string(ids.size());
    }
    std::ostringstream vs;
    vs << std::fixed << std::setprecision(2) << v.vnn;
    out << std::left << std::setw(20) << ds.name() << std::setw(8) << ds.size() << std::setw(10) << clusters
        << std::setw(12) << vs.str() << std::setw(14) << to_string(v.density_class)
        << (v.density_class == DensityClass::Single ? "FALSE" : "TRUE") << '\n';
  }
  return kOk;
}

int cmd_gen(const RunConfig& cfg, const std::string& output, std::ostream& out) {
  if (cfg.spec.size() != 1) throw InputError("gen needs exactly one --spec");
  const auto ds = load_input(cfg.spec.front(), cfg, true);
  std::ofstream file;
  std::ostream* sink = &out;
  if (!output.empty() && output != "-") {
    file = open_out(output);
    sink = &file;
  }
  *sink << "# " << ds.name() << ": " << ds.size() << " points, last column is the truth label (-1 = noise)\n";
  *sink << std::setprecision(17);
  for (Index i = 0; i < ds.size(); ++i) {
    for (Index c = 0; c < ds.dim(); ++c) *sink << ds.points()(i, c) << ' ';
    *sink << (*ds.truth())[static_cast<std::size_t>(i)] << '\n';
  }
  return kOk;
}

int cmd_eval(const std::string& truth_path, const std::string& pred_path, bool exclude_noise, std::ostream& out) {
  const auto truth = read_labels(truth_path, "truth_label");
  const auto pred = read_labels(pred_path, "predicted_label");
  MetricsBlock m;
  m.nmi = nmi(truth, pred);
  m.accuracy = accuracy(truth, pred, exclude_noise);
  LabelVector ids = pred;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  m.clusters_found = static_cast<Label>(std::count_if(ids.begin(), ids.end(), [](Label l) { return l != kNoise; }));
  m.noise_count = std::count(pred.begin(), pred.end(), kNoise);
  nlohmann::json j = metrics_json(m);
  j.erase("vnn");
  j.erase("density_class");
  out << j.dump(2) << '\n';
  return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive multi-density DBSCAN"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string labels = "auto";

  auto add_input = [&](CLI::App* sub) {
    sub->add_option("--data", cfg.data, "dataset file (or blob spec)");
    sub->add_option("--spec", cfg.spec, "blob spec file");
    sub->add_option("--seed", cfg.seed, "override the blob spec seed");
    sub->add_option("--labels", labels, "label column: auto, yes or no")->check(CLI::IsMember({"auto", "yes", "no"}));
  };
  auto add_pipeline = [&](CLI::App* sub) {
    sub->add_option("--peaks", cfg.peaks, "number of candidate Eps (skips peak detection)")->check(CLI::PositiveNumber);
    sub->add_option("--k", cfg.k, "use this k instead of adapting it")->check(CLI::PositiveNumber);
    sub->add_option("--bins", cfg.bins, "k-dis histogram bin count")->check(CLI::PositiveNumber);
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_flag("--exclude-noise-accuracy", cfg.exclude_noise_accuracy, "leave noise-labelled points out of accuracy");
  };

  auto* cluster = app.add_subcommand("cluster", "run the full pipeline and write labels, report and plots");
  add_input(cluster);
  add_pipeline(cluster);

  std::vector<std::string> mode_names;
  auto* ablate = app.add_subcommand("ablate", "compare adaptive k with k = 4 and k = n/2");
  add_input(ablate);
  add_pipeline(ablate);
  ablate->add_option("--mode", mode_names, "fixed-k-4, k-half-n, auto (default: all)")
      ->check(CLI::IsMember({"fixed-k-4", "k-half-n", "auto"}));

  auto* bench = app.add_subcommand("bench", "time binary-search adaptation against the linear walk");
  add_input(bench);
  bench->add_option("--repeats", cfg.repeats, "repetitions per path")->check(CLI::PositiveNumber);

  auto* vnn_cmd = app.add_subcommand("vnn", "variance of neighbour counts for one or more datasets");
  add_input(vnn_cmd);

  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "generate points from a blob spec");
  gen->add_option("--spec", cfg.spec, "blob spec file")->required();
  gen->add_option("--seed", cfg.seed, "override the spec seed");
  gen->add_option("--out", gen_out, "output file (default stdout)");

  std::string truth_path, pred_path;
  auto* eval = app.add_subcommand("eval", "NMI and accuracy between two label files");
  eval->add_option("--truth", truth_path, "ground-truth labels")->required();
  eval->add_option("--pred", pred_path, "predicted labels")->required();
  eval->add_flag("--exclude-noise-accuracy", cfg.exclude_noise_accuracy, "leave noise-labelled points out of accuracy");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kInputError;
  }
  cfg.labels = labels == "yes" ? LabelColumn::Present : labels == "no" ? LabelColumn::Absent : LabelColumn::Auto;

  try {
    if (*cluster) return cmd_cluster(cfg, out);
    if (*ablate) {
      std::vector<AblationMode> modes;
      for (const auto& m : mode_names)
        modes.push_back(m == "fixed-k-4" ? AblationMode::FixedK4 : m == "k-half-n" ? AblationMode::KHalfN : AblationMode::Auto);
      if (modes.empty()) modes = {AblationMode::FixedK4, AblationMode::KHalfN};
      return cmd_ablate(cfg, modes, out);
    }
    if (*bench) return cmd_bench(cfg, out);
    if (*vnn_cmd) return cmd_vnn(cfg, out);
    if (*gen) return cmd_gen(cfg, gen_out, out);
    if (*eval) return cmd_eval(truth_path, pred_path, cfg.exclude_noise_accuracy, out);
  } catch (const NoStablePlateau& e) {
    err << "error: " << e.what() << '\n';
    return kPipelineFailure;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace amd::cli
