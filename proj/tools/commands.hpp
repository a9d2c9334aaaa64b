#pragma once

#include "amd/dataset.hpp"
#include "amd/multi_density.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace amd::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kInputError = 2, kPipelineFailure = 3 };

enum class AblationMode { FixedK4, KHalfN, Auto };

struct RunConfig {
  std::vector<std::string> data;  // dataset or blob-spec files
  std::vector<std::string> spec;  // blob-spec files
  std::optional<Index> peaks;
  std::optional<Index> k;
  std::optional<Index> bins;
  std::optional<std::uint64_t> seed;
  std::string out = "amd_out";
  Index repeats = 5;
  bool exclude_noise_accuracy = false;
  LabelColumn labels = LabelColumn::Auto;
};

/// Dataset named by a config input: point files are parsed, blob specs are
/// generated (with the seed override applied).
Dataset<double> load_input(const std::string& path, const RunConfig& cfg, bool is_spec);

/// The single input of a run command; throws InputError unless exactly one is given.
Dataset<double> single_input(const RunConfig& cfg);

PipelineOptions pipeline_options(const RunConfig& cfg);

struct BenchTiming {
  double min_seconds = 0.0;
  double mean_seconds = 0.0;
  Index invocations = 0;
  Index best_index = 0;
};

struct BenchResult {
  BenchTiming binary;
  BenchTiming linear;
  Index first_stable_index = 0;
  Label stable_cluster_count = 0;
};

/// Times adaptation with binary search against the forward linear walk over the
/// plateau, `repeats` times each, on a shared distance table.
BenchResult run_bench(const Dataset<double>& ds, const SortedNeighborDistances<double>& snd, Index repeats);

int cmd_cluster(const RunConfig& cfg, std::ostream& out);
int cmd_ablate(const RunConfig& cfg, const std::vector<AblationMode>& modes, std::ostream& out);
int cmd_bench(const RunConfig& cfg, std::ostream& out);
int cmd_vnn(const RunConfig& cfg, std::ostream& out);
int cmd_gen(const RunConfig& cfg, const std::string& output, std::ostream& out);
int cmd_eval(const std::string& truth_path, const std::string& pred_path, bool exclude_noise, std::ostream& out);

/// Entry point shared by the binary and the tests; maps exceptions to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace amd::cli
