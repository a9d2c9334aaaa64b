#include "amd/dataset.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace amd {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : line) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\r' || c == ';') {
      if (!cur.empty()) tokens.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

bool parse_double(const std::string& tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool is_integer_token(const std::string& tok) {
  long long v = 0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  return ec == std::errc() && ptr == last;
}

// Uniform double in [0, 1) from the top 53 bits.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

class BoxMuller {
 public:
  double operator()(std::mt19937_64& rng) {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform01(rng);
    } while (u1 <= 0.0);
    const double u2 = uniform01(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::vector<double> json_vector(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string("blob spec: '") + what + "' must be an array");
  std::vector<double> v;
  for (const auto& x : j) {
    if (!x.is_number()) throw InputError(std::string("blob spec: '") + what + "' must hold numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

}  // namespace

Index BlobsSpec::total() const {
  Index t = noise_count;
  for (const auto& c : clusters) t += c.count;
  return t;
}

Dataset<double> parse_dataset(const std::string& text, const std::string& name, LabelColumn labels) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::size_t> linenos;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    auto tokens = split_tokens(line);
    if (tokens.empty()) continue;
    if (!rows.empty() && tokens.size() != rows.front().size())
      throw InputError("line " + std::to_string(lineno) + ": expected " +
                       std::to_string(rows.front().size()) + " columns, got " +
                       std::to_string(tokens.size()));
    rows.push_back(std::move(tokens));
    linenos.push_back(lineno);
  }
  if (rows.empty()) throw InputError("dataset file has no data rows");

  const std::size_t cols = rows.front().size();
  bool with_labels = false;
  switch (labels) {
    case LabelColumn::Present: with_labels = true; break;
    case LabelColumn::Absent: with_labels = false; break;
    case LabelColumn::Auto:
      with_labels = cols >= 3 && std::all_of(rows.begin(), rows.end(), [](const auto& r) {
                      return is_integer_token(r.back());
                    });
      break;
  }
  const std::size_t d = with_labels ? cols - 1 : cols;
  if (d < 1) throw InputError("dataset rows need at least one coordinate column");

  MatrixX<double> pts(static_cast<Index>(rows.size()), static_cast<Index>(d));
  std::optional<LabelVector> truth;
  if (with_labels) truth.emplace(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      double v = 0.0;
      if (!parse_double(rows[r][c], v))
        throw InputError("line " + std::to_string(linenos[r]) + ": non-numeric token '" +
                         rows[r][c] + "'");
      pts(static_cast<Index>(r), static_cast<Index>(c)) = v;
    }
    if (with_labels) {
      double v = 0.0;
      if (!parse_double(rows[r].back(), v) || v != std::floor(v))
        throw InputError("line " + std::to_string(linenos[r]) + ": label '" + rows[r].back() +
                         "' is not an integer");
      (*truth)[r] = static_cast<Label>(v);
    }
  }
  return Dataset<double>(std::move(pts), std::move(truth), name);
}

Dataset<double> load_dataset(const std::filesystem::path& path, LabelColumn labels) {
  return parse_dataset(read_file(path), path.stem().string(), labels);
}

namespace {

BlobsSpec blobs_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("blob spec must be a JSON object");

  BlobsSpec spec;
  spec.name = j.value("name", std::string("blobs"));
  spec.seed = j.value("seed", std::uint64_t{0});
  if (!j.contains("clusters") || !j["clusters"].is_array() || j["clusters"].empty())
    throw InputError("blob spec: 'clusters' must be a non-empty array");
  for (const auto& c : j["clusters"]) {
    BlobCluster bc;
    bc.center = json_vector(c.at("center"), "center");
    bc.std = c.at("std").get<double>();
    bc.count = c.at("count").get<Index>();
    if (bc.center.empty()) throw InputError("blob spec: empty center");
    if (!(bc.std > 0.0)) throw InputError("blob spec: std must be positive");
    if (bc.count < 1) throw InputError("blob spec: count must be at least 1");
    if (!spec.clusters.empty() && bc.center.size() != spec.clusters.front().center.size())
      throw InputError("blob spec: centers have different dimensions");
    spec.clusters.push_back(std::move(bc));
  }
  if (j.contains("noise")) {
    const auto& nz = j["noise"];
    spec.noise_count = nz.value("count", Index{0});
    if (spec.noise_count < 0) throw InputError("blob spec: noise count must be nonnegative");
    if (spec.noise_count > 0) {
      spec.noise_min = json_vector(nz.at("min"), "min");
      spec.noise_max = json_vector(nz.at("max"), "max");
    }
  }
  return spec;
}

}  // namespace

BlobsSpec parse_blobs_spec(const std::string& text) {
  try {
    return blobs_spec_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("blob spec: ") + e.what());
  }
}

BlobsSpec load_blobs_spec(const std::filesystem::path& path) {
  return parse_blobs_spec(read_file(path));
}

std::string blobs_spec_to_json(const BlobsSpec& spec) {
  nlohmann::json j;
  j["name"] = spec.name;
  j["seed"] = spec.seed;
  j["clusters"] = nlohmann::json::array();
  for (const auto& c : spec.clusters)
    j["clusters"].push_back({{"center", c.center}, {"std", c.std}, {"count", c.count}});
  if (spec.noise_count > 0)
    j["noise"] = {{"count", spec.noise_count}, {"min", spec.noise_min}, {"max", spec.noise_max}};
  return j.dump(2);
}

Dataset<double> generate_blobs(const BlobsSpec& spec) {
  if (spec.clusters.empty()) throw InputError("blob spec has no clusters");
  const Index d = spec.dim();
  for (const auto& c : spec.clusters) {
    if (static_cast<Index>(c.center.size()) != d) throw InputError("blob centers differ in dimension");
    if (!(c.std > 0.0)) throw InputError("blob std must be positive");
    if (c.count < 1) throw InputError("blob count must be at least 1");
  }
  if (spec.noise_count > 0) {
    if (static_cast<Index>(spec.noise_min.size()) != d || static_cast<Index>(spec.noise_max.size()) != d)
      throw InputError("noise bounds must match the blob dimension");
    for (Index c = 0; c < d; ++c)
      if (!(spec.noise_max[static_cast<std::size_t>(c)] > spec.noise_min[static_cast<std::size_t>(c)]))
        throw InputError("noise bounds have zero volume");
  }

  std::mt19937_64 rng(spec.seed);
  BoxMuller normal;
  MatrixX<double> pts(spec.total(), d);
  LabelVector truth(static_cast<std::size_t>(spec.total()));
  Index row = 0;
  for (std::size_t ci = 0; ci < spec.clusters.size(); ++ci) {
    const auto& c = spec.clusters[ci];
    for (Index p = 0; p < c.count; ++p, ++row) {
      for (Index k = 0; k < d; ++k)
        pts(row, k) = c.center[static_cast<std::size_t>(k)] + c.std * normal(rng);
      truth[static_cast<std::size_t>(row)] = static_cast<Label>(ci);
    }
  }
  for (Index p = 0; p < spec.noise_count; ++p, ++row) {
    for (Index k = 0; k < d; ++k) {
      const double lo = spec.noise_min[static_cast<std::size_t>(k)];
      const double hi = spec.noise_max[static_cast<std::size_t>(k)];
      pts(row, k) = lo + (hi - lo) * uniform01(rng);
    }
    truth[static_cast<std::size_t>(row)] = kNoise;
  }
  return Dataset<double>(std::move(pts), std::move(truth), spec.name);
}

bool is_blobs_spec_file(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".json" || ext == ".spec") return true;
  std::ifstream in(path);
  char c = 0;
  while (in.get(c))
    if (!std::isspace(static_cast<unsigned char>(c))) return c == '{';
  return false;
}

}  // namespace amd
