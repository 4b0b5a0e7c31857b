#pragma once

// Command implementations behind the `fairdrift` executable. Each command
// returns the process exit code and reports failures on `err`:
//   0 success, 1 usage/config error, 2 data error, 3 numeric failure.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairdrift/anticipate.hpp"
#include "fairdrift/data.hpp"
#include "fairdrift/learner.hpp"
#include "fairdrift/metrics.hpp"
#include "json.hpp"

namespace fairdrift::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

struct CsvSource {
  std::filesystem::path path;
  CsvSchema schema;
};

/// The resolved contents of an experiment config file, sections
/// {data, regimes, train, anticipation, output}.
struct RunConfig {
  std::optional<DriftSpec> synthetic;
  std::optional<CsvSource> csv;
  std::vector<RegimeId> regimes;
  TrainConfig train;
  bool growing_window = true;
  AnticipationConfig anticipation;
  DeltaMetric delta_metric = DeltaMetric::StatisticalParity;
  double threshold = 0.5;
  std::filesystem::path out_dir = "out";
  std::vector<double> alphas;  ///< sweep grid; defaults to 0.0, 0.1, ..., 1.0
};

/// Relative CSV paths resolve against the config file's directory.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir);

/// Canonical JSON form of a config; the input to config_hash.
nlohmann::json resolved_config(const RunConfig& config);

/// Hex SHA-256 of the compact dump of `resolved`.
std::string config_hash(const nlohmann::json& resolved);

/// "0,0.5,1" -> {0, 0.5, 1}; throws ConfigError on a malformed entry.
std::vector<double> parse_alpha_list(std::string_view text);

struct RunManifest {
  std::string config_hash;
  nlohmann::json config;
  std::vector<std::string> outputs;
  std::string started;
  std::string finished;
  std::string tool_version;
};

void to_json(nlohmann::json& j, const RunManifest& manifest);

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<double>> alphas;
};

/// Writes per_step.csv, summary.json and manifest.json into the output dir.
int cmd_run(const CommandOptions& options, std::ostream& out, std::ostream& err);

/// Writes sweep.csv and manifest.json into the output dir.
int cmd_sweep(const CommandOptions& options, std::ostream& out, std::ostream& err);

/// Writes the generated stream to `out_path` and its ingestion schema next to
/// it as <stem>.schema.json.
int cmd_gen(const std::filesystem::path& spec_path, const std::filesystem::path& out_path,
            std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err);

std::string_view tool_version();

}  // namespace fairdrift::cli
