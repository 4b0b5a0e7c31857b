#pragma once

// Batch streams: a synthetic generator with scripted group/label drift, and
// CSV ingestion for externally obtained temporal datasets.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairdrift/core.hpp"
#include "json.hpp"

namespace fairdrift {

enum class TrajectoryPreset { Stationary, LinearDrift, Oscillating, PhaseShift };

std::string_view to_string(TrajectoryPreset preset);
TrajectoryPreset parse_trajectory_preset(std::string_view name);

/// Per-batch target distributions between `start` and `end`:
///   stationary   start for every batch
///   linear-drift straight-line interpolation from start to end
///   oscillating  one raised-cosine cycle start -> end -> start
///   phase-shift  start for the first half of the batches, end afterwards
std::vector<GroupDistribution> build_trajectory(TrajectoryPreset preset,
                                                const GroupDistribution& start,
                                                const GroupDistribution& end,
                                                std::size_t n_batches);

struct DriftSpec {
  std::size_t n_batches = 12;
  std::size_t batch_size = 500;
  std::size_t dim = 4;
  std::vector<GroupDistribution> trajectory;
  double class_separation = 2.0;  ///< distance between label means on axis 0
  double group_offset = 1.0;      ///< distance between group means on axis 1
  std::uint64_t seed = 7;

  void validate() const;
};

/// Default drifting stream: 12 x 500, linear drift from a first batch with no
/// unprivileged positives, {(0,0): .5, (0,1): 0, (1,0): .1, (1,1): .4},
/// to the uniform table.
DriftSpec default_drift_spec();

/// Exact per-cell counts for `n` instances by largest-remainder rounding.
/// Ties in the remainder go to the earlier cell in (0,0), (0,1), (1,0), (1,1).
std::array<std::array<std::size_t, 2>, 2> allocate_cells(const GroupDistribution& target,
                                                         std::size_t n);

/// Batch t has time index t. Cell counts follow trajectory[t] exactly;
/// features are spherical unit Gaussians around a per-cell mean.
std::vector<Batch> generate(const DriftSpec& spec);

void to_json(nlohmann::json& j, const DriftSpec& spec);
/// Accepts either an explicit "trajectory" list or "preset" + "start" + "end".
/// Tables are flat [p00, p01, p10, p11] arrays indexed (sensitive, label).
void from_json(const nlohmann::json& j, DriftSpec& spec);

enum class TimeBucket { Index, Monthly, Yearly };

struct CsvSchema {
  std::string time_column;
  TimeBucket time_bucket = TimeBucket::Index;
  std::string sensitive_column;
  std::map<std::string, int> sensitive_map;  ///< empty: column already holds 0/1
  std::string label_column;
  std::map<std::string, int> label_map;  ///< empty: column already holds 0/1
  std::vector<std::string> feature_columns;

  void validate() const;
};

void to_json(nlohmann::json& j, const CsvSchema& schema);
void from_json(const nlohmann::json& j, CsvSchema& schema);

struct IngestResult {
  std::vector<Batch> batches;
  std::size_t rows_read = 0;
  std::size_t dropped_rows = 0;   ///< a required field was empty
  std::size_t unmapped_rows = 0;  ///< sensitive/label value not in the schema map
};

/// Groups rows into batches by bucketed time. Index buckets keep the raw
/// integer; monthly/yearly buckets count from the earliest bucket present.
IngestResult ingest_csv(const std::filesystem::path& path, const CsvSchema& schema);
IngestResult ingest_csv(std::istream& in, const CsvSchema& schema);

/// Columns t, sensitive, label, x0 .. x{d-1}; readable with generated_csv_schema.
void write_csv(std::ostream& out, std::span<const Batch> stream);
CsvSchema generated_csv_schema(std::size_t dim);

}  // namespace fairdrift
