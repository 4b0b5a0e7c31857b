#include "fairdrift/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>

namespace fairdrift {

namespace {

constexpr std::array<std::pair<int, int>, 4> kCells{{{0, 0}, {0, 1}, {1, 0}, {1, 1}}};

GroupDistribution lerp(const GroupDistribution& a, const GroupDistribution& b, double u) {
  Table2x2 p{};
  double sum = 0.0;
  for (int s = 0; s < 2; ++s)
    for (int y = 0; y < 2; ++y) {
      p[s][y] = (1.0 - u) * a.at(s, y) + u * b.at(s, y);
      sum += p[s][y];
    }
  for (auto& row : p)
    for (auto& v : row) v /= sum;
  return GroupDistribution(p, 0);
}

std::vector<double> flat(const GroupDistribution& d) {
  return {d.at(0, 0), d.at(0, 1), d.at(1, 0), d.at(1, 1)};
}

GroupDistribution table_from_json(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 4) throw ConfigError("distribution table needs 4 entries [p00, p01, p10, p11]");
  return GroupDistribution({{{v[0], v[1]}, {v[2], v[3]}}}, 0);
}

// --- CSV reading -----------------------------------------------------------

// Reads one record, honoring double-quoted fields (with "" escapes and
// embedded newlines). Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw DataError("missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

[[noreturn]] void bad_value(std::size_t row, const std::string& column, std::string_view value) {
  throw DataError("row " + std::to_string(row) + ": cannot parse '" + std::string(value) +
                  "' in column '" + column + "'");
}

// Monthly: "YYYY-MM[...]" -> year * 12 + month - 1. Yearly: "YYYY[...]" -> year.
std::optional<long long> bucket_of(std::string_view value, TimeBucket bucket) {
  if (bucket == TimeBucket::Index) {
    const auto v = parse_number<long long>(value);
    if (!v || *v < 0) return std::nullopt;
    return v;
  }
  if (value.size() < 4) return std::nullopt;
  const auto year = parse_number<long long>(value.substr(0, 4));
  if (!year) return std::nullopt;
  if (bucket == TimeBucket::Yearly) return year;
  if (value.size() < 7 || (value[4] != '-' && value[4] != '/')) return std::nullopt;
  const auto month = parse_number<long long>(value.substr(5, 2));
  if (!month || *month < 1 || *month > 12) return std::nullopt;
  return *year * 12 + *month - 1;
}

std::optional<int> map_binary(const std::map<std::string, int>& mapping, const std::string& value,
                              std::size_t row, const std::string& column) {
  if (mapping.empty()) {
    const auto v = parse_number<int>(value);
    if (!v || (*v != 0 && *v != 1)) bad_value(row, column, value);
    return v;
  }
  const auto it = mapping.find(value);
  if (it == mapping.end()) return std::nullopt;
  return it->second;
}

std::string_view to_string(TimeBucket bucket) {
  switch (bucket) {
    case TimeBucket::Index: return "index";
    case TimeBucket::Monthly: return "monthly";
    case TimeBucket::Yearly: return "yearly";
  }
  return "index";
}

TimeBucket parse_time_bucket(std::string_view name) {
  if (name == "index") return TimeBucket::Index;
  if (name == "monthly") return TimeBucket::Monthly;
  if (name == "yearly") return TimeBucket::Yearly;
  throw ConfigError("unknown time_bucket '" + std::string(name) + "'");
}

}  // namespace

std::string_view to_string(TrajectoryPreset preset) {
  switch (preset) {
    case TrajectoryPreset::Stationary: return "stationary";
    case TrajectoryPreset::LinearDrift: return "linear-drift";
    case TrajectoryPreset::Oscillating: return "oscillating";
    case TrajectoryPreset::PhaseShift: return "phase-shift";
  }
  return "stationary";
}

TrajectoryPreset parse_trajectory_preset(std::string_view name) {
  if (name == "stationary") return TrajectoryPreset::Stationary;
  if (name == "linear-drift") return TrajectoryPreset::LinearDrift;
  if (name == "oscillating") return TrajectoryPreset::Oscillating;
  if (name == "phase-shift") return TrajectoryPreset::PhaseShift;
  throw ConfigError("unknown trajectory preset '" + std::string(name) + "'");
}

std::vector<GroupDistribution> build_trajectory(TrajectoryPreset preset,
                                                const GroupDistribution& start,
                                                const GroupDistribution& end,
                                                std::size_t n_batches) {
  if (n_batches < 2) throw ConfigError("n_batches must be >= 2");
  std::vector<GroupDistribution> out;
  out.reserve(n_batches);
  const double last = static_cast<double>(n_batches - 1);
  for (std::size_t k = 0; k < n_batches; ++k) {
    const double x = static_cast<double>(k) / last;
    switch (preset) {
      case TrajectoryPreset::Stationary: out.push_back(start); break;
      case TrajectoryPreset::LinearDrift: out.push_back(lerp(start, end, x)); break;
      case TrajectoryPreset::Oscillating:
        out.push_back(lerp(start, end, 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * x))));
        break;
      case TrajectoryPreset::PhaseShift: out.push_back(k < n_batches / 2 ? start : end); break;
    }
  }
  return out;
}

void DriftSpec::validate() const {
  if (n_batches < 2) throw ConfigError("n_batches must be >= 2");
  if (batch_size < 8) throw ConfigError("batch_size must be >= 8");
  if (dim < 2) throw ConfigError("dim must be >= 2 (label axis and group axis)");
  if (trajectory.size() != n_batches)
    throw ConfigError("trajectory length must equal n_batches");
  if (!(class_separation > 0.0) || !std::isfinite(class_separation))
    throw ConfigError("class_separation must be > 0");
  if (!(group_offset >= 0.0 && group_offset < class_separation))
    throw ConfigError("group_offset must lie in [0, class_separation)");
}

DriftSpec default_drift_spec() {
  DriftSpec spec;
  const GroupDistribution start({{{0.5, 0.0}, {0.1, 0.4}}}, 0);
  spec.trajectory = build_trajectory(TrajectoryPreset::LinearDrift, start,
                                     GroupDistribution::uniform(), spec.n_batches);
  return spec;
}

std::array<std::array<std::size_t, 2>, 2> allocate_cells(const GroupDistribution& target,
                                                         std::size_t n) {
  std::array<std::size_t, 4> counts{};
  std::array<double, 4> remainder{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 4; ++k) {
    const double exact = target.at(kCells[k].first, kCells[k].second) * static_cast<double>(n);
    counts[k] = static_cast<std::size_t>(std::floor(exact));
    remainder[k] = exact - std::floor(exact);
    assigned += counts[k];
  }
  std::array<std::size_t, 4> order{0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  // Floating error can push the floor sum one past n; trim from the smallest remainders.
  for (std::size_t k = 3; assigned > n; k = (k + 3) % 4)
    if (counts[order[k]] > 0) {
      --counts[order[k]];
      --assigned;
    }
  for (std::size_t k = 0; assigned < n; k = (k + 1) % 4) {
    ++counts[order[k]];
    ++assigned;
  }
  return {{{counts[0], counts[1]}, {counts[2], counts[3]}}};
}

std::vector<Batch> generate(const DriftSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<Batch> stream;
  stream.reserve(spec.n_batches);
  for (std::size_t t = 0; t < spec.n_batches; ++t) {
    const auto counts = allocate_cells(spec.trajectory[t], spec.batch_size);
    std::vector<Instance> instances;
    instances.reserve(spec.batch_size);
    for (const auto& [a, y] : kCells) {
      for (std::size_t i = 0; i < counts[a][y]; ++i) {
        Instance inst{std::vector<double>(spec.dim), a, y, t};
        for (auto& v : inst.features) v = noise(rng);
        inst.features[0] += spec.class_separation * (y - 0.5);
        inst.features[1] += spec.group_offset * (a - 0.5);
        instances.push_back(std::move(inst));
      }
    }
    std::shuffle(instances.begin(), instances.end(), rng);
    stream.emplace_back(t, std::move(instances));
  }
  return stream;
}

void to_json(nlohmann::json& j, const DriftSpec& spec) {
  auto traj = nlohmann::json::array();
  for (const auto& d : spec.trajectory) traj.push_back(flat(d));
  j = nlohmann::json{{"n_batches", spec.n_batches},
                     {"batch_size", spec.batch_size},
                     {"dim", spec.dim},
                     {"trajectory", traj},
                     {"class_separation", spec.class_separation},
                     {"group_offset", spec.group_offset},
                     {"seed", spec.seed}};
}

void from_json(const nlohmann::json& j, DriftSpec& spec) {
  DriftSpec defaults = default_drift_spec();
  spec.n_batches = j.value("n_batches", defaults.n_batches);
  spec.batch_size = j.value("batch_size", defaults.batch_size);
  spec.dim = j.value("dim", defaults.dim);
  spec.class_separation = j.value("class_separation", defaults.class_separation);
  spec.group_offset = j.value("group_offset", defaults.group_offset);
  spec.seed = j.value("seed", defaults.seed);
  spec.trajectory.clear();
  if (j.contains("trajectory")) {
    for (const auto& d : j.at("trajectory")) spec.trajectory.push_back(table_from_json(d));
  } else if (j.contains("preset")) {
    const auto preset = parse_trajectory_preset(j.at("preset").get<std::string>());
    const auto start = j.contains("start") ? table_from_json(j.at("start"))
                                           : defaults.trajectory.front();
    const auto end = j.contains("end") ? table_from_json(j.at("end")) : start;
    spec.trajectory = build_trajectory(preset, start, end, spec.n_batches);
  } else if (spec.n_batches == defaults.n_batches) {
    spec.trajectory = defaults.trajectory;
  } else {
    spec.trajectory = build_trajectory(TrajectoryPreset::LinearDrift, defaults.trajectory.front(),
                                       defaults.trajectory.back(), spec.n_batches);
  }
  spec.validate();
}

void CsvSchema::validate() const {
  if (time_column.empty() || sensitive_column.empty() || label_column.empty())
    throw ConfigError("schema must name time, sensitive and label columns");
  if (feature_columns.empty()) throw ConfigError("schema must name at least one feature column");
  for (const auto* m : {&sensitive_map, &label_map})
    for (const auto& [key, v] : *m)
      if (v != 0 && v != 1) throw ConfigError("schema map value for '" + key + "' must be 0 or 1");
}

void to_json(nlohmann::json& j, const CsvSchema& schema) {
  j = nlohmann::json{{"time_column", schema.time_column},
                     {"time_bucket", std::string(to_string(schema.time_bucket))},
                     {"sensitive_column", schema.sensitive_column},
                     {"sensitive_map", schema.sensitive_map},
                     {"label_column", schema.label_column},
                     {"label_map", schema.label_map},
                     {"feature_columns", schema.feature_columns}};
}

void from_json(const nlohmann::json& j, CsvSchema& schema) {
  j.at("time_column").get_to(schema.time_column);
  schema.time_bucket = parse_time_bucket(j.value("time_bucket", std::string("index")));
  j.at("sensitive_column").get_to(schema.sensitive_column);
  schema.sensitive_map = j.value("sensitive_map", std::map<std::string, int>{});
  j.at("label_column").get_to(schema.label_column);
  schema.label_map = j.value("label_map", std::map<std::string, int>{});
  j.at("feature_columns").get_to(schema.feature_columns);
  schema.validate();
}

IngestResult ingest_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return ingest_csv(in, schema);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

IngestResult ingest_csv(std::istream& in, const CsvSchema& schema) {
  schema.validate();
  std::vector<std::string> header;
  if (!read_record(in, header)) throw DataError("missing header row");
  for (auto& h : header) h = trim(h);

  const auto time_col = column_index(header, schema.time_column);
  const auto sens_col = column_index(header, schema.sensitive_column);
  const auto label_col = column_index(header, schema.label_column);
  std::vector<std::size_t> feature_cols;
  for (const auto& name : schema.feature_columns) feature_cols.push_back(column_index(header, name));

  IngestResult result;
  std::map<long long, std::vector<Instance>> grouped;
  std::vector<std::string> fields;
  std::size_t row = 0;
  while (read_record(in, fields)) {
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;  // blank line
    ++row;
    ++result.rows_read;
    for (auto& f : fields) f = trim(f);
    fields.resize(std::max(fields.size(), header.size()));

    const bool missing = fields[time_col].empty() || fields[sens_col].empty() ||
                         fields[label_col].empty() ||
                         std::any_of(feature_cols.begin(), feature_cols.end(),
                                     [&](std::size_t c) { return fields[c].empty(); });
    if (missing) {
      ++result.dropped_rows;
      continue;
    }

    const auto bucket = bucket_of(fields[time_col], schema.time_bucket);
    if (!bucket) bad_value(row, schema.time_column, fields[time_col]);
    const auto a = map_binary(schema.sensitive_map, fields[sens_col], row, schema.sensitive_column);
    const auto y = map_binary(schema.label_map, fields[label_col], row, schema.label_column);
    if (!a || !y) {
      ++result.unmapped_rows;
      continue;
    }

    Instance inst;
    inst.sensitive = *a;
    inst.label = *y;
    inst.features.reserve(feature_cols.size());
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      const auto& text = fields[feature_cols[k]];
      const auto v = parse_number<double>(text);
      if (!v || !std::isfinite(*v)) bad_value(row, schema.feature_columns[k], text);
      inst.features.push_back(*v);
    }
    grouped[*bucket].push_back(std::move(inst));
  }
  if (grouped.empty()) throw DataError("no usable rows");

  const long long origin = schema.time_bucket == TimeBucket::Index ? 0 : grouped.begin()->first;
  for (auto& [bucket, instances] : grouped) {
    const auto t = static_cast<std::size_t>(bucket - origin);
    for (auto& inst : instances) inst.time_index = t;
    result.batches.emplace_back(t, std::move(instances));
  }
  return result;
}

void write_csv(std::ostream& out, std::span<const Batch> stream) {
  if (stream.empty()) return;
  const auto d = stream.front().dim();
  out << "t,sensitive,label";
  for (std::size_t j = 0; j < d; ++j) out << ",x" << j;
  out << '\n';
  for (const auto& batch : stream)
    for (const auto& inst : batch.instances()) {
      out << inst.time_index << ',' << inst.sensitive << ',' << inst.label;
      for (double v : inst.features) out << ',' << format_real(v);
      out << '\n';
    }
}

CsvSchema generated_csv_schema(std::size_t dim) {
  CsvSchema schema;
  schema.time_column = "t";
  schema.time_bucket = TimeBucket::Index;
  schema.sensitive_column = "sensitive";
  schema.label_column = "label";
  for (std::size_t j = 0; j < dim; ++j) schema.feature_columns.push_back("x" + std::to_string(j));
  return schema;
}

}  // namespace fairdrift
