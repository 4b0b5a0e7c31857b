#pragma once

// Shared domain types for the temporal fairness pipeline: labeled instances,
// time-indexed batches, the 2x2 group/label tables, and per-step metric series.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fairdrift {

/// Input data violates a structural requirement (empty batch, bad CSV, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration value is out of its allowed range.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Optimization produced a non-finite value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sensitive attribute: 0 = unprivileged, 1 = privileged.
// Label: 0 = negative outcome, 1 = positive outcome.
inline constexpr int kUnprivileged = 0;
inline constexpr int kPrivileged = 1;

using Table2x2 = std::array<std::array<double, 2>, 2>;

struct Instance {
  std::vector<double> features;
  int sensitive = 0;
  int label = 0;
  std::size_t time_index = 0;
};

class Batch {
 public:
  /// Validates non-emptiness, binary attributes, shared time index and a
  /// common feature length.
  Batch(std::size_t time_index, std::vector<Instance> instances);

  std::size_t time_index() const noexcept { return time_index_; }
  std::span<const Instance> instances() const noexcept { return instances_; }
  std::size_t size() const noexcept { return instances_.size(); }
  std::size_t dim() const noexcept { return instances_.front().features.size(); }

 private:
  std::size_t time_index_;
  std::vector<Instance> instances_;
};

/// Throws DataError unless batches share a feature dimension and their time
/// indices are strictly increasing.
void validate_stream(std::span<const Batch> stream);

/// Joint relative frequencies P(A = a, Y = y). `n` is the number of
/// instances behind the table, or 0 for a forecast.
class GroupDistribution {
 public:
  static constexpr double kTolerance = 1e-9;

  GroupDistribution(const Table2x2& p, std::size_t n);

  double at(int a, int y) const { return p_.at(a).at(y); }
  const Table2x2& table() const noexcept { return p_; }
  std::size_t n() const noexcept { return n_; }

  double marginal_sensitive(int a) const { return at(a, 0) + at(a, 1); }
  double marginal_label(int y) const { return at(0, y) + at(1, y); }

  static GroupDistribution uniform();

  friend bool operator==(const GroupDistribution&, const GroupDistribution&) = default;

 private:
  Table2x2 p_;
  std::size_t n_;
};

/// Per-cell sample weights W(A, Y); every entry positive and finite.
class WeightTable {
 public:
  explicit WeightTable(const Table2x2& w);

  double at(int a, int y) const { return w_.at(a).at(y); }
  const Table2x2& table() const noexcept { return w_; }

  static WeightTable ones();

  friend bool operator==(const WeightTable&, const WeightTable&) = default;

 private:
  Table2x2 w_;
};

GroupDistribution group_distribution(const Batch& batch);
GroupDistribution group_distribution(std::span<const Instance> instances);
/// Pooled distribution over every instance of every batch.
GroupDistribution group_distribution(std::span<const Batch> window);

enum class RegimeId { Vanilla, Static, Dynamic, Abc };

std::string_view to_string(RegimeId regime);
RegimeId parse_regime(std::string_view name);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_real(double value);

/// One evaluation step. A metric is empty when it was undefined for the
/// evaluated batch (missing group, no positives, ...) or the fit failed.
struct MetricRecord {
  std::size_t time_index = 0;
  std::optional<double> auc;
  std::optional<double> delta_sp;
  std::optional<double> delta_tpr;
  std::optional<double> delta_fpr;
  bool fit_failed = false;
};

class MetricSeries {
 public:
  explicit MetricSeries(RegimeId regime) : regime_(regime) {}

  /// Rejects non-increasing time indices and values outside [0, 1].
  void append(const MetricRecord& record);

  RegimeId regime() const noexcept { return regime_; }
  std::span<const MetricRecord> records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }

 private:
  RegimeId regime_;
  std::vector<MetricRecord> records_;
};

}  // namespace fairdrift
