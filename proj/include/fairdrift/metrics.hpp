#pragma once

// Snapshot fairness metrics (group gaps in positive rate, TPR and FPR), ROC AUC,
// and temporal functionals over a per-step bias series.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace fairdrift {

/// The metric has no value on this data (e.g. a group is absent).
class MetricUndefined : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// |P(Yhat = 1 | A = 0) - P(Yhat = 1 | A = 1)|
double statistical_parity_diff(std::span<const int> predictions, std::span<const int> sensitive);

/// |TPR(A = 0) - TPR(A = 1)|
double equal_opportunity_diff(std::span<const int> predictions, std::span<const int> labels,
                              std::span<const int> sensitive);

/// |FPR(A = 0) - FPR(A = 1)|
double predictive_equality_diff(std::span<const int> predictions, std::span<const int> labels,
                                std::span<const int> sensitive);

/// Mann-Whitney AUC; tied (positive, negative) pairs count 1/2.
double auc(std::span<const double> scores, std::span<const int> labels);

double max_bias(std::span<const double> deltas);
/// Sum of consecutive absolute changes divided by the series length N.
double temporal_stability(std::span<const double> deltas);
double max_bias_difference(std::span<const double> deltas);

struct SnapshotReport {
  std::optional<double> auc;
  std::optional<double> delta_sp;
  std::optional<double> delta_tpr;
  std::optional<double> delta_fpr;
  std::size_t n_evaluated = 0;
};

/// Evaluates every snapshot metric, leaving undefined ones empty.
/// Predictions are scores >= threshold.
SnapshotReport evaluate_snapshot(std::span<const double> scores, std::span<const int> labels,
                                 std::span<const int> sensitive, double threshold = 0.5);

enum class DeltaMetric { StatisticalParity, EqualOpportunity, PredictiveEquality };

std::string_view to_string(DeltaMetric metric);
DeltaMetric parse_delta_metric(std::string_view name);

struct TemporalReport {
  std::optional<double> mb;
  std::optional<double> ts;   ///< needs two or more valid steps
  std::optional<double> mbd;  ///< needs two or more valid steps
  std::size_t n_steps = 0;    ///< N, the number of valid steps used
  std::size_t n_excluded = 0;
};

/// Temporal metrics over the valid entries of `deltas`; missing steps are
/// dropped and counted in n_excluded.
TemporalReport temporal_report(std::span<const std::optional<double>> deltas);

}  // namespace fairdrift
