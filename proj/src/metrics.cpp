#include "fairdrift/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "fairdrift/core.hpp"

namespace fairdrift {

namespace {

void require_binary(std::span<const int> v, const char* what) {
  for (int x : v)
    if (x != 0 && x != 1) throw std::invalid_argument(std::string(what) + " must be 0 or 1");
}

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("metric inputs differ in length");
}

// Positive-prediction rate per group over the instances where `keep` holds.
template <typename Keep>
std::array<double, 2> positive_rates(std::span<const int> predictions,
                                     std::span<const int> sensitive, Keep keep,
                                     const char* undefined_message) {
  std::array<std::size_t, 2> total{};
  std::array<std::size_t, 2> positive{};
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (!keep(i)) continue;
    ++total[sensitive[i]];
    positive[sensitive[i]] += predictions[i];
  }
  if (total[0] == 0 || total[1] == 0) throw MetricUndefined(undefined_message);
  return {static_cast<double>(positive[0]) / static_cast<double>(total[0]),
          static_cast<double>(positive[1]) / static_cast<double>(total[1])};
}

double conditional_gap(std::span<const int> predictions, std::span<const int> labels,
                       std::span<const int> sensitive, int label, const char* message) {
  require_same_length(predictions.size(), labels.size());
  require_same_length(predictions.size(), sensitive.size());
  require_binary(predictions, "predictions");
  require_binary(labels, "labels");
  require_binary(sensitive, "sensitive");
  const auto r = positive_rates(
      predictions, sensitive, [&](std::size_t i) { return labels[i] == label; }, message);
  return std::abs(r[0] - r[1]);
}

template <typename F>
std::optional<double> try_metric(F&& f) {
  try {
    return f();
  } catch (const MetricUndefined&) {
    return std::nullopt;
  }
}

}  // namespace

double statistical_parity_diff(std::span<const int> predictions, std::span<const int> sensitive) {
  require_same_length(predictions.size(), sensitive.size());
  require_binary(predictions, "predictions");
  require_binary(sensitive, "sensitive");
  const auto r = positive_rates(
      predictions, sensitive, [](std::size_t) { return true; }, "undefined: empty group");
  return std::abs(r[0] - r[1]);
}

double equal_opportunity_diff(std::span<const int> predictions, std::span<const int> labels,
                              std::span<const int> sensitive) {
  return conditional_gap(predictions, labels, sensitive, 1, "undefined: no positives in group");
}

double predictive_equality_diff(std::span<const int> predictions, std::span<const int> labels,
                                std::span<const int> sensitive) {
  return conditional_gap(predictions, labels, sensitive, 0, "undefined: no negatives in group");
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  require_same_length(scores.size(), labels.size());
  require_binary(labels, "labels");
  const auto n = scores.size();
  const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const auto n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw MetricUndefined("AUC undefined");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of 1-based ranks of the positives, ties sharing their average rank.
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == 1) rank_sum += avg_rank;
    i = j;
  }
  const double p = static_cast<double>(n_pos);
  const double u = rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(n_neg));
}

double max_bias(std::span<const double> deltas) {
  if (deltas.empty()) throw std::invalid_argument("max_bias: empty series");
  return *std::max_element(deltas.begin(), deltas.end());
}

double temporal_stability(std::span<const double> deltas) {
  if (deltas.size() < 2) throw std::invalid_argument("temporal_stability: need at least 2 steps");
  double sum = 0.0;
  for (std::size_t i = 1; i < deltas.size(); ++i) sum += std::abs(deltas[i] - deltas[i - 1]);
  return sum / static_cast<double>(deltas.size());
}

double max_bias_difference(std::span<const double> deltas) {
  if (deltas.size() < 2)
    throw std::invalid_argument("max_bias_difference: need at least 2 steps");
  double best = 0.0;
  for (std::size_t i = 1; i < deltas.size(); ++i)
    best = std::max(best, std::abs(deltas[i] - deltas[i - 1]));
  return best;
}

SnapshotReport evaluate_snapshot(std::span<const double> scores, std::span<const int> labels,
                                 std::span<const int> sensitive, double threshold) {
  require_same_length(scores.size(), labels.size());
  require_same_length(scores.size(), sensitive.size());
  std::vector<int> predictions;
  predictions.reserve(scores.size());
  for (double s : scores) predictions.push_back(s >= threshold ? 1 : 0);

  SnapshotReport r;
  r.n_evaluated = scores.size();
  r.auc = try_metric([&] { return auc(scores, labels); });
  r.delta_sp = try_metric([&] { return statistical_parity_diff(predictions, sensitive); });
  r.delta_tpr = try_metric([&] { return equal_opportunity_diff(predictions, labels, sensitive); });
  r.delta_fpr =
      try_metric([&] { return predictive_equality_diff(predictions, labels, sensitive); });
  return r;
}

std::string_view to_string(DeltaMetric metric) {
  switch (metric) {
    case DeltaMetric::StatisticalParity: return "delta_sp";
    case DeltaMetric::EqualOpportunity: return "delta_tpr";
    case DeltaMetric::PredictiveEquality: return "delta_fpr";
  }
  return "unknown";
}

DeltaMetric parse_delta_metric(std::string_view name) {
  if (name == "delta_sp") return DeltaMetric::StatisticalParity;
  if (name == "delta_tpr") return DeltaMetric::EqualOpportunity;
  if (name == "delta_fpr") return DeltaMetric::PredictiveEquality;
  throw ConfigError("unknown delta metric '" + std::string(name) + "'");
}

TemporalReport temporal_report(std::span<const std::optional<double>> deltas) {
  std::vector<double> valid;
  TemporalReport r;
  for (const auto& d : deltas) {
    if (d)
      valid.push_back(*d);
    else
      ++r.n_excluded;
  }
  r.n_steps = valid.size();
  if (!valid.empty()) r.mb = max_bias(valid);
  if (valid.size() >= 2) {
    r.ts = temporal_stability(valid);
    r.mbd = max_bias_difference(valid);
  }
  return r;
}

}  // namespace fairdrift
