#pragma once

// Train-on-t / test-on-(t+1) experiment loop for the four training regimes:
//
//   Vanilla  fit once on the first batch, uniform weights
//   Static   fit once on the first batch, reweighed
//   Dynamic  refit every step on the window, reweighed with the window's
//            pooled distribution
//   Abc      refit every step on the window, weights blended between the
//            pooled reweighing and the reweighing of a moving-average
//            forecast of the next batch's distribution

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fairdrift/anticipate.hpp"
#include "fairdrift/core.hpp"
#include "fairdrift/learner.hpp"
#include "fairdrift/metrics.hpp"

namespace fairdrift {

struct ExperimentConfig {
  RegimeId regime = RegimeId::Dynamic;
  TrainConfig train;
  std::optional<AnticipationConfig> anticipation;  ///< set iff regime == Abc
  bool growing_window = true;  ///< false: Dynamic/Abc train on the newest batch only
  DeltaMetric delta_metric = DeltaMetric::StatisticalParity;
  double threshold = 0.5;

  void validate() const;
};

/// What was used to evaluate one batch.
struct StepTrace {
  std::size_t time_index = 0;  ///< the evaluated batch
  std::size_t train_size = 0;
  std::optional<WeightTable> weights;  ///< empty for Vanilla
  std::optional<LinearModel> model;    ///< empty when the fit failed
  std::vector<double> scores;
};

struct RegimeRun {
  MetricSeries series;
  std::vector<StepTrace> steps;
  TemporalReport temporal;  ///< over config.delta_metric
};

RegimeRun run_regime(std::span<const Batch> stream, const ExperimentConfig& config);

std::vector<std::optional<double>> delta_series(const MetricSeries& series, DeltaMetric metric);

struct MetricMeans {
  std::optional<double> auc;
  std::optional<double> delta_sp;
  std::optional<double> delta_tpr;
  std::optional<double> delta_fpr;
};

/// Arithmetic means over the non-missing entries of each metric.
MetricMeans mean_metrics(const MetricSeries& series);

struct SweepRow {
  double alpha = 0.0;
  MetricMeans means;
  TemporalReport temporal;
};

/// One Abc run per alpha on the same stream and training configuration.
/// Runs execute concurrently; rows come back in the order of `alphas`.
std::vector<SweepRow> sweep_alpha(std::span<const Batch> stream, const ExperimentConfig& base,
                                  std::span<const double> alphas);

/// 0.0, 0.1, ..., 1.0
std::vector<double> default_alpha_grid();

}  // namespace fairdrift
