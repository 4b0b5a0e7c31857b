#include "fairdrift/regimes.hpp"

#include <future>

#include "fairdrift/reweigh.hpp"

namespace fairdrift {

namespace {

std::vector<Instance> concat(std::span<const Batch> window) {
  std::vector<Instance> out;
  for (const auto& b : window) out.insert(out.end(), b.instances().begin(), b.instances().end());
  return out;
}

struct TrainedStep {
  std::optional<WeightTable> weights;
  std::optional<LinearModel> model;
  std::size_t train_size = 0;
};

TrainedStep train_on(std::span<const Batch> window, std::optional<WeightTable> table,
                     const TrainConfig& train) {
  const auto instances = concat(window);
  const auto sample_weights = table ? apply_weights(std::span<const Instance>(instances), *table)
                                    : std::vector<double>(instances.size(), 1.0);
  TrainedStep step{table, std::nullopt, instances.size()};
  try {
    step.model = fit(instances, sample_weights, train);
  } catch (const TrainingDiverged&) {
    // Reported as a missing step.
  }
  return step;
}

// Weights for a refit at step t (0-based index of the newest training batch).
WeightTable refit_weights(std::span<const Batch> stream, std::size_t t,
                          std::span<const Batch> window, const ExperimentConfig& config) {
  const auto pooled = group_distribution(window);
  if (config.regime == RegimeId::Dynamic) return reweigh(pooled);
  std::vector<GroupDistribution> history;
  history.reserve(t + 1);
  for (std::size_t k = 0; k <= t; ++k) history.push_back(group_distribution(stream[k]));
  return abc_weights(pooled, history, *config.anticipation);
}

MetricRecord evaluate(const Batch& batch, const TrainedStep& trained, double threshold,
                      std::vector<double>& scores) {
  MetricRecord rec;
  rec.time_index = batch.time_index();
  if (!trained.model) {
    rec.fit_failed = true;
    return rec;
  }
  scores = score(*trained.model, batch);
  std::vector<int> labels, sensitive;
  labels.reserve(batch.size());
  sensitive.reserve(batch.size());
  for (const auto& inst : batch.instances()) {
    labels.push_back(inst.label);
    sensitive.push_back(inst.sensitive);
  }
  const auto r = evaluate_snapshot(scores, labels, sensitive, threshold);
  rec.auc = r.auc;
  rec.delta_sp = r.delta_sp;
  rec.delta_tpr = r.delta_tpr;
  rec.delta_fpr = r.delta_fpr;
  return rec;
}

std::optional<double> mean_of(const MetricSeries& series,
                              std::optional<double> MetricRecord::*field) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& rec : series.records())
    if (const auto& v = rec.*field) {
      sum += *v;
      ++n;
    }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace

void ExperimentConfig::validate() const {
  train.validate();
  if (anticipation.has_value() != (regime == RegimeId::Abc))
    throw ConfigError("anticipation settings are required for, and only for, the abc regime");
  if (anticipation) anticipation->validate();
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must lie in (0, 1)");
}

RegimeRun run_regime(std::span<const Batch> stream, const ExperimentConfig& config) {
  config.validate();
  if (stream.size() < 2) throw DataError("need at least 2 batches");
  validate_stream(stream);

  RegimeRun run{MetricSeries(config.regime), {}, {}};
  const bool train_once = config.regime == RegimeId::Vanilla || config.regime == RegimeId::Static;

  std::optional<TrainedStep> once;
  if (train_once) {
    const auto first = stream.first(1);
    std::optional<WeightTable> table;
    if (config.regime == RegimeId::Static) table = reweigh(group_distribution(first));
    once = train_on(first, table, config.train);
  }

  for (std::size_t t = 0; t + 1 < stream.size(); ++t) {
    TrainedStep trained;
    if (train_once) {
      trained = *once;
    } else {
      const auto window = config.growing_window ? stream.first(t + 1) : stream.subspan(t, 1);
      trained = train_on(window, refit_weights(stream, t, window, config), config.train);
    }
    const auto& test = stream[t + 1];
    StepTrace trace{test.time_index(), trained.train_size, trained.weights, trained.model, {}};
    run.series.append(evaluate(test, trained, config.threshold, trace.scores));
    run.steps.push_back(std::move(trace));
  }

  const auto deltas = delta_series(run.series, config.delta_metric);
  run.temporal = temporal_report(deltas);
  return run;
}

std::vector<std::optional<double>> delta_series(const MetricSeries& series, DeltaMetric metric) {
  std::vector<std::optional<double>> out;
  out.reserve(series.size());
  for (const auto& rec : series.records()) {
    switch (metric) {
      case DeltaMetric::StatisticalParity: out.push_back(rec.delta_sp); break;
      case DeltaMetric::EqualOpportunity: out.push_back(rec.delta_tpr); break;
      case DeltaMetric::PredictiveEquality: out.push_back(rec.delta_fpr); break;
    }
  }
  return out;
}

MetricMeans mean_metrics(const MetricSeries& series) {
  return {mean_of(series, &MetricRecord::auc), mean_of(series, &MetricRecord::delta_sp),
          mean_of(series, &MetricRecord::delta_tpr), mean_of(series, &MetricRecord::delta_fpr)};
}

std::vector<SweepRow> sweep_alpha(std::span<const Batch> stream, const ExperimentConfig& base,
                                  std::span<const double> alphas) {
  if (alphas.empty()) throw ConfigError("alpha list is empty");
  std::vector<ExperimentConfig> configs;
  for (double alpha : alphas) {
    auto cfg = base;
    cfg.regime = RegimeId::Abc;
    auto anticipation = base.anticipation.value_or(AnticipationConfig{});
    anticipation.alpha = alpha;
    cfg.anticipation = anticipation;
    cfg.validate();
    configs.push_back(cfg);
  }

  std::vector<std::future<SweepRow>> pending;
  for (const auto& cfg : configs) {
    pending.push_back(std::async(std::launch::async, [&stream, cfg] {
      const auto run = run_regime(stream, cfg);
      return SweepRow{cfg.anticipation->alpha, mean_metrics(run.series), run.temporal};
    }));
  }
  std::vector<SweepRow> rows;
  rows.reserve(pending.size());
  for (auto& f : pending) rows.push_back(f.get());
  return rows;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 10; ++k) grid.push_back(k / 10.0);
  return grid;
}

}  // namespace fairdrift
