#include "fairdrift/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fairdrift {

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw ConfigError("learning_rate must be > 0");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(l2 >= 0.0) || !std::isfinite(l2)) throw ConfigError("l2 must be >= 0");
}

LinearModel LinearModel::zero(std::size_t dim) {
  return LinearModel{std::vector<double>(dim, 0.0), 0.0, std::vector<double>(dim, 0.0),
                     std::vector<double>(dim, 1.0), 0};
}

Standardization fit_standardization(std::span<const Instance> instances) {
  if (instances.empty()) throw std::invalid_argument("no instances to standardize");
  const auto d = instances.front().features.size();
  const auto n = static_cast<double>(instances.size());
  Standardization s{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (const auto& inst : instances)
    for (std::size_t j = 0; j < d; ++j) s.means[j] += inst.features[j];
  for (auto& m : s.means) m /= n;
  for (const auto& inst : instances)
    for (std::size_t j = 0; j < d; ++j) {
      const double c = inst.features[j] - s.means[j];
      s.stds[j] += c * c;
    }
  for (auto& sd : s.stds) {
    sd = std::sqrt(sd / n);
    if (!(sd > 1e-12)) sd = 1.0;
  }
  return s;
}

DesignMatrix standardize(std::span<const Instance> instances, const Standardization& s) {
  const auto d = s.means.size();
  DesignMatrix x{instances.size(), d, {}};
  x.values.reserve(instances.size() * d);
  for (const auto& inst : instances) {
    if (inst.features.size() != d) throw std::invalid_argument("feature dimension mismatch");
    for (std::size_t j = 0; j < d; ++j)
      x.values.push_back((inst.features[j] - s.means[j]) / s.stds[j]);
  }
  return x;
}

LossGradient weighted_log_loss(std::span<const double> weights, double bias,
                               const DesignMatrix& x, std::span<const int> labels,
                               std::span<const double> sample_weights, double l2) {
  if (labels.size() != x.rows || sample_weights.size() != x.rows || weights.size() != x.cols)
    throw std::invalid_argument("weighted_log_loss: length mismatch");
  const double total = std::accumulate(sample_weights.begin(), sample_weights.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("sample weights must not all be zero");

  LossGradient out{0.0, std::vector<double>(x.cols, 0.0), 0.0};
  for (std::size_t i = 0; i < x.rows; ++i) {
    const double s = sample_weights[i];
    if (s == 0.0) continue;
    const auto xi = x.row(i);
    const double z = dot(weights, xi) + bias;
    const double y = labels[i];
    out.loss += s * (softplus(z) - y * z);
    const double r = s * (sigmoid(z) - y);
    for (std::size_t j = 0; j < x.cols; ++j) out.grad_weights[j] += r * xi[j];
    out.grad_bias += r;
  }
  out.loss /= total;
  out.grad_bias /= total;
  for (std::size_t j = 0; j < x.cols; ++j) {
    out.grad_weights[j] = out.grad_weights[j] / total + l2 * weights[j];
    out.loss += 0.5 * l2 * weights[j] * weights[j];
  }
  return out;
}

LinearModel fit(std::span<const Instance> instances, std::span<const double> sample_weights,
                const TrainConfig& config) {
  return fit(instances, sample_weights, config, nullptr);
}

LinearModel fit(std::span<const Instance> instances, std::span<const double> sample_weights,
                const TrainConfig& config, std::vector<double>* loss_trace) {
  config.validate();
  if (instances.empty()) throw std::invalid_argument("fit: no instances");
  if (instances.size() != sample_weights.size())
    throw std::invalid_argument("fit: instances and sample weights differ in length");
  bool any_positive = false;
  for (double s : sample_weights) {
    if (!(s >= 0.0) || !std::isfinite(s))
      throw std::invalid_argument("fit: sample weights must be finite and >= 0");
    any_positive = any_positive || s > 0.0;
  }
  if (!any_positive) throw std::invalid_argument("fit: all sample weights are zero");

  const auto standardization = fit_standardization(instances);
  const auto x = standardize(instances, standardization);
  std::vector<int> labels;
  labels.reserve(instances.size());
  std::size_t trained_on = 0;
  for (const auto& inst : instances) {
    labels.push_back(inst.label);
    trained_on = std::max(trained_on, inst.time_index);
  }

  std::vector<double> w(x.cols, 0.0);
  double b = 0.0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto lg = weighted_log_loss(w, b, x, labels, sample_weights, config.l2);
    if (!std::isfinite(lg.loss)) throw TrainingDiverged();
    if (loss_trace) loss_trace->push_back(lg.loss);
    for (std::size_t j = 0; j < x.cols; ++j) w[j] -= config.learning_rate * lg.grad_weights[j];
    b -= config.learning_rate * lg.grad_bias;
  }
  const bool finite = std::isfinite(b) && std::all_of(w.begin(), w.end(), [](double v) {
                        return std::isfinite(v);
                      });
  if (!finite) throw TrainingDiverged();

  return LinearModel{std::move(w), b, standardization.means, standardization.stds, trained_on};
}

double predict_proba(const LinearModel& model, std::span<const double> features) {
  if (features.size() != model.dim())
    throw std::invalid_argument("predict_proba: expected " + std::to_string(model.dim()) +
                                " features, got " + std::to_string(features.size()));
  double z = model.bias;
  for (std::size_t j = 0; j < features.size(); ++j)
    z += model.weights[j] * (features[j] - model.feature_means[j]) / model.feature_stds[j];
  // Keep the output strictly inside (0, 1).
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  return std::clamp(sigmoid(z), lo, hi);
}

int predict(const LinearModel& model, std::span<const double> features, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("threshold must lie in (0, 1)");
  return predict_proba(model, features) >= threshold ? 1 : 0;
}

std::vector<double> score(const LinearModel& model, const Batch& batch) {
  std::vector<double> out;
  out.reserve(batch.size());
  for (const auto& inst : batch.instances()) out.push_back(predict_proba(model, inst.features));
  return out;
}

void to_json(nlohmann::json& j, const LinearModel& model) {
  j = nlohmann::json{{"weights", model.weights},
                     {"bias", model.bias},
                     {"feature_means", model.feature_means},
                     {"feature_stds", model.feature_stds},
                     {"trained_on", model.trained_on}};
}

void from_json(const nlohmann::json& j, LinearModel& model) {
  j.at("weights").get_to(model.weights);
  j.at("bias").get_to(model.bias);
  j.at("feature_means").get_to(model.feature_means);
  j.at("feature_stds").get_to(model.feature_stds);
  j.at("trained_on").get_to(model.trained_on);
  const auto d = model.weights.size();
  if (model.feature_means.size() != d || model.feature_stds.size() != d)
    throw std::invalid_argument("model snapshot: inconsistent vector lengths");
}

}  // namespace fairdrift
