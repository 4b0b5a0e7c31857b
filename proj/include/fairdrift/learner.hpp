#pragma once

// Weighted logistic regression trained by full-batch gradient descent.
//
// The objective is the weight-normalized log-loss plus an L2 penalty on the
// coefficients (the bias is not penalized):
//
//   L(w, b) = sum_i s_i * l(y_i, sigmoid(w . z_i + b)) / sum_i s_i + l2/2 * |w|^2
//
// where z_i are the features standardized with the training set's per-column
// mean and standard deviation. Normalizing by sum_i s_i makes the fit
// invariant to a global rescaling of the sample weights.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fairdrift/core.hpp"
#include "json.hpp"

namespace fairdrift {

/// Raised when the loss or the parameters stop being finite.
class TrainingDiverged : public NumericError {
 public:
  TrainingDiverged() : NumericError("diverged") {}
};

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 500;
  double l2 = 1e-4;
  std::uint64_t seed = 0;

  void validate() const;
};

struct LinearModel {
  std::vector<double> weights;  ///< coefficients on standardized features
  double bias = 0.0;
  std::vector<double> feature_means;
  std::vector<double> feature_stds;
  std::size_t trained_on = 0;  ///< highest batch time index seen in training

  /// All-zero model with identity standardization.
  static LinearModel zero(std::size_t dim);

  std::size_t dim() const noexcept { return weights.size(); }
};

/// Row-major n x d matrix of standardized features.
struct DesignMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values).subspan(i * cols, cols);
  }
};

struct Standardization {
  std::vector<double> means;
  std::vector<double> stds;
};

/// Per-column mean and population standard deviation; constant columns get
/// a standard deviation of 1.
Standardization fit_standardization(std::span<const Instance> instances);
DesignMatrix standardize(std::span<const Instance> instances, const Standardization& s);

struct LossGradient {
  double loss = 0.0;
  std::vector<double> grad_weights;
  double grad_bias = 0.0;
};

/// Value and analytic gradient of the weighted objective at (weights, bias).
LossGradient weighted_log_loss(std::span<const double> weights, double bias,
                               const DesignMatrix& x, std::span<const int> labels,
                               std::span<const double> sample_weights, double l2);

/// Trains from zero initialization. Throws std::invalid_argument on a length
/// mismatch or when no weight is positive, TrainingDiverged on non-finite loss.
LinearModel fit(std::span<const Instance> instances, std::span<const double> sample_weights,
                const TrainConfig& config);

/// Same as fit, also recording the objective value before every epoch.
LinearModel fit(std::span<const Instance> instances, std::span<const double> sample_weights,
                const TrainConfig& config, std::vector<double>* loss_trace);

double predict_proba(const LinearModel& model, std::span<const double> features);
int predict(const LinearModel& model, std::span<const double> features, double threshold = 0.5);

/// predict_proba for every instance in the batch.
std::vector<double> score(const LinearModel& model, const Batch& batch);

void to_json(nlohmann::json& j, const LinearModel& model);
void from_json(const nlohmann::json& j, LinearModel& model);

}  // namespace fairdrift
