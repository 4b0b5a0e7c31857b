#pragma once

// Anticipatory weighting: a moving-average forecast of the next batch's
// group/label distribution, and the blend of current and anticipated weights.

#include <cstddef>
#include <span>

#include "fairdrift/core.hpp"

namespace fairdrift {

struct AnticipationConfig {
  std::size_t window = 3;  ///< trailing batches averaged by the forecast (S)
  double alpha = 0.5;      ///< 1 = current weights only, 0 = anticipated only

  void validate() const;
};

/// Cellwise mean of the last min(window, history.size()) distributions.
/// The result carries n = 0 to mark it as a forecast.
GroupDistribution forecast(std::span<const GroupDistribution> history, std::size_t window);

/// alpha * current + (1 - alpha) * future, cellwise.
WeightTable blend(const WeightTable& current, const WeightTable& future, double alpha);

/// Weights for training at time t: reweighing of `train_dist` blended with
/// reweighing of the forecast built from the per-batch `history`.
WeightTable abc_weights(const GroupDistribution& train_dist,
                        std::span<const GroupDistribution> history,
                        const AnticipationConfig& config);

}  // namespace fairdrift
