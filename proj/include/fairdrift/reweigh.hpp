#pragma once

// Reweighing preprocessor: per-(group, label) weights that make the sensitive
// attribute and the label independent under the weighted empirical distribution.

#include <span>
#include <vector>

#include "fairdrift/core.hpp"

namespace fairdrift {

/// Product of the marginals, P(A = a) * P(Y = y).
GroupDistribution expected_distribution(const GroupDistribution& observed);

/// w(a, y) = expected(a, y) / observed(a, y). Cells with no observations get
/// weight 1; they weight no instances of the batch they were computed from.
WeightTable reweigh(const GroupDistribution& observed);

/// Looks up each instance's (sensitive, label) cell in `table`.
std::vector<double> apply_weights(std::span<const Instance> instances, const WeightTable& table);
std::vector<double> apply_weights(const Batch& batch, const WeightTable& table);
/// Concatenated per-instance weights over a window, in batch order.
std::vector<double> apply_weights(std::span<const Batch> window, const WeightTable& table);

}  // namespace fairdrift
