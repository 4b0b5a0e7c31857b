#include "fairdrift/anticipate.hpp"

#include <algorithm>

#include "fairdrift/reweigh.hpp"

namespace fairdrift {

void AnticipationConfig::validate() const {
  if (window < 1) throw ConfigError("window must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha out of range");
}

GroupDistribution forecast(std::span<const GroupDistribution> history, std::size_t window) {
  if (history.empty()) throw std::invalid_argument("no history to forecast from");
  if (window < 1) throw ConfigError("window must be >= 1");
  const auto terms = std::min(window, history.size());
  const auto recent = history.last(terms);
  Table2x2 mean{};
  for (const auto& dist : recent)
    for (int a = 0; a < 2; ++a)
      for (int y = 0; y < 2; ++y) mean[a][y] += dist.at(a, y);
  for (auto& row : mean)
    for (auto& v : row) v /= static_cast<double>(terms);
  return GroupDistribution(mean, 0);
}

WeightTable blend(const WeightTable& current, const WeightTable& future, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha out of range");
  // Endpoints return the inputs untouched so alpha = 1 is bit-identical to
  // plain reweighing.
  if (alpha == 1.0) return current;
  if (alpha == 0.0) return future;
  Table2x2 w{};
  for (int a = 0; a < 2; ++a)
    for (int y = 0; y < 2; ++y)
      w[a][y] = alpha * current.at(a, y) + (1.0 - alpha) * future.at(a, y);
  return WeightTable(w);
}

WeightTable abc_weights(const GroupDistribution& train_dist,
                        std::span<const GroupDistribution> history,
                        const AnticipationConfig& config) {
  config.validate();
  const auto anticipated = forecast(history, config.window);
  return blend(reweigh(train_dist), reweigh(anticipated), config.alpha);
}

}  // namespace fairdrift
