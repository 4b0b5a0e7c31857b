#include "fairdrift/reweigh.hpp"

namespace fairdrift {

GroupDistribution expected_distribution(const GroupDistribution& observed) {
  Table2x2 p{};
  for (int a = 0; a < 2; ++a)
    for (int y = 0; y < 2; ++y)
      p[a][y] = observed.marginal_sensitive(a) * observed.marginal_label(y);
  return GroupDistribution(p, observed.n());
}

WeightTable reweigh(const GroupDistribution& observed) {
  const auto expected = expected_distribution(observed);
  Table2x2 w{};
  for (int a = 0; a < 2; ++a)
    for (int y = 0; y < 2; ++y) {
      const double obs = observed.at(a, y);
      w[a][y] = obs > 0.0 ? expected.at(a, y) / obs : 1.0;
    }
  return WeightTable(w);
}

std::vector<double> apply_weights(std::span<const Instance> instances, const WeightTable& table) {
  std::vector<double> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) out.push_back(table.at(inst.sensitive, inst.label));
  return out;
}

std::vector<double> apply_weights(const Batch& batch, const WeightTable& table) {
  return apply_weights(batch.instances(), table);
}

std::vector<double> apply_weights(std::span<const Batch> window, const WeightTable& table) {
  std::vector<double> out;
  for (const auto& batch : window) {
    const auto w = apply_weights(batch.instances(), table);
    out.insert(out.end(), w.begin(), w.end());
  }
  return out;
}

}  // namespace fairdrift
