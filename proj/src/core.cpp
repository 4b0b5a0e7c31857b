#include "fairdrift/core.hpp"

#include <charconv>
#include <cmath>
#include <string>

namespace fairdrift {

namespace {

bool is_binary(int v) { return v == 0 || v == 1; }

GroupDistribution from_counts(const std::array<std::array<std::size_t, 2>, 2>& counts,
                              std::size_t n) {
  if (n == 0) throw DataError("empty batch");
  const auto total = static_cast<double>(n);
  Table2x2 p{};
  for (int a = 0; a < 2; ++a)
    for (int y = 0; y < 2; ++y) p[a][y] = static_cast<double>(counts[a][y]) / total;
  return GroupDistribution(p, n);
}

void check_metric(const std::optional<double>& v, const char* name) {
  if (v && !(*v >= 0.0 && *v <= 1.0))
    throw std::invalid_argument(std::string("metric ") + name + " outside [0, 1]");
}

}  // namespace

Batch::Batch(std::size_t time_index, std::vector<Instance> instances)
    : time_index_(time_index), instances_(std::move(instances)) {
  if (instances_.empty()) throw DataError("empty batch");
  const auto d = instances_.front().features.size();
  for (const auto& inst : instances_) {
    if (inst.time_index != time_index_)
      throw DataError("instance time index " + std::to_string(inst.time_index) +
                      " does not match batch " + std::to_string(time_index_));
    if (!is_binary(inst.sensitive) || !is_binary(inst.label))
      throw DataError("sensitive attribute and label must be 0 or 1");
    if (inst.features.size() != d) throw DataError("inconsistent feature dimension in batch");
  }
}

void validate_stream(std::span<const Batch> stream) {
  for (std::size_t i = 1; i < stream.size(); ++i) {
    if (stream[i].dim() != stream[0].dim())
      throw DataError("inconsistent feature dimension across batches");
    if (stream[i].time_index() <= stream[i - 1].time_index())
      throw DataError("batch time indices must be strictly increasing");
  }
}

GroupDistribution::GroupDistribution(const Table2x2& p, std::size_t n) : p_(p), n_(n) {
  double sum = 0.0;
  for (const auto& row : p_)
    for (double v : row) {
      if (!std::isfinite(v) || v < 0.0)
        throw std::invalid_argument("group distribution entries must be finite and >= 0");
      sum += v;
    }
  if (std::abs(sum - 1.0) > kTolerance)
    throw std::invalid_argument("group distribution must sum to 1");
}

GroupDistribution GroupDistribution::uniform() {
  return GroupDistribution({{{0.25, 0.25}, {0.25, 0.25}}}, 0);
}

WeightTable::WeightTable(const Table2x2& w) : w_(w) {
  for (const auto& row : w_)
    for (double v : row)
      if (!std::isfinite(v) || v <= 0.0)
        throw std::invalid_argument("weights must be positive and finite");
}

WeightTable WeightTable::ones() { return WeightTable({{{1.0, 1.0}, {1.0, 1.0}}}); }

GroupDistribution group_distribution(std::span<const Instance> instances) {
  std::array<std::array<std::size_t, 2>, 2> counts{};
  for (const auto& inst : instances) ++counts.at(inst.sensitive).at(inst.label);
  return from_counts(counts, instances.size());
}

GroupDistribution group_distribution(const Batch& batch) {
  return group_distribution(batch.instances());
}

GroupDistribution group_distribution(std::span<const Batch> window) {
  std::array<std::array<std::size_t, 2>, 2> counts{};
  std::size_t n = 0;
  for (const auto& batch : window) {
    for (const auto& inst : batch.instances()) ++counts[inst.sensitive][inst.label];
    n += batch.size();
  }
  return from_counts(counts, n);
}

std::string_view to_string(RegimeId regime) {
  switch (regime) {
    case RegimeId::Vanilla: return "vanilla";
    case RegimeId::Static: return "static";
    case RegimeId::Dynamic: return "dynamic";
    case RegimeId::Abc: return "abc";
  }
  return "unknown";
}

RegimeId parse_regime(std::string_view name) {
  if (name == "vanilla") return RegimeId::Vanilla;
  if (name == "static") return RegimeId::Static;
  if (name == "dynamic") return RegimeId::Dynamic;
  if (name == "abc") return RegimeId::Abc;
  throw ConfigError("unknown regime '" + std::string(name) + "'");
}

std::string format_real(double value) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw std::runtime_error("format_real: conversion failed");
  return std::string(buf.data(), end);
}

void MetricSeries::append(const MetricRecord& record) {
  if (!records_.empty() && record.time_index <= records_.back().time_index)
    throw std::invalid_argument("metric series time index must be strictly increasing");
  check_metric(record.auc, "auc");
  check_metric(record.delta_sp, "delta_sp");
  check_metric(record.delta_tpr, "delta_tpr");
  check_metric(record.delta_fpr, "delta_fpr");
  records_.push_back(record);
}

}  // namespace fairdrift
