#pragma once

// Run bookkeeping: per-iteration loss trace, periodic metric checkpoints,
// final metrics per reconstruction step count, and parameter/FLOP accounting.
// Serialized to record.json; non-finite metric fields are omitted rather
// than written as nulls.

#include "iinr/metrics.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace iinr {

struct CheckpointRow {
  std::int64_t iteration = 0;
  double loss = 0.0;
  MetricReport metrics;
};

struct RunRecord {
  nlohmann::json config;  // snapshot of the experiment configuration
  std::string label;      // e.g. "baseline", "iterative", ablation tags
  std::uint64_t seed = 0;
  std::vector<double> loss_trace;
  std::vector<CheckpointRow> checkpoints;
  std::vector<std::pair<int, MetricReport>> finals;  // steps -> metrics
  std::int64_t param_total = 0;
  std::int64_t param_backbone = 0;
  std::int64_t param_modules = 0;
  std::int64_t flops_backbone = 0;  // per coordinate
  std::int64_t flops_per_step = 0;  // per coordinate per refinement step
  double wall_seconds = 0.0;
  bool failed = false;
  std::string failure;

  const MetricReport* final_for(int steps) const {
    for (const auto& [s, m] : finals)
      if (s == steps) return &m;
    return nullptr;
  }
};

namespace detail {

inline void put_finite(nlohmann::json& j, const char* key, double v) {
  if (std::isfinite(v)) j[key] = v;
}

inline double get_or_nan(const nlohmann::json& j, const char* key) {
  if (j.contains(key)) return j.at(key).get<double>();
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

inline nlohmann::json to_json(const MetricReport& m) {
  nlohmann::json j = nlohmann::json::object();
  detail::put_finite(j, "psnr", m.psnr);
  detail::put_finite(j, "ssim", m.ssim);
  detail::put_finite(j, "iou", m.iou);
  detail::put_finite(j, "mse", m.mse);
  return j;
}

inline MetricReport metric_report_from_json(const nlohmann::json& j) {
  MetricReport m;
  m.psnr = detail::get_or_nan(j, "psnr");
  m.ssim = detail::get_or_nan(j, "ssim");
  m.iou = detail::get_or_nan(j, "iou");
  m.mse = detail::get_or_nan(j, "mse");
  return m;
}

inline nlohmann::json to_json(const RunRecord& r) {
  nlohmann::json j;
  j["config"] = r.config;
  j["label"] = r.label;
  j["seed"] = r.seed;
  j["loss_trace"] = r.loss_trace;
  j["checkpoints"] = nlohmann::json::array();
  for (const auto& c : r.checkpoints) {
    nlohmann::json row = to_json(c.metrics);
    row["iteration"] = c.iteration;
    row["loss"] = c.loss;
    j["checkpoints"].push_back(row);
  }
  j["finals"] = nlohmann::json::array();
  for (const auto& [steps, m] : r.finals) {
    nlohmann::json row = to_json(m);
    row["steps"] = steps;
    j["finals"].push_back(row);
  }
  j["param_total"] = r.param_total;
  j["param_backbone"] = r.param_backbone;
  j["param_modules"] = r.param_modules;
  j["flops_backbone"] = r.flops_backbone;
  j["flops_per_step"] = r.flops_per_step;
  j["wall_seconds"] = r.wall_seconds;
  j["failed"] = r.failed;
  j["failure"] = r.failure;
  return j;
}

inline RunRecord run_record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.config = j.value("config", nlohmann::json::object());
  r.label = j.value("label", std::string{});
  r.seed = j.value("seed", std::uint64_t{0});
  r.loss_trace = j.value("loss_trace", std::vector<double>{});
  for (const auto& row : j.value("checkpoints", nlohmann::json::array())) {
    CheckpointRow c;
    c.iteration = row.value("iteration", std::int64_t{0});
    c.loss = row.value("loss", 0.0);
    c.metrics = metric_report_from_json(row);
    r.checkpoints.push_back(c);
  }
  for (const auto& row : j.value("finals", nlohmann::json::array()))
    r.finals.emplace_back(row.value("steps", 0), metric_report_from_json(row));
  r.param_total = j.value("param_total", std::int64_t{0});
  r.param_backbone = j.value("param_backbone", std::int64_t{0});
  r.param_modules = j.value("param_modules", std::int64_t{0});
  r.flops_backbone = j.value("flops_backbone", std::int64_t{0});
  r.flops_per_step = j.value("flops_per_step", std::int64_t{0});
  r.wall_seconds = j.value("wall_seconds", 0.0);
  r.failed = j.value("failed", false);
  r.failure = j.value("failure", std::string{});
  return r;
}

}  // namespace iinr
