// Copyright 2026 The agmap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "agmap/detection.hpp"
#include "agmap/error.hpp"
#include "agmap/json_util.hpp"
#include "agmap/semantic_map.hpp"

namespace agmap {

/// Percentage of target objects that were detected.
inline double detection_ratio(size_t matched, size_t total) {
  require(total >= 1, "detection ratio needs at least one target object");
  require(matched <= total, "matched count exceeds the total");
  return 100.0 * static_cast<double>(matched) / static_cast<double>(total);
}

inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

inline std::string format_ratio(double pct) { return format_fixed(pct, 1); }
inline std::string format_seconds(double s) { return format_fixed(s, 2); }

struct GroundTruthEntry {
  std::string label;
  Vec3 position = Vec3::Zero();
};

/// Reference object positions (world frame), e.g. exported from a motion
/// capture system.
struct GroundTruthSet {
  std::vector<GroundTruthEntry> entries;
  std::string source;

  /// Accepts either a bare array of {label, x, y, z} records or an object
  /// with an "objects" array.
  static GroundTruthSet from_json(const Json& doc, std::string source = {}) {
    JsonReader root(doc);
    JsonReader list = doc.is_array() ? root : root.at("objects");
    GroundTruthSet gt;
    gt.source = std::move(source);
    for (size_t i = 0; i < list.array().size(); ++i) {
      const auto rec = list.at(i);
      gt.entries.push_back({rec.at("label").string(),
                            Vec3(rec.at("x").number(), rec.at("y").number(), rec.at("z").number())});
    }
    return gt;
  }

  Json to_json() const {
    Json arr = Json::array();
    for (const auto& e : entries)
      arr.push_back({{"label", e.label}, {"x", e.position.x()}, {"y", e.position.y()},
                     {"z", e.position.z()}});
    return arr;
  }
};

struct ObjectScore {
  std::string label;
  std::optional<double> error_m;  // nullopt when missed
  std::optional<std::uint64_t> estimate_id;
  Vec3 truth = Vec3::Zero();
};

struct ErrorStats {
  double mean = 0.0;
  double median = 0.0;
  double p90 = 0.0;
};

/// Linear-interpolated quantile of an ascending-sorted sample.
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline ErrorStats error_stats(std::vector<double> errors) {
  ErrorStats s;
  if (errors.empty()) return s;
  std::sort(errors.begin(), errors.end());
  double sum = 0.0;
  for (double e : errors) sum += e;
  s.mean = sum / static_cast<double>(errors.size());
  s.median = quantile_sorted(errors, 0.5);
  s.p90 = quantile_sorted(errors, 0.9);
  return s;
}

struct MatchResult {
  size_t matched = 0;
  size_t total = 0;
  std::vector<ObjectScore> per_object;  // ground-truth order
  ErrorStats stats;

  double ratio_pct() const { return detection_ratio(matched, total); }
};

inline constexpr double kDefaultMaxMatchDistance = 1.0;

/// Greedy nearest-neighbor matching per label: candidate pairs within the
/// gate are taken in ascending distance, each estimate and truth used once.
/// Missed truths only affect the ratio, not the error statistics.
inline MatchResult match_and_score(const SemanticMap& estimates, const GroundTruthSet& truth,
                                   double max_match_m = kDefaultMaxMatchDistance) {
  require(estimates.frame() == MapFrame::kWorld, "estimates must be in the world frame");
  require(max_match_m > 0.0, "match gate must be positive");
  const auto& objs = estimates.objects();
  std::vector<std::tuple<double, size_t, size_t>> pairs;  // (distance, truth, estimate)
  for (size_t t = 0; t < truth.entries.size(); ++t) {
    const std::string key = normalize_label(truth.entries[t].label);
    for (size_t e = 0; e < objs.size(); ++e) {
      if (normalize_label(objs[e].label) != key) continue;
      const double d = (objs[e].position - truth.entries[t].position).norm();
      if (d <= max_match_m) pairs.emplace_back(d, t, e);
    }
  }
  std::sort(pairs.begin(), pairs.end());

  MatchResult r;
  r.total = truth.entries.size();
  r.per_object.resize(truth.entries.size());
  for (size_t t = 0; t < truth.entries.size(); ++t) {
    r.per_object[t].label = truth.entries[t].label;
    r.per_object[t].truth = truth.entries[t].position;
  }
  std::vector<bool> used_est(objs.size(), false);
  std::vector<double> errors;
  for (const auto& [d, t, e] : pairs) {
    if (r.per_object[t].error_m || used_est[e]) continue;
    r.per_object[t].error_m = d;
    r.per_object[t].estimate_id = objs[e].id;
    used_est[e] = true;
    errors.push_back(d);
  }
  r.matched = errors.size();
  r.stats = error_stats(std::move(errors));
  return r;
}

// --- timing ----------------------------------------------------------------

struct Stage {
  std::string name;
  std::function<void()> run;
};

struct StageTiming {
  std::vector<std::pair<std::string, double>> stages;  // seconds
  double total_s = 0.0;
};

/// Wall-clock timing of a stage sequence on the monotonic clock.
inline StageTiming time_pipeline(const std::vector<Stage>& stages) {
  using Clock = std::chrono::steady_clock;
  StageTiming out;
  const auto t0 = Clock::now();
  for (const auto& s : stages) {
    const auto a = Clock::now();
    if (s.run) s.run();
    const auto b = Clock::now();
    out.stages.emplace_back(s.name, std::chrono::duration<double>(b - a).count());
  }
  out.total_s = stages.empty() ? 0.0 : std::chrono::duration<double>(Clock::now() - t0).count();
  return out;
}

// --- reports ---------------------------------------------------------------

struct EvalReport {
  std::string model_name;
  double detection_ratio_pct = 0.0;
  double mean_error_m = 0.0;
  double median_error_m = 0.0;
  double p90_error_m = 0.0;
  double mean_time_s = 0.0;
  std::vector<ObjectScore> per_object;

  static EvalReport from_match(std::string model, const MatchResult& m, double mean_time_s) {
    return {std::move(model), m.ratio_pct(), m.stats.mean, m.stats.median, m.stats.p90,
            mean_time_s, m.per_object};
  }

  bool same_values(const EvalReport& o) const {
    if (model_name != o.model_name || detection_ratio_pct != o.detection_ratio_pct ||
        mean_error_m != o.mean_error_m || median_error_m != o.median_error_m ||
        p90_error_m != o.p90_error_m || mean_time_s != o.mean_time_s ||
        per_object.size() != o.per_object.size())
      return false;
    for (size_t i = 0; i < per_object.size(); ++i)
      if (per_object[i].label != o.per_object[i].label ||
          per_object[i].error_m != o.per_object[i].error_m)
        return false;
    return true;
  }
};

inline Json report_to_json(const EvalReport& r) {
  Json per = Json::array();
  for (const auto& p : r.per_object) {
    Json j = {{"label", p.label}};
    if (p.error_m)
      j["error_m"] = *p.error_m;
    else
      j["missed"] = true;
    per.push_back(std::move(j));
  }
  return {{"model", r.model_name},
          {"detection_ratio_pct", r.detection_ratio_pct},
          {"mean_error_m", r.mean_error_m},
          {"median_error_m", r.median_error_m},
          {"p90_error_m", r.p90_error_m},
          {"mean_time_s", r.mean_time_s},
          {"per_object", std::move(per)}};
}

inline EvalReport report_from_json(const JsonReader& r) {
  EvalReport e;
  e.model_name = r.at("model").string();
  e.detection_ratio_pct = r.at("detection_ratio_pct").number();
  if (e.detection_ratio_pct < 0.0 || e.detection_ratio_pct > 100.0)
    r.at("detection_ratio_pct").fail("ratio outside [0, 100]");
  e.mean_time_s = r.at("mean_time_s").number();
  if (r.has("mean_error_m")) e.mean_error_m = r.at("mean_error_m").number();
  if (r.has("median_error_m")) e.median_error_m = r.at("median_error_m").number();
  if (r.has("p90_error_m")) e.p90_error_m = r.at("p90_error_m").number();
  if (r.has("per_object")) {
    const auto per = r.at("per_object");
    for (size_t i = 0; i < per.array().size(); ++i) {
      const auto p = per.at(i);
      ObjectScore s;
      s.label = p.at("label").string();
      if (p.has("error_m")) s.error_m = p.at("error_m").number();
      e.per_object.push_back(std::move(s));
    }
  }
  return e;
}

struct ReportTable {
  std::string text;  // aligned, human readable
  std::string csv;   // "Model, Detection Ratio (%), Calculation Time (sec)" rows
  Json document;     // {"columns": [...], "rows": [...]}
};

inline const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols{"Model", "Detection Ratio (%)",
                                             "Calculation Time (sec)"};
  return cols;
}

/// Detector comparison table: model, detection ratio to one decimal,
/// calculation time to two decimals, rows in input order.
inline ReportTable emit_report(const std::vector<EvalReport>& reports) {
  require(!reports.empty(), "report needs at least one row");
  const auto& cols = report_columns();
  std::vector<std::array<std::string, 3>> rows;
  for (const auto& r : reports)
    rows.push_back({r.model_name, format_ratio(r.detection_ratio_pct), format_seconds(r.mean_time_s)});

  std::array<size_t, 3> width{cols[0].size(), cols[1].size(), cols[2].size()};
  for (const auto& row : rows)
    for (size_t c = 0; c < 3; ++c) width[c] = std::max(width[c], row[c].size());

  auto line = [&](const std::array<std::string, 3>& cells) {
    std::string s;
    for (size_t c = 0; c < 3; ++c) {
      s += cells[c];
      if (c + 1 < 3) s += std::string(width[c] - cells[c].size() + 2, ' ');
    }
    return s + "\n";
  };

  ReportTable t;
  t.text = line({cols[0], cols[1], cols[2]});
  t.text += std::string(width[0] + width[1] + width[2] + 4, '-') + "\n";
  t.csv = cols[0] + ", " + cols[1] + ", " + cols[2] + "\n";
  Json jrows = Json::array();
  for (size_t i = 0; i < rows.size(); ++i) {
    t.text += line(rows[i]);
    t.csv += rows[i][0] + ", " + rows[i][1] + ", " + rows[i][2] + "\n";
    jrows.push_back(report_to_json(reports[i]));
  }
  t.document = {{"columns", cols}, {"rows", std::move(jrows)}};
  return t;
}

inline std::vector<EvalReport> reports_from_json(const Json& doc) {
  JsonReader root(doc);
  JsonReader rows = doc.is_array() ? root : root.at("rows");
  std::vector<EvalReport> out;
  for (size_t i = 0; i < rows.array().size(); ++i) out.push_back(report_from_json(rows.at(i)));
  return out;
}

}  // namespace agmap
