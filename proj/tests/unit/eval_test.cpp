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

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <thread>

#include "agmap/eval.hpp"
#include "support/oracles.hpp"

namespace agmap {
namespace {

using testing::Rng;
using namespace std::chrono_literals;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SemanticMap estimates(std::vector<std::pair<std::string, Vec3>> objs) {
  SemanticMap m(MapFrame::kWorld);
  for (auto& [label, p] : objs) {
    SemanticObject o;
    o.label = label;
    o.position = p;
    m.insert(o);
  }
  return m;
}

TEST(Ratio, Examples) {
  EXPECT_EQ(format_ratio(detection_ratio(38, 39)), "97.4");
  EXPECT_EQ(format_ratio(detection_ratio(0, 7)), "0.0");
  EXPECT_EQ(format_ratio(detection_ratio(7, 7)), "100.0");
  EXPECT_THROW(detection_ratio(0, 0), Error);
  EXPECT_THROW(detection_ratio(5, 4), Error);
}

TEST(Ratio, MonotoneInMatched) {
  for (size_t total = 1; total < 60; ++total)
    for (size_t m = 1; m <= total; ++m) EXPECT_GE(detection_ratio(m, total), detection_ratio(m - 1, total));
}

TEST(Match, ExactEstimate) {
  const auto r = match_and_score(estimates({{"box", {1, 2, 0}}}), {{{"box", {1, 2, 0}}}, {}});
  EXPECT_EQ(r.matched, 1u);
  EXPECT_EQ(r.stats.mean, 0.0);
  EXPECT_EQ(r.ratio_pct(), 100.0);
}

TEST(Match, SinglePairMean) {
  const auto r = match_and_score(estimates({{"robotic dog", {7.536, 0, 0.2}}}), {{{"robotic dog", {7.4, 0, 0.2}}}, {}});
  EXPECT_NEAR(r.stats.mean, 0.136, 1e-12);
  EXPECT_NEAR(r.stats.median, 0.136, 1e-12);
}

TEST(Match, OneEstimateBetweenTwoTruths) {
  const GroundTruthSet truth{{{"box", {0, 0, 0}}, {"box", {1, 0, 0}}}, {}};
  const auto r = match_and_score(estimates({{"box", {0.6, 0, 0}}}), truth);
  EXPECT_EQ(r.matched, 1u);
  EXPECT_FALSE(r.per_object[0].error_m.has_value());
  ASSERT_TRUE(r.per_object[1].error_m.has_value());
  EXPECT_NEAR(*r.per_object[1].error_m, 0.4, 1e-12);
  EXPECT_EQ(format_ratio(r.ratio_pct()), "50.0");
}

TEST(Match, LabelsAndGate) {
  const GroundTruthSet truth{{{"Box", {0, 0, 0}}, {"chair", {3, 0, 0}}}, {}};
  const auto r = match_and_score(estimates({{"box ", {0.2, 0, 0}}, {"chair", {4.5, 0, 0}}, {"desk", {3, 0, 0}}}), truth);
  EXPECT_EQ(r.matched, 1u);
  EXPECT_TRUE(r.per_object[0].error_m);
  EXPECT_FALSE(r.per_object[1].error_m);
  EXPECT_THROW(match_and_score(SemanticMap(MapFrame::kRobotLocal), truth), Error);
}

// Greedy oracle: repeatedly take the globally closest unmatched pair.
double greedy_oracle_sum(const SemanticMap& est, const GroundTruthSet& truth, size_t* matched) {
  std::vector<bool> te(truth.entries.size()), ee(est.size());
  double sum = 0;
  *matched = 0;
  for (;;) {
    double best = 1e300;
    size_t bt = 0, be = 0;
    for (size_t t = 0; t < te.size(); ++t)
      for (size_t e = 0; e < ee.size(); ++e) {
        if (te[t] || ee[e] || est.objects()[e].label != truth.entries[t].label) continue;
        const double d = (est.objects()[e].position - truth.entries[t].position).norm();
        if (d <= 1.0 && d < best) best = d, bt = t, be = e;
      }
    if (best > 1e299) return sum;
    te[bt] = ee[be] = true;
    sum += best;
    ++*matched;
  }
}

TEST(Match, AgreesWithGreedyOracleAndIsRigidInvariant) {
  Rng rng(13);
  const char* labels[] = {"box", "chair"};
  for (int trial = 0; trial < 300; ++trial) {
    GroundTruthSet truth;
    SemanticMap est(MapFrame::kWorld);
    const int n = rng.integer(1, 8);
    for (int i = 0; i < n; ++i) {
      const std::string label = labels[rng.integer(0, 1)];
      const Vec3 p(rng.uniform(0, 4), rng.uniform(0, 4), rng.uniform(0, 1));
      truth.entries.push_back({label, p});
      if (rng.coin(0.8)) {
        SemanticObject o;
        o.label = label;
        o.position = p + Vec3(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6), rng.uniform(-0.2, 0.2));
        est.insert(o);
      }
    }
    const auto r = match_and_score(est, truth);
    size_t m = 0;
    const double sum = greedy_oracle_sum(est, truth, &m);
    EXPECT_EQ(r.matched, m);
    EXPECT_NEAR(r.stats.mean * static_cast<double>(r.matched), sum, 1e-9);

    const Pose rigid(rng.uniform(-9, 9), rng.uniform(-9, 9), rng.uniform(-1, 1), rng.uniform(-4, 4));
    GroundTruthSet moved_truth = truth;
    for (auto& e : moved_truth.entries) e.position = robot_to_world(e.position, rigid);
    SemanticMap moved_est(MapFrame::kWorld);
    for (auto o : est.objects()) {
      o.position = robot_to_world(o.position, rigid);
      moved_est.insert_with_id(o);
    }
    const auto r2 = match_and_score(moved_est, moved_truth);
    ASSERT_EQ(r2.matched, r.matched);
    for (size_t i = 0; i < r.per_object.size(); ++i) {
      ASSERT_EQ(r.per_object[i].error_m.has_value(), r2.per_object[i].error_m.has_value());
      if (r.per_object[i].error_m) {
        EXPECT_NEAR(*r.per_object[i].error_m, *r2.per_object[i].error_m, 1e-9);
      }
    }
  }
}

TEST(Stats, MedianAndP90) {
  const auto s = error_stats({0.5, 0.1, 0.3, 0.2, 0.4, 0.6, 0.7, 0.8, 0.9, 1.0});
  EXPECT_NEAR(s.mean, 0.55, 1e-12);
  EXPECT_NEAR(s.median, 0.55, 1e-12);
  EXPECT_NEAR(s.p90, 0.91, 1e-12);
  EXPECT_EQ(error_stats({}).mean, 0.0);
}

TEST(Timing, SleepingStages) {
  const auto t = time_pipeline({{"detect", [] { std::this_thread::sleep_for(10ms); }},
                                {"depth", [] { std::this_thread::sleep_for(20ms); }},
                                {"fuse", [] { std::this_thread::sleep_for(30ms); }}});
  ASSERT_EQ(t.stages.size(), 3u);
  const double want[] = {0.010, 0.020, 0.030};
  double sum = 0;
  for (size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(t.stages[i].second, want[i], 0.005) << t.stages[i].first;
    sum += t.stages[i].second;
  }
  EXPECT_GE(t.total_s, 0.060);
  EXPECT_GE(t.total_s, sum - 0.001);
}

TEST(Timing, EmptyAndSingle) {
  EXPECT_EQ(time_pipeline({}).total_s, 0.0);
  const auto t = time_pipeline({{"only", [] { std::this_thread::sleep_for(5ms); }}});
  EXPECT_NEAR(t.total_s, t.stages[0].second, 0.001);
}

TEST(Report, ReproducesTableRows) {
  const auto reports = reports_from_json(Json::parse(slurp(testing::fixture("table1_reports.json"))));
  const auto table = emit_report(reports);
  EXPECT_EQ(table.csv, slurp(testing::test_fixture("table1_expected.csv")));
  EXPECT_NE(table.text.find("Grounding Dino 1.5 pro  97.4"), std::string::npos) << table.text;
  EXPECT_EQ(table.document["rows"].size(), 5u);
}

TEST(Report, OneRowAndFormatting) {
  EvalReport r;
  r.model_name = "m";
  r.detection_ratio_pct = 100.0 * 2 / 3;
  r.mean_time_s = 1.005;
  const auto t = emit_report({r});
  EXPECT_EQ(std::count(t.text.begin(), t.text.end(), '\n'), 3);  // header, rule, row
  EXPECT_NE(t.csv.find("m, 66.7, 1.00"), std::string::npos) << t.csv;
  EXPECT_THROW(emit_report({}), Error);
}

TEST(Report, RoundTrip) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    EvalReport r;
    r.model_name = "model " + std::to_string(trial);
    r.detection_ratio_pct = rng.uniform(0, 100);
    r.mean_error_m = rng.uniform(0, 1);
    r.median_error_m = rng.uniform(0, 1);
    r.p90_error_m = rng.uniform(0, 2);
    r.mean_time_s = rng.uniform(0, 20);
    for (int i = rng.integer(0, 4); i > 0; --i)
      r.per_object.push_back({"box", rng.coin() ? std::optional<double>(rng.uniform(0, 1)) : std::nullopt, {}, {}});
    const auto doc = emit_report({r}).document;
    const auto back = reports_from_json(Json::parse(doc.dump()));
    ASSERT_EQ(back.size(), 1u);
    EXPECT_TRUE(back[0].same_values(r));
  }
  EXPECT_THROW(reports_from_json(Json::parse(R"([{"model": "x", "detection_ratio_pct": 120, "mean_time_s": 1}])")),
               Error);
}

TEST(GroundTruth, Formats) {
  const auto a = GroundTruthSet::from_json(Json::parse(R"([{"label": "box", "x": 1, "y": 2, "z": 3}])"));
  const auto b = GroundTruthSet::from_json(Json::parse(R"({"objects": [{"label": "box", "x": 1, "y": 2, "z": 3}]})"));
  ASSERT_EQ(a.entries.size(), 1u);
  EXPECT_EQ(a.entries[0].position, b.entries[0].position);
  EXPECT_EQ(GroundTruthSet::from_json(a.to_json()).entries[0].label, "box");
  EXPECT_THROW(GroundTruthSet::from_json(Json::parse(R"([{"label": "box", "x": 1}])")), Error);
}

}  // namespace
}  // namespace agmap
