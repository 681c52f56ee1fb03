// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <future>
#include <thread>

#include "gruwatch/error.hpp"
#include "gruwatch/orchestrator/detector.hpp"
#include "gruwatch/orchestrator/unseen.hpp"
#include "gruwatch/orchestrator/window_store.hpp"
#include "gruwatch/store/blob_store.hpp"
#include "gruwatch/store/document_store.hpp"
#include "support/fixtures.hpp"

namespace {

using namespace gruwatch;
using namespace gruwatch::orchestrator;
using testsupport::kStartMs;
using testsupport::record;

constexpr std::int64_t kMin = 60'000;

std::int64_t window_start(std::size_t i) { return kStartMs + static_cast<std::int64_t>(i) * kMin; }

void feed(Detector& d, const evalbench::SyntheticStream& s, std::size_t from, std::size_t to) {
  for (const auto& r : s.records) {
    const auto idx = static_cast<std::size_t>((r.timestamp - kStartMs) / kMin);
    if (idx >= from && idx < to) d.ingest(r, "push");
  }
}

// Detector trained on the first `windows` of a baseline stream.
struct Trained {
  EventLog events;
  Config config;
  evalbench::SyntheticStream stream;
  Detector detector;
  std::size_t fed = 0;

  explicit Trained(Config c = testsupport::small_config(), std::size_t total = 400, std::size_t initial = 60)
      : config(c), stream(testsupport::baseline_stream(total)), detector(c, events) {
    feed(detector, stream, 0, initial);
    detector.tick(window_start(initial));
    fed = initial;
  }

  std::vector<likelihood::AnomalyAssessment> advance(std::size_t n) {
    std::vector<likelihood::AnomalyAssessment> out;
    for (std::size_t i = 0; i < n; ++i) {
      feed(detector, stream, fed, fed + 1);
      ++fed;
      auto got = detector.tick(window_start(fed));
      out.insert(out.end(), got.begin(), got.end());
    }
    return out;
  }
};

TEST(WindowStore, CloseAndRange) {
  WindowStore ws(kMin, false);
  ws.add(record("a", kStartMs + 5, 10), "s");
  ws.add(record("a", kStartMs + 2 * kMin + 5, 30), "s");
  EXPECT_EQ(ws.earliest(), kStartMs);
  ws.close(kStartMs);
  ws.close(kStartMs + kMin);
  ws.close(kStartMs + 2 * kMin);
  EXPECT_TRUE(ws.is_empty(kStartMs + kMin));
  EXPECT_FALSE(ws.is_empty(kStartMs));
  const auto r = ws.range(kStartMs, kStartMs + 2 * kMin);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[1].start, kStartMs + kMin);
  EXPECT_TRUE(r[1].empty());
  ws.add(record("a", kStartMs + 7, 20), "s");
  ws.close(kStartMs);
  EXPECT_EQ(ws.window(kStartMs).values.at({{"", "a", "GET", 200}, features::Statistic::Count}), 2);
  ws.prune(kStartMs + kMin, kStartMs + kMin);
  EXPECT_FALSE(ws.has_raw(kStartMs));
  EXPECT_FALSE(ws.is_closed(kStartMs));
}

TEST(Unseen, PriorityAndDedup) {
  UnseenAccumulator acc;
  const features::FeatureKey ok{{"", "new", "GET", 200}, features::Statistic::Mean};
  const features::FeatureKey bad{{"", "new", "GET", 500}, features::Statistic::Mean};
  acc.observe({ok, bad}, 1);
  acc.observe({ok}, 2);
  auto warnings = acc.emit_unseen_warnings();
  ASSERT_EQ(warnings.size(), 2u);
  EXPECT_EQ(warnings[0].priority, WarningPriority::High);
  EXPECT_EQ(warnings[0].group.statusCode, 500);
  EXPECT_EQ(warnings[1].priority, WarningPriority::Normal);
  EXPECT_EQ(warnings[1].count, 2u);
  acc.observe({ok}, 3);
  EXPECT_TRUE(acc.emit_unseen_warnings().empty());

  features::FeatureRegistry reg(1, {features::FeatureKey{ok.group, features::Statistic::Count}}, {{0, 1}});
  acc.absorb(reg);
  EXPECT_FALSE(acc.contains(ok.group));
  EXPECT_TRUE(acc.contains(bad.group));
  // a new retrain cycle re-arms keys that were not absorbed
  ASSERT_EQ(acc.emit_unseen_warnings().size(), 1u);
  EXPECT_EQ(priority_for(503), WarningPriority::High);
  EXPECT_EQ(priority_for(404), WarningPriority::Normal);
}

TEST(Detector, NoModelUntilEnoughWindows) {
  EventLog events;
  Detector d(testsupport::small_config(), events);
  const auto s = testsupport::baseline_stream(100);
  feed(d, s, 0, 10);
  try {
    d.tick(window_start(10));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoModel);
  }
  EXPECT_FALSE(d.has_model());
}

TEST(Detector, BootstrapThenScoresEveryWindow) {
  Trained t;
  EXPECT_TRUE(t.detector.has_model());
  EXPECT_EQ(t.detector.model().modelVersion, 1);
  EXPECT_EQ(t.detector.model().registryVersion, t.detector.registry().version());
  const std::size_t scored_at_bootstrap = t.detector.counters().assessments;
  EXPECT_GT(scored_at_bootstrap, 0u);  // windows after the training prefix
  const auto out = t.advance(20);
  EXPECT_EQ(out.size(), 20u);
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_EQ(out[i].windowStart, window_start(60 + i));
    EXPECT_EQ(out[i].revision, 0);
    EXPECT_EQ(out[i].policy, features::PredictionPolicy::Predict);
    EXPECT_TRUE(std::isfinite(out[i].mse));
  }
  EXPECT_EQ(t.detector.counters().onlineSteps, t.detector.counters().assessments);
}

TEST(Detector, ScoresBeforeOnlineUpdate) {
  Trained t;
  const auto before = t.detector.model();
  const auto out = t.advance(1);
  ASSERT_EQ(out.size(), 1u);
  const auto sample_start = out[0].windowStart - 3 * kMin;
  model::Matrix sample(4, t.detector.registry().column_count());
  for (std::size_t i = 0; i < 4; ++i) {
    const auto v = features::build_vector(t.detector.windows().window(sample_start + static_cast<std::int64_t>(i) * kMin),
                                          t.detector.registry(), 0).values;
    std::copy(v.begin(), v.end(), sample.row(i).begin());
  }
  EXPECT_EQ(model::reconstruction_error(sample, before.forward(sample)).mse, out[0].mse);
  EXPECT_NE(t.detector.model(), before);
}

TEST(Detector, MissingDataRules) {
  Trained t;
  t.advance(2);
  std::vector<likelihood::AnomalyAssessment> out;
  t.events.clear();
  for (int i = 0; i < 4; ++i) {
    ++t.fed;  // nothing ingested
    auto got = t.detector.tick(window_start(t.fed));
    out.insert(out.end(), got.begin(), got.end());
  }
  ASSERT_EQ(out.size(), 3u);
  for (const auto& a : out) EXPECT_EQ(a.policy, features::PredictionPolicy::PredictWithWarning);
  const auto warnings = t.events.of_type("missing_data");
  ASSERT_EQ(warnings.size(), 4u);
  EXPECT_EQ(warnings[3]["policy"], "SkipWithWarning");
  EXPECT_EQ(t.detector.counters().skippedWindows, 1u);
  // data returns: prediction resumes
  EXPECT_EQ(t.advance(1).size(), 1u);
}

TEST(Detector, LateRecordSupersedes) {
  Trained t;
  std::vector<likelihood::AnomalyAssessment> sunk;
  t.detector.set_sink([&](const likelihood::AnomalyAssessment& a) { sunk.push_back(a); });
  t.advance(10);
  const std::int64_t target = window_start(t.fed - 3);
  const auto first = t.detector.latest_assessment(target);
  ASSERT_TRUE(first);
  sunk.clear();
  t.detector.ingest(record("catalog", target + 1000, 150.0), "push");
  ASSERT_EQ(sunk.size(), 1u);
  EXPECT_EQ(sunk[0].windowStart, target);
  EXPECT_EQ(sunk[0].revision, 1);
  EXPECT_EQ(t.detector.latest_assessment(target)->revision, 1);
  EXPECT_EQ(t.detector.assessments().at(target).size(), 2u);
  EXPECT_EQ(t.detector.counters().staleRescored, 1u);
}

TEST(Detector, LateRecordBeyondRetention) {
  Trained t(testsupport::small_config(), 400, 60);
  t.advance(200);  // 200 minutes of scoring, retention is two hours
  const std::int64_t old = window_start(t.fed - 150);
  try {
    t.detector.handle_stale(record("catalog", old + 10, 100.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WindowTooOld);
  }
  t.detector.ingest(record("catalog", old + 10, 100.0));  // swallowed
  EXPECT_EQ(t.detector.counters().windowsTooOld, 2u);
}

TEST(Detector, LateRecordsFlipWindowToAnomalous) {
  Trained t;
  std::vector<likelihood::AnomalyAssessment> sunk;
  t.detector.set_sink([&](const likelihood::AnomalyAssessment& a) { sunk.push_back(a); });
  t.advance(60);
  const std::int64_t target = window_start(t.fed - 1);
  ASSERT_FALSE(t.detector.latest_assessment(target)->flagged);
  sunk.clear();
  for (int i = 0; i < 40; ++i) {
    t.detector.ingest(record(i % 2 ? "catalog" : "billing", target + 100 + i, 120.0 * 10 * (1 + i % 5),
                             i % 3 ? 200 : 500),
                      "push");
  }
  ASSERT_FALSE(sunk.empty());
  EXPECT_TRUE(sunk.back().flagged);
  EXPECT_EQ(sunk.back().windowStart, target);
  EXPECT_EQ(sunk.back().revision, static_cast<std::int64_t>(sunk.size()));
  // revisions are numbered in order
  const auto& chain = t.detector.assessments().at(target);
  for (std::size_t i = 0; i < chain.size(); ++i) EXPECT_EQ(chain[i].revision, static_cast<std::int64_t>(i));
}

TEST(Detector, SyncRetrainBumpsVersionAndAbsorbsUnseen) {
  Trained t;
  t.advance(5);
  // a new component appears
  for (int i = 0; i < 3; ++i) {
    t.detector.ingest(record("search", window_start(t.fed) + 100 + i, 80.0, 500), "push");
    t.advance(1);
  }
  EXPECT_EQ(t.events.count("unseen_feature"), 1u);
  EXPECT_EQ(t.events.of_type("unseen_feature")[0]["level"], "error");
  EXPECT_TRUE(t.detector.unseen().contains({"", "search", "GET", 500}));

  ASSERT_TRUE(t.detector.request_retrain(window_start(t.fed)));
  EXPECT_EQ(t.detector.model().modelVersion, 2);
  EXPECT_EQ(t.detector.registry().version(), 2);
  EXPECT_EQ(t.detector.model().registryVersion, 2);
  EXPECT_FALSE(t.detector.unseen().contains({"", "search", "GET", 500}));
  EXPECT_TRUE(t.detector.registry().contains({{"", "search", "GET", 500}, features::Statistic::Mean}));

  t.events.clear();
  t.detector.ingest(record("search", window_start(t.fed) + 100, 80.0, 500), "push");
  const auto out = t.advance(1);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].modelVersion, 2);
  EXPECT_EQ(out[0].perFeature.size(), t.detector.registry().column_count());
  EXPECT_EQ(t.events.count("unseen_feature"), 0u);
}

TEST(Detector, AsyncRetrainDoesNotBlockTicks) {
  Config c = testsupport::small_config();
  c.retrainAsync = true;
  Trained t(c);
  std::promise<void> release;
  auto gate = release.get_future().share();
  std::atomic<bool> entered{false};
  t.detector.set_retrain_gate([&] {
    entered = true;
    gate.wait();
  });
  ASSERT_TRUE(t.detector.request_retrain(window_start(t.fed)));
  while (!entered) std::this_thread::sleep_for(std::chrono::milliseconds(1));
  EXPECT_FALSE(t.detector.request_retrain(window_start(t.fed)));  // one job at a time

  const auto during = t.advance(5);
  ASSERT_EQ(during.size(), 5u);
  for (const auto& a : during) EXPECT_EQ(a.modelVersion, 1);
  EXPECT_TRUE(t.detector.retrain_running());

  release.set_value();
  ASSERT_TRUE(t.detector.wait_for_retrain(std::chrono::seconds(60)));
  EXPECT_EQ(t.detector.model().modelVersion, 1);  // swap happens between ticks
  const auto after = t.advance(1);
  ASSERT_EQ(after.size(), 1u);
  EXPECT_EQ(after[0].modelVersion, 2);
  EXPECT_EQ(after[0].registryVersion, t.detector.registry().version());
  EXPECT_EQ(t.events.count("retrain_completed"), 1u);
}

TEST(Detector, FailedRetrainKeepsServing) {
  Trained t;
  t.detector.set_retrain_gate([] { throw std::runtime_error("trainer crashed"); });
  t.detector.request_retrain(window_start(t.fed));
  EXPECT_EQ(t.detector.model().modelVersion, 1);
  EXPECT_EQ(t.events.count("retrain_failed"), 1u);
  EXPECT_EQ(t.detector.counters().retrainFailures, 1u);
  const auto out = t.advance(2);
  EXPECT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].modelVersion, 1);
}

TEST(Detector, PeriodicRetrainWhenDue) {
  Config c = testsupport::small_config();
  c.retrainIntervalHours = 0.5;
  Trained t(c);
  t.advance(29);
  EXPECT_EQ(t.detector.model().modelVersion, 1);
  t.advance(2);
  EXPECT_EQ(t.detector.model().modelVersion, 2);
  EXPECT_EQ(t.detector.counters().retrains, 1u);
}

TEST(Detector, AssessmentsAlwaysMatchPublishedRegistry) {
  Config c = testsupport::small_config();
  c.retrainIntervalHours = 0.25;
  Trained t(c);
  for (const auto& a : t.advance(60)) {
    EXPECT_EQ(a.perFeature.size(), t.detector.registry().column_count());
    EXPECT_EQ(a.registryVersion, a.modelVersion);  // both bumped together on every publish
  }
  EXPECT_GE(t.detector.model().modelVersion, 4);
}

TEST(Detector, SaveLoadContinuesIdentically) {
  Trained a;
  a.advance(20);
  store::MemoryDocumentStore docs;
  store::MemoryBlobStore blobs;
  a.detector.save(docs, blobs);

  EventLog events;
  Detector b(a.config, events);
  ASSERT_TRUE(b.load(docs, blobs));
  EXPECT_EQ(b.model(), a.detector.model());
  EXPECT_EQ(b.registry(), a.detector.registry());
  EXPECT_EQ(b.likelihood_state(), a.detector.likelihood_state());
  EXPECT_EQ(b.last_scored(), a.detector.last_scored());
  ASSERT_TRUE(docs.get("assessments", a.detector.latest_assessment(window_start(a.fed - 1))->key()));

  feed(b, a.stream, a.fed, a.fed + 1);
  const auto next_b = b.tick(window_start(a.fed + 1));
  const auto next_a = a.advance(1);
  ASSERT_EQ(next_a.size(), 1u);
  ASSERT_EQ(next_b.size(), 1u);
  EXPECT_EQ(next_a[0], next_b[0]);

  EventLog e2;
  Detector empty(a.config, e2);
  store::MemoryDocumentStore none;
  EXPECT_FALSE(empty.load(none, blobs));
}

}  // namespace
