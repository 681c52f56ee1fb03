// SPDX-License-Identifier: Apache-2.0
// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit when any
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "gruwatch/error.hpp"
#include "gruwatch/evalbench/confusion.hpp"
#include "gruwatch/evalbench/evaluate.hpp"
#include "gruwatch/evalbench/synthetic.hpp"
#include "gruwatch/features/statistics.hpp"
#include "gruwatch/features/vector_builder.hpp"
#include "gruwatch/features/window.hpp"
#include "gruwatch/likelihood/likelihood.hpp"
#include "gruwatch/model/gru_autoencoder.hpp"
#include "gruwatch/model/trainer.hpp"
#include "gruwatch/orchestrator/detector.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace {

using namespace gruwatch;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

int failures = 0;

void run(const std::string& name, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << "exception: " << e.what();
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %s (%.1fs) %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs, o.detail.str().c_str());
  std::fflush(stdout);
}

bool close_rel(long double expected, double actual, double rel) {
  if (expected == actual) return true;
  const long double denom = std::max(std::fabs(expected), std::fabs(static_cast<long double>(actual)));
  return std::fabs(expected - actual) <= rel * denom;
}

// VM month, sixth row cut to its 110-point range length.
const std::vector<evalbench::LabeledRange> kReported = {
    {41192, 41228},   {58234, 58254},   {108741, 108747}, {109163, 109205}, {168968, 169059},
    {169527, 169636}, {219688, 219745}, {237183, 237187}, {239159, 239178}, {262272, 262297}};

void metrics_criterion(Outcome& o) {
  const evalbench::ConfusionMatrix cm{309, 110, 0, 264781};
  const auto m = evalbench::metrics(cm);
  o.detail << "P=" << m.precision << " R=" << m.recall << " F1=" << m.f1 << " acc=" << m.accuracy << ' ';
  o.require(std::fabs(m.precision - 0.7374) <= 1e-4, "precision");
  o.require(std::fabs(m.recall - 1.0) <= 1e-4, "recall");
  o.require(std::fabs(m.f1 - 0.8489) <= 1e-4, "f1");
  o.require(std::fabs(m.accuracy - 0.9995) <= 1e-4, "accuracy");

  const auto predicted = evalbench::ranges_to_points(kReported);
  auto confirmed = kReported;
  confirmed.erase(confirmed.begin() + 5);
  o.require(evalbench::confusion(predicted, confirmed, 265'200) == cm, "confusion from ranges");
}

void range_criterion(Outcome& o) {
  struct Row {
    std::int64_t start, end, range;
  };
  const std::vector<Row> rows = {{41192, 41228, 37},   {58234, 58254, 21},   {108741, 108747, 7},
                                 {109163, 109205, 43}, {168968, 169059, 92}, {219688, 219745, 58},
                                 {237183, 237187, 5},  {239159, 239178, 20}, {262272, 262297, 26}};
  std::int64_t total = 0;
  for (const auto& r : rows) {
    const evalbench::LabeledRange range{r.start, r.end};
    const auto n = static_cast<std::int64_t>(evalbench::ranges_to_points(std::span(&range, 1)).size());
    o.require(n == r.range, std::to_string(r.start) + "-" + std::to_string(r.end));
    total += n;
  }
  // The sixth row as printed spans 143 points while its range column says 110;
  // the range column is the one that sums to the confusion matrix.
  const evalbench::LabeledRange printed{169527, 169669};
  const auto span = evalbench::ranges_to_points(std::span(&printed, 1)).size();
  o.require(span == 143, "sixth row printed span is 143");
  o.require(total + 110 == 419, "range column totals 419");
  o.detail << "9 rows match, sixth row spans " << span << " vs range 110 (documented) ";
}

void statistics_criterion(Outcome& o) {
  std::mt19937_64 rng(20201001);
  std::uniform_int_distribution<int> len(1, 1000);
  std::lognormal_distribution<double> rt(5.0, 0.8);
  std::size_t bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> xs(len(rng));
    for (auto& x : xs) x = rt(rng);
    if (trial % 40 == 0) std::fill(xs.begin(), xs.end(), 17.5);
    const auto got = features::summarize(xs);
    const auto want = testsupport::brute_force_summary(xs);
    const bool ok = close_rel(want.min, got.min, 1e-9) && close_rel(want.max, got.max, 1e-9) &&
                    close_rel(want.count, got.count, 1e-9) && close_rel(want.median, got.median, 1e-9) &&
                    close_rel(want.mean, got.mean, 1e-9) && close_rel(want.std, got.std, 1e-9) &&
                    close_rel(want.skewness, got.skewness, 1e-9);
    if (!ok) ++bad;
  }
  o.require(bad == 0, std::to_string(bad) + " lists off");
  // zero-fill: one point has no spread, two points no skew
  const auto one = features::summarize(std::vector<double>{3.0});
  o.require(one.std == 0.0 && one.skewness == 0.0, "single point zero-fill");
  const auto two = features::summarize(std::vector<double>{1.0, 5.0});
  o.require(two.skewness == 0.0 && two.std > 0.0, "two points zero skew");
  o.detail << "1000 lists within 1e-9 ";
}

void gradient_criterion(Outcome& o) {
  model::TrainingConfig c;
  c.lookback = 4;
  c.encoderHidden = 5;
  c.decoderHidden = 5;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto m = model::init_model(c, 3, seed);
    std::mt19937_64 rng(seed * 977);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    model::Matrix s(4, 3);
    for (double& v : s.data) v = u(rng);
    std::vector<double> grad(m.parameter_count(), 0.0);
    m.loss_and_gradient(s, grad);
    const auto numeric = testsupport::finite_difference_gradient(m, s, 1e-5);
    for (std::size_t i = 0; i < grad.size(); ++i) worst = std::max(worst, testsupport::relative_error(grad[i], numeric[i]));
  }
  o.detail << "worst relative error " << worst << ' ';
  o.require(worst < 1e-4, "gradient");
}

void likelihood_criterion(Outcome& o) {
  likelihood::LikelihoodConfig cfg;  // defaults
  likelihood::ErrorDistributionState state(cfg);
  std::mt19937_64 rng(99);
  std::gamma_distribution<double> g(2.0, 0.01);
  std::vector<double> history;
  double worst = 0.0;
  for (int i = 0; i < 10'000; ++i) {
    double e = g(rng);
    if (i % 1500 < 8) e *= 10;
    history.push_back(e);
    const double got = state.update_and_score(e);
    const double want = testsupport::brute_force_likelihood(history, cfg.window, cfg.shortWindow);
    worst = std::max(worst, std::fabs(got - want));
  }
  o.detail << "W=" << cfg.window << " W'=" << cfg.shortWindow << " worst |diff| " << worst << ' ';
  o.require(worst <= 1e-9, "oracle");

  likelihood::ErrorDistributionState flat(cfg);
  bool all_half = true;
  for (int i = 0; i < 10'000; ++i) all_half = all_half && flat.update_and_score(0.0123) == 0.5;
  o.require(all_half, "constant stream gives 0.5");
}

evalbench::SyntheticSpec e2e_spec() {
  evalbench::SyntheticSpec s;
  s.windows = 3400;
  s.seed = 11;
  return s;
}

std::vector<evalbench::Injection> e2e_injections() {
  std::vector<evalbench::Injection> out;
  for (std::size_t k = 0; k < 10; ++k) {
    const std::size_t start = 900 + 250 * k;
    if (k % 2 == 0) {
      out.push_back({start, 1, evalbench::InjectionKind::Spike, 10.0});
    } else {
      out.push_back({start, 2, evalbench::InjectionKind::Dropout, 1.0});
    }
  }
  return out;
}

Config e2e_config() {
  Config c;
  c.training.lookback = 4;
  c.likelihood.window = 200;
  c.likelihood.shortWindow = 10;
  c.evalWarmupWindows = 200;
  c.retrainIntervalHours = 0;  // periodic retrains are covered by their own criterion
  return c;
}

std::set<std::size_t> flagged_windows(const evalbench::EvalResult& r) {
  std::set<std::size_t> out;
  for (const auto& s : r.scores) {
    if (s.flagged) out.insert(s.index);
  }
  return out;
}

void e2e_criterion(Outcome& o) {
  const auto t0 = Clock::now();
  const auto injected = evalbench::generate_stream(e2e_spec(), e2e_injections());
  const auto clean = evalbench::generate_stream(e2e_spec(), {});
  const Config c = e2e_config();
  const auto ri = evalbench::evaluate_run(injected.records, injected.truth, c, injected.startMs, injected.windows);
  const auto rc = evalbench::evaluate_run(clean.records, clean.truth, c, clean.startMs, clean.windows);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();

  o.detail << "windows=" << ri.totalWindows << " training=" << ri.trainingWindows << " warmup=" << ri.warmupWindows
           << " rangeRecall=" << ri.rangeRecall << " latencies=";
  for (const auto& d : ri.detections) o.detail << (d.latencyTicks ? std::to_string(*d.latencyTicks) : "-") << ',';
  o.detail << " cleanFP=" << rc.falsePositiveWindows << '/' << rc.negativeWindows << '=' << rc.falsePositiveRate
           << " injectedStreamFP=" << ri.falsePositiveRate << " secs=" << secs << ' ';

  o.require(ri.totalWindows >= 2000, "at least 2000 windows");
  o.require(ri.trainingWindows == model::initial_training_rows(ri.totalWindows, c.training.lookback),
            "initial training size");
  o.require(ri.rangeRecall >= 0.9, "range recall");
  for (const auto& d : ri.detections) {
    if (d.detected) o.require(*d.latencyTicks <= evalbench::kDetectionTickBudget, "latency");
  }
  o.require(rc.falsePositiveRate <= 0.01, "false-positive rate on clean stream");
  o.require(secs < 600.0, "runtime");
}

void missing_data_criterion(Outcome& o) {
  // undefined statistics become zero
  const std::vector<ingest::LogRecord> one = {testsupport::record("catalog", testsupport::kStartMs + 10, 80.0)};
  const auto w = features::aggregate_window(one, testsupport::kStartMs, testsupport::kStartMs + 60'000);
  const features::GroupKey g{"", "catalog", "GET", 200};
  o.require(w.values.at({g, features::Statistic::Std}) == 0.0, "std of one point");
  o.require(w.values.at({g, features::Statistic::Skewness}) == 0.0, "skewness of one point");

  // a trained detector fed data, then four windows with nothing
  orchestrator::EventLog events;
  Config c = testsupport::small_config();
  const auto stream = testsupport::baseline_stream(120);
  orchestrator::Detector d(c, events);
  auto start_of = [](std::size_t i) { return testsupport::kStartMs + static_cast<std::int64_t>(i) * 60'000; };
  std::size_t fed = 0;
  auto feed_to = [&](std::size_t to) {
    for (const auto& r : stream.records) {
      const auto idx = static_cast<std::size_t>((r.timestamp - testsupport::kStartMs) / 60'000);
      if (idx >= fed && idx < to) d.ingest(r, "push");
    }
    fed = to;
  };
  feed_to(60);
  d.tick(start_of(60));

  // absent feature: a window where billing is silent still scores, with zeros for its columns
  for (const auto& r : stream.records) {
    const auto idx = static_cast<std::size_t>((r.timestamp - testsupport::kStartMs) / 60'000);
    if (idx == 60 && r.appName != "billing") d.ingest(r, "push");
  }
  fed = 61;
  const auto partial = d.tick(start_of(61));
  o.require(partial.size() == 1 && partial[0].policy == features::PredictionPolicy::Predict, "partial window scored");
  // absent columns are zero before normalization
  const auto& reg = d.registry();
  const auto vec = features::build_vector(d.windows().window(start_of(60)), reg, 0);
  const auto raw = features::raw_row(d.windows().window(start_of(60)), reg);
  std::size_t absent = 0;
  for (std::size_t i = 0; i < reg.key_count(); ++i) {
    if (reg.keys()[i].group.appName != "billing") continue;
    ++absent;
    o.require(raw[i] == 0.0, "absent column raw zero");
    o.require(vec.values[i] == features::normalize(0.0, reg.bounds()[i]), "absent column zero-filled");
  }
  o.require(absent > 0, "billing columns registered");

  events.clear();
  std::vector<likelihood::AnomalyAssessment> out;
  for (int i = 0; i < 4; ++i) {
    ++fed;
    const auto got = d.tick(start_of(fed));
    out.insert(out.end(), got.begin(), got.end());
  }
  const auto warnings = events.of_type("missing_data");
  o.require(out.size() == 3, "three empty windows predicted");
  for (const auto& a : out) o.require(a.policy == features::PredictionPolicy::PredictWithWarning, "warned prediction");
  o.require(warnings.size() == 4, "one warning per empty window");
  o.require(!warnings.empty() && warnings.back()["policy"] == "SkipWithWarning", "fourth empty window skipped");
  o.detail << "empty windows: " << out.size() << " predicted, " << d.counters().skippedWindows << " skipped, "
           << warnings.size() << " warnings ";
}

void non_blocking_retrain_criterion(Outcome& o) {
  constexpr auto kStall = std::chrono::seconds(60);
  constexpr auto kTickEvery = std::chrono::seconds(1);
  Config c = testsupport::small_config();
  c.retrainAsync = true;
  orchestrator::EventLog events;
  orchestrator::Detector d(c, events);
  const auto stream = testsupport::baseline_stream(400);
  auto start_of = [](std::size_t i) { return testsupport::kStartMs + static_cast<std::int64_t>(i) * 60'000; };
  std::size_t fed = 0;
  auto feed_window = [&](bool with_k, bool with_j) {
    for (const auto& r : stream.records) {
      const auto idx = static_cast<std::size_t>((r.timestamp - testsupport::kStartMs) / 60'000);
      if (idx == fed) d.ingest(r, "push");
    }
    if (with_k) d.ingest(testsupport::record("inventory", start_of(fed) + 500, 95.0), "push");
    if (with_j) d.ingest(testsupport::record("shipping", start_of(fed) + 500, 95.0), "push");
    ++fed;
    return d.tick(start_of(fed));
  };
  auto warned = [&](const std::string& app) {
    std::size_t n = 0;
    for (const auto& e : events.of_type("unseen_feature")) n += e["appName"] == app ? 1 : 0;
    return n;
  };

  for (std::size_t i = 0; i < 60; ++i) {
    for (const auto& r : stream.records) {
      if (static_cast<std::size_t>((r.timestamp - testsupport::kStartMs) / 60'000) == i) d.ingest(r, "push");
    }
  }
  fed = 60;
  d.tick(start_of(fed));
  for (int i = 0; i < 5; ++i) feed_window(true, false);  // K shows up before the snapshot
  o.require(warned("inventory") == 1, "K warned once");

  d.set_retrain_gate([&] { std::this_thread::sleep_for(kStall); });
  o.require(d.request_retrain(start_of(fed)), "retrain started");

  const auto stall_end = Clock::now() + kStall;
  auto next = Clock::now();
  std::size_t ticks = 0, on_time = 0;
  double worst_tick = 0.0;
  while (Clock::now() < stall_end - kTickEvery) {
    std::this_thread::sleep_until(next);
    next += kTickEvery;
    const auto t0 = Clock::now();
    const auto got = feed_window(true, true);  // J first appears during the stall
    const double took = std::chrono::duration<double>(Clock::now() - t0).count();
    worst_tick = std::max(worst_tick, took);
    ++ticks;
    if (got.size() == 1 && got[0].modelVersion == 1 && took < 1.0) ++on_time;
  }
  o.require(d.retrain_running(), "retrain still stalled after the ticks");
  o.require(ticks >= 50 && on_time == ticks, "every tick on schedule");
  o.require(d.wait_for_retrain(std::chrono::seconds(120)), "retrain finished");

  const std::size_t k_before = warned("inventory");
  const std::size_t j_before = warned("shipping");
  const auto after = feed_window(true, true);
  o.require(after.size() == 1 && after[0].modelVersion == 2, "swap on next tick");
  o.require(warned("inventory") == k_before, "K no longer warns after swap");
  o.require(warned("shipping") == j_before + 1, "J (not in snapshot) warns again");
  o.detail << ticks << " ticks during stall, " << on_time << " on time, worst tick " << worst_tick
           << "s, model v" << d.model().modelVersion << ' ';
}

void monotonicity_criterion(Outcome& o) {
  const auto injected = evalbench::generate_stream(e2e_spec(), e2e_injections());
  Config lo = e2e_config();
  Config hi = e2e_config();
  hi.likelihood.threshold = 0.99;
  const auto r1 = evalbench::evaluate_run(injected.records, injected.truth, lo, injected.startMs, injected.windows);
  const auto r2 = evalbench::evaluate_run(injected.records, injected.truth, hi, injected.startMs, injected.windows);
  const auto f1 = flagged_windows(r1);
  const auto f2 = flagged_windows(r2);
  o.require(!f2.empty() && f2.size() < f1.size(), "both thresholds flag something");
  o.require(std::includes(f1.begin(), f1.end(), f2.begin(), f2.end()), "flagged set at higher threshold is a subset");

  // the same over a threshold sweep of one stream's likelihoods
  std::vector<double> lik;
  for (const auto& s : r1.scores) {
    if (s.scored) lik.push_back(s.likelihood);
  }
  bool nested = true;
  for (double t1 = 0.5; t1 < 1.0; t1 += 0.01) {
    const double t2 = t1 + 0.005;
    for (double l : lik) nested = nested && (!likelihood::flag(l, t2) || likelihood::flag(l, t1));
  }
  o.require(nested, "threshold sweep");
  o.detail << "|flagged@0.9602|=" << f1.size() << " |flagged@0.99|=" << f2.size() << ' ';
}

}  // namespace

int main() {
  run("metrics: reported confusion matrix", metrics_criterion);
  run("range arithmetic: reported ranges", range_criterion);
  run("statistics oracle: 1000 random lists", statistics_criterion);
  run("gradient check: D=3 L=4 hidden=5, 5 seeds", gradient_criterion);
  run("likelihood oracle: 10k streamed errors", likelihood_criterion);
  run("end-to-end synthetic detection", e2e_criterion);
  run("missing-data rules", missing_data_criterion);
  run("non-blocking retrain", non_blocking_retrain_criterion);
  run("threshold monotonicity", monotonicity_criterion);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
