#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "json.hpp"
#include "ontostream/drift.hpp"
#include "ontostream/errors.hpp"
#include "ontostream/harness.hpp"

using namespace ontostream;

namespace {

ScenarioConfig scenario(double fraction, double severity, std::uint64_t seed, int horizon = 60) {
  ScenarioConfig cfg;
  cfg.roads = 2;
  cfg.horizonSnapshots = horizon;
  cfg.driftFraction = fraction;
  cfg.driftSeverity = severity;
  cfg.seed = seed;
  cfg.classes = 5;
  return cfg;
}

EvalOptions benchOptions(std::uint64_t seed) {
  EvalOptions opt;
  opt.classes = 5;
  opt.kappa = 1.0;
  opt.budget = 12;
  opt.drift.sigmaMin = 0.3;
  opt.seed = seed;
  return opt;
}

const MethodReport& methodNamed(const EvalReport& report, const std::string& name) {
  for (const MethodReport& m : report.methods)
    if (m.name == name) return m;
  REQUIRE(false);
  return report.methods.front();
}

}  // namespace

TEST_CASE("scenario background lists traffic axioms, condition rules, disjointness") {
  ScenarioConfig cfg = scenario(0.5, 0.3, 1);
  Ontology bg = scenarioBackground(cfg);
  // 7 traffic axioms + one condition rule per class + pairwise level disjointness.
  CHECK(bg.tbox.size() == 7 + 5 + 10);
  CHECK(bg.abox.size() == 1);
  CHECK(bg.abox[0].text() == "CLASS Bus (bus0)");
  int conditionRules = 0;
  int disjoint = 0;
  for (const Axiom& ax : bg.tbox) {
    if (ax.text().find("SUB Condition") != std::string::npos) ++conditionRules;
    if (ax.text().find("SUB Bot") != std::string::npos) ++disjoint;
  }
  CHECK(conditionRules == 5);
  CHECK(disjoint == 11);  // Long/OK clash plus 10 level pairs
}

TEST_CASE("road observation block carries level, travel profile, bus link") {
  std::vector<Axiom> obs = roadObservation("road0", "bus0", 3, 5, false);
  REQUIRE(obs.size() == 3);
  CHECK(obs[0].text() == "CLASS (and (some delay Level3) Road) (road0)");
  CHECK(obs[1].text() == "CLASS (and (some travel OK) Road) (road0)");
  CHECK(obs[2].text() == "ROLE with (road0, bus0)");
  CHECK(roadObservation("road1", "bus0", 1, 5, true)[1].text() ==
        "CLASS (and (some travel Long) Road) (road1)");
  CHECK_THROWS_AS(roadObservation("road0", "bus0", 0, 5, false), InvalidArgument);
  CHECK_THROWS_AS(roadObservation("road0", "bus0", 6, 5, false), InvalidArgument);
}

TEST_CASE("generation is deterministic per seed") {
  ScenarioConfig cfg = scenario(0.5, 0.3, 7);
  Stream a = generate(cfg);
  Stream b = generate(cfg);
  CHECK(a.toDocument() == b.toDocument());
  cfg.seed = 8;
  CHECK_FALSE(generate(cfg).toDocument() == a.toDocument());
}

TEST_CASE("zero drift fraction produces a calm consistent stream") {
  GenerationReport gen = generateWithReport(scenario(0.0, 0.3, 7));
  CHECK(gen.driftTimes.empty());
  CHECK(gen.realizedDriftFraction == 0.0);
  CHECK(gen.incidentsPerDrift == 0);
  StreamAnalysis a(gen.stream);
  CHECK(a.prefixConsistent(a.size() - 1));
  DriftOptions dopt;
  dopt.sigmaMin = 0.0;
  CHECK(significantDrifts(a, dopt).drifts.empty());

  // Labels never move, so the persistence baseline is perfect.
  EvalOptions opt = benchOptions(7);
  opt.methods = {kMethodPersistence};
  EvalReport report = evaluate(gen.stream, opt);
  CHECK(methodNamed(report, kMethodPersistence).accuracy == doctest::Approx(1.0));
}

TEST_CASE("high-drift scenario: flagged pairs are exactly the planned drift snapshots") {
  GenerationReport gen = generateWithReport(scenario(0.85, 0.3, 11));
  CHECK(gen.realizedDriftFraction >= 0.75);
  CHECK(gen.realizedDriftFraction <= 0.95);
  CHECK(gen.minSignificance >= 0.3);
  CHECK(gen.attempts == 1);
  REQUIRE_FALSE(gen.driftTimes.empty());
  CHECK(gen.driftTimes.back() == 58);  // churn runs through the end

  DriftOptions dopt;
  dopt.sigmaMin = 0.3;
  StreamAnalysis a(gen.stream);
  std::set<int> flagged;
  for (const DriftEntry& d : significantDrifts(a, dopt).drifts) flagged.insert(d.from);
  CHECK(flagged == std::set<int>(gen.driftTimes.begin(), gen.driftTimes.end()));

  // Incident individuals appear only on drift snapshots.
  std::set<int> driftSet(gen.driftTimes.begin(), gen.driftTimes.end());
  for (int t = 0; t < static_cast<int>(gen.stream.snapshots.size()); ++t) {
    bool hasIncident = false;
    for (const Axiom& ax : gen.stream.snapshots[t])
      if (ax.text().find("inc") != std::string::npos) hasIncident = true;
    CHECK(hasIncident == (driftSet.count(t) > 0));
  }
}

TEST_CASE("low-drift scenario churns early and settles") {
  GenerationReport gen = generateWithReport(scenario(0.15, 0.22, 11));
  CHECK(gen.realizedDriftFraction >= 0.05);
  CHECK(gen.realizedDriftFraction <= 0.25);
  CHECK(gen.minSignificance >= 0.22);
  REQUIRE_FALSE(gen.driftTimes.empty());
  CHECK(gen.driftTimes.front() >= 3);
  CHECK(gen.driftTimes.back() < 20);
  // Contiguous churn block.
  CHECK(gen.driftTimes.back() - gen.driftTimes.front() + 1 ==
        static_cast<int>(gen.driftTimes.size()));
}

TEST_CASE("infeasible and invalid scenario configurations are rejected") {
  CHECK_THROWS_AS(generate(scenario(0.5, 0.6, 1)), InfeasibleScenario);
  CHECK_THROWS_AS(generate(scenario(1.0, 0.3, 1, 200)), InfeasibleScenario);
  ScenarioConfig cfg = scenario(0.5, 0.3, 1);
  cfg.roads = 0;
  CHECK_THROWS_AS(generate(cfg), InvalidArgument);
  cfg = scenario(0.5, 0.3, 1);
  cfg.classes = 1;
  CHECK_THROWS_AS(generate(cfg), InvalidArgument);
  CHECK_THROWS_AS(generate(scenario(-0.1, 0.3, 1)), InvalidArgument);
  CHECK_THROWS_AS(generate(scenario(1.1, 0.3, 1)), InvalidArgument);
  CHECK_THROWS_AS(generate(scenario(0.5, 1.2, 1)), InvalidArgument);
  CHECK_THROWS_AS(generate(scenario(0.5, 0.3, 1, 7)), InvalidArgument);
}

TEST_CASE("evaluation report: counts, confusion, buckets, serialization") {
  Stream s = generate(scenario(0.6, 0.3, 7));
  EvalOptions opt = benchOptions(7);
  EvalReport report = evaluate(s, opt);
  REQUIRE(report.methods.size() == 4);  // empty methods list = all four
  CHECK(report.trainSnapshots == 48);
  // 2 roads x test times 48..58 (delta 1 keeps t+1 <= 59).
  CHECK(report.testPoints == 22);

  for (const MethodReport& m : report.methods) {
    CHECK(m.total == report.testPoints);
    CHECK(m.correct <= m.total);
    CHECK(m.accuracy == doctest::Approx(static_cast<double>(m.correct) / m.total));
    int confusionSum = 0;
    int diagonal = 0;
    REQUIRE(m.confusion.size() == 5);
    for (int i = 0; i < 5; ++i) {
      REQUIRE(m.confusion[i].size() == 5);
      for (int j = 0; j < 5; ++j) confusionSum += m.confusion[i][j];
      diagonal += m.confusion[i][i];
    }
    CHECK(confusionSum == m.total);
    CHECK(diagonal == m.correct);
    int bucketTotal = 0;
    int bucketCorrect = 0;
    for (const auto& [name, stats] : m.buckets) {
      bucketTotal += stats.total;
      bucketCorrect += stats.correct;
    }
    CHECK(bucketTotal == m.total);
    CHECK(bucketCorrect == m.correct);
  }

  nlohmann::json parsed = nlohmann::json::parse(report.toJson());
  CHECK(parsed["testPoints"] == 22);
  CHECK(parsed["methods"].size() == 4);
  CHECK(parsed["methods"][0]["name"] == kMethodDriftAware);
  CHECK(parsed["methods"][0]["buckets"].contains("none"));

  std::string csv = report.toCsv();
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);  // header + one row per method
  CHECK(csv.rfind("method,accuracy,correct,total,untrainedHeads,runtimeMillis\n", 0) == 0);
}

TEST_CASE("evaluation determinism and bucket placement per scenario shape") {
  Stream hcd = generate(scenario(0.85, 0.3, 8));
  EvalOptions opt = benchOptions(8);
  opt.methods = {kMethodPersistence};
  EvalReport a = evaluate(hcd, opt);
  EvalReport b = evaluate(hcd, opt);
  CHECK(a.methods[0].correct == b.methods[0].correct);
  CHECK(a.methods[0].confusion == b.methods[0].confusion);
  // Every test horizon in dense churn crosses a flagged drift: interior
  // pairs carry sigma ~0.33, and the final horizon crosses the churn-exit
  // pair whose smaller universe pushes sigma to ~0.49.
  CHECK(a.methods[0].buckets.at("none").total == 0);
  CHECK(a.methods[0].buckets.at("0.2").total == a.methods[0].total - 2);
  CHECK(a.methods[0].buckets.at("0.4").total == 2);

  Stream lcd = generate(scenario(0.15, 0.22, 8));
  EvalReport c = evaluate(lcd, opt);
  // The low-drift test range is calm: no flagged drift near any horizon.
  CHECK(c.methods[0].buckets.at("none").total == c.methods[0].total);
}

TEST_CASE("explicit entity list restricts the test points") {
  Stream s = generate(scenario(0.5, 0.3, 7));
  EvalOptions opt = benchOptions(7);
  opt.methods = {kMethodPersistence};
  opt.entities = {"road0"};
  CHECK(evaluate(s, opt).testPoints == 11);
}

TEST_CASE("invalid evaluation options are rejected") {
  Stream s = generate(scenario(0.5, 0.3, 7));
  EvalOptions opt = benchOptions(7);
  opt.methods = {"gradientBoost"};
  CHECK_THROWS_AS(evaluate(s, opt), InvalidArgument);
  opt = benchOptions(7);
  opt.delta = 0;
  CHECK_THROWS_AS(evaluate(s, opt), InvalidArgument);
  opt = benchOptions(7);
  opt.classes = 1;
  CHECK_THROWS_AS(evaluate(s, opt), InvalidArgument);
  opt = benchOptions(7);
  opt.trainFraction = 1.0;
  CHECK_THROWS_AS(evaluate(s, opt), InvalidArgument);
  opt = benchOptions(7);
  opt.budget = 0;
  CHECK_THROWS_AS(evaluate(s, opt), InvalidArgument);
}

TEST_CASE("splits without trainable prefix or test range are rejected") {
  Stream s = generate(scenario(0.5, 0.3, 7, 20));
  EvalOptions opt = benchOptions(7);
  opt.trainFraction = 0.95;  // split at 19 leaves no room for a horizon
  CHECK_THROWS_AS(evaluate(s, opt), InsufficientData);
  opt.trainFraction = 0.05;  // split at 1 leaves no trainable prefix
  CHECK_THROWS_AS(evaluate(s, opt), InsufficientData);
}

TEST_CASE("all methods sit near chance on label noise") {
  // Levels drawn uniformly at random each snapshot: the label at t+1 is
  // independent of everything a method can learn, so accuracy must sit near
  // 1/classes. 5 roads x 103 test times = 515 points.
  ScenarioConfig cfg;
  cfg.roads = 5;
  cfg.classes = 5;
  cfg.horizonSnapshots = 520;
  Stream s;
  s.background = scenarioBackground(cfg);
  std::mt19937_64 rng(31);
  s.snapshots.resize(520);
  for (auto& snap : s.snapshots)
    for (int r = 0; r < 5; ++r) {
      int level = 1 + static_cast<int>(rng() % 5);
      std::vector<Axiom> obs =
          roadObservation("road" + std::to_string(r), "bus0", level, 5, r % 2 == 1);
      snap.insert(snap.end(), obs.begin(), obs.end());
    }

  EvalOptions opt = benchOptions(31);
  EvalReport report = evaluate(s, opt);
  CHECK(report.testPoints == 515);
  for (const MethodReport& m : report.methods) {
    CHECK(m.accuracy >= 0.1);
    CHECK(m.accuracy <= 0.3);
  }
}

TEST_CASE("weighting modes split as the drift density dictates") {
  // Dense churn: trusting contradicting snapshots recovers the regime cycle,
  // trusting agreeing ones leaves only a single-regime degenerate sample.
  Stream hcd = generate(scenario(0.85, 0.3, 3, 120));
  EvalOptions opt = benchOptions(3);
  opt.methods = {kMethodDriftAware};
  opt.weighting = WeightingMode::Inconsistent;
  double inconsistent = evaluate(hcd, opt).methods[0].accuracy;
  opt.weighting = WeightingMode::Consistent;
  double consistent = evaluate(hcd, opt).methods[0].accuracy;
  CHECK(inconsistent > consistent);
  CHECK(inconsistent >= 0.5);
  CHECK(consistent <= 0.35);

  // Calm tail: the one exposed onset agrees with the reference, so the
  // contradiction-weighted model has nothing to train on.
  Stream lcd = generate(scenario(0.15, 0.22, 3, 120));
  opt.weighting = WeightingMode::Inconsistent;
  EvalReport li = evaluate(lcd, opt);
  opt.weighting = WeightingMode::Consistent;
  EvalReport lc = evaluate(lcd, opt);
  CHECK(lc.methods[0].accuracy > li.methods[0].accuracy);
  CHECK(lc.methods[0].accuracy >= 0.9);
  CHECK(li.methods[0].accuracy <= 0.5);
  CHECK(li.methods[0].untrainedHeads == 10);  // 2 roads x 5 class heads
}

TEST_CASE("drift-aware selection keeps pace with plain recency under dense churn") {
  for (std::uint64_t seed : {3ULL, 7ULL, 11ULL}) {
    Stream hcd = generate(scenario(0.85, 0.3, seed, 120));
    EvalOptions opt = benchOptions(seed);
    opt.methods = {kMethodDriftAware, kMethodUniformSgd};
    EvalReport report = evaluate(hcd, opt);
    CHECK(methodNamed(report, kMethodDriftAware).accuracy >=
          methodNamed(report, kMethodUniformSgd).accuracy);
    CHECK(methodNamed(report, kMethodDriftAware).accuracy >= 0.8);
  }
}
