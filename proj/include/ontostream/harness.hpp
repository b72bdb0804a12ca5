#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ontostream/drift.hpp"
#include "ontostream/learner.hpp"
#include "ontostream/stream.hpp"

namespace ontostream {

// Recipe for a synthetic road-traffic stream. Each road cycles through
// `classes` delay regimes; a drift snapshot advances every road to its next
// regime and reports fresh incident individuals, which is what the drift scan
// picks up. Streams with driftFraction >= 0.5 churn until the end after a calm
// opening; lower fractions churn early and then settle.
struct ScenarioConfig {
  int roads = 2;
  int horizonSnapshots = 200;
  double driftFraction = 0.5;   // fraction of snapshot-to-snapshot updates that drift
  double driftSeverity = 0.3;   // significance each drift should reach
  std::uint64_t seed = 1;
  int classes = 5;              // number of delay regimes / label classes
};

struct GenerationReport {
  Stream stream;
  std::vector<int> driftTimes;         // snapshots where the regime advances
  double realizedDriftFraction = 0.0;  // flagged pairs / (snapshots - 1)
  double minSignificance = 0.0;        // weakest flagged pair, 0 when none
  int incidentsPerDrift = 0;           // fresh individuals reported per drift
  int attempts = 1;                    // calibration rounds used
};

// Static vocabulary shared by all scenarios built from `cfg`: the traffic
// axioms, one delay-condition axiom per class, pairwise disjointness of the
// delay levels, and the bus declaration.
Ontology scenarioBackground(const ScenarioConfig& cfg);

// The per-snapshot observation block for one road: its delay level, its
// fixed travel profile (slow roads report Long trips, fast roads OK), and
// its bus link. The travel profile stays constant per road so that adjacent
// churn snapshots always share the same number of facts.
std::vector<Axiom> roadObservation(const std::string& road, const std::string& bus,
                                   int level, int classes, bool slowTravel);

// Builds a stream and validates it with the drift scan (epsilon 1/3,
// sigmaMin = driftSeverity): the realized fraction of flagged updates must
// land within 0.1 of driftFraction. Incident counts are recalibrated a few
// times before giving up with InfeasibleScenario. Deterministic per seed.
GenerationReport generateWithReport(const ScenarioConfig& cfg);
Stream generate(const ScenarioConfig& cfg);

// Forecasting methods compared by evaluate().
inline constexpr const char* kMethodDriftAware = "driftAware";
inline constexpr const char* kMethodUniformSgd = "uniformSGD";
inline constexpr const char* kMethodSlidingWindowMajority = "slidingWindowMajority";
inline constexpr const char* kMethodPersistence = "persistence";

struct EvalOptions {
  std::vector<std::string> methods;  // empty = all four
  double trainFraction = 0.8;        // chronological split, no shuffling
  int delta = 1;                     // forecast horizon
  int classes = 5;
  std::string classPrefix = "Condition";  // class k reads <classPrefix><k>
  std::vector<std::string> entities;      // empty = roots labeled at snapshot 0
  WeightingMode weighting = WeightingMode::Uniform;  // driftAware sample trust
  double kappa = 0.5;
  int budget = 12;
  DriftOptions drift;  // scan behind snapshot selection and drift buckets
  double learningRate = 0.1;
  int epochs = 40;
  double l2 = 1e-3;
  std::uint64_t seed = 1;
  int slidingWindow = 5;
};

struct BucketStats {
  int correct = 0;
  int total = 0;
  double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / total; }
};

struct MethodReport {
  std::string name;
  int correct = 0;
  int total = 0;
  double accuracy = 0.0;
  std::vector<std::vector<int>> confusion;    // [actual - 1][predicted - 1]
  std::map<std::string, BucketStats> buckets; // "none", "0.2", "0.4", "0.6", "0.8"
  std::int64_t runtimeMillis = 0;
  int untrainedHeads = 0;  // class heads skipped for lack of weighted samples
};

struct EvalReport {
  std::vector<MethodReport> methods;
  int trainSnapshots = 0;
  int testPoints = 0;
  std::int64_t runtimeMillis = 0;

  std::string toJson() const;
  std::string toCsv() const;
};

// Chronological forecasting benchmark: models see snapshots [0, split) and
// predict each entity's class label delta steps ahead across the test range.
// Labels are read off entailment (<classPrefix><k>(entity)); points whose
// label time carries no class are skipped. Points are bucketed by the
// significance of the drift scan around their horizon. Throws
// InsufficientData when the split leaves no trainable prefix or no test
// points.
EvalReport evaluate(const Stream& stream, const EvalOptions& options);

}  // namespace ontostream
