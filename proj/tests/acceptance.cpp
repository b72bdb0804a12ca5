// End-to-end acceptance checks: frozen fixture goldens, oracle equivalences,
// learner numerics, benchmark behavior, and the command-line contract. Each
// criterion is timed; criteria with a stated budget fail when they run over.
// The process exit code is the number of failed criteria.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "ontostream/drift.hpp"
#include "ontostream/embeddings.hpp"
#include "ontostream/harness.hpp"
#include "ontostream/learner.hpp"
#include "ontostream/ontoformat.hpp"
#include "ontostream/stream.hpp"
#include "test_support.hpp"

using namespace ontostream;
using testsupport::fixturePath;

namespace {

constexpr double kTol = 1e-9;

struct CheckContext {
  bool ok = true;
  std::vector<std::string> notes;

  void expect(bool condition, const std::string& note) {
    if (condition) return;
    ok = false;
    notes.push_back(note);
  }
};

StreamAnalysis loadTrafficFixture() {
  const Document onto = loadDocument(fixturePath("traffic.onto"));
  const Document stream = loadDocument(fixturePath("traffic_qr.stream"));
  return StreamAnalysis(Stream::fromDocuments(onto, stream));
}

bool near(double a, double b, double tol = kTol) { return std::abs(a - b) <= tol; }

std::set<std::string> factTexts(const std::set<Fact>& facts) {
  std::set<std::string> out;
  for (const auto& f : facts) out.insert(f.text());
  return out;
}

struct CommandResult {
  int exitCode = -1;
  std::string output;
};

CommandResult runCommand(const std::string& command) {
  CommandResult result;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return result;
  char buffer[4096];
  std::size_t n = 0;
  while ((n = fread(buffer, 1, sizeof buffer, pipe)) > 0) result.output.append(buffer, n);
  const int status = pclose(pipe);
  result.exitCode = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

// --- criteria -------------------------------------------------------------

void entailmentFrequencyGoldens(CheckContext& c) {
  StreamAnalysis a = loadTrafficFixture();
  const Fact disrupted = Fact::parse("DisruptedRoad(r2)");
  const double expected[] = {0.0, 0.0, 0.5, 2.0 / 3.0};
  for (int k = 1; k <= 4; ++k) {
    const double got = estimate(a, disrupted, k);
    c.expect(near(got, expected[k - 1]), "estimate at k=" + std::to_string(k) + " was " +
                                             std::to_string(got));
  }
}

void changeClassificationGolden(CheckContext& c) {
  StreamAnalysis a = loadTrafficFixture();
  const ChangeSet delta = a.changes(Window(0, 1), Window(2, 3));
  c.expect(delta.invariantFacts.count(Fact::parse("with(r2,b0)")) == 1,
           "with(r2,b0) should be invariant");
  c.expect(delta.obsoleteFacts.count(Fact::parse("ClearedRoad(r2)")) == 1,
           "ClearedRoad(r2) should be obsolete");
  c.expect(delta.newFacts.count(Fact::parse("DisruptedRoad(r2)")) == 1,
           "DisruptedRoad(r2) should be new");
}

void significanceGoldens(CheckContext& c) {
  StreamAnalysis a = loadTrafficFixture();
  const double sigma2 = significance(a, 2, 3, 1.0 / 3.0);
  const double sigma3 = significance(a, 3, 4, 1.0 / 3.0);
  c.expect(near(sigma2, 4.0 / 7.0), "significance(2,3) was " + std::to_string(sigma2));
  c.expect(near(sigma3, 0.0), "significance(3,4) was " + std::to_string(sigma3));
}

void agreementVectorGolden(CheckContext& c) {
  StreamAnalysis a = loadTrafficFixture();
  const std::vector<double> v = consistencyVector(a, 3);
  c.expect(v.size() == 4, "agreement vector should have 4 entries");
  const double expected[] = {0.0, -0.8, 1.0, 1.0};
  for (std::size_t i = 0; i < v.size() && i < 4; ++i)
    c.expect(near(v[i], expected[i]),
             "entry " + std::to_string(i) + " was " + std::to_string(v[i]));
}

void suddenChangeWitness(CheckContext& c) {
  StreamAnalysis a = loadTrafficFixture();
  const DriftReport report = significantDrifts(a);
  bool found = false;
  for (const auto& d : report.drifts) {
    if (d.from != 2 || d.to != 3) continue;
    found = true;
    c.expect(!d.evidence.empty(), "the (2,3) change should carry evidence");
    c.expect(d.witness.text() == "ClearedRoad(r2)",
             "witness was " + d.witness.text());
  }
  c.expect(found, "the (2,3) change should be reported");
  for (const auto& p : report.pairs)
    if (p.from == 2) c.expect(p.sudden, "the (2,3) change should be sudden");
}

void driftScanAndGuardEquivalence(CheckContext& c) {
  StreamAnalysis a = loadTrafficFixture();
  const DriftReport fixture = significantDrifts(a);
  c.expect(fixture.drifts.size() == 1, "fixture should contain exactly one drift");
  if (!fixture.drifts.empty()) {
    c.expect(fixture.drifts[0].from == 2 && fixture.drifts[0].to == 3,
             "fixture drift should be (2,3)");
  }

  std::mt19937_64 rng(90125);
  int skips = 0;
  int withDrifts = 0;
  for (int iter = 0; iter < 100; ++iter) {
    const Stream s = testsupport::randomElStream(rng);
    DriftOptions exhaustive;
    exhaustive.useChangeGuard = false;
    const DriftReport guarded = significantDrifts(s, DriftOptions{});
    const DriftReport reference = significantDrifts(s, exhaustive);
    const std::string tag = "random stream " + std::to_string(iter);
    c.expect(guarded.drifts.size() == reference.drifts.size(), tag + ": drift count differs");
    if (guarded.drifts.size() == reference.drifts.size()) {
      for (std::size_t k = 0; k < guarded.drifts.size(); ++k) {
        const auto& g = guarded.drifts[k];
        const auto& r = reference.drifts[k];
        c.expect(g.from == r.from && g.to == r.to, tag + ": drift window differs");
        c.expect(near(g.significance, r.significance, 1e-12), tag + ": significance differs");
        c.expect(factTexts(g.evidence) == factTexts(r.evidence), tag + ": evidence differs");
        c.expect(g.witness == r.witness, tag + ": witness differs");
      }
    }
    for (const auto& p : guarded.pairs) skips += p.skipped ? 1 : 0;
    withDrifts += guarded.drifts.empty() ? 0 : 1;
  }
  c.expect(skips > 0, "the change guard never fired, so the comparison is vacuous");
  c.expect(withDrifts > 0, "no random stream produced a drift");
}

void reasonerOracleEquivalence(CheckContext& c) {
  std::mt19937_64 rng(42);
  int inconsistentCount = 0;
  for (int iter = 0; iter < 200; ++iter) {
    const Ontology onto = testsupport::randomElOntology(rng);
    const testsupport::NaiveResult ref = testsupport::naiveClosure(onto);
    const Saturation sat = saturate(onto);
    const std::string tag = "random ontology " + std::to_string(iter);
    c.expect(sat.inconsistent() == ref.inconsistent, tag + ": consistency verdict differs");
    if (ref.inconsistent || sat.inconsistent()) {
      ++inconsistentCount;
      continue;
    }
    c.expect(factTexts(sat.allFacts(true)) == factTexts(ref.facts),
             tag + ": entailment sets differ");
  }
  c.expect(inconsistentCount > 5 && inconsistentCount < 195,
           "the generator should exercise both consistency outcomes");
}

TrainingSet randomTrainingSet(std::mt19937_64& rng, int samples, int width) {
  TrainingSet ts;
  for (int k = 0; k < width; ++k)
    ts.index.facts.push_back(Fact::parse("A" + std::to_string(k) + "(a)"));
  ts.index.digest = factIndexDigest(ts.index.facts);
  for (int i = 0; i < samples; ++i) {
    std::vector<double> row(width);
    for (auto& v : row) v = static_cast<double>(rng() % 2);
    ts.times.push_back(i);
    ts.features.push_back(row);
    ts.labels.push_back(static_cast<double>(rng() % 2));
    ts.weights.push_back(static_cast<double>(1 + rng() % 100) / 100.0);
  }
  return ts;
}

void learnerNumerics(CheckContext& c) {
  // 1) analytic gradient vs central finite differences at 100 random points.
  std::mt19937_64 rng(24601);
  const TrainingSet ts = randomTrainingSet(rng, 8, 4);
  const double h = 1e-5;
  int checkedPoints = 0;
  for (int draw = 0; draw < 400 && checkedPoints < 100; ++draw) {
    std::vector<double> w(4);
    for (auto& v : w) v = static_cast<double>(static_cast<int>(rng() % 2001) - 1000) / 1000.0;
    const double b = static_cast<double>(static_cast<int>(rng() % 2001) - 1000) / 1000.0;
    const LossKind loss = draw % 2 == 0 ? LossKind::Logistic : LossKind::Hinge;
    const double l2 = static_cast<double>(rng() % 100) / 100.0;

    if (loss == LossKind::Hinge) {
      // Central differences straddle the hinge kink; skip points too close.
      bool nearKink = false;
      for (std::size_t i = 0; i < ts.features.size(); ++i) {
        double f = b;
        for (std::size_t k = 0; k < w.size(); ++k) f += w[k] * ts.features[i][k];
        const double y = 2.0 * ts.labels[i] - 1.0;
        if (std::abs(y * f - 1.0) < 1e-3) nearKink = true;
      }
      if (nearKink) continue;
    }
    ++checkedPoints;

    const auto [gw, gb] = objectiveGradient(ts, w, b, loss, l2);
    const std::string tag = "gradient point " + std::to_string(draw);
    for (std::size_t k = 0; k < w.size(); ++k) {
      std::vector<double> up = w, dn = w;
      up[k] += h;
      dn[k] -= h;
      const double numeric =
          (objective(ts, up, b, loss, l2) - objective(ts, dn, b, loss, l2)) / (2 * h);
      c.expect(std::abs(numeric - gw[k]) <= 1e-4 * std::max(1.0, std::abs(gw[k])),
               tag + ": weight gradient mismatch");
    }
    const double numericB =
        (objective(ts, w, b + h, loss, l2) - objective(ts, w, b - h, loss, l2)) / (2 * h);
    c.expect(std::abs(numericB - gb) <= 1e-4 * std::max(1.0, std::abs(gb)),
             tag + ": bias gradient mismatch");
  }
  c.expect(checkedPoints == 100, "expected 100 finite-difference points");

  // 2) fixed-seed training is bit-reproducible end to end.
  StreamAnalysis a = loadTrafficFixture();
  const Fact target = Fact::parse("DisruptedRoad(r2)");
  const TrainOptions opts;
  const LinearModel first = train(a, target, opts);
  const LinearModel second = train(a, target, opts);
  c.expect(first.weights == second.weights && first.bias == second.bias,
           "training twice with one seed should give identical parameters");
  c.expect(first.indexDigest == second.indexDigest, "catalogue digests should agree");

  // 3) agreement-based weighting modes have disjoint supports.
  for (int ref = 1; ref < a.size(); ++ref) {
    std::vector<int> times;
    for (int t = 0; t <= ref; ++t) times.push_back(t);
    const std::vector<double> trusting =
        sampleWeights(a, times, ref, WeightingMode::Consistent);
    const std::vector<double> contrarian =
        sampleWeights(a, times, ref, WeightingMode::Inconsistent);
    for (std::size_t i = 0; i < times.size(); ++i)
      c.expect(trusting[i] * contrarian[i] == 0.0,
               "weight supports overlap at reference " + std::to_string(ref));
  }

  // 4) a separable concept is recovered within 200 epochs.
  std::mt19937_64 sepRng(31337);
  TrainingSet sep;
  for (int k = 0; k < 6; ++k) sep.index.facts.push_back(Fact::parse("A" + std::to_string(k) + "(a)"));
  sep.index.digest = factIndexDigest(sep.index.facts);
  for (int i = 0; i < 60; ++i) {
    std::vector<double> row(6);
    for (auto& v : row) v = static_cast<double>(sepRng() % 2);
    sep.times.push_back(i);
    sep.features.push_back(row);
    sep.labels.push_back(row[0]);
    sep.weights.push_back(1.0);
  }
  TrainOptions sepOpts;
  sepOpts.learningRate = 0.3;
  sepOpts.epochs = 200;
  sepOpts.l2 = 1e-4;
  for (const LossKind loss : {LossKind::Logistic, LossKind::Hinge}) {
    sepOpts.loss = loss;
    const LinearModel m = trainModel(sep, Fact::parse("T(a)"), sepOpts);
    int hits = 0;
    for (std::size_t i = 0; i < sep.features.size(); ++i)
      if (predict(m, sep.features[i]) == (sep.labels[i] > 0.5)) ++hits;
    const double accuracy = static_cast<double>(hits) / static_cast<double>(sep.features.size());
    c.expect(accuracy >= 0.95,
             "separable accuracy was " + std::to_string(accuracy) + " for loss " +
                 std::to_string(static_cast<int>(loss)));
  }
}

ScenarioConfig benchmarkScenario(double fraction, double severity, std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.roads = 2;
  cfg.horizonSnapshots = 200;
  cfg.classes = 5;
  cfg.driftFraction = fraction;
  cfg.driftSeverity = severity;
  cfg.seed = seed;
  return cfg;
}

EvalOptions benchmarkEval() {
  EvalOptions opt;
  opt.kappa = 1.0;
  opt.budget = 12;
  opt.drift.sigmaMin = 0.3;
  return opt;
}

void weightingModeSplit(CheckContext& c) {
  const auto meanAccuracy = [&](double fraction, double severity, double& inconsistentMean,
                                double& consistentMean) {
    inconsistentMean = 0.0;
    consistentMean = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Stream s = generate(benchmarkScenario(fraction, severity, seed));
      for (const WeightingMode mode :
           {WeightingMode::Inconsistent, WeightingMode::Consistent}) {
        EvalOptions opt = benchmarkEval();
        opt.methods = {kMethodDriftAware};
        opt.weighting = mode;
        const EvalReport report = evaluate(s, opt);
        (mode == WeightingMode::Inconsistent ? inconsistentMean : consistentMean) +=
            report.methods.at(0).accuracy / 5.0;
      }
    }
  };

  double highChurnInconsistent = 0.0, highChurnConsistent = 0.0;
  meanAccuracy(0.85, 0.30, highChurnInconsistent, highChurnConsistent);
  c.expect(highChurnInconsistent > highChurnConsistent,
           "high churn: contrarian weighting should win (" +
               std::to_string(highChurnInconsistent) + " vs " +
               std::to_string(highChurnConsistent) + ")");

  double lowChurnInconsistent = 0.0, lowChurnConsistent = 0.0;
  meanAccuracy(0.15, 0.22, lowChurnInconsistent, lowChurnConsistent);
  c.expect(lowChurnConsistent > lowChurnInconsistent,
           "low churn: agreement weighting should win (" +
               std::to_string(lowChurnConsistent) + " vs " +
               std::to_string(lowChurnInconsistent) + ")");
}

void driftAwareSelectionWins(CheckContext& c) {
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Stream s = generate(benchmarkScenario(0.85, 0.30, seed));
    EvalOptions opt = benchmarkEval();
    opt.methods = {kMethodDriftAware, kMethodUniformSgd};
    const EvalReport report = evaluate(s, opt);
    const double aware = report.methods.at(0).accuracy;
    const double recency = report.methods.at(1).accuracy;
    if (aware >= recency) ++wins;
  }
  c.expect(wins >= 4, "drift-aware selection won only " + std::to_string(wins) + "/5 seeds");
}

void commandLineContract(CheckContext& c) {
  const std::string cli = OST_CLI_PATH;
  const std::string fullFixture = fixturePath("traffic_qr_full.stream");

  const CommandResult drift = runCommand(cli + " drift --stream " + fullFixture +
                                         " --epsilon 0.333333 --sigma-min 0.5 2>/dev/null");
  c.expect(drift.exitCode == 0, "drift exit code was " + std::to_string(drift.exitCode));
  try {
    const nlohmann::json j = nlohmann::json::parse(drift.output);
    c.expect(j["drifts"].size() == 1, "drift report should list exactly one drift");
    if (!j["drifts"].empty()) {
      c.expect(j["drifts"][0]["from"] == 2 && j["drifts"][0]["to"] == 3,
               "drift window should be (2,3)");
      c.expect(near(j["drifts"][0]["significance"].get<double>(), 4.0 / 7.0, 1e-6),
               "drift significance should be about 0.5714285");
      c.expect(j["drifts"][0]["witness"] == "ClearedRoad(r2)",
               "drift witness should be ClearedRoad(r2)");
    }
  } catch (const std::exception& e) {
    c.expect(false, std::string("drift output is not valid JSON: ") + e.what());
  }

  const CommandResult missing =
      runCommand(cli + " drift --stream /nonexistent/missing.stream 2>/dev/null");
  c.expect(missing.exitCode == 2,
           "missing input should exit 2, got " + std::to_string(missing.exitCode));

  const CommandResult help = runCommand(cli + " --help 2>/dev/null");
  c.expect(help.exitCode == 0, "--help should exit 0, got " + std::to_string(help.exitCode));
  c.expect(help.output.find("drift") != std::string::npos,
           "--help should mention the drift subcommand");
}

struct Criterion {
  int id;
  std::string description;
  long long limitMs;  // 0 = no stated budget
  std::function<void(CheckContext&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "entailment frequency estimates on the traffic fixture", 1000,
       entailmentFrequencyGoldens},
      {2, "window change classification on the traffic fixture", 1000,
       changeClassificationGolden},
      {3, "drift significance values on the traffic fixture", 1000, significanceGoldens},
      {4, "snapshot agreement vector on the traffic fixture", 1000, agreementVectorGolden},
      {5, "sudden abrupt change and its witness fact", 1000, suddenChangeWitness},
      {6, "drift scan golden and change-guard equivalence on random streams", 30000,
       driftScanAndGuardEquivalence},
      {7, "saturation agrees with an exhaustive-closure oracle", 60000,
       reasonerOracleEquivalence},
      {8, "learner numerics: gradients, determinism, weighting, recovery", 60000,
       learnerNumerics},
      {9, "weighting modes split across high- and low-churn benchmarks", 120000,
       weightingModeSplit},
      {10, "drift-aware snapshot selection holds up against plain recency", 0,
       driftAwareSelectionWins},
      {11, "command-line interface contract", 0, commandLineContract},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    CheckContext ctx;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.run(ctx);
    } catch (const std::exception& e) {
      ctx.ok = false;
      ctx.notes.push_back(std::string("unexpected exception: ") + e.what());
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    if (criterion.limitMs > 0 && ms > criterion.limitMs) {
      ctx.ok = false;
      ctx.notes.push_back("over the " + std::to_string(criterion.limitMs) + " ms budget");
    }
    std::printf("[%s] criterion %d: %s (%lld ms)\n", ctx.ok ? "PASS" : "FAIL", criterion.id,
                criterion.description.c_str(), static_cast<long long>(ms));
    std::size_t shown = 0;
    for (const auto& note : ctx.notes) {
      if (++shown > 8) {
        std::printf("        ... %zu further problems\n", ctx.notes.size() - 8);
        break;
      }
      std::printf("        %s\n", note.c_str());
    }
    failures += ctx.ok ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures;
}
