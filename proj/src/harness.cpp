#include "ontostream/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ontostream/embeddings.hpp"
#include "ontostream/errors.hpp"

namespace ontostream {

namespace {

using ordered_json = nlohmann::ordered_json;

void checkConfig(const ScenarioConfig& cfg) {
  if (cfg.roads < 1)
    throw InvalidArgument("roads must be >= 1, got " + std::to_string(cfg.roads));
  if (cfg.horizonSnapshots < 8)
    throw InvalidArgument("horizonSnapshots must be >= 8, got " +
                          std::to_string(cfg.horizonSnapshots));
  if (cfg.classes < 2)
    throw InvalidArgument("classes must be >= 2, got " + std::to_string(cfg.classes));
  if (!(cfg.driftFraction >= 0.0 && cfg.driftFraction <= 1.0))
    throw InvalidArgument("driftFraction must lie in [0, 1], got " +
                          std::to_string(cfg.driftFraction));
  if (!(cfg.driftSeverity >= 0.0 && cfg.driftSeverity <= 1.0))
    throw InvalidArgument("driftSeverity must lie in [0, 1], got " +
                          std::to_string(cfg.driftSeverity));
}

std::vector<Axiom> trafficTbox() {
  using C = Concept;
  std::vector<Axiom> t;
  t.push_back(Axiom::gci(
      C::conj({C::some("type", C::atomic("Poetry")), C::atomic("SocialEvent")}),
      C::conj({C::some("disruption", C::atomic("Low")), C::atomic("Event")})));
  t.push_back(Axiom::gci(
      C::conj({C::some("adj", C::some("occur", C::some("disruption", C::atomic("High")))),
               C::atomic("Road")}),
      C::atomic("DisruptedRoad")));
  t.push_back(Axiom::gci(
      C::conj({C::some("adj", C::some("occur", C::some("disruption", C::atomic("Low")))),
               C::atomic("Road")}),
      C::atomic("ClearedRoad")));
  t.push_back(Axiom::gci(C::conj({C::some("travel", C::atomic("Long")), C::atomic("BusRoad")}),
                         C::atomic("DisruptedRoad")));
  t.push_back(Axiom::gci(C::conj({C::some("travel", C::atomic("OK")), C::atomic("BusRoad")}),
                         C::atomic("ClearedRoad")));
  t.push_back(Axiom::gci(C::conj({C::some("with", C::atomic("Bus")), C::atomic("Road")}),
                         C::atomic("BusRoad")));
  t.push_back(Axiom::gci(C::conj({C::atomic("Long"), C::atomic("OK")}), C::bottom()));
  return t;
}

std::string levelName(int level) { return "Level" + std::to_string(level); }
std::string conditionName(int level) { return "Condition" + std::to_string(level); }
std::string roadName(int r) { return "road" + std::to_string(r); }

int levelOf(int road, int phase, int shift, int classes) {
  return 1 + (road + shift + phase) % classes;
}

Stream buildScenario(const ScenarioConfig& cfg, const std::set<int>& driftTimes, int shift,
                     int incidents) {
  Stream s;
  s.background = scenarioBackground(cfg);
  int phase = 0;
  for (int t = 0; t < cfg.horizonSnapshots; ++t) {
    bool drift = driftTimes.count(t) > 0;
    if (drift) ++phase;
    std::vector<Axiom> snap;
    for (int r = 0; r < cfg.roads; ++r) {
      std::vector<Axiom> obs = roadObservation(roadName(r), "bus0",
                                               levelOf(r, phase, shift, cfg.classes),
                                               cfg.classes, (r + shift) % 2 == 1);
      snap.insert(snap.end(), obs.begin(), obs.end());
    }
    if (drift) {
      for (int j = 0; j < incidents; ++j) {
        int impact = 1 + (t + j) % cfg.classes;
        snap.push_back(Axiom::classAssertion(
            Concept::conj({Concept::atomic("Impact" + std::to_string(impact)),
                           Concept::atomic("Incident")}),
            "inc" + std::to_string(t) + "_" + std::to_string(j)));
      }
    }
    s.snapshots.push_back(std::move(snap));
  }
  return s;
}

}  // namespace

Ontology scenarioBackground(const ScenarioConfig& cfg) {
  checkConfig(cfg);
  Ontology bg;
  bg.tbox = trafficTbox();
  for (int k = 1; k <= cfg.classes; ++k)
    bg.tbox.push_back(Axiom::gci(
        Concept::conj({Concept::atomic("Road"),
                       Concept::some("delay", Concept::atomic(levelName(k)))}),
        Concept::atomic(conditionName(k))));
  for (int j = 1; j <= cfg.classes; ++j)
    for (int k = j + 1; k <= cfg.classes; ++k)
      bg.tbox.push_back(Axiom::gci(
          Concept::conj({Concept::atomic(levelName(j)), Concept::atomic(levelName(k))}),
          Concept::bottom()));
  bg.abox.push_back(Axiom::classAssertion(Concept::atomic("Bus"), "bus0"));
  return bg;
}

std::vector<Axiom> roadObservation(const std::string& road, const std::string& bus, int level,
                                   int classes, bool slowTravel) {
  if (level < 1 || level > classes)
    throw InvalidArgument("level " + std::to_string(level) + " outside [1, " +
                          std::to_string(classes) + "]");
  std::vector<Axiom> out;
  out.push_back(Axiom::classAssertion(
      Concept::conj({Concept::atomic("Road"),
                     Concept::some("delay", Concept::atomic(levelName(level)))}),
      road));
  out.push_back(Axiom::classAssertion(
      Concept::conj({Concept::atomic("Road"),
                     Concept::some("travel", Concept::atomic(slowTravel ? "Long" : "OK"))}),
      road));
  out.push_back(Axiom::roleAssertion("with", road, bus));
  return out;
}

GenerationReport generateWithReport(const ScenarioConfig& cfg) {
  checkConfig(cfg);
  const int n = cfg.horizonSnapshots;
  const int updates = n - 1;
  const int slots = n - 4;  // drift snapshots live in [3, n - 2]
  const int count = static_cast<int>(std::llround(cfg.driftFraction * updates));
  if (count > slots)
    throw InfeasibleScenario("driftFraction " + std::to_string(cfg.driftFraction) + " needs " +
                             std::to_string(count) + " drift snapshots but only " +
                             std::to_string(slots) + " fit in the horizon");
  // Adjacent drift snapshots both contribute incident reports to a pair's
  // universe, so significance = E / (F + 2E) < 1/2 no matter how many
  // incidents are reported.
  if (count >= 2 && cfg.driftSeverity >= 0.48)
    throw InfeasibleScenario("driftSeverity " + std::to_string(cfg.driftSeverity) +
                             " is unreachable when drift snapshots are adjacent");
  if (count == 1 && cfg.driftSeverity > 0.95)
    throw InfeasibleScenario("driftSeverity " + std::to_string(cfg.driftSeverity) +
                             " is unreachable");

  std::mt19937_64 rng(cfg.seed);
  const int shift = static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.classes));

  std::set<int> driftTimes;
  if (count > 0) {
    int start;
    if (cfg.driftFraction >= 0.5) {
      start = (n - 2) - count + 1;  // churn runs through the end of the stream
    } else {
      int slack = slots - count;
      int jitter = slack > 0
                       ? static_cast<int>(rng() % static_cast<std::uint64_t>(std::min(3, slack + 1)))
                       : 0;
      start = 3 + jitter;  // churn early, then settle
    }
    for (int i = 0; i < count; ++i) driftTimes.insert(start + i);
  }

  // First guess for the incident count per drift: worst-case shared universe
  // of an adjacent drift pair is 13 facts per road plus the bus, and each
  // incident adds two class facts on each side of the pair.
  int incidents = 1;
  if (count > 0 && cfg.driftSeverity > 0.0) {
    double f = 13.0 * cfg.roads + 1.0;
    double needed = count >= 2 ? cfg.driftSeverity * f / (1.0 - 2.0 * cfg.driftSeverity)
                               : cfg.driftSeverity * f / (1.0 - cfg.driftSeverity);
    incidents = std::max(1, static_cast<int>(std::ceil(needed / 2.0)));
  }

  for (int attempt = 1; attempt <= 4; ++attempt) {
    Stream s = buildScenario(cfg, driftTimes, shift, incidents);
    DriftOptions scan;
    scan.epsilon = 1.0 / 3.0;
    scan.sigmaMin = cfg.driftSeverity;
    StreamAnalysis a(s);
    DriftReport report = significantDrifts(a, scan);

    std::set<int> flagged;
    double minSig = 0.0;
    for (const DriftEntry& d : report.drifts) {
      flagged.insert(d.from);
      minSig = flagged.size() == 1 ? d.significance : std::min(minSig, d.significance);
    }
    double realized = updates == 0 ? 0.0 : static_cast<double>(flagged.size()) / updates;
    if (std::abs(realized - cfg.driftFraction) <= 0.1) {
      GenerationReport out;
      out.stream = std::move(s);
      out.driftTimes.assign(driftTimes.begin(), driftTimes.end());
      out.realizedDriftFraction = realized;
      out.minSignificance = minSig;
      out.incidentsPerDrift = count > 0 ? incidents : 0;
      out.attempts = attempt;
      return out;
    }
    incidents += std::max(1, incidents / 2);
  }
  throw InfeasibleScenario("drift fraction " + std::to_string(cfg.driftFraction) +
                           " at severity " + std::to_string(cfg.driftSeverity) +
                           " not reached after 4 calibration attempts");
}

Stream generate(const ScenarioConfig& cfg) { return generateWithReport(cfg).stream; }

namespace {

int labelAt(const StreamAnalysis& a, const std::string& entity, int t, int classes,
            const std::string& prefix) {
  if (!a.snapshotConsistent(t)) return 0;
  const std::set<Fact>& facts = a.snapshotFacts(t);
  for (int k = 1; k <= classes; ++k)
    if (facts.count(Fact::cls(prefix + std::to_string(k), Individual::named(entity)))) return k;
  return 0;
}

std::string bucketName(double sigma) {
  if (sigma < 0.4) return "0.2";
  if (sigma < 0.6) return "0.4";
  if (sigma < 0.8) return "0.6";
  return "0.8";
}

const std::vector<std::string>& allMethods() {
  static const std::vector<std::string> kAll{kMethodDriftAware, kMethodUniformSgd,
                                             kMethodSlidingWindowMajority, kMethodPersistence};
  return kAll;
}

struct TestPoint {
  int entity = 0;
  int timeIndex = 0;  // position in the test-time list
  int t = 0;
  int actual = 0;
  std::string bucket;
};

MethodReport makeReport(const std::string& name, int classes) {
  MethodReport rep;
  rep.name = name;
  rep.confusion.assign(classes, std::vector<int>(classes, 0));
  for (const char* b : {"none", "0.2", "0.4", "0.6", "0.8"}) rep.buckets[b];
  return rep;
}

void score(MethodReport& rep, const TestPoint& p, int predicted) {
  bool ok = predicted == p.actual;
  rep.total += 1;
  rep.correct += ok ? 1 : 0;
  rep.confusion[p.actual - 1][predicted - 1] += 1;
  BucketStats& b = rep.buckets[p.bucket];
  b.total += 1;
  b.correct += ok ? 1 : 0;
}

}  // namespace

EvalReport evaluate(const Stream& stream, const EvalOptions& options) {
  auto wallStart = std::chrono::steady_clock::now();

  std::vector<std::string> methods = options.methods.empty() ? allMethods() : options.methods;
  for (const std::string& m : methods)
    if (std::find(allMethods().begin(), allMethods().end(), m) == allMethods().end())
      throw InvalidArgument("unknown method '" + m + "'");
  if (options.delta < 1)
    throw InvalidArgument("delta must be >= 1, got " + std::to_string(options.delta));
  if (options.classes < 2)
    throw InvalidArgument("classes must be >= 2, got " + std::to_string(options.classes));
  if (!(options.trainFraction > 0.0 && options.trainFraction < 1.0))
    throw InvalidArgument("trainFraction must lie in (0, 1), got " +
                          std::to_string(options.trainFraction));
  if (options.budget < 1)
    throw InvalidArgument("budget must be >= 1, got " + std::to_string(options.budget));
  if (options.slidingWindow < 1)
    throw InvalidArgument("slidingWindow must be >= 1, got " +
                          std::to_string(options.slidingWindow));

  StreamAnalysis full(stream);
  const int n = full.size();
  const int delta = options.delta;
  const int split = static_cast<int>(std::floor(options.trainFraction * n));
  if (split < 2)
    throw InsufficientData("chronological split leaves only " + std::to_string(split) +
                           " training snapshots");
  std::vector<int> testTimes;
  for (int t = split; t + delta < n; ++t) testTimes.push_back(t);
  if (testTimes.empty()) throw InsufficientData("no test snapshots after the split");

  const int classes = options.classes;
  std::vector<std::string> entities = options.entities;
  if (entities.empty()) {
    for (const std::string& r : full.mentionedRoots(0))
      if (labelAt(full, r, 0, classes, options.classPrefix) > 0) entities.push_back(r);
    if (entities.empty())
      throw InvalidArgument("no entities carry a " + options.classPrefix +
                            " class at snapshot 0");
  }
  const int numEntities = static_cast<int>(entities.size());

  // Ground-truth labels for every (entity, snapshot).
  std::vector<std::vector<int>> labels(numEntities, std::vector<int>(n, 0));
  for (int e = 0; e < numEntities; ++e)
    for (int t = 0; t < n; ++t) labels[e][t] = labelAt(full, entities[e], t, classes,
                                                       options.classPrefix);

  // Drift significance around each test horizon drives the report buckets.
  DriftReport fullScan = significantDrifts(full, options.drift);
  std::map<int, double> sigmaAt;
  for (const DriftEntry& d : fullScan.drifts) sigmaAt[d.from] = d.significance;
  auto bucketOf = [&](int t) {
    double best = -1.0;
    for (int u = t; u < t + delta; ++u) {
      auto it = sigmaAt.find(u);
      if (it != sigmaAt.end()) best = std::max(best, it->second);
    }
    return best < 0.0 ? std::string("none") : bucketName(best);
  };

  std::vector<TestPoint> points;
  for (int e = 0; e < numEntities; ++e)
    for (std::size_t ti = 0; ti < testTimes.size(); ++ti) {
      int t = testTimes[ti];
      int actual = labels[e][t + delta];
      if (actual == 0) continue;  // horizon carries no class label
      points.push_back({e, static_cast<int>(ti), t, actual, bucketOf(t)});
    }
  if (points.empty()) throw InsufficientData("no labeled test points");

  // Shared artifacts for the SGD methods: one catalogue and one feature table
  // per (entity, class) head, both built against the training prefix so test
  // snapshots are encoded exactly as a deployed model would see them.
  bool needSgd = false;
  for (const std::string& m : methods)
    if (m == kMethodDriftAware || m == kMethodUniformSgd) needSgd = true;

  struct HeadData {
    Fact target;
    FactIndex index;
    std::vector<std::vector<double>> testFeatures;  // aligned with testTimes
  };
  std::vector<HeadData> heads;
  std::optional<StreamAnalysis> prefixA;
  std::vector<int> driftTimesSel, uniformTimes;
  std::vector<double> driftWeights;
  const int ref = split - 1;

  if (needSgd) {
    Stream prefixStream;
    prefixStream.background = stream.background;
    prefixStream.snapshots.assign(stream.snapshots.begin(), stream.snapshots.begin() + split);
    prefixA.emplace(std::move(prefixStream));

    DriftReport prefixScan = significantDrifts(*prefixA, options.drift);
    auto admissible = [&](int t) {
      return t >= 0 && t + delta <= ref && prefixA->snapshotConsistent(t) &&
             prefixA->snapshotConsistent(t + delta);
    };
    for (int t : selectSnapshots(prefixScan, ref, options.kappa, options.budget))
      if (admissible(t)) driftTimesSel.push_back(t);
    driftWeights = sampleWeights(*prefixA, driftTimesSel, ref, options.weighting);
    for (int t = ref - delta; t >= 0 && static_cast<int>(uniformTimes.size()) < options.budget;
         --t)
      if (admissible(t)) uniformTimes.push_back(t);

    heads.reserve(static_cast<std::size_t>(numEntities) * classes);
    for (int e = 0; e < numEntities; ++e)
      for (int k = 1; k <= classes; ++k) {
        HeadData h;
        h.target =
            Fact::cls(options.classPrefix + std::to_string(k), Individual::named(entities[e]));
        h.index = buildIndex(*prefixA, h.target);
        h.testFeatures.reserve(testTimes.size());
        for (int t : testTimes) h.testFeatures.push_back(entailmentVector(full, t, h.index));
        heads.push_back(std::move(h));
      }
  }

  TrainOptions topts;
  topts.reference = ref;
  topts.delta = delta;
  topts.kappa = options.kappa;
  topts.budget = options.budget;
  topts.weighting = options.weighting;
  topts.loss = LossKind::Logistic;
  topts.learningRate = options.learningRate;
  topts.epochs = options.epochs;
  topts.l2 = options.l2;
  topts.seed = options.seed;
  topts.drift = options.drift;

  auto runSgd = [&](MethodReport& rep, const std::vector<int>& times,
                    const std::vector<double>& weights) {
    std::vector<std::optional<LinearModel>> models(heads.size());
    for (std::size_t hi = 0; hi < heads.size(); ++hi) {
      TrainingSet ts;
      ts.index = heads[hi].index;
      ts.times = times;
      ts.weights = weights;
      for (int t : times) {
        ts.features.push_back(entailmentVector(*prefixA, t, heads[hi].index));
        ts.labels.push_back(prefixA->snapshotEntails(t + delta, heads[hi].target) ? 1.0 : 0.0);
      }
      try {
        models[hi] = trainModel(ts, heads[hi].target, topts);
      } catch (const InsufficientSamples&) {
        rep.untrainedHeads += 1;
      }
    }
    for (const TestPoint& p : points) {
      int bestK = 1;
      double bestV = -std::numeric_limits<double>::infinity();
      for (int k = 1; k <= classes; ++k) {
        std::size_t hi = static_cast<std::size_t>(p.entity) * classes + k - 1;
        if (!models[hi]) continue;
        double v = decisionValue(*models[hi], heads[hi].testFeatures[p.timeIndex]);
        if (v > bestV) {
          bestV = v;
          bestK = k;
        }
      }
      score(rep, p, bestK);
    }
  };

  // Most recent defined label at or before t, class 1 when none exists yet.
  auto lastLabel = [&](int e, int t) {
    for (int u = t; u >= 0; --u)
      if (labels[e][u] > 0) return labels[e][u];
    return 1;
  };

  EvalReport report;
  report.trainSnapshots = split;
  report.testPoints = static_cast<int>(points.size());

  for (const std::string& name : methods) {
    auto start = std::chrono::steady_clock::now();
    MethodReport rep = makeReport(name, classes);
    if (name == kMethodDriftAware) {
      runSgd(rep, driftTimesSel, driftWeights);
    } else if (name == kMethodUniformSgd) {
      runSgd(rep, uniformTimes, std::vector<double>(uniformTimes.size(), 1.0));
    } else if (name == kMethodPersistence) {
      for (const TestPoint& p : points) score(rep, p, lastLabel(p.entity, p.t));
    } else {  // sliding-window majority
      for (const TestPoint& p : points) {
        std::map<int, int> countByClass;
        int predicted = 0;
        for (int u = std::max(0, p.t - options.slidingWindow + 1); u <= p.t; ++u) {
          int label = labels[p.entity][u];
          if (label == 0) continue;
          int c = ++countByClass[label];
          // Majority of the window; ties go to the label seen most recently.
          if (predicted == 0 || c >= countByClass[predicted]) predicted = label;
        }
        score(rep, p, predicted == 0 ? 1 : predicted);
      }
    }
    rep.accuracy = rep.total == 0 ? 0.0 : static_cast<double>(rep.correct) / rep.total;
    rep.runtimeMillis = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    report.methods.push_back(std::move(rep));
  }

  report.runtimeMillis = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - wallStart)
                             .count();
  return report;
}

std::string EvalReport::toJson() const {
  ordered_json j;
  j["trainSnapshots"] = trainSnapshots;
  j["testPoints"] = testPoints;
  j["runtimeMillis"] = runtimeMillis;
  j["methods"] = ordered_json::array();
  for (const MethodReport& m : methods) {
    ordered_json jm;
    jm["name"] = m.name;
    jm["accuracy"] = m.accuracy;
    jm["correct"] = m.correct;
    jm["total"] = m.total;
    jm["untrainedHeads"] = m.untrainedHeads;
    jm["runtimeMillis"] = m.runtimeMillis;
    jm["confusion"] = m.confusion;
    ordered_json jb;
    for (const auto& [name, stats] : m.buckets) {
      jb[name] = {{"correct", stats.correct},
                  {"total", stats.total},
                  {"accuracy", stats.accuracy()}};
    }
    jm["buckets"] = std::move(jb);
    j["methods"].push_back(std::move(jm));
  }
  return j.dump(2);
}

std::string EvalReport::toCsv() const {
  std::ostringstream out;
  out << "method,accuracy,correct,total,untrainedHeads,runtimeMillis\n";
  for (const MethodReport& m : methods)
    out << m.name << ',' << m.accuracy << ',' << m.correct << ',' << m.total << ','
        << m.untrainedHeads << ',' << m.runtimeMillis << '\n';
  return out.str();
}

}  // namespace ontostream
