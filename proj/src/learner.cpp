#include "ontostream/learner.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "json.hpp"
#include "ontostream/errors.hpp"

namespace ontostream {

namespace {

void checkSelectionArgs(int snapshots, int reference, double kappa, int budget) {
  if (reference < 0 || reference >= snapshots)
    throw InvalidArgument("reference snapshot " + std::to_string(reference) +
                          " outside stream of size " + std::to_string(snapshots));
  if (!(kappa >= 0.0 && kappa <= 1.0))
    throw InvalidArgument("kappa must lie in [0, 1], got " + std::to_string(kappa));
  if (budget < 1) throw InvalidArgument("budget must be at least 1");
}

// Fisher-Yates with plain modulo indexing: fully specified behavior for a
// given generator state, unlike std::shuffle, so training is reproducible
// across toolchains (model files embed no schedule, only the seed matters).
void deterministicShuffle(std::vector<int>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng() % i]);
}

std::string lossName(LossKind kind) {
  return kind == LossKind::Logistic ? "logistic" : "hinge";
}

LossKind lossFromName(const std::string& name) {
  if (name == "logistic") return LossKind::Logistic;
  if (name == "hinge") return LossKind::Hinge;
  throw InvalidArgument("unknown loss '" + name + "'");
}

}  // namespace

std::vector<int> selectSnapshots(const DriftReport& report, int reference, double kappa,
                                 int budget) {
  checkSelectionArgs(report.snapshots, reference, kappa, budget);

  const std::size_t capacity =
      static_cast<std::size_t>(std::min(budget, reference + 1));
  std::vector<int> picked{reference};
  std::set<int> seen{reference};
  auto pick = [&](int t) {
    if (seen.insert(t).second) picked.push_back(t);
  };

  // Drift onsets observable from the reference, best-significance first.
  std::vector<std::pair<double, int>> onsets;
  for (const auto& d : report.drifts)
    if (d.to <= reference) onsets.emplace_back(d.significance, d.from);
  std::sort(onsets.begin(), onsets.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second > b.second;
  });
  std::set<int> driftTimes;
  for (const auto& [sigma, t] : onsets) driftTimes.insert(t);

  const std::size_t quota =
      static_cast<std::size_t>(std::ceil(kappa * static_cast<double>(budget)));
  std::size_t taken = 0;
  for (const auto& [sigma, t] : onsets) {
    if (picked.size() >= capacity || taken >= quota) break;
    pick(t);
    ++taken;
  }

  for (int t = reference - 1; t >= 0 && picked.size() < capacity; --t)
    if (!driftTimes.count(t)) pick(t);
  for (int t = reference - 1; t >= 0 && picked.size() < capacity; --t) pick(t);
  return picked;
}

std::vector<int> selectSnapshots(const StreamAnalysis& a, int reference, double kappa, int budget,
                                 const DriftOptions& drift) {
  return selectSnapshots(significantDrifts(a, drift), reference, kappa, budget);
}

std::vector<double> sampleWeights(const StreamAnalysis& a, const std::vector<int>& times,
                                  int reference, WeightingMode mode) {
  std::vector<double> w;
  w.reserve(times.size());
  for (int t : times) {
    if (mode == WeightingMode::Uniform) {
      w.push_back(1.0);
      continue;
    }
    double c = consistencyEntry(a, t, reference);
    if (mode == WeightingMode::Consistent)
      w.push_back(c > 0.0 ? c : 0.0);
    else
      w.push_back(c < 0.0 ? -c : 0.0);
  }
  return w;
}

TrainingSet buildTrainingSet(const StreamAnalysis& a, const Fact& target,
                             const TrainOptions& options) {
  int reference = options.reference < 0 ? a.size() - 1 : options.reference;
  if (options.delta < 1) throw InvalidArgument("delta must be at least 1");
  checkSelectionArgs(a.size(), reference, options.kappa, options.budget);

  std::vector<int> selected =
      selectSnapshots(a, reference, options.kappa, options.budget, options.drift);

  TrainingSet ts;
  ts.index = buildIndex(a, target);
  for (int t : selected) {
    int labelTime = t + options.delta;
    if (labelTime > reference) continue;
    if (!a.snapshotConsistent(t) || !a.snapshotConsistent(labelTime)) continue;
    ts.times.push_back(t);
    ts.features.push_back(entailmentVector(a, t, ts.index));
    ts.labels.push_back(a.snapshotEntails(labelTime, target) ? 1.0 : 0.0);
  }
  ts.weights = sampleWeights(a, ts.times, reference, options.weighting);
  return ts;
}

double lossValue(LossKind kind, double y, double f) {
  double z = y * f;
  if (kind == LossKind::Hinge) return z < 1.0 ? 1.0 - z : 0.0;
  if (z < -30.0) return -z;  // log(1 + e^-z) -> -z, avoids overflow
  return std::log1p(std::exp(-z));
}

double lossSlope(LossKind kind, double y, double f) {
  double z = y * f;
  if (kind == LossKind::Hinge) return z < 1.0 ? -y : 0.0;
  if (z > 30.0) return 0.0;
  if (z < -30.0) return -y;
  return -y / (1.0 + std::exp(z));
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

namespace {

void checkAligned(const TrainingSet& ts, std::size_t m) {
  if (ts.labels.size() != ts.features.size() || ts.weights.size() != ts.features.size())
    throw InvalidArgument("training set labels/weights do not line up with its features");
  for (const auto& x : ts.features)
    if (x.size() != m)
      throw InvalidArgument("feature vector width " + std::to_string(x.size()) +
                            " does not match expected " + std::to_string(m));
}

}  // namespace

double objective(const TrainingSet& ts, const std::vector<double>& weights, double bias,
                 LossKind loss, double l2) {
  checkAligned(ts, weights.size());
  double j = 0.0;
  for (std::size_t i = 0; i < ts.features.size(); ++i) {
    double y = 2.0 * ts.labels[i] - 1.0;
    j += ts.weights[i] * lossValue(loss, y, dot(weights, ts.features[i]) + bias);
  }
  return j + 0.5 * l2 * dot(weights, weights);
}

std::pair<std::vector<double>, double> objectiveGradient(const TrainingSet& ts,
                                                         const std::vector<double>& weights,
                                                         double bias, LossKind loss, double l2) {
  checkAligned(ts, weights.size());
  std::vector<double> gw(weights.size(), 0.0);
  double gb = 0.0;
  for (std::size_t i = 0; i < ts.features.size(); ++i) {
    double y = 2.0 * ts.labels[i] - 1.0;
    double g = ts.weights[i] * lossSlope(loss, y, dot(weights, ts.features[i]) + bias);
    for (std::size_t k = 0; k < gw.size(); ++k) gw[k] += g * ts.features[i][k];
    gb += g;
  }
  for (std::size_t k = 0; k < gw.size(); ++k) gw[k] += l2 * weights[k];
  return {std::move(gw), gb};
}

LinearModel trainModel(const TrainingSet& ts, const Fact& target, const TrainOptions& options) {
  const std::size_t m = ts.index.facts.size();
  const std::size_t samples = ts.features.size();
  checkAligned(ts, m);
  if (samples < 2)
    throw InsufficientSamples("need at least 2 training samples, got " +
                              std::to_string(samples));
  if (std::all_of(ts.weights.begin(), ts.weights.end(), [](double w) { return w == 0.0; }))
    throw InsufficientSamples("every sample weight is zero; nothing to fit");
  if (options.epochs < 1) throw InvalidArgument("epochs must be at least 1");
  if (!(options.learningRate > 0.0)) throw InvalidArgument("learning rate must be positive");
  if (options.l2 < 0.0) throw InvalidArgument("l2 penalty must be non-negative");

  LinearModel model;
  model.target = target;
  model.loss = options.loss;
  model.indexDigest = ts.index.digest;
  model.weights.assign(m, 0.0);
  model.bias = 0.0;

  std::mt19937_64 rng(options.seed);
  std::vector<int> order(samples);
  for (std::size_t i = 0; i < samples; ++i) order[i] = static_cast<int>(i);
  const double ridgeShare = options.l2 / static_cast<double>(samples);

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    deterministicShuffle(order, rng);
    for (int i : order) {
      const std::vector<double>& x = ts.features[static_cast<std::size_t>(i)];
      double y = 2.0 * ts.labels[static_cast<std::size_t>(i)] - 1.0;
      double f = dot(model.weights, x) + model.bias;
      double g = ts.weights[static_cast<std::size_t>(i)] * lossSlope(options.loss, y, f);
      for (std::size_t k = 0; k < m; ++k)
        model.weights[k] -= options.learningRate * (g * x[k] + ridgeShare * model.weights[k]);
      model.bias -= options.learningRate * g;
    }
  }
  return model;
}

LinearModel train(const StreamAnalysis& a, const Fact& target, const TrainOptions& options) {
  return trainModel(buildTrainingSet(a, target, options), target, options);
}

double decisionValue(const LinearModel& model, const std::vector<double>& features) {
  if (features.size() != model.weights.size())
    throw InvalidArgument("feature vector has " + std::to_string(features.size()) +
                          " entries, model expects " + std::to_string(model.weights.size()));
  return dot(model.weights, features) + model.bias;
}

bool predict(const LinearModel& model, const std::vector<double>& features) {
  return decisionValue(model, features) >= 0.0;
}

bool predictAt(const StreamAnalysis& a, const LinearModel& model, int t) {
  FactIndex index = buildIndex(a, model.target);
  if (index.digest != model.indexDigest)
    throw IndexMismatch("stream catalogue digest " + index.digest +
                        " differs from the one the model was trained on (" +
                        model.indexDigest + ")");
  return predict(model, entailmentVector(a, t, index));
}

std::string LinearModel::toJson() const {
  nlohmann::ordered_json j;
  j["target"] = target.text();
  j["loss"] = lossName(loss);
  j["indexDigest"] = indexDigest;
  j["bias"] = bias;
  j["weights"] = weights;
  return j.dump(2);
}

LinearModel LinearModel::fromJson(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed model document: ") + e.what());
  }
  for (const char* key : {"target", "loss", "indexDigest", "bias", "weights"})
    if (!j.contains(key))
      throw InvalidArgument(std::string("model document missing '") + key + "'");
  LinearModel m;
  m.target = Fact::parse(j["target"].get<std::string>());
  m.loss = lossFromName(j["loss"].get<std::string>());
  m.indexDigest = j["indexDigest"].get<std::string>();
  m.bias = j["bias"].get<double>();
  m.weights = j["weights"].get<std::vector<double>>();
  return m;
}

}  // namespace ontostream
