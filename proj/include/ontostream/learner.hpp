#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ontostream/drift.hpp"
#include "ontostream/embeddings.hpp"
#include "ontostream/stream.hpp"

namespace ontostream {

enum class LossKind { Logistic, Hinge };

// How much each past snapshot counts while fitting. `Consistent` trusts
// snapshots that agree with the reference snapshot, `Inconsistent` trusts the
// ones that contradict it (useful right after a drift, when agreement means
// staleness), `Uniform` ignores agreement entirely.
enum class WeightingMode { Uniform, Consistent, Inconsistent };

struct TrainOptions {
  int reference = -1;  // snapshot the prediction is made from; -1 = last
  int delta = 1;       // forecast horizon: features at i, label at i + delta
  // Snapshot-selection shape: at most `budget` snapshots total, and up to
  // ceil(kappa * budget) of the additions reserved for drift times first.
  double kappa = 0.5;
  int budget = 8;
  WeightingMode weighting = WeightingMode::Uniform;
  LossKind loss = LossKind::Logistic;
  double learningRate = 0.1;
  int epochs = 40;
  double l2 = 1e-3;  // coefficient on 0.5 * ||weights||^2; bias unpenalized
  std::uint64_t seed = 1;
  DriftOptions drift;  // options for the drift scan behind snapshot selection
};

// Chooses which past snapshots to learn from, newest knowledge first:
// the reference itself, then drift onsets (highest significance first, ties
// broken toward recent), then calm times newest-first, then whatever is left,
// never exceeding min(budget, reference + 1) snapshots in total.
std::vector<int> selectSnapshots(const DriftReport& report, int reference, double kappa,
                                 int budget);
std::vector<int> selectSnapshots(const StreamAnalysis& a, int reference, double kappa, int budget,
                                 const DriftOptions& drift = {});

// Per-snapshot trust in [0, 1] relative to the reference snapshot, derived
// from pairwise agreement (see consistencyEntry). Throws InconsistentSnapshot
// when agreement with the reference is undefined.
std::vector<double> sampleWeights(const StreamAnalysis& a, const std::vector<int>& times,
                                  int reference, WeightingMode mode);

// Materialized supervised problem: predict whether `target` holds delta steps
// after each selected snapshot, from that snapshot's entailment vector.
struct TrainingSet {
  FactIndex index;                            // catalogue with the target excluded
  std::vector<int> times;                     // sample i features come from times[i]
  std::vector<std::vector<double>> features;  // entailment vectors
  std::vector<double> labels;                 // 1 if target entailed at times[i] + delta
  std::vector<double> weights;                // per-sample trust
};

// Selected snapshots become samples when their label time stays within the
// reference and both endpoints are individually consistent.
TrainingSet buildTrainingSet(const StreamAnalysis& a, const Fact& target,
                             const TrainOptions& options);

struct LinearModel {
  Fact target;
  LossKind loss = LossKind::Logistic;
  std::string indexDigest;  // catalogue the weights are aligned with
  std::vector<double> weights;
  double bias = 0.0;

  std::string toJson() const;
  static LinearModel fromJson(const std::string& text);
};

// Loss pieces over the signed label y in {-1, +1} and the decision value f.
double lossValue(LossKind kind, double y, double f);
double lossSlope(LossKind kind, double y, double f);  // dL/df

// Weighted empirical risk plus the ridge penalty.
double objective(const TrainingSet& ts, const std::vector<double>& weights, double bias,
                 LossKind loss, double l2);
// Full-batch gradient of `objective` with respect to (weights, bias).
std::pair<std::vector<double>, double> objectiveGradient(const TrainingSet& ts,
                                                         const std::vector<double>& weights,
                                                         double bias, LossKind loss, double l2);

// Stochastic gradient descent from zero weights: `epochs` passes, each pass
// visiting every sample once in an order drawn from a seed-fixed generator,
// stepping along weight * lossSlope * features plus the sample's share of the
// ridge term. Deterministic given options. Throws InsufficientSamples when
// fewer than two samples survive or every sample weight is zero.
LinearModel trainModel(const TrainingSet& ts, const Fact& target, const TrainOptions& options);
LinearModel train(const StreamAnalysis& a, const Fact& target, const TrainOptions& options);

double decisionValue(const LinearModel& model, const std::vector<double>& features);
bool predict(const LinearModel& model, const std::vector<double>& features);
// Applies the model at snapshot t of a stream, rebuilding the fact catalogue
// (target excluded) and refusing to run if its digest differs from the one
// the model was trained against.
bool predictAt(const StreamAnalysis& a, const LinearModel& model, int t);

}  // namespace ontostream
