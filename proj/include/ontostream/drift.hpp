#pragma once

#include <set>
#include <string>
#include <vector>

#include "ontostream/stream.hpp"

namespace ontostream {

// Empirical entailment frequency of fact g before time k: the fraction of
// snapshots t < k that mention g's root individual and entail g. 0 when no
// earlier snapshot mentions it. Inconsistent snapshots entail everything.
double estimate(const StreamAnalysis& a, const Fact& g, int k);
double estimate(const Stream& s, const Fact& g, int k);

// Class facts whose estimate moves by more than epsilon between times i and
// j. Candidates are drawn from the mentioned-individual universes of i and j
// plus every snapshot universe up to max(i, j); inconsistent snapshots
// contribute no candidates.
std::set<Fact> predictionChangeEvidence(const StreamAnalysis& a, int i, int j, double epsilon);

// Evidence size relative to the mentioned-individual universes of the two
// snapshots: |evidence| / |universe(i) + universe(j)|. 0 when the denominator
// is empty.
double significance(const StreamAnalysis& a, int i, int j, double epsilon);

// Whether fact g can be added to everything asserted up to time j without
// contradiction. False for every fact once the cumulative union itself is
// inconsistent.
bool changeAcceptable(const StreamAnalysis& a, const Fact& g, int j);

struct DriftOptions {
  double epsilon = 1.0 / 3.0;
  double sigmaMin = 0.5;
  // Skip a pair early when both prefixes are consistent and the cumulative
  // closure gained no facts; output-equivalent, just cheaper.
  bool useChangeGuard = true;
};

// One detected drift between adjacent snapshots.
struct DriftEntry {
  int from = 0;
  int to = 0;
  double significance = 0.0;
  std::set<Fact> evidence;
  Fact witness;  // lexicographically least evidence fact
};

// Per-pair diagnostics, including pairs that did not qualify.
struct PairDiagnostics {
  int from = 0;
  int to = 0;
  double significance = 0.0;
  std::size_t evidenceCount = 0;
  bool sudden = false;       // cumulative union through `to` is inconsistent
  bool significant = false;  // significance >= sigmaMin
  bool skipped = false;      // change guard short-circuited the pair
};

struct DriftReport {
  DriftOptions options;
  int snapshots = 0;
  std::vector<PairDiagnostics> pairs;  // adjacent pairs (i, i+1), i >= 1
  std::vector<DriftEntry> drifts;      // sudden and significant pairs

  std::string toJson() const;
  std::string toCsv() const;
};

// Scans all adjacent snapshot pairs (1,2) .. (n-2, n-1). A pair enters
// `drifts` when the change is sudden (the cumulative union through the pair
// is inconsistent, so the new knowledge cannot merge with the old) and its
// significance reaches sigmaMin.
DriftReport significantDrifts(const StreamAnalysis& a, const DriftOptions& options = {});
DriftReport significantDrifts(const Stream& s, const DriftOptions& options = {});

}  // namespace ontostream
