#include "ontostream/drift.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "ontostream/errors.hpp"

namespace ontostream {

namespace {

const UniverseSpec kMentioned{FactScope::ClassAndRole, true, true};
const UniverseSpec kDynamic{FactScope::ClassAndRole, false, false};

void checkEpsilon(double epsilon) {
  if (!(epsilon >= 0.0) || epsilon >= 1.0)
    throw InvalidArgument("epsilon must lie in [0, 1), got " + std::to_string(epsilon));
}

// Universe of a single snapshot, empty when that snapshot is inconsistent.
std::set<Fact> snapshotUniverse(const StreamAnalysis& a, int t, const UniverseSpec& spec) {
  if (!a.snapshotConsistent(t)) return {};
  return a.universe({t, t}, spec);
}

std::set<Fact> evidenceCandidates(const StreamAnalysis& a, int i, int j) {
  std::set<Fact> candidates;
  for (int t : {i, j})
    for (const Fact& f : snapshotUniverse(a, t, kMentioned))
      if (!f.isRole()) candidates.insert(f);
  for (int k = 0; k <= std::max(i, j); ++k)
    for (const Fact& f : snapshotUniverse(a, k, kDynamic))
      if (!f.isRole()) candidates.insert(f);
  return candidates;
}

}  // namespace

double estimate(const StreamAnalysis& a, const Fact& g, int k) {
  if (k < 0 || k > a.size())
    throw WindowOutOfRange("estimate time " + std::to_string(k) + " outside [0, " +
                           std::to_string(a.size()) + "]");
  const std::string& root = g.subject().rootName();
  int mentioned = 0;
  int entailed = 0;
  for (int t = 0; t < k; ++t) {
    if (root.empty() || !a.mentions(t, root)) continue;
    ++mentioned;
    if (a.snapshotEntails(t, g)) ++entailed;
  }
  if (mentioned == 0) return 0.0;
  return static_cast<double>(entailed) / static_cast<double>(mentioned);
}

double estimate(const Stream& s, const Fact& g, int k) {
  return estimate(StreamAnalysis(s), g, k);
}

std::set<Fact> predictionChangeEvidence(const StreamAnalysis& a, int i, int j, double epsilon) {
  checkEpsilon(epsilon);
  std::set<Fact> evidence;
  for (const Fact& g : evidenceCandidates(a, i, j))
    if (std::abs(estimate(a, g, i) - estimate(a, g, j)) > epsilon) evidence.insert(g);
  return evidence;
}

double significance(const StreamAnalysis& a, int i, int j, double epsilon) {
  std::set<Fact> evidence = predictionChangeEvidence(a, i, j, epsilon);
  std::set<Fact> universe = snapshotUniverse(a, i, kMentioned);
  for (const Fact& f : snapshotUniverse(a, j, kMentioned)) universe.insert(f);
  if (universe.empty()) return 0.0;
  return static_cast<double>(evidence.size()) / static_cast<double>(universe.size());
}

bool changeAcceptable(const StreamAnalysis& a, const Fact& g, int j) {
  return !a.windowSaturation({0, j}, {g}).inconsistent();
}

DriftReport significantDrifts(const StreamAnalysis& a, const DriftOptions& options) {
  checkEpsilon(options.epsilon);
  if (options.sigmaMin < 0.0 || options.sigmaMin > 1.0)
    throw InvalidArgument("sigmaMin must lie in [0, 1], got " +
                          std::to_string(options.sigmaMin));

  DriftReport report;
  report.options = options;
  report.snapshots = a.size();
  const int n = a.size();

  // The sweep over adjacent pairs keeps running estimate counters per class
  // fact instead of recomputing both estimates from scratch for every pair.
  // For a fact with `mentioned` mention snapshots before the sync point, of
  // which `entailed` entail it, the estimate at the sync point is
  // entailed/mentioned, exactly as estimate() computes it.
  struct Counts {
    int mentioned = 0;
    int entailed = 0;
  };
  std::map<std::string, std::vector<std::pair<Fact, Counts>>> byRoot;
  std::set<Fact> pooled;  // class facts drawn from dynamic universes so far

  auto backfill = [&a](const Fact& f, int upTo) {
    Counts c;
    for (int t : a.mentionTimes(f.subject().rootName())) {
      if (t >= upTo) break;
      ++c.mentioned;
      if (a.snapshotEntails(t, f)) ++c.entailed;
    }
    return c;
  };
  // Pool the class facts of snapshot k's dynamic universe, with counters
  // covering snapshots [0, upTo).
  auto absorb = [&](int k, int upTo) {
    if (k >= n) return;
    for (const Fact& f : snapshotUniverse(a, k, kDynamic)) {
      if (f.isRole() || !pooled.insert(f).second) continue;
      byRoot[f.subject().rootName()].emplace_back(f, backfill(f, upTo));
    }
  };
  auto fold = [&](int t) {
    for (auto& [root, entries] : byRoot) {
      if (!a.mentions(t, root)) continue;
      for (auto& [fact, counts] : entries) {
        ++counts.mentioned;
        if (a.snapshotEntails(t, fact)) ++counts.entailed;
      }
    }
  };

  absorb(0, 1);
  absorb(1, 1);
  absorb(2, 1);

  for (int i = 1; i + 1 < n; ++i) {
    // Invariant: pooled covers snapshots 0..i+1, counters cover [0, i).
    PairDiagnostics diag;
    diag.from = i;
    diag.to = i + 1;

    bool skip = options.useChangeGuard && a.prefixConsistent(i) && a.prefixConsistent(i + 1) &&
                a.changes({0, i}, {0, i + 1}, kDynamic).newFacts.empty();
    if (!skip) {
      std::set<Fact> evidence;
      for (const auto& [root, entries] : byRoot) {
        bool present = a.mentions(i, root);
        for (const auto& [fact, counts] : entries) {
          double before = counts.mentioned == 0 ? 0.0
                                                : static_cast<double>(counts.entailed) /
                                                      static_cast<double>(counts.mentioned);
          int m = counts.mentioned + (present ? 1 : 0);
          int e = counts.entailed + (present && a.snapshotEntails(i, fact) ? 1 : 0);
          double after = m == 0 ? 0.0 : static_cast<double>(e) / static_cast<double>(m);
          if (std::abs(before - after) > options.epsilon) evidence.insert(fact);
        }
      }
      std::set<Fact> universe = snapshotUniverse(a, i, kMentioned);
      for (const Fact& f : snapshotUniverse(a, i + 1, kMentioned)) universe.insert(f);
      // Mentioned-universe class facts outside the dynamic pool (static facts
      // over mentioned roots) are still candidates; they are few, so the
      // one-shot estimate() path is fine for them.
      for (const Fact& f : universe) {
        if (f.isRole() || pooled.count(f)) continue;
        if (std::abs(estimate(a, f, i) - estimate(a, f, i + 1)) > options.epsilon)
          evidence.insert(f);
      }
      diag.significance = universe.empty() ? 0.0
                                           : static_cast<double>(evidence.size()) /
                                                 static_cast<double>(universe.size());
      diag.evidenceCount = evidence.size();
      diag.sudden = !a.prefixConsistent(i + 1);
      diag.significant = diag.significance >= options.sigmaMin;
      if (diag.sudden && diag.significant && !evidence.empty()) {
        DriftEntry entry;
        entry.from = i;
        entry.to = i + 1;
        entry.significance = diag.significance;
        entry.witness = *evidence.begin();
        entry.evidence = std::move(evidence);
        report.drifts.push_back(std::move(entry));
      }
    } else {
      diag.skipped = true;
    }
    report.pairs.push_back(diag);

    if (i + 2 < n) {
      fold(i);
      absorb(i + 2, i + 1);
    }
  }
  return report;
}

DriftReport significantDrifts(const Stream& s, const DriftOptions& options) {
  return significantDrifts(StreamAnalysis(s), options);
}

std::string DriftReport::toJson() const {
  nlohmann::ordered_json j;
  j["options"] = {{"epsilon", options.epsilon},
                  {"sigmaMin", options.sigmaMin},
                  {"useChangeGuard", options.useChangeGuard}};
  j["snapshots"] = snapshots;
  j["pairs"] = nlohmann::ordered_json::array();
  for (const auto& p : pairs)
    j["pairs"].push_back({{"from", p.from},
                          {"to", p.to},
                          {"significance", p.significance},
                          {"evidenceCount", p.evidenceCount},
                          {"sudden", p.sudden},
                          {"significant", p.significant},
                          {"skipped", p.skipped}});
  j["drifts"] = nlohmann::ordered_json::array();
  for (const auto& d : drifts) {
    nlohmann::ordered_json evidence = nlohmann::ordered_json::array();
    for (const auto& f : d.evidence) evidence.push_back(f.text());
    j["drifts"].push_back({{"from", d.from},
                           {"to", d.to},
                           {"significance", d.significance},
                           {"witness", d.witness.text()},
                           {"evidence", std::move(evidence)}});
  }
  return j.dump(2);
}

std::string DriftReport::toCsv() const {
  std::ostringstream out;
  out << "from,to,significance,evidenceCount,sudden,significant,skipped,drift\n";
  for (const auto& p : pairs) {
    bool isDrift = std::any_of(drifts.begin(), drifts.end(),
                               [&](const DriftEntry& d) { return d.from == p.from; });
    out << p.from << ',' << p.to << ',' << p.significance << ',' << p.evidenceCount << ','
        << (p.sudden ? 1 : 0) << ',' << (p.significant ? 1 : 0) << ',' << (p.skipped ? 1 : 0)
        << ',' << (isDrift ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace ontostream
