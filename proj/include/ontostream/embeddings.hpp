#pragma once

#include <string>
#include <vector>

#include "ontostream/stream.hpp"

namespace ontostream {

// Canonical, order-stable catalogue of every dynamic fact observed in a
// stream. Entailment vectors are expressed over this index; a model trained
// against one index refuses to run against another (digest check).
struct FactIndex {
  std::vector<Fact> facts;  // ascending canonical order, no duplicates
  std::string digest;       // FNV-1a over the fact texts

  int size() const { return static_cast<int>(facts.size()); }
  // Position of a fact, or -1 when the index does not contain it.
  int indexOf(const Fact& f) const;

  std::string toJson() const;
  // Rejects documents whose stored digest does not match the listed facts.
  static FactIndex fromJson(const std::string& text);
};

std::string factIndexDigest(const std::vector<Fact>& facts);

// All dynamic (non-static) class and role facts entailed by any individually
// consistent snapshot. The overload with `exclude` drops one fact: a
// prediction target must not appear in its own feature space.
FactIndex buildIndex(const StreamAnalysis& a);
FactIndex buildIndex(const StreamAnalysis& a, const Fact& exclude);

// 0/1 vector over the index: which catalogued facts snapshot t entails. On an
// inconsistent snapshot every entry is 1 (such a snapshot entails anything).
std::vector<double> entailmentVector(const StreamAnalysis& a, int t, const FactIndex& index);

// Agreement between snapshots i and j, in [-1, 1]: the proportion of their
// dynamic class facts that are shared, shifted down by one when the two
// snapshots contradict each other. 1 means identical and compatible, 0 means
// disjoint but compatible, negative means contradictory. Symmetric. Throws
// InconsistentSnapshot when either snapshot is self-contradictory.
double consistencyEntry(const StreamAnalysis& a, int i, int j);

// Entries (i, 0) .. (i, i): how snapshot i relates to its whole past.
std::vector<double> consistencyVector(const StreamAnalysis& a, int i);

}  // namespace ontostream
