#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "ontostream/ontoformat.hpp"
#include "ontostream/reasoner.hpp"

namespace ontostream {

// A timestamped assertion sequence over a fixed background ontology.
struct Stream {
  Ontology background;
  std::vector<std::vector<Axiom>> snapshots;

  int size() const { return static_cast<int>(snapshots.size()); }

  static Stream fromDocument(const Document& merged);
  static Stream fromDocuments(const Document& ontology, const Document& stream);
  Document toDocument() const;
};

// Inclusive snapshot interval [from, to].
struct Window {
  int from = 0;
  int to = 0;

  Window() = default;
  Window(int f, int t) : from(f), to(t) {}
  bool operator==(const Window& o) const = default;
};

enum class FactScope { ClassOnly, ClassAndRole };

// Which entailed facts make up a window's fact universe.
struct UniverseSpec {
  FactScope scope = FactScope::ClassAndRole;
  // Keep facts the background ontology alone already entails.
  bool includeStatic = false;
  // Keep only facts all of whose individuals are rooted at names the window's
  // assertions mention.
  bool restrictToMentioned = false;
};

// Difference between two windows' fact universes.
struct ChangeSet {
  std::set<Fact> newFacts;        // entailed after, not before
  std::set<Fact> obsoleteFacts;   // entailed before, not after
  std::set<Fact> invariantFacts;  // entailed in both
};

// Cached per-stream reasoning state. Instances are single-threaded: the lazy
// caches are not synchronized.
class StreamAnalysis {
 public:
  explicit StreamAnalysis(Stream stream);
  StreamAnalysis(StreamAnalysis&&) noexcept;
  StreamAnalysis& operator=(StreamAnalysis&&) noexcept;
  ~StreamAnalysis();

  const Stream& stream() const;
  int size() const;

  // --- single snapshots (background + S(t)) ---
  bool snapshotConsistent(int t) const;
  // Everything entailed at t: classes and roles, static facts included.
  // Throws InconsistentSnapshot if background + S(t) has no model.
  const std::set<Fact>& snapshotFacts(int t) const;
  // Total read: on an inconsistent snapshot every fact counts as entailed.
  bool snapshotEntails(int t, const Fact& fact) const;
  const std::set<std::string>& mentionedRoots(int t) const;
  bool mentions(int t, const std::string& rootName) const;
  // Ascending snapshot indices whose assertions mention the given root.
  const std::vector<int>& mentionTimes(const std::string& rootName) const;

  // --- windows (background + S(from..to)) ---
  bool prefixConsistent(int t) const;  // window [0, t]
  bool windowConsistent(const Window& w) const;
  Saturation windowSaturation(const Window& w) const;
  // Window union plus extra ground facts (used to probe whether a single fact
  // can be added without contradiction).
  Saturation windowSaturation(const Window& w, const std::set<Fact>& extraFacts) const;
  // Consistency of background + S(i) + S(j) for an arbitrary snapshot pair.
  bool pairConsistent(int i, int j) const;

  // Throws InconsistentWindow when the window union has no model.
  std::set<Fact> universe(const Window& w, const UniverseSpec& spec) const;
  ChangeSet changes(const Window& before, const Window& after,
                    const UniverseSpec& spec = UniverseSpec{}) const;

  // Facts entailed by the background ontology alone.
  const std::set<Fact>& backgroundFacts() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot conveniences over a bare stream.
std::set<Fact> universe(const Stream& s, const Window& w, const UniverseSpec& spec);
ChangeSet changes(const Stream& s, const Window& before, const Window& after,
                  const UniverseSpec& spec = UniverseSpec{});

}  // namespace ontostream
