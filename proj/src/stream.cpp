#include "ontostream/stream.hpp"

#include <algorithm>
#include <optional>

#include "ontostream/errors.hpp"

namespace ontostream {

Stream Stream::fromDocument(const Document& merged) {
  Stream s;
  s.background.tbox = merged.tbox;
  s.background.abox = merged.abox;
  s.snapshots = merged.snapshots;
  return s;
}

Stream Stream::fromDocuments(const Document& ontology, const Document& stream) {
  return fromDocument(mergeDocuments(ontology, stream));
}

Document Stream::toDocument() const {
  Document d;
  d.tbox = background.tbox;
  d.abox = background.abox;
  d.snapshots = snapshots;
  return d;
}

struct StreamAnalysis::Impl {
  Stream stream;
  TBoxIndex index;
  std::set<Fact> backgroundGround;

  // lazy caches, one slot per snapshot
  std::vector<std::optional<std::set<Fact>>> snapGround;
  std::vector<std::optional<bool>> snapOk;
  std::vector<std::optional<std::set<Fact>>> snapFacts;
  std::vector<std::optional<std::set<std::string>>> snapRoots;
  std::vector<std::optional<bool>> prefixOk;
  std::optional<std::set<Fact>> bgFacts;
  std::map<int, std::set<Fact>> prefixFacts;          // raw fact view of [0, t]
  std::map<std::pair<int, int>, bool> pairOk;         // background + S(i) + S(j)
  std::map<std::tuple<int, int, int>, std::set<Fact>> uniCache;  // (from, to, spec bits)
  std::optional<std::map<std::string, std::vector<int>>> mentionIndex;

  explicit Impl(Stream s)
      : stream(std::move(s)),
        index(normalize(stream.background.tbox)),
        backgroundGround(skolemize(stream.background.abox)) {
    const std::size_t n = stream.snapshots.size();
    snapGround.resize(n);
    snapOk.resize(n);
    snapFacts.resize(n);
    snapRoots.resize(n);
    prefixOk.resize(n);
  }

  void checkIndex(int t) const {
    if (t < 0 || t >= stream.size())
      throw WindowOutOfRange("snapshot " + std::to_string(t) + " outside [0, " +
                             std::to_string(stream.size() - 1) + "]");
  }

  void checkWindow(const Window& w) const {
    if (w.from < 0 || w.to < w.from || w.to >= stream.size())
      throw WindowOutOfRange("window [" + std::to_string(w.from) + ", " +
                             std::to_string(w.to) + "] outside stream of size " +
                             std::to_string(stream.size()));
  }

  const std::set<Fact>& ground(int t) {
    if (!snapGround[t]) snapGround[t] = skolemize(stream.snapshots[t]);
    return *snapGround[t];
  }

  Saturation saturateSnapshot(int t) {
    std::set<Fact> g = backgroundGround;
    const auto& sg = ground(t);
    g.insert(sg.begin(), sg.end());
    return saturate(index, g);
  }

  void materializeSnapshot(int t) {
    if (snapOk[t]) return;
    Saturation sat = saturateSnapshot(t);
    snapOk[t] = !sat.inconsistent();
    if (*snapOk[t]) snapFacts[t] = sat.allFacts(true);
  }

  const std::set<std::string>& roots(int t) {
    if (!snapRoots[t]) {
      std::set<std::string> r;
      for (const Fact& f : ground(t)) {
        if (!f.subject().rootName().empty()) r.insert(f.subject().rootName());
        if (f.isRole() && !f.object().rootName().empty()) r.insert(f.object().rootName());
      }
      snapRoots[t] = std::move(r);
    }
    return *snapRoots[t];
  }

  // Consistency of [0, t], computed in one ascending pass; once a prefix goes
  // inconsistent every longer prefix is too.
  bool prefix(int t) {
    if (prefixOk[t]) return *prefixOk[t];
    std::set<Fact> g = backgroundGround;
    bool ok = true;
    for (int k = 0; k <= t; ++k) {
      const auto& sg = ground(k);
      g.insert(sg.begin(), sg.end());
      if (!ok) {
        prefixOk[k] = false;
        continue;
      }
      if (prefixOk[k]) {
        ok = *prefixOk[k];
        continue;
      }
      ok = !saturate(index, g).inconsistent();
      prefixOk[k] = ok;
    }
    return *prefixOk[t];
  }

  Saturation saturateWindow(const Window& w) {
    std::set<Fact> g = backgroundGround;
    for (int t = w.from; t <= w.to; ++t) {
      const auto& sg = ground(t);
      g.insert(sg.begin(), sg.end());
    }
    return saturate(index, g);
  }

  const std::set<Fact>& staticFacts() {
    if (!bgFacts) {
      Saturation sat = saturate(index, backgroundGround);
      if (sat.inconsistent())
        throw InconsistentWindow("background ontology is inconsistent");
      bgFacts = sat.allFacts(true);
    }
    return *bgFacts;
  }

  std::set<std::string> windowRoots(const Window& w) {
    std::set<std::string> r;
    for (int t = w.from; t <= w.to; ++t) {
      const auto& rt = roots(t);
      r.insert(rt.begin(), rt.end());
    }
    return r;
  }

  // Raw (unfiltered) fact view of a window union, or nullptr when the union
  // is inconsistent. Single snapshots and prefixes are cached; other windows
  // are computed into `scratch`.
  const std::set<Fact>* rawWindowFacts(const Window& w, std::set<Fact>& scratch) {
    if (w.from == w.to) {
      materializeSnapshot(w.from);
      return *snapOk[w.from] ? &*snapFacts[w.from] : nullptr;
    }
    if (w.from == 0) {
      if (!prefix(w.to)) return nullptr;
      auto it = prefixFacts.find(w.to);
      if (it == prefixFacts.end())
        it = prefixFacts.emplace(w.to, saturateWindow(w).allFacts(true)).first;
      return &it->second;
    }
    Saturation sat = saturateWindow(w);
    if (sat.inconsistent()) return nullptr;
    scratch = sat.allFacts(true);
    return &scratch;
  }

  std::set<Fact> universeOf(const Window& w, const UniverseSpec& spec) {
    checkWindow(w);
    int bits = (spec.scope == FactScope::ClassAndRole ? 4 : 0) +
               (spec.includeStatic ? 2 : 0) + (spec.restrictToMentioned ? 1 : 0);
    auto key = std::make_tuple(w.from, w.to, bits);
    if (auto it = uniCache.find(key); it != uniCache.end()) return it->second;

    std::set<Fact> scratch;
    const std::set<Fact>* raw = rawWindowFacts(w, scratch);
    if (!raw)
      throw InconsistentWindow("window [" + std::to_string(w.from) + ", " +
                               std::to_string(w.to) + "] is inconsistent");
    std::set<Fact> facts;
    if (spec.scope == FactScope::ClassAndRole) {
      facts = *raw;
    } else {
      for (const Fact& f : *raw)
        if (!f.isRole()) facts.insert(f);
    }
    if (!spec.includeStatic) {
      const std::set<Fact>& bg = staticFacts();
      std::set<Fact> filtered;
      std::set_difference(facts.begin(), facts.end(), bg.begin(), bg.end(),
                          std::inserter(filtered, filtered.end()));
      facts = std::move(filtered);
    }
    if (spec.restrictToMentioned) {
      std::set<std::string> roots = windowRoots(w);
      std::set<Fact> filtered;
      for (const Fact& f : facts) {
        if (!roots.count(f.subject().rootName())) continue;
        if (f.isRole() && !roots.count(f.object().rootName())) continue;
        filtered.insert(f);
      }
      facts = std::move(filtered);
    }
    if (w.from == 0 || w.from == w.to) uniCache.emplace(key, facts);
    return facts;
  }
};

StreamAnalysis::StreamAnalysis(Stream stream) : impl_(std::make_unique<Impl>(std::move(stream))) {}
StreamAnalysis::StreamAnalysis(StreamAnalysis&&) noexcept = default;
StreamAnalysis& StreamAnalysis::operator=(StreamAnalysis&&) noexcept = default;
StreamAnalysis::~StreamAnalysis() = default;

const Stream& StreamAnalysis::stream() const { return impl_->stream; }
int StreamAnalysis::size() const { return impl_->stream.size(); }

bool StreamAnalysis::snapshotConsistent(int t) const {
  impl_->checkIndex(t);
  impl_->materializeSnapshot(t);
  return *impl_->snapOk[t];
}

const std::set<Fact>& StreamAnalysis::snapshotFacts(int t) const {
  impl_->checkIndex(t);
  impl_->materializeSnapshot(t);
  if (!*impl_->snapOk[t])
    throw InconsistentSnapshot("snapshot " + std::to_string(t) + " is inconsistent");
  return *impl_->snapFacts[t];
}

bool StreamAnalysis::snapshotEntails(int t, const Fact& fact) const {
  if (!snapshotConsistent(t)) return true;
  return impl_->snapFacts[t]->count(fact) > 0;
}

const std::set<std::string>& StreamAnalysis::mentionedRoots(int t) const {
  impl_->checkIndex(t);
  return impl_->roots(t);
}

bool StreamAnalysis::mentions(int t, const std::string& rootName) const {
  return mentionedRoots(t).count(rootName) > 0;
}

const std::vector<int>& StreamAnalysis::mentionTimes(const std::string& rootName) const {
  if (!impl_->mentionIndex) {
    std::map<std::string, std::vector<int>> built;
    for (int t = 0; t < impl_->stream.size(); ++t)
      for (const std::string& r : impl_->roots(t)) built[r].push_back(t);
    impl_->mentionIndex = std::move(built);
  }
  static const std::vector<int> kNone;
  auto it = impl_->mentionIndex->find(rootName);
  return it == impl_->mentionIndex->end() ? kNone : it->second;
}

bool StreamAnalysis::prefixConsistent(int t) const {
  impl_->checkIndex(t);
  return impl_->prefix(t);
}

bool StreamAnalysis::windowConsistent(const Window& w) const {
  impl_->checkWindow(w);
  if (w.from == 0) return impl_->prefix(w.to);
  if (w.from == w.to) return snapshotConsistent(w.from);
  return !impl_->saturateWindow(w).inconsistent();
}

Saturation StreamAnalysis::windowSaturation(const Window& w) const {
  impl_->checkWindow(w);
  return impl_->saturateWindow(w);
}

Saturation StreamAnalysis::windowSaturation(const Window& w,
                                            const std::set<Fact>& extraFacts) const {
  impl_->checkWindow(w);
  std::set<Fact> g = impl_->backgroundGround;
  for (int t = w.from; t <= w.to; ++t) {
    const auto& sg = impl_->ground(t);
    g.insert(sg.begin(), sg.end());
  }
  g.insert(extraFacts.begin(), extraFacts.end());
  return saturate(impl_->index, g);
}

bool StreamAnalysis::pairConsistent(int i, int j) const {
  impl_->checkIndex(i);
  impl_->checkIndex(j);
  if (i > j) std::swap(i, j);
  if (i == j) return snapshotConsistent(i);
  auto key = std::make_pair(i, j);
  if (auto it = impl_->pairOk.find(key); it != impl_->pairOk.end()) return it->second;
  std::set<Fact> g = impl_->backgroundGround;
  const auto& gi = impl_->ground(i);
  const auto& gj = impl_->ground(j);
  g.insert(gi.begin(), gi.end());
  g.insert(gj.begin(), gj.end());
  bool ok = !saturate(impl_->index, g).inconsistent();
  impl_->pairOk.emplace(key, ok);
  return ok;
}

std::set<Fact> StreamAnalysis::universe(const Window& w, const UniverseSpec& spec) const {
  return impl_->universeOf(w, spec);
}

ChangeSet StreamAnalysis::changes(const Window& before, const Window& after,
                                  const UniverseSpec& spec) const {
  std::set<Fact> ua = impl_->universeOf(before, spec);
  std::set<Fact> ub = impl_->universeOf(after, spec);
  ChangeSet cs;
  std::set_difference(ub.begin(), ub.end(), ua.begin(), ua.end(),
                      std::inserter(cs.newFacts, cs.newFacts.end()));
  std::set_difference(ua.begin(), ua.end(), ub.begin(), ub.end(),
                      std::inserter(cs.obsoleteFacts, cs.obsoleteFacts.end()));
  std::set_intersection(ua.begin(), ua.end(), ub.begin(), ub.end(),
                        std::inserter(cs.invariantFacts, cs.invariantFacts.end()));
  return cs;
}

const std::set<Fact>& StreamAnalysis::backgroundFacts() const { return impl_->staticFacts(); }

std::set<Fact> universe(const Stream& s, const Window& w, const UniverseSpec& spec) {
  return StreamAnalysis(s).universe(w, spec);
}

ChangeSet changes(const Stream& s, const Window& before, const Window& after,
                  const UniverseSpec& spec) {
  return StreamAnalysis(s).changes(before, after, spec);
}

}  // namespace ontostream
