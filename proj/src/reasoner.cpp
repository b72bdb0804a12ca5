#include "ontostream/reasoner.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "ontostream/errors.hpp"

namespace ontostream {

namespace {

constexpr const char* kTop = "Top";
constexpr const char* kBot = "Bot";

bool isAtomicish(const Concept& c) {
  return c.kind() == Concept::Kind::Atomic || c.kind() == Concept::Kind::Top ||
         c.kind() == Concept::Kind::Bottom;
}

std::string atomName(const Concept& c) {
  switch (c.kind()) {
    case Concept::Kind::Top:
      return kTop;
    case Concept::Kind::Bottom:
      return kBot;
    case Concept::Kind::Atomic:
      return c.name();
    default:
      throw InvalidArgument("not an atomic concept: " + c.text());
  }
}

Concept conceptFromName(const std::string& name) {
  if (name == kTop) return Concept::top();
  if (name == kBot) return Concept::bottom();
  return Concept::atomic(name);
}

// Rewrites GCIs into the four normal forms.  Complex sub-expressions get one
// fresh name per polarity direction actually used:
//   lhs occurrence:  C SUB N   (N collects everything C implies upward)
//   rhs occurrence:  N SUB C   (N forces C's consequences)
class Normalizer {
 public:
  NormalizedTBox run(const std::vector<Axiom>& tbox) {
    for (const auto& ax : tbox) {
      switch (ax.kind()) {
        case Axiom::Kind::Gci:
          if (ax.lhs().mentionsNominal() || ax.rhs().mentionsNominal())
            throw UnsupportedAxiom("nominal in TBox axiom: " + ax.text());
          process(ax.lhs(), ax.rhs());
          break;
        case Axiom::Kind::RoleInclusion:
          if (ax.role() != ax.object() &&
              riSeen_.insert(ax.role() + ">" + ax.object()).second)
            out_.roleIncs.emplace_back(ax.role(), ax.object());
          break;
        case Axiom::Kind::Eq:
        case Axiom::Kind::Neq:
          throw UnsupportedAxiom("equality axiom in TBox: " + ax.text());
        default:
          throw InvalidArgument("assertion in TBox: " + ax.text());
      }
    }
    return std::move(out_);
  }

 private:
  void process(const Concept& lhs, const Concept& rhs) {
    if (rhs.kind() == Concept::Kind::Top) return;
    if (rhs.kind() == Concept::Kind::And) {
      for (const auto& part : rhs.args()) process(lhs, part);
      return;
    }
    if (lhs == rhs) return;
    if (lhs.kind() == Concept::Kind::Bottom) return;

    if (lhs.kind() == Concept::Kind::And) {
      // Simplify the conjunction: Top conjuncts are vacuous, a Bot conjunct
      // makes the whole axiom vacuous.
      std::vector<Concept> parts;
      for (const auto& part : lhs.args()) {
        if (part.kind() == Concept::Kind::Bottom) return;
        if (part.kind() != Concept::Kind::Top) parts.push_back(part);
      }
      if (parts.empty()) {
        process(Concept::top(), rhs);
        return;
      }
      if (parts.size() == 1) {
        process(parts.front(), rhs);
        return;
      }
      if (rhs.kind() == Concept::Kind::Some) {
        process(lhs, Concept::atomic(atomizeRhs(rhs)));
        return;
      }
      std::vector<std::string> names;
      names.reserve(parts.size());
      for (const auto& part : parts) names.push_back(atomizeLhs(part));
      std::string cur = names[0];
      for (std::size_t i = 1; i + 1 < names.size(); ++i) {
        Concept partial = Concept::conj({conceptFromName(cur), conceptFromName(names[i])});
        std::string t = freshFor(partial);
        emitConj(cur, names[i], t);
        cur = t;
      }
      emitConj(cur, names.back(), atomName(rhs));
      return;
    }

    if (lhs.kind() == Concept::Kind::Some) {
      if (rhs.kind() == Concept::Kind::Some) {
        process(lhs, Concept::atomic(atomizeRhs(rhs)));
        return;
      }
      emitExLhs(lhs.name(), atomizeLhs(lhs.filler()), atomName(rhs));
      return;
    }

    // lhs atomic-ish
    const std::string a = atomName(lhs);
    if (rhs.kind() == Concept::Kind::Some) {
      emitExRhs(a, rhs.name(), atomizeRhs(rhs.filler()));
    } else {
      emitAtomic(a, atomName(rhs));
    }
  }

  std::string freshFor(const Concept& c) {
    auto it = nameOf_.find(c.text());
    if (it != nameOf_.end()) return it->second;
    std::string n = "_n" + hex64(fnv1a(c.text()));
    nameOf_.emplace(c.text(), n);
    out_.freshNames.insert(n);
    return n;
  }

  std::string atomizeLhs(const Concept& c) {
    if (isAtomicish(c)) return atomName(c);
    std::string n = freshFor(c);
    if (definedLhs_.insert(c.text()).second) process(c, Concept::atomic(n));
    return n;
  }

  std::string atomizeRhs(const Concept& c) {
    if (isAtomicish(c)) return atomName(c);
    std::string n = freshFor(c);
    if (definedRhs_.insert(c.text()).second) process(Concept::atomic(n), c);
    return n;
  }

  void emitAtomic(const std::string& a, const std::string& b) {
    if (a == b) return;
    NormalizedTBox::Atomic nf{a, b};
    if (atomicSeen_.insert(nf).second) out_.atomics.push_back(nf);
  }

  void emitConj(std::string a1, std::string a2, const std::string& b) {
    if (a2 < a1) std::swap(a1, a2);
    NormalizedTBox::Conj nf{a1, a2, b};
    if (conjSeen_.insert(nf).second) out_.conjs.push_back(nf);
  }

  void emitExRhs(const std::string& a, const std::string& role, const std::string& filler) {
    NormalizedTBox::ExRhs nf{a, role, filler};
    if (exRhsSeen_.insert(nf).second) out_.exRhs.push_back(nf);
  }

  void emitExLhs(const std::string& role, const std::string& filler, const std::string& b) {
    NormalizedTBox::ExLhs nf{role, filler, b};
    if (exLhsSeen_.insert(nf).second) out_.exLhs.push_back(nf);
  }

  NormalizedTBox out_;
  std::map<std::string, std::string> nameOf_;
  std::set<std::string> definedLhs_, definedRhs_;
  std::set<NormalizedTBox::Atomic> atomicSeen_;
  std::set<NormalizedTBox::Conj> conjSeen_;
  std::set<NormalizedTBox::ExRhs> exRhsSeen_;
  std::set<NormalizedTBox::ExLhs> exLhsSeen_;
  std::set<std::string> riSeen_;
};

void expandAssertion(const Concept& c, const Individual& x, std::set<Fact>& out) {
  switch (c.kind()) {
    case Concept::Kind::Top:
      out.insert(Fact::cls(kTop, x));
      break;
    case Concept::Kind::Bottom:
      out.insert(Fact::cls(kBot, x));
      break;
    case Concept::Kind::Atomic:
      out.insert(Fact::cls(c.name(), x));
      break;
    case Concept::Kind::And:
      for (const auto& part : c.args()) expandAssertion(part, x, out);
      break;
    case Concept::Kind::Some: {
      Individual sk = Individual::assertedSkolem(x, c.name());
      out.insert(Fact::role(c.name(), x, sk));
      expandAssertion(c.filler(), sk, out);
      break;
    }
    case Concept::Kind::Nominal:
      throw UnsupportedAxiom("nominal in asserted concept: " + c.text());
  }
}

}  // namespace

std::vector<Axiom> NormalizedTBox::toAxioms() const {
  std::vector<Axiom> axs;
  for (const auto& nf : atomics)
    axs.push_back(Axiom::gci(conceptFromName(nf.lhs), conceptFromName(nf.rhs)));
  for (const auto& nf : conjs)
    axs.push_back(Axiom::gci(Concept::conj({conceptFromName(nf.lhs1), conceptFromName(nf.lhs2)}),
                             conceptFromName(nf.rhs)));
  for (const auto& nf : exRhs)
    axs.push_back(Axiom::gci(conceptFromName(nf.lhs),
                             Concept::some(nf.role, conceptFromName(nf.filler))));
  for (const auto& nf : exLhs)
    axs.push_back(Axiom::gci(Concept::some(nf.role, conceptFromName(nf.filler)),
                             conceptFromName(nf.rhs)));
  for (const auto& ri : roleIncs) axs.push_back(Axiom::roleInclusion(ri.first, ri.second));
  std::sort(axs.begin(), axs.end());
  return axs;
}

NormalizedTBox normalize(const std::vector<Axiom>& tbox) { return Normalizer().run(tbox); }

std::set<Fact> skolemize(const std::vector<Axiom>& assertions) {
  std::set<Fact> out;
  for (const auto& ax : assertions) {
    switch (ax.kind()) {
      case Axiom::Kind::ClassAssertion:
        expandAssertion(ax.assertedConcept(), Individual::named(ax.subject()), out);
        break;
      case Axiom::Kind::RoleAssertion:
        out.insert(Fact::role(ax.role(), Individual::named(ax.subject()),
                              Individual::named(ax.object())));
        break;
      case Axiom::Kind::Eq:
      case Axiom::Kind::Neq:
        throw UnsupportedAxiom("equality assertions are not supported: " + ax.text());
      default:
        throw InvalidArgument("TBox axiom among assertions: " + ax.text());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

struct TBoxIndex::Impl {
  NormalizedTBox tbox;

  std::vector<std::string> conceptNames;  // [0]=Top, [1]=Bot
  std::unordered_map<std::string, int> conceptIds;
  std::vector<std::string> roleNames;
  std::unordered_map<std::string, int> roleIds;

  // Rule tables, indexed by concept id.
  std::vector<std::vector<int>> atomicByLhs;                    // lhs -> rhs*
  std::vector<std::vector<std::array<int, 2>>> conjByLhs;       // one conjunct -> (other, rhs)
  std::vector<std::vector<std::array<int, 2>>> exRhsByLhs;      // lhs -> (role, filler)
  std::vector<std::vector<std::array<int, 2>>> exLhsByFiller;   // filler -> (role, rhs)
  std::vector<std::vector<int>> superRoles;  // reflexive-transitive, sorted

  int concept_(const std::string& name) {
    auto it = conceptIds.find(name);
    if (it != conceptIds.end()) return it->second;
    int id = static_cast<int>(conceptNames.size());
    conceptNames.push_back(name);
    conceptIds.emplace(name, id);
    return id;
  }

  int role(const std::string& name) {
    auto it = roleIds.find(name);
    if (it != roleIds.end()) return it->second;
    int id = static_cast<int>(roleNames.size());
    roleNames.push_back(name);
    roleIds.emplace(name, id);
    return id;
  }

  explicit Impl(NormalizedTBox t) : tbox(std::move(t)) {
    concept_(kTop);
    concept_(kBot);
    for (const auto& nf : tbox.atomics) {
      concept_(nf.lhs);
      concept_(nf.rhs);
    }
    for (const auto& nf : tbox.conjs) {
      concept_(nf.lhs1);
      concept_(nf.lhs2);
      concept_(nf.rhs);
    }
    for (const auto& nf : tbox.exRhs) {
      concept_(nf.lhs);
      concept_(nf.filler);
      role(nf.role);
    }
    for (const auto& nf : tbox.exLhs) {
      concept_(nf.filler);
      concept_(nf.rhs);
      role(nf.role);
    }
    for (const auto& ri : tbox.roleIncs) {
      role(ri.first);
      role(ri.second);
    }

    const std::size_t nc = conceptNames.size();
    atomicByLhs.resize(nc);
    conjByLhs.resize(nc);
    exRhsByLhs.resize(nc);
    exLhsByFiller.resize(nc);
    for (const auto& nf : tbox.atomics)
      atomicByLhs[conceptIds[nf.lhs]].push_back(conceptIds[nf.rhs]);
    for (const auto& nf : tbox.conjs) {
      int a1 = conceptIds[nf.lhs1], a2 = conceptIds[nf.lhs2], b = conceptIds[nf.rhs];
      conjByLhs[a1].push_back({a2, b});
      if (a1 != a2) conjByLhs[a2].push_back({a1, b});
    }
    for (const auto& nf : tbox.exRhs)
      exRhsByLhs[conceptIds[nf.lhs]].push_back({roleIds[nf.role], conceptIds[nf.filler]});
    for (const auto& nf : tbox.exLhs)
      exLhsByFiller[conceptIds[nf.filler]].push_back({roleIds[nf.role], conceptIds[nf.rhs]});

    // Reflexive-transitive closure of the role hierarchy over declared roles.
    const std::size_t nr = roleNames.size();
    std::vector<std::vector<int>> direct(nr);
    for (const auto& ri : tbox.roleIncs) direct[roleIds[ri.first]].push_back(roleIds[ri.second]);
    superRoles.resize(nr);
    for (std::size_t r = 0; r < nr; ++r) {
      std::vector<char> seen(nr, 0);
      std::deque<int> queue{static_cast<int>(r)};
      seen[r] = 1;
      while (!queue.empty()) {
        int cur = queue.front();
        queue.pop_front();
        superRoles[r].push_back(cur);
        for (int nxt : direct[cur])
          if (!seen[nxt]) {
            seen[nxt] = 1;
            queue.push_back(nxt);
          }
      }
      std::sort(superRoles[r].begin(), superRoles[r].end());
    }
  }
};

TBoxIndex::TBoxIndex(NormalizedTBox tbox) : impl_(std::make_unique<Impl>(std::move(tbox))) {}
TBoxIndex::~TBoxIndex() = default;
const NormalizedTBox& TBoxIndex::tbox() const { return impl_->tbox; }
bool TBoxIndex::isFreshName(const std::string& concept_) const {
  return impl_->tbox.freshNames.count(concept_) > 0;
}

// ---------------------------------------------------------------------------

struct Saturation::Impl {
  // Interner tables: TBox-declared entries first (ids match the TBoxIndex),
  // ground-only names appended after.
  std::vector<std::string> conceptNames;
  std::unordered_map<std::string, int> conceptIds;
  std::vector<std::string> roleNames;
  std::unordered_map<std::string, int> roleIds;
  std::vector<std::vector<int>> superRoles;
  std::set<std::string> freshNames;
  int baseConcepts = 0;
  int baseRoles = 0;

  std::vector<Individual> nodes;
  std::unordered_map<std::string, int> nodeIds;
  std::vector<std::set<int>> labels;
  std::vector<std::vector<std::pair<int, int>>> out;  // (role, target)
  std::vector<std::vector<std::pair<int, int>>> in;   // (role, source)
  std::unordered_set<std::uint64_t> edgeSeen;
  bool inconsistent = false;

  std::deque<std::pair<int, int>> worklist;  // (node, concept)

  int conceptFor(const std::string& name) {
    auto it = conceptIds.find(name);
    if (it != conceptIds.end()) return it->second;
    int id = static_cast<int>(conceptNames.size());
    conceptNames.push_back(name);
    conceptIds.emplace(name, id);
    return id;
  }

  std::optional<int> findConcept(const std::string& name) const {
    auto it = conceptIds.find(name);
    if (it == conceptIds.end()) return std::nullopt;
    return it->second;
  }

  int roleFor(const std::string& name) {
    auto it = roleIds.find(name);
    if (it != roleIds.end()) return it->second;
    int id = static_cast<int>(roleNames.size());
    roleNames.push_back(name);
    roleIds.emplace(name, id);
    superRoles.push_back({id});
    return id;
  }

  std::optional<int> findRole(const std::string& name) const {
    auto it = roleIds.find(name);
    if (it == roleIds.end()) return std::nullopt;
    return it->second;
  }

  bool roleLeq(int sub, int sup) const {
    if (sub == sup) return true;
    const auto& sups = superRoles[sub];
    return std::binary_search(sups.begin(), sups.end(), sup);
  }

  int ensureNode(const Individual& ind) {
    auto it = nodeIds.find(ind.text());
    if (it != nodeIds.end()) return it->second;
    int id = static_cast<int>(nodes.size());
    nodes.push_back(ind);
    nodeIds.emplace(ind.text(), id);
    labels.emplace_back();
    out.emplace_back();
    in.emplace_back();
    addLabel(id, 0);  // Top holds everywhere
    return id;
  }

  std::optional<int> findNode(const std::string& text) const {
    auto it = nodeIds.find(text);
    if (it == nodeIds.end()) return std::nullopt;
    return it->second;
  }

  void addLabel(int node, int concept_) {
    if (labels[node].insert(concept_).second) worklist.emplace_back(node, concept_);
  }

  bool addEdgeRaw(int role, int from, int to) {
    std::uint64_t key = (static_cast<std::uint64_t>(role) << 42) |
                        (static_cast<std::uint64_t>(from) << 21) |
                        static_cast<std::uint64_t>(to);
    if (!edgeSeen.insert(key).second) return false;
    out[from].emplace_back(role, to);
    in[to].emplace_back(role, from);
    return true;
  }

  void run(const TBoxIndex::Impl& ix, const std::set<Fact>& ground) {
    conceptNames = ix.conceptNames;
    conceptIds = ix.conceptIds;
    roleNames = ix.roleNames;
    roleIds = ix.roleIds;
    superRoles = ix.superRoles;
    freshNames = ix.tbox.freshNames;
    baseConcepts = static_cast<int>(ix.conceptNames.size());
    baseRoles = static_cast<int>(ix.roleNames.size());

    for (const auto& fact : ground) {
      if (fact.isRole()) {
        int from = ensureNode(fact.subject());
        int to = ensureNode(fact.object());
        addEdge(ix, roleFor(fact.name()), from, to);
      } else {
        int node = ensureNode(fact.subject());
        addLabel(node, conceptFor(fact.name()));
      }
    }

    while (!worklist.empty() && !inconsistent) {
      auto [node, concept_] = worklist.front();
      worklist.pop_front();
      if (concept_ == 1) {  // Bot
        inconsistent = true;
        break;
      }
      if (concept_ >= baseConcepts) continue;  // ground-only name, no rule mentions it

      for (int rhs : ix.atomicByLhs[concept_]) addLabel(node, rhs);
      for (const auto& [other, rhs] : ix.conjByLhs[concept_])
        if (labels[node].count(other)) addLabel(node, rhs);
      for (const auto& [role, filler] : ix.exRhsByLhs[concept_]) {
        const Individual& parent = nodes[node];
        bool grounded = parent.kind() == Individual::Kind::Named ||
                        parent.kind() == Individual::Kind::AssertedSkolem;
        Individual succ = grounded
            ? Individual::derivedSkolem(parent, roleNames[role], conceptNames[filler])
            : Individual::canonicalNode(roleNames[role], conceptNames[filler]);
        int to = ensureNode(succ);
        addEdge(ix, role, node, to);
        addLabel(to, filler);
      }
      for (const auto& [role, rhs] : ix.exLhsByFiller[concept_])
        for (const auto& [edgeRole, source] : in[node])
          if (roleLeq(edgeRole, role)) addLabel(source, rhs);
    }
    worklist.clear();
  }

  void addEdge(const TBoxIndex::Impl& ix, int role, int from, int to) {
    if (!addEdgeRaw(role, from, to)) return;
    // Existing labels on the target may now force consequences on the source.
    for (int lab : labels[to]) {
      if (lab >= baseConcepts) continue;
      for (const auto& [reqRole, rhs] : ix.exLhsByFiller[lab])
        if (roleLeq(role, reqRole)) addLabel(from, rhs);
    }
  }

  bool evalConcept(const Concept& c, int node) const {
    switch (c.kind()) {
      case Concept::Kind::Top:
        return true;
      case Concept::Kind::Bottom:
        return inconsistent;
      case Concept::Kind::Atomic: {
        auto id = findConcept(c.name());
        return id && labels[node].count(*id) > 0;
      }
      case Concept::Kind::And:
        for (const auto& part : c.args())
          if (!evalConcept(part, node)) return false;
        return true;
      case Concept::Kind::Some: {
        auto role = findRole(c.name());
        if (!role) return false;
        for (const auto& [edgeRole, target] : out[node])
          if (roleLeq(edgeRole, *role) && evalConcept(c.filler(), target)) return true;
        return false;
      }
      case Concept::Kind::Nominal:
        return nodes[node].isNamed() && nodes[node].text() == c.name();
    }
    return false;
  }

  bool holdsClass(const std::string& concept_, const Individual& subject) const {
    auto node = findNode(subject.text());
    if (!node) return false;
    if (concept_ == kTop) return true;
    if (concept_ == kBot) return false;  // only reachable when consistent
    auto id = findConcept(concept_);
    return id && labels[*node].count(*id) > 0;
  }

  bool holdsRole(const std::string& role, const Individual& subject,
                 const Individual& object) const {
    auto from = findNode(subject.text());
    auto to = findNode(object.text());
    auto r = findRole(role);
    if (!from || !to || !r) return false;
    for (const auto& [edgeRole, target] : out[*from])
      if (target == *to && roleLeq(edgeRole, *r)) return true;
    return false;
  }
};

Saturation::Saturation() : impl_(std::make_unique<Impl>()) {}
Saturation::Saturation(Saturation&&) noexcept = default;
Saturation& Saturation::operator=(Saturation&&) noexcept = default;
Saturation::~Saturation() = default;

bool Saturation::inconsistent() const { return impl_->inconsistent; }

bool Saturation::entails(const Axiom& query) const {
  if (query.kind() == Axiom::Kind::ClassAssertion) {
    if (query.assertedConcept().mentionsNominal() &&
        query.assertedConcept().kind() != Concept::Kind::Nominal)
      throw UnsupportedAxiom("nominal inside query concept: " + query.text());
    if (impl_->inconsistent) return true;
    auto node = impl_->findNode(query.subject());
    if (!node) throw UnknownIndividual(query.subject());
    return impl_->evalConcept(query.assertedConcept(), *node);
  }
  if (query.kind() == Axiom::Kind::RoleAssertion) {
    if (impl_->inconsistent) return true;
    if (!impl_->findNode(query.subject())) throw UnknownIndividual(query.subject());
    if (!impl_->findNode(query.object())) throw UnknownIndividual(query.object());
    return impl_->holdsRole(query.role(), Individual::named(query.subject()),
                            Individual::named(query.object()));
  }
  throw InvalidArgument("query must be an assertion: " + query.text());
}

bool Saturation::entailsFact(const Fact& fact) const {
  if (impl_->inconsistent) return true;
  if (fact.isRole()) return impl_->holdsRole(fact.name(), fact.subject(), fact.object());
  return impl_->holdsClass(fact.name(), fact.subject());
}

std::set<Fact> Saturation::allFacts(bool includeRoles) const {
  std::set<Fact> facts;
  const Impl& im = *impl_;
  for (std::size_t n = 0; n < im.nodes.size(); ++n) {
    if (im.nodes[n].kind() == Individual::Kind::Canonical) continue;
    for (int lab : im.labels[n]) {
      if (lab <= 1) continue;  // Top/Bot markers
      const std::string& name = im.conceptNames[lab];
      if (im.freshNames.count(name)) continue;
      facts.insert(Fact::cls(name, im.nodes[n]));
    }
    if (!includeRoles) continue;
    for (const auto& [role, target] : im.out[n]) {
      if (im.nodes[target].kind() == Individual::Kind::Canonical) continue;
      for (int sup : im.superRoles[role])
        facts.insert(Fact::role(im.roleNames[sup], im.nodes[n], im.nodes[target]));
    }
  }
  return facts;
}

bool Saturation::hasIndividual(const std::string& name) const {
  return impl_->findNode(name).has_value();
}

std::set<std::string> Saturation::namedIndividuals() const {
  std::set<std::string> names;
  for (const auto& node : impl_->nodes)
    if (node.isNamed()) names.insert(node.text());
  return names;
}

Saturation saturate(const TBoxIndex& tbox, const std::set<Fact>& ground) {
  Saturation sat;
  sat.impl().run(tbox.impl(), ground);
  return sat;
}

Saturation saturate(const Ontology& ontology, const std::vector<Axiom>& extraAssertions) {
  TBoxIndex index(normalize(ontology.tbox));
  std::set<Fact> ground = skolemize(ontology.abox);
  std::set<Fact> extra = skolemize(extraAssertions);
  ground.insert(extra.begin(), extra.end());
  return saturate(index, ground);
}

bool isConsistent(const Ontology& ontology, const std::vector<Axiom>& extraAssertions) {
  return !saturate(ontology, extraAssertions).inconsistent();
}

}  // namespace ontostream
