#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ontostream/concepts.hpp"

namespace ontostream {

// A TBox rewritten into the four normal forms used by the completion rules:
//   Atomic : A SUB B
//   Conj   : A1 and A2 SUB B
//   ExRhs  : A SUB (some r B)
//   ExLhs  : (some r A) SUB B
// where every slot is an atomic name, "Top" or "Bot".  Complex sub-expressions
// are replaced by fresh names ("_n" + 16 hex digits, a content hash of the
// canonical text), introduced with only the implication direction the original
// polarity requires.
struct NormalizedTBox {
  struct Atomic {
    std::string lhs, rhs;
    bool operator<(const Atomic& o) const { return std::tie(lhs, rhs) < std::tie(o.lhs, o.rhs); }
  };
  struct Conj {
    std::string lhs1, lhs2, rhs;  // lhs1 <= lhs2 canonically
    bool operator<(const Conj& o) const {
      return std::tie(lhs1, lhs2, rhs) < std::tie(o.lhs1, o.lhs2, o.rhs);
    }
  };
  struct ExRhs {
    std::string lhs, role, filler;
    bool operator<(const ExRhs& o) const {
      return std::tie(lhs, role, filler) < std::tie(o.lhs, o.role, o.filler);
    }
  };
  struct ExLhs {
    std::string role, filler, rhs;
    bool operator<(const ExLhs& o) const {
      return std::tie(role, filler, rhs) < std::tie(o.role, o.filler, o.rhs);
    }
  };

  std::vector<Atomic> atomics;
  std::vector<Conj> conjs;
  std::vector<ExRhs> exRhs;
  std::vector<ExLhs> exLhs;
  std::vector<std::pair<std::string, std::string>> roleIncs;  // r SUB s
  std::set<std::string> freshNames;

  // Renders the normal forms back as axioms (canonical text, sorted).
  std::vector<Axiom> toAxioms() const;
};

// Rewrites general GCIs + role inclusions into normal form.  Throws
// UnsupportedAxiom on nominals or equality axioms, InvalidArgument if an
// assertion sneaks into the TBox.
NormalizedTBox normalize(const std::vector<Axiom>& tbox);

// Ground atoms obtained from assertions: complex class assertions are
// decomposed, each asserted existential introducing one skolem node per
// (individual, role) pair.  "Top" facts are kept as node markers.
std::set<Fact> skolemize(const std::vector<Axiom>& assertions);

// Precomputed rule indexes for one normalized TBox, reusable across many
// saturations of different ABoxes.
class TBoxIndex {
public:
  explicit TBoxIndex(NormalizedTBox tbox);
  TBoxIndex(const TBoxIndex&) = delete;
  TBoxIndex& operator=(const TBoxIndex&) = delete;
  ~TBoxIndex();

  const NormalizedTBox& tbox() const;
  bool isFreshName(const std::string& concept_) const;

  struct Impl;
  const Impl& impl() const { return *impl_; }

private:
  std::unique_ptr<Impl> impl_;
};

// Saturated closure of (normalized TBox + ground facts).
class Saturation {
public:
  Saturation();
  Saturation(Saturation&&) noexcept;
  Saturation& operator=(Saturation&&) noexcept;
  ~Saturation();

  bool inconsistent() const;

  // True iff the assertion follows from the closure.  On an inconsistent
  // closure every assertion follows.  Throws UnknownIndividual if a named
  // query individual does not occur (and the closure is consistent);
  // InvalidArgument if the axiom is not an assertion.
  bool entails(const Axiom& query) const;
  bool entailsFact(const Fact& fact) const;

  // Every derivable atomic fact over the original signature: fresh concept
  // names, Top/Bot markers and canonical (rootless) nodes are filtered out;
  // role facts are closed under declared super-roles.  Throws
  // InconsistentWindow-free: on an inconsistent closure this is unusable, so
  // callers must check inconsistent() first; it returns the raw labels then.
  std::set<Fact> allFacts(bool includeRoles) const;

  bool hasIndividual(const std::string& name) const;
  std::set<std::string> namedIndividuals() const;

  struct Impl;
  Impl& impl() { return *impl_; }
  const Impl& impl() const { return *impl_; }

private:
  std::unique_ptr<Impl> impl_;
};

Saturation saturate(const TBoxIndex& tbox, const std::set<Fact>& ground);

// One-shot conveniences.
Saturation saturate(const Ontology& ontology, const std::vector<Axiom>& extraAssertions = {});
bool isConsistent(const Ontology& ontology, const std::vector<Axiom>& extraAssertions = {});

}  // namespace ontostream
