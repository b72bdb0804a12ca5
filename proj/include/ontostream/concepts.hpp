#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ontostream {

// Concept expressions of the supported fragment:
//   Top | Bot | A | (and C1 ... Ck) | (some r C) | (one a)
// Instances are always canonical: conjunctions are flattened, deduplicated and
// sorted by serialized form, so structural equality is string equality on
// text(). Build through the factories, not the raw fields.
class Concept {
public:
  enum class Kind { Top, Bottom, Atomic, And, Some, Nominal };

  static Concept top();
  static Concept bottom();
  static Concept atomic(std::string name);
  // Flattens nested conjunctions, drops duplicates, sorts conjuncts; a single
  // surviving conjunct collapses to itself, an empty list to Top.
  static Concept conj(std::vector<Concept> conjuncts);
  static Concept some(std::string role, Concept filler);
  static Concept nominal(std::string individual);

  Kind kind() const { return kind_; }
  // Atomic: concept name. Some: role name. Nominal: individual name.
  const std::string& name() const { return name_; }
  // And: conjuncts (>= 2). Some: exactly the filler.
  const std::vector<Concept>& args() const { return args_; }
  const Concept& filler() const { return args_.front(); }

  // Canonical serialization, identical to the text-format concept grammar.
  const std::string& text() const { return text_; }

  bool mentionsNominal() const;

  bool operator==(const Concept& o) const { return text_ == o.text_; }
  bool operator!=(const Concept& o) const { return text_ != o.text_; }
  bool operator<(const Concept& o) const { return text_ < o.text_; }

  // Default-constructs as Top so containing types stay default-constructible.
  Concept() : text_("Top") {}

private:
  Kind kind_ = Kind::Top;
  std::string name_;
  std::vector<Concept> args_;
  std::string text_;
};

// One line of an ontology document. text() round-trips through the parser.
class Axiom {
public:
  enum class Kind { Gci, RoleInclusion, ClassAssertion, RoleAssertion, Eq, Neq };

  static Axiom gci(Concept lhs, Concept rhs);
  static Axiom roleInclusion(std::string sub, std::string sup);
  static Axiom classAssertion(Concept c, std::string individual);
  static Axiom roleAssertion(std::string role, std::string subject, std::string object);
  static Axiom eq(std::string a, std::string b);
  static Axiom neq(std::string a, std::string b);

  Kind kind() const { return kind_; }
  const Concept& lhs() const { return lhs_; }
  const Concept& rhs() const { return rhs_; }
  const Concept& assertedConcept() const { return lhs_; }  // ClassAssertion
  const std::string& role() const { return role_; }
  const std::string& subject() const { return subject_; }
  const std::string& object() const { return object_; }

  bool isAssertion() const {
    return kind_ == Kind::ClassAssertion || kind_ == Kind::RoleAssertion;
  }

  const std::string& text() const { return text_; }

  bool operator==(const Axiom& o) const { return text_ == o.text_; }
  bool operator<(const Axiom& o) const { return text_ < o.text_; }

private:
  Axiom() = default;

  Kind kind_ = Kind::Gci;
  Concept lhs_, rhs_;              // Gci; lhs_ doubles as the asserted concept
  std::string role_;               // RoleInclusion sub / RoleAssertion role
  std::string subject_, object_;   // individuals; RoleInclusion sup in object_
  std::string text_;
};

// An element of a saturation: a declared individual, an anonymous successor
// introduced for an asserted existential ("_sk(root,role)"), an anonymous
// successor forced by a TBox existential ("_sk(root,role,filler)"), or a
// canonical per-(role,filler) node with no root ("_ex(role,filler)") used to
// terminate derived chains.
class Individual {
public:
  enum class Kind { Named, AssertedSkolem, DerivedSkolem, Canonical };

  static Individual named(std::string name);
  static Individual assertedSkolem(const Individual& parent, const std::string& role);
  static Individual derivedSkolem(const Individual& parent, const std::string& role,
                                  const std::string& filler);
  static Individual canonicalNode(const std::string& role, const std::string& filler);

  Kind kind() const { return kind_; }
  const std::string& text() const { return text_; }
  // Name of the named individual this node hangs off; empty for canonical nodes.
  const std::string& rootName() const { return root_; }
  bool isNamed() const { return kind_ == Kind::Named; }

  bool operator==(const Individual& o) const { return text_ == o.text_; }
  bool operator!=(const Individual& o) const { return text_ != o.text_; }
  bool operator<(const Individual& o) const { return text_ < o.text_; }

private:
  Kind kind_ = Kind::Named;
  std::string text_;
  std::string root_;
};

// An atomic entailment: named class over an individual, or named role edge.
// Top/Bottom facts are representable (they occur as ground input) but are
// excluded from entailment universes.
class Fact {
public:
  static Fact cls(std::string conceptName, Individual subject);
  static Fact role(std::string role, Individual subject, Individual object);

  // Parses "Name(a)" or "role(a,b)" over named individuals (CLI targets).
  static Fact parse(const std::string& text);

  bool isRole() const { return isRole_; }
  const std::string& name() const { return name_; }
  const Individual& subject() const { return subject_; }
  const Individual& object() const { return object_; }

  const std::string& text() const { return text_; }

  bool operator==(const Fact& o) const { return text_ == o.text_; }
  bool operator!=(const Fact& o) const { return text_ != o.text_; }
  bool operator<(const Fact& o) const { return text_ < o.text_; }

private:
  bool isRole_ = false;
  std::string name_;
  Individual subject_;
  Individual object_;
  std::string text_;
};

// Fixed background knowledge: TBox plus static ABox.
struct Ontology {
  std::vector<Axiom> tbox;
  std::vector<Axiom> abox;
};

// FNV-1a: used for deterministic fresh names and index digests.
std::uint64_t fnv1a(const std::string& s, std::uint64_t seed = 1469598103934665603ull);
std::string hex64(std::uint64_t v);

}  // namespace ontostream

template <>
struct std::hash<ontostream::Concept> {
  size_t operator()(const ontostream::Concept& c) const {
    return std::hash<std::string>()(c.text());
  }
};

template <>
struct std::hash<ontostream::Individual> {
  size_t operator()(const ontostream::Individual& i) const {
    return std::hash<std::string>()(i.text());
  }
};

template <>
struct std::hash<ontostream::Fact> {
  size_t operator()(const ontostream::Fact& f) const {
    return std::hash<std::string>()(f.text());
  }
};
