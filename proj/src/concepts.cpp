#include "ontostream/concepts.hpp"

#include <algorithm>

#include "ontostream/errors.hpp"

namespace ontostream {

namespace {

std::string renderConcept(Concept::Kind kind, const std::string& name,
                          const std::vector<Concept>& args) {
  switch (kind) {
    case Concept::Kind::Top:
      return "Top";
    case Concept::Kind::Bottom:
      return "Bot";
    case Concept::Kind::Atomic:
      return name;
    case Concept::Kind::Nominal:
      return "(one " + name + ")";
    case Concept::Kind::Some:
      return "(some " + name + " " + args.front().text() + ")";
    case Concept::Kind::And: {
      std::string out = "(and";
      for (const auto& a : args) {
        out += ' ';
        out += a.text();
      }
      out += ')';
      return out;
    }
  }
  return {};
}

}  // namespace

Concept Concept::top() {
  Concept c;
  c.kind_ = Kind::Top;
  c.text_ = renderConcept(c.kind_, c.name_, c.args_);
  return c;
}

Concept Concept::bottom() {
  Concept c;
  c.kind_ = Kind::Bottom;
  c.text_ = renderConcept(c.kind_, c.name_, c.args_);
  return c;
}

Concept Concept::atomic(std::string name) {
  if (name.empty()) throw InvalidArgument("empty concept name");
  Concept c;
  c.kind_ = Kind::Atomic;
  c.name_ = std::move(name);
  c.text_ = renderConcept(c.kind_, c.name_, c.args_);
  return c;
}

Concept Concept::some(std::string role, Concept filler) {
  if (role.empty()) throw InvalidArgument("empty role name");
  Concept c;
  c.kind_ = Kind::Some;
  c.name_ = std::move(role);
  c.args_.push_back(std::move(filler));
  c.text_ = renderConcept(c.kind_, c.name_, c.args_);
  return c;
}

Concept Concept::nominal(std::string individual) {
  if (individual.empty()) throw InvalidArgument("empty individual name");
  Concept c;
  c.kind_ = Kind::Nominal;
  c.name_ = std::move(individual);
  c.text_ = renderConcept(c.kind_, c.name_, c.args_);
  return c;
}

Concept Concept::conj(std::vector<Concept> conjuncts) {
  std::vector<Concept> flat;
  for (auto& c : conjuncts) {
    if (c.kind() == Kind::And) {
      for (const auto& inner : c.args()) flat.push_back(inner);
    } else {
      flat.push_back(std::move(c));
    }
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  if (flat.empty()) return top();
  if (flat.size() == 1) return flat.front();
  Concept c;
  c.kind_ = Kind::And;
  c.args_ = std::move(flat);
  c.text_ = renderConcept(c.kind_, c.name_, c.args_);
  return c;
}

bool Concept::mentionsNominal() const {
  if (kind_ == Kind::Nominal) return true;
  for (const auto& a : args_)
    if (a.mentionsNominal()) return true;
  return false;
}

Axiom Axiom::gci(Concept lhs, Concept rhs) {
  Axiom a;
  a.kind_ = Kind::Gci;
  a.lhs_ = std::move(lhs);
  a.rhs_ = std::move(rhs);
  a.text_ = "GCI " + a.lhs_.text() + " SUB " + a.rhs_.text();
  return a;
}

Axiom Axiom::roleInclusion(std::string sub, std::string sup) {
  Axiom a;
  a.kind_ = Kind::RoleInclusion;
  a.role_ = std::move(sub);
  a.object_ = std::move(sup);
  a.text_ = "RI " + a.role_ + " SUB " + a.object_;
  return a;
}

Axiom Axiom::classAssertion(Concept c, std::string individual) {
  Axiom a;
  a.kind_ = Kind::ClassAssertion;
  a.lhs_ = std::move(c);
  a.subject_ = std::move(individual);
  a.text_ = "CLASS " + a.lhs_.text() + " (" + a.subject_ + ")";
  return a;
}

Axiom Axiom::roleAssertion(std::string role, std::string subject, std::string object) {
  Axiom a;
  a.kind_ = Kind::RoleAssertion;
  a.role_ = std::move(role);
  a.subject_ = std::move(subject);
  a.object_ = std::move(object);
  a.text_ = "ROLE " + a.role_ + " (" + a.subject_ + ", " + a.object_ + ")";
  return a;
}

Axiom Axiom::eq(std::string a1, std::string a2) {
  Axiom a;
  a.kind_ = Kind::Eq;
  a.subject_ = std::move(a1);
  a.object_ = std::move(a2);
  a.text_ = "EQ " + a.subject_ + " " + a.object_;
  return a;
}

Axiom Axiom::neq(std::string a1, std::string a2) {
  Axiom a;
  a.kind_ = Kind::Neq;
  a.subject_ = std::move(a1);
  a.object_ = std::move(a2);
  a.text_ = "NEQ " + a.subject_ + " " + a.object_;
  return a;
}

Individual Individual::named(std::string name) {
  if (name.empty()) throw InvalidArgument("empty individual name");
  Individual i;
  i.kind_ = Kind::Named;
  i.text_ = std::move(name);
  i.root_ = i.text_;
  return i;
}

Individual Individual::assertedSkolem(const Individual& parent, const std::string& role) {
  Individual i;
  i.kind_ = Kind::AssertedSkolem;
  i.text_ = "_sk(" + parent.text_ + "," + role + ")";
  i.root_ = parent.root_;
  return i;
}

Individual Individual::derivedSkolem(const Individual& parent, const std::string& role,
                                     const std::string& filler) {
  Individual i;
  i.kind_ = Kind::DerivedSkolem;
  i.text_ = "_sk(" + parent.text_ + "," + role + "," + filler + ")";
  i.root_ = parent.root_;
  return i;
}

Individual Individual::canonicalNode(const std::string& role, const std::string& filler) {
  Individual i;
  i.kind_ = Kind::Canonical;
  i.text_ = "_ex(" + role + "," + filler + ")";
  return i;
}

Fact Fact::cls(std::string concept_, Individual subject) {
  Fact f;
  f.isRole_ = false;
  f.name_ = std::move(concept_);
  f.subject_ = std::move(subject);
  f.text_ = f.name_ + "(" + f.subject_.text() + ")";
  return f;
}

Fact Fact::role(std::string role_, Individual subject, Individual object) {
  Fact f;
  f.isRole_ = true;
  f.name_ = std::move(role_);
  f.subject_ = std::move(subject);
  f.object_ = std::move(object);
  f.text_ = f.name_ + "(" + f.subject_.text() + "," + f.object_.text() + ")";
  return f;
}

namespace {

std::string trimWs(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return std::string();
  return s.substr(b, e - b + 1);
}

// Splits on commas that sit outside any nested parentheses.
std::vector<std::string> splitTopLevel(const std::string& s) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(trimWs(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(trimWs(cur));
  return parts;
}

// Accepts a plain name, "_sk(parent,role)", "_sk(parent,role,filler)", or
// "_ex(role,filler)"; parents may themselves be skolem terms.
Individual parseIndividual(const std::string& text) {
  auto open = text.find('(');
  if (open == std::string::npos) {
    if (text.empty() || text.find(')') != std::string::npos || text.find(',') != std::string::npos)
      throw InvalidArgument("malformed individual '" + text + "'");
    return Individual::named(text);
  }
  if (text.back() != ')') throw InvalidArgument("malformed individual '" + text + "'");
  std::string head = text.substr(0, open);
  std::vector<std::string> args = splitTopLevel(text.substr(open + 1, text.size() - open - 2));
  for (const auto& a : args)
    if (a.empty()) throw InvalidArgument("malformed individual '" + text + "'");
  if (head == "_sk" && args.size() == 2)
    return Individual::assertedSkolem(parseIndividual(args[0]), args[1]);
  if (head == "_sk" && args.size() == 3)
    return Individual::derivedSkolem(parseIndividual(args[0]), args[1], args[2]);
  if (head == "_ex" && args.size() == 2) return Individual::canonicalNode(args[0], args[1]);
  throw InvalidArgument("malformed individual '" + text + "'");
}

}  // namespace

Fact Fact::parse(const std::string& text) {
  auto open = text.find('(');
  auto close = text.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close != text.size() - 1 ||
      open == 0 || close <= open + 1)
    throw InvalidArgument("expected Name(a) or role(a,b), got '" + text + "'");
  std::string name = text.substr(0, open);
  std::vector<std::string> parts = splitTopLevel(text.substr(open + 1, close - open - 1));
  for (const auto& p : parts)
    if (p.empty()) throw InvalidArgument("expected Name(a) or role(a,b), got '" + text + "'");
  if (parts.size() == 1) return cls(name, parseIndividual(parts[0]));
  if (parts.size() == 2) return role(name, parseIndividual(parts[0]), parseIndividual(parts[1]));
  throw InvalidArgument("expected Name(a) or role(a,b), got '" + text + "'");
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace ontostream
