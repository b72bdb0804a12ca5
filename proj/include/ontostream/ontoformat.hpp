#pragma once

#include <string>
#include <vector>

#include "ontostream/concepts.hpp"

namespace ontostream {

// A parsed ontology/stream document: TBox and static ABox lines, then one
// assertion block per SNAPSHOT marker. Snapshot times are consecutive from 0.
struct Document {
  std::vector<Axiom> tbox;
  std::vector<Axiom> abox;
  std::vector<std::vector<Axiom>> snapshots;

  bool operator==(const Document& o) const = default;
};

// Throws ParseError (1-based line/column, offending token) on malformed input.
Document parseDocument(const std::string& text);

// Canonical form: one axiom per line, single spaces, TBox before static ABox
// before snapshots. parseDocument(serializeDocument(d)) == d, and canonical
// files round-trip byte-identically.
std::string serializeDocument(const Document& d);

Document loadDocument(const std::string& path);
void saveDocument(const Document& d, const std::string& path);

// Merges a background-ontology document into a stream document (TBox and
// static ABox concatenate; only one may carry snapshots).
Document mergeDocuments(const Document& ontology, const Document& stream);

}  // namespace ontostream
