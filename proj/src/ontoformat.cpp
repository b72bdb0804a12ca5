#include "ontostream/ontoformat.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "ontostream/errors.hpp"

namespace ontostream {

namespace {

struct Token {
  enum class Kind { Name, Integer, LParen, RParen, Comma, End };
  Kind kind;
  std::string text;
  int line;
  int column;
};

class LineLexer {
public:
  LineLexer(const std::string& line, int lineNo) : line_(line), lineNo_(lineNo) { advance(); }

  const Token& peek() const { return current_; }

  Token next() {
    Token t = current_;
    advance();
    return t;
  }

  Token expect(Token::Kind kind, const char* what) {
    if (current_.kind != kind)
      throw ParseError(std::string("expected ") + what, current_.line, current_.column,
                       current_.text);
    return next();
  }

private:
  void advance() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t' || line_[pos_] == '\r'))
      ++pos_;
    int col = static_cast<int>(pos_) + 1;
    if (pos_ >= line_.size() || line_[pos_] == '#') {
      current_ = {Token::Kind::End, "", lineNo_, col};
      return;
    }
    char c = line_[pos_];
    if (c == '(') {
      ++pos_;
      current_ = {Token::Kind::LParen, "(", lineNo_, col};
    } else if (c == ')') {
      ++pos_;
      current_ = {Token::Kind::RParen, ")", lineNo_, col};
    } else if (c == ',') {
      ++pos_;
      current_ = {Token::Kind::Comma, ",", lineNo_, col};
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < line_.size() && std::isdigit(static_cast<unsigned char>(line_[pos_]))) ++pos_;
      current_ = {Token::Kind::Integer, line_.substr(start, pos_ - start), lineNo_, col};
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < line_.size() &&
             (std::isalnum(static_cast<unsigned char>(line_[pos_])) || line_[pos_] == '_'))
        ++pos_;
      current_ = {Token::Kind::Name, line_.substr(start, pos_ - start), lineNo_, col};
    } else {
      throw ParseError("unexpected character", lineNo_, col, std::string(1, c));
    }
  }

  const std::string& line_;
  int lineNo_;
  size_t pos_ = 0;
  Token current_{Token::Kind::End, "", 0, 0};
};

Concept parseConcept(LineLexer& lex) {
  Token t = lex.next();
  if (t.kind == Token::Kind::Name) {
    if (t.text == "Top") return Concept::top();
    if (t.text == "Bot") return Concept::bottom();
    return Concept::atomic(t.text);
  }
  if (t.kind != Token::Kind::LParen)
    throw ParseError("expected concept", t.line, t.column, t.text);
  Token head = lex.expect(Token::Kind::Name, "'and', 'some' or 'one'");
  if (head.text == "and") {
    std::vector<Concept> conjuncts;
    while (lex.peek().kind != Token::Kind::RParen) {
      if (lex.peek().kind == Token::Kind::End)
        throw ParseError("unterminated conjunction", lex.peek().line, lex.peek().column, "");
      conjuncts.push_back(parseConcept(lex));
    }
    lex.next();  // ')'
    if (conjuncts.size() < 2)
      throw ParseError("conjunction needs at least two concepts", head.line, head.column,
                       head.text);
    return Concept::conj(std::move(conjuncts));
  }
  if (head.text == "some") {
    Token role = lex.expect(Token::Kind::Name, "role name");
    Concept filler = parseConcept(lex);
    lex.expect(Token::Kind::RParen, "')'");
    return Concept::some(role.text, std::move(filler));
  }
  if (head.text == "one") {
    Token ind = lex.expect(Token::Kind::Name, "individual name");
    lex.expect(Token::Kind::RParen, "')'");
    return Concept::nominal(ind.text);
  }
  throw ParseError("expected 'and', 'some' or 'one'", head.line, head.column, head.text);
}

void expectEnd(LineLexer& lex) {
  if (lex.peek().kind != Token::Kind::End)
    throw ParseError("trailing input after axiom", lex.peek().line, lex.peek().column,
                     lex.peek().text);
}

}  // namespace

Document parseDocument(const std::string& text) {
  Document doc;
  bool inSnapshots = false;

  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    LineLexer lex(line, lineNo);
    if (lex.peek().kind == Token::Kind::End) continue;  // blank or comment line

    Token head = lex.expect(Token::Kind::Name, "axiom keyword");
    auto& target = inSnapshots ? doc.snapshots.back() : doc.abox;

    if (head.text == "GCI") {
      if (inSnapshots)
        throw ParseError("TBox axiom inside snapshot block", head.line, head.column, head.text);
      Concept lhs = parseConcept(lex);
      Token sub = lex.expect(Token::Kind::Name, "SUB");
      if (sub.text != "SUB") throw ParseError("expected SUB", sub.line, sub.column, sub.text);
      Concept rhs = parseConcept(lex);
      expectEnd(lex);
      doc.tbox.push_back(Axiom::gci(std::move(lhs), std::move(rhs)));
    } else if (head.text == "RI") {
      if (inSnapshots)
        throw ParseError("TBox axiom inside snapshot block", head.line, head.column, head.text);
      Token r = lex.expect(Token::Kind::Name, "role name");
      Token sub = lex.expect(Token::Kind::Name, "SUB");
      if (sub.text != "SUB") throw ParseError("expected SUB", sub.line, sub.column, sub.text);
      Token s = lex.expect(Token::Kind::Name, "role name");
      expectEnd(lex);
      doc.tbox.push_back(Axiom::roleInclusion(r.text, s.text));
    } else if (head.text == "CLASS") {
      Concept c = parseConcept(lex);
      lex.expect(Token::Kind::LParen, "'('");
      Token ind = lex.expect(Token::Kind::Name, "individual name");
      lex.expect(Token::Kind::RParen, "')'");
      expectEnd(lex);
      target.push_back(Axiom::classAssertion(std::move(c), ind.text));
    } else if (head.text == "ROLE") {
      Token r = lex.expect(Token::Kind::Name, "role name");
      lex.expect(Token::Kind::LParen, "'('");
      Token a = lex.expect(Token::Kind::Name, "individual name");
      lex.expect(Token::Kind::Comma, "','");
      Token b = lex.expect(Token::Kind::Name, "individual name");
      lex.expect(Token::Kind::RParen, "')'");
      expectEnd(lex);
      target.push_back(Axiom::roleAssertion(r.text, a.text, b.text));
    } else if (head.text == "EQ" || head.text == "NEQ") {
      Token a = lex.expect(Token::Kind::Name, "individual name");
      Token b = lex.expect(Token::Kind::Name, "individual name");
      expectEnd(lex);
      target.push_back(head.text == "EQ" ? Axiom::eq(a.text, b.text)
                                         : Axiom::neq(a.text, b.text));
    } else if (head.text == "SNAPSHOT") {
      Token t = lex.expect(Token::Kind::Integer, "snapshot time");
      expectEnd(lex);
      long value = std::stol(t.text);
      if (value != static_cast<long>(doc.snapshots.size()))
        throw ParseError("snapshot times must be consecutive from 0 (expected " +
                             std::to_string(doc.snapshots.size()) + ")",
                         t.line, t.column, t.text);
      doc.snapshots.emplace_back();
      inSnapshots = true;
    } else {
      throw ParseError("unknown axiom keyword", head.line, head.column, head.text);
    }
  }
  return doc;
}

std::string serializeDocument(const Document& d) {
  std::string out;
  for (const auto& a : d.tbox) {
    out += a.text();
    out += '\n';
  }
  for (const auto& a : d.abox) {
    out += a.text();
    out += '\n';
  }
  for (size_t t = 0; t < d.snapshots.size(); ++t) {
    out += "SNAPSHOT " + std::to_string(t) + "\n";
    for (const auto& a : d.snapshots[t]) {
      out += a.text();
      out += '\n';
    }
  }
  return out;
}

Document loadDocument(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parseDocument(buf.str());
}

void saveDocument(const Document& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << serializeDocument(d);
  if (!out) throw IoError("write failed: " + path);
}

Document mergeDocuments(const Document& ontology, const Document& stream) {
  if (!ontology.snapshots.empty() && !stream.snapshots.empty())
    throw InvalidArgument("both documents carry snapshots");
  Document merged;
  merged.tbox = ontology.tbox;
  merged.tbox.insert(merged.tbox.end(), stream.tbox.begin(), stream.tbox.end());
  merged.abox = ontology.abox;
  merged.abox.insert(merged.abox.end(), stream.abox.begin(), stream.abox.end());
  merged.snapshots = ontology.snapshots.empty() ? stream.snapshots : ontology.snapshots;
  return merged;
}

}  // namespace ontostream
