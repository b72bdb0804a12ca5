#pragma once

#include <stdexcept>
#include <string>

namespace ontostream {

// Root of all library errors. Subclasses map onto C API status codes and CLI
// exit codes, so keep the hierarchy flat and the meaning of each type narrow.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A construct that parses but is outside the supported reasoning fragment
// (nominals in TBox positions, individual (in)equality, ...).
class UnsupportedAxiom : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(const std::string& msg, int line, int column, std::string token)
      : Error(msg + " at " + std::to_string(line) + ":" + std::to_string(column) +
              (token.empty() ? "" : " near '" + token + "'")),
        line(line), column(column), token(std::move(token)) {}

  int line = 0;    // 1-based
  int column = 0;  // 1-based
  std::string token;
};

class WindowOutOfRange : public Error {
public:
  using Error::Error;
};

// A window union (with the background ontology) has no model; diffs and
// universes are undefined there.
class InconsistentWindow : public Error {
public:
  using Error::Error;
};

class InconsistentSnapshot : public Error {
public:
  using Error::Error;
};

class UnknownIndividual : public Error {
public:
  using Error::Error;
};

class IndexMismatch : public Error {
public:
  using Error::Error;
};

class InsufficientSamples : public Error {
public:
  using Error::Error;
};

// An evaluation split leaves no usable training prefix or test range.
class InsufficientData : public Error {
public:
  using Error::Error;
};

class InfeasibleScenario : public Error {
public:
  using Error::Error;
};

// Precondition violation on otherwise well-formed data (bad snapshot id,
// epsilon out of range, ...).
class InvalidArgument : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace ontostream
