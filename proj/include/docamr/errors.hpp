#pragma once

#include <stdexcept>
#include <string>

namespace docamr {

// Raised on malformed PENMAN text. Positions are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int column)
      : std::runtime_error(msg + " (line " + std::to_string(line) +
                           ", column " + std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Raised when a graph violates a structural invariant (duplicate variable,
// dangling reference, disconnected component, ...).
class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a document annotation does not resolve against its sentences.
class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised on misuse of an operation (wrong mode, size limits, id mismatch).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace docamr
