#pragma once

#include <stdexcept>
#include <string>

namespace protorec {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad paths, invalid option combinations, unloadable config. CLI exit code 1.
struct ConfigError : Error {
  using Error::Error;
};

// Malformed input data. CLI exit code 2.
struct DataError : Error {
  using Error::Error;
};

struct UnknownSymbolError : DataError {
  UnknownSymbolError(std::size_t position, std::string grapheme)
      : DataError("unknown symbol '" + grapheme + "' at position " +
                  std::to_string(position)),
        position(position),
        grapheme(std::move(grapheme)) {}
  std::size_t position;  // phoneme index at which matching failed
  std::string grapheme;  // offending code point
};

struct MalformedRecordError : DataError {
  MalformedRecordError(std::size_t line, const std::string& reason)
      : DataError("line " + std::to_string(line) + ": " + reason), line(line) {}
  std::size_t line;
};

struct EmptyMatrixError : Error {
  EmptyMatrixError() : Error("alignment matrix has no rows") {}
};

struct EmptySeedsError : Error {
  EmptySeedsError() : Error("evolution seed pool is empty") {}
};

}  // namespace protorec
