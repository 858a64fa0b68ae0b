#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace legalner {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input syntax (JSON, UTF-8, CSV, vocab files).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
        line_(line),
        column_(column) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_ = 0;
  std::size_t column_ = 0;
};

/// Well-formed input that breaks a corpus invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Caller-supplied parameter out of range (K, p, rates, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A span boundary does not coincide with a token boundary.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// Tag sequence violates the scheme grammar under strict decoding.
class DecodeError : public Error {
 public:
  using Error::Error;
};

/// External tagger process failed, timed out or spoke the wrong protocol.
class AdapterError : public Error {
 public:
  using Error::Error;
};

/// Saved model is truncated, corrupt or of an unsupported version.
class ModelFormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace legalner
