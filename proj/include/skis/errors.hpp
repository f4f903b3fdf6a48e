#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace skis {

/// Base class for all library errors.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text; carries the 1-based line number of the offense.
class parse_error : public error {
 public:
  parse_error(std::size_t line, const std::string& what)
      : error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A domain rule was violated (bad weight, bad parameter, unknown node id, ...).
class validation_error : public error {
 public:
  using error::error;
};

/// The importance-sampling source distribution has no mass (Gamma = 0).
class no_mass_error : public validation_error {
 public:
  using validation_error::validation_error;
};

/// An instance exceeds an exact-computation limit.
class size_error : public validation_error {
 public:
  using validation_error::validation_error;
};

class io_error : public error {
 public:
  using error::error;
};

/// Bad magic, bad version, or truncated binary stream.
class format_error : public io_error {
 public:
  using io_error::io_error;
};

/// Two objects that must agree (graph hash, sketch kind, model) do not.
class incompatible_error : public error {
 public:
  using error::error;
};

}  // namespace skis
