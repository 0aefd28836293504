#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hexinspect {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed mesh text. `line()` is 1-based; 0 when no line applies.
class ParseError : public Error {
 public:
  ParseError(const std::string& origin, std::size_t line, const std::string& what)
      : Error(format(origin, line, what)), line_(line) {}
  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  static std::string format(const std::string& origin, std::size_t line, const std::string& what) {
    std::string s = origin.empty() ? std::string("<input>") : origin;
    if (line > 0) s += ":" + std::to_string(line);
    return s + ": " + what;
  }
  std::size_t line_;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

/// Connectivity that downstream algorithms cannot represent (e.g. non-manifold faces).
class StructureError : public Error {
 public:
  using Error::Error;
};

/// A value outside its documented domain (status fields, options, metric ids).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ArchiveError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hexinspect
