#pragma once

#include <stdexcept>
#include <string>

namespace clarkbmo {

/// Base exception for every precondition or numerical failure in the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by the JSON readers; `field()` names the offending field ("atoms[2].mass", ...).
class ParseError : public Error {
 public:
  ParseError(std::string field, const std::string& what)
      : Error(what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace clarkbmo
