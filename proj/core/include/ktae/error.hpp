#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ktae {

enum class Errc {
  EmptyGroup,
  EmptyRollout,
  LengthMismatch,
  DomainError,
  DegenerateGroup,
  TooFewRollouts,
  Overflow,
  SpecError,
  ConfigError,
  ParseError,
  MissingTexts,
  UnknownGroup,
};

std::string_view to_string(Errc code) noexcept;

/// All library failures are reported through this type; `code()` tells the
/// caller which contract was broken.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace ktae
