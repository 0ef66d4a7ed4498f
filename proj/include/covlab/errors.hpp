#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace covlab {

/// A model or configuration parameter violated its invariant. `field()` names
/// the offending parameter so the harness can report it.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

inline void require(bool condition, const char* field, const std::string& message) {
  if (!condition) throw ValidationError(field, message);
}

}  // namespace covlab
