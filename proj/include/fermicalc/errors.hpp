#pragma once

#include <stdexcept>
#include <string>

namespace fermicalc {

enum class InputErrorKind { schema, dimension, factorization };

inline const char* to_string(InputErrorKind k) {
  switch (k) {
    case InputErrorKind::schema: return "schema";
    case InputErrorKind::dimension: return "dimension";
    case InputErrorKind::factorization: return "factorization";
  }
  return "unknown";
}

/// Malformed or inconsistent model input.
class InputError : public std::runtime_error {
 public:
  InputError(InputErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  InputErrorKind kind() const { return kind_; }

 private:
  InputErrorKind kind_;
};

/// A computation left the region where the requested quantity is defined
/// (for example a vanishing normalization Z).
class OutOfDomain : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace fermicalc
