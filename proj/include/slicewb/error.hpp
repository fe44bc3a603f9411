#pragma once

#include <stdexcept>
#include <string>

namespace slicewb {

enum class ErrorKind {
  CapacityExceeded,
  Factorization,
  Scenario,
  Validation,
  InfeasibleCapacity,
  NoFeasibleAction,
  GridCapExceeded,
  Io,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; `field` names the offending config
// field for validation errors and is empty otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string field = {})
      : std::runtime_error(message), kind_(kind), field_(std::move(field)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& field() const { return field_; }

 private:
  ErrorKind kind_;
  std::string field_;
};

}  // namespace slicewb
