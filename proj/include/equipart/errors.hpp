#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace equipart {

enum class ErrorKind {
  kRange,                // exponent tuple / index outside the ring
  kShape,                // mismatched k or d between operands
  kDomain,               // argument outside a formula's domain
  kContradiction,        // claimed dimension below a proven lower bound
  kFamilyDomain,         // instance-family preconditions violated
  kInternalConsistency,  // a construction-time identity failed
  kDimensionMismatch,    // strict check with D != kd
  kInfeasibleByCounting, // D > kd
  kSearchSpace,          // atlas candidate estimate above the limit
  kUsage,                // malformed CLI / unknown format
  kConfig,               // malformed mass spec or solver configuration
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace equipart
