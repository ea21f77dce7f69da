#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace macwt {

/// Base of every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the CLI error record.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

/// Tensor or vector dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "shape"; }
};

/// A value violates a documented invariant (probabilities, sizes, scenario fields).
class ValidationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "validation"; }
};

/// Bad argument to an otherwise valid object (message out of range, empty grid).
class ArgumentError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "argument"; }
};

/// Exact enumeration would exceed the support guard.
class CapacityError : public Error {
 public:
  CapacityError(const std::string& what, std::uint64_t support)
      : Error(what + " (support " + std::to_string(support) + " > " +
              std::to_string(kSupportGuard) + "; shrink n)"),
        support_(support) {}

  const char* kind() const noexcept override { return "capacity"; }
  std::uint64_t support() const noexcept { return support_; }

  static constexpr std::uint64_t kSupportGuard = std::uint64_t{1} << 24;

 private:
  std::uint64_t support_;
};

/// Key-buffer misuse: a plan asked for more key bits than are eligible.
class ProtocolError : public Error {
 public:
  ProtocolError(const std::string& what, std::uint64_t shortfall)
      : Error(what), shortfall_(shortfall) {}
  const char* kind() const noexcept override { return "protocol"; }
  std::uint64_t shortfall() const noexcept { return shortfall_; }

 private:
  std::uint64_t shortfall_;
};

namespace detail {

/// Saturating product used by the support guards.
inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
  return a * b;
}

inline std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) r = checked_mul(r, base);
  return r;
}

}  // namespace detail
}  // namespace macwt
