#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace npdt {

enum class ErrorKind {
  dimension,       // mismatched vector/matrix sizes
  domain,          // argument outside the mathematical domain
  input,           // malformed user input (files, flags)
  structural,      // structural assumption violated (irreducibility, positivity)
  numeric,         // iteration cap, step underflow, blow-up
  singularity,     // shift at or near an eigenvalue
  no_equilibrium,  // principal eigenvalue is not negative
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::domain: return "domain";
    case ErrorKind::input: return "input";
    case ErrorKind::structural: return "structural";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::singularity: return "singularity";
    case ErrorKind::no_equilibrium: return "no-equilibrium";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

namespace detail {

inline void require_same_size(std::size_t a, std::size_t b, const char* context) {
  if (a != b) {
    throw Error(ErrorKind::dimension, std::string(context) + ": size " + std::to_string(a) +
                                          " does not match " + std::to_string(b));
  }
}

}  // namespace detail
}  // namespace npdt
