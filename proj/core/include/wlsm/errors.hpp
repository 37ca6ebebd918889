#pragma once

#include <stdexcept>
#include <string>

namespace wlsm {

// Raised when a computation is well-posed in exact arithmetic but fails numerically
// (singular solve, indefinite normal matrix, ill-conditioned Vandermonde).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, double condition = 0.0)
      : std::runtime_error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

}  // namespace wlsm
