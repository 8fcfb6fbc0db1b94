#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

// One exception type for the whole engine; the kind mirrors where in the
// pipeline the failure belongs (configuration vs. math domain vs. solver).
class Error : public std::runtime_error {
 public:
  enum class Kind {
    Config,         // bad scenario / grid / parameter input
    Domain,         // mathematically undefined request (y = 0, N <= n, ...)
    Admissibility,  // metric fails positivity / strong convexity
    Solver,         // iterative solve did not converge
    Integration,    // time or geodesic integration quality failure
    Io,             // filesystem problems
  };

  Error(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

[[noreturn]] inline void fail(Error::Kind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace finsler
