#pragma once

#include <stdexcept>
#include <string>

namespace dpnash {

// Rejected inputs: malformed scenario files, assumption violations,
// out-of-range arguments.  The CLI maps these to exit code 2.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// An iterate escaped the divergence guard.  `replica` is -1 for single runs
// and filled in by the Monte Carlo engine.
class DivergenceError : public std::runtime_error {
public:
  DivergenceError(const std::string& what, long iteration, long replica = -1)
      : std::runtime_error(what), iteration(iteration), replica(replica) {}

  long iteration;
  long replica;
};

}  // namespace dpnash
