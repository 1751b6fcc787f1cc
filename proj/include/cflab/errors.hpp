#ifndef CFLAB_ERRORS_HPP
#define CFLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cflab {

// Bad parameters, malformed configs, violated preconditions. CLI exit code 1.
struct InvalidInput : std::invalid_argument {
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// A named gate stopped the run: enumeration budget, big-integer budget,
// hypothesis gates, missing sign change. CLI exit code 2.
struct GateRefusal : std::runtime_error {
  std::string gate;
  GateRefusal(std::string gate_name, const std::string& what)
      : std::runtime_error(what), gate(std::move(gate_name)) {}
};

}  // namespace cflab

#endif
