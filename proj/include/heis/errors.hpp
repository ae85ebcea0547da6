#pragma once

#include <stdexcept>
#include <string>

namespace heis {

// All hard failures funnel through these so the CLI can map them to the
// documented exit codes (config/usage problems vs numerical refusals).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Non-finite values, evaluation at a pole, or domain violations.
struct EvaluationError : Error {
  using Error::Error;
};

// A flow trajectory left the allowed region before time ran out.
struct EscapeError : Error {
  using Error::Error;
};

// Radial partial sums of an integral failed to settle.
struct IntegrabilityError : Error {
  using Error::Error;
};

// A bound that must be finite diverged (e.g. dilatation budget).
struct DivergenceError : Error {
  using Error::Error;
};

}  // namespace heis
