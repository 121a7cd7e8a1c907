#pragma once

#include <stdexcept>
#include <string>

namespace loglap {

// Error hierarchy; the CLI maps these onto exit codes (config/domain -> 2,
// numerical failures -> 3).
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// invalid argument of a mathematical function (x <= 0 for gamma, ...)
struct domain_error : error {
  using error::error;
};

// invalid configuration or violated operation precondition
struct config_error : error {
  using error::error;
};

// geometric inconsistency during matrix assembly
struct assembly_error : error {
  using error::error;
};

// mismatched grids / matrix dimensions
struct dimension_error : error {
  using error::error;
};

// eigensolver did not converge
struct spectral_error : error {
  using error::error;
};

// descent / root finding failure
struct solver_error : error {
  using error::error;
};

struct io_error : error {
  using error::error;
};

}  // namespace loglap
