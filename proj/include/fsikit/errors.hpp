#pragma once

#include <stdexcept>
#include <string>

namespace fsi {

// Invalid or inconsistent user-facing configuration (files, CLI, run setup).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Geometric preconditions violated (point outside box, degenerate curve, ...).
struct GeometryError : std::runtime_error {
  explicit GeometryError(const std::string& msg) : std::runtime_error(msg) {}
};

// Linear-algebra failures: singular systems, factorization breakdown,
// unacceptable solve residuals.
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fsi
