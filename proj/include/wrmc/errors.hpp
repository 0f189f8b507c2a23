#pragma once

#include <stdexcept>
#include <string>

namespace wrmc {

/// Malformed input text (model or function files).
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// A structurally sound model violating one of its invariants; the message
/// names the failed check and the offending entries.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure inside the exact engine (singular Poisson system,
/// negative row completion, resource guard).
struct ComputeError : std::runtime_error {
  explicit ComputeError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace wrmc
