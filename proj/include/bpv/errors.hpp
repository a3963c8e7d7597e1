#pragma once

#include <stdexcept>
#include <string>

namespace bpv {

// Bad user-supplied parameters or mismatched ring/context configuration.
class config_error : public std::runtime_error {
public:
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// An operation was called on arguments violating its stated precondition.
class precondition_error : public std::runtime_error {
public:
  explicit precondition_error(const std::string& msg) : std::runtime_error(msg) {}
};

// An internal invariant failed; indicates a bug, not a user error.
class internal_error : public std::runtime_error {
public:
  explicit internal_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace bpv
