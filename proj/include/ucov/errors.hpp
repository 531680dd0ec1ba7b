#pragma once

#include <stdexcept>
#include <string>

namespace ucov {

// Thrown when an internal mathematical invariant fails. These indicate a bug
// (or a falsified claim) and are never swallowed.
class invariant_violation : public std::logic_error {
 public:
  explicit invariant_violation(const std::string& what) : std::logic_error(what) {}
};

// Thrown when an operation would exceed a configured memory/scale budget.
class resource_limit : public std::runtime_error {
 public:
  explicit resource_limit(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline void check_invariant(bool cond, const char* msg) {
  if (!cond) throw invariant_violation(msg);
}

}  // namespace ucov
