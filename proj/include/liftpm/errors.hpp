#pragma once

#include <stdexcept>
#include <string>

namespace liftpm {

// Bad input or violated precondition. The CLI maps this to exit code 2.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// An enumeration or counting budget was exceeded. CLI exit code 3.
class budget_error : public std::runtime_error {
 public:
  explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

// Two redundant computation paths disagreed.
class consistency_error : public std::logic_error {
 public:
  explicit consistency_error(const std::string& what) : std::logic_error(what) {}
};

}  // namespace liftpm
