#pragma once

#include <stdexcept>
#include <string>

namespace flexit {

// Bad argument or precondition violation.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input that makes an operation undefined (e.g. normalizing a zero vector).
class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values during optimization. Carries the step at which it happened.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, int step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  int step() const noexcept { return step_; }

 private:
  int step_;
};

// Malformed registry / index / config content.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Required image, label or file is absent.
class MissingData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A synthetic label has no reference samples.
class MissingReference : public std::runtime_error {
 public:
  explicit MissingReference(const std::string& label)
      : std::runtime_error("no reference features for label '" + label + "'"), label_(label) {}
  const std::string& label() const noexcept { return label_; }

 private:
  std::string label_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace flexit
