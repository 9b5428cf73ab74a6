#pragma once

#include <stdexcept>
#include <string>

namespace jade {

/// A configuration or input violates a model precondition.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A query against a trace cannot be answered from what the trace recorded.
class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace jade
