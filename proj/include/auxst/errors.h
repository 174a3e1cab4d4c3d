#pragma once

#include <stdexcept>
#include <string>

namespace auxst {

// Exit-code classes for the command-line tools: configuration and usage
// problems, malformed or missing data, and numerical failures.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace auxst
