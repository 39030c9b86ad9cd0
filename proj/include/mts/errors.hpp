#pragma once

#include <stdexcept>
#include <string>

namespace mts {

/// Invalid configuration or scene/array parameters that violate a contract.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mts
