#pragma once

#include <stdexcept>
#include <string>

namespace airfoil {

// Invalid configuration or a violated domain contract; maps to exit
// code 1 in the CLI.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Missing binaries, unwritable paths, broken environments; maps to exit
// code 2 in the CLI.
struct EnvironmentError : std::runtime_error {
  explicit EnvironmentError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace airfoil
