#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace v2x {

/// Absolute simulation time in 1 ms subframes.
using Subframe = std::int64_t;

/// Vehicle identifier; dense in [0, vehicle count).
using VueId = std::uint32_t;

/// Raised for any invalid or infeasible configuration. Carries a one-line diagnosis.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace v2x
