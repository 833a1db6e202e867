#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace hidjam {

// Channels are 1-based. kNone marks "no channel" (absent jammer, failed detection,
// unfilled history slot) and never compares equal to a real channel.
using Channel = int;
inline constexpr Channel kNone = 0;

using Rng = std::mt19937_64;

// Raised for malformed scenario or experiment configuration. `field` is the dotted
// path of the offending key, e.g. "jammer.kind".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

inline Channel uniform_channel(int num_channels, Rng& rng) {
  return std::uniform_int_distribution<Channel>(1, num_channels)(rng);
}

}  // namespace hidjam
