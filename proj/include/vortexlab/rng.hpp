#pragma once

#include <array>
#include <cstdint>

namespace vlab::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds.
Counter philox4x32_10(Counter ctr, Key key);

/// Two standard normals for (seed, stream, step), Box-Muller on 53-bit
/// uniforms. Depends on nothing but its arguments.
struct Normal2 {
  double a;
  double b;
};
Normal2 gaussian_pair(std::uint64_t seed, std::uint64_t stream, std::uint64_t step);

}  // namespace vlab::rng
