#pragma once

// Reproducible random streams.
//
// The algorithm is frozen: changing anything here changes every simulated
// sample and every regenerated critical-value table.
//
//   mix64(z)         SplitMix64 finalizer (Steele, Lea, Flood 2014):
//                      z += 0x9e3779b97f4a7c15
//                      z  = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//                      z  = (z ^ (z >> 27)) * 0x94d049bb133111eb
//                      z  =  z ^ (z >> 31)
//   stream engine    std::mt19937_64 seeded with mix64(seed); its output
//                    sequence is fixed by the C++ standard.
//   uniform          u = ((x >> 11) + 0.5) * 2^-53, so u lies strictly in (0, 1).
//   replicate seed   mix64(mix64(mix64(master) ^ cell) ^ replicate)

#include <cstdint>
#include <random>

namespace llfit {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t cell,
                                       std::uint64_t replicate) noexcept
{
  return mix64(mix64(mix64(master) ^ cell) ^ replicate);
}

/// Uniform (0,1) stream owned by a single caller.
class UniformStream
{
public:
  explicit UniformStream(std::uint64_t seed) : engine_(mix64(seed)) {}

  double operator()()
  {
    constexpr double scale = 0x1.0p-53;
    return (static_cast<double>(engine_() >> 11) + 0.5) * scale;
  }

private:
  std::mt19937_64 engine_;
};

}  // namespace llfit
