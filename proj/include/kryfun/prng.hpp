#pragma once

#include <cstdint>
#include <random>

#include "kryfun/types.hpp"

namespace kryfun {

/// Uniform draws in [0, 1) from a seeded mt19937_64, mapped through the
/// explicit 53-bit construction so the stream does not depend on the
/// standard library's distribution implementation.
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : engine_(seed) {}

  double next() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

/// Vector with entries uniform on [0, 1), normalized to unit 2-norm.
inline Vector random_unit_vector(Index n, std::uint64_t seed) {
  UniformSource source(seed);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = source.next();
  return v / v.norm();
}

}  // namespace kryfun
