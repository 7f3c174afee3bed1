#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "opinion/types.hpp"

namespace opinion {

/// mt19937_64 with hand-rolled draw helpers so that sequences depend only on
/// the seed, not on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(gen_() % span);
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 == 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  Vector normal_vector(int dim) {
    Vector v(dim);
    for (int k = 0; k < dim; ++k) v[k] = normal();
    return v;
  }

  Vector unit_vector(int dim) {
    Vector v = normal_vector(dim);
    double n = v.norm();
    while (n < 1e-12) {
      v = normal_vector(dim);
      n = v.norm();
    }
    return v / n;
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace opinion
