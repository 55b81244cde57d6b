#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "lens/polycore.hpp"

namespace lens::test {

/// Small seeded helper for property tests.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

  cplx in_unit_disc() {
    const double r = std::sqrt(uniform(0.0, 1.0));
    const double t = uniform(0.0, 2.0 * M_PI);
    return std::polar(r, t);
  }
  cplx in_box(double h) { return {uniform(-h, h), uniform(-h, h)}; }

private:
  std::mt19937_64 gen_;
};

inline bool close(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace lens::test
