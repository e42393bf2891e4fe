#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace fbmc {

// Derives an independent substream seed from a master seed. Monte-Carlo
// loops give every trial its own stream_id so results do not depend on
// execution order or worker count.
uint64_t derive_seed(uint64_t master, uint64_t stream_id);

// Deterministic Gaussian source: mt19937_64 + explicit Box-Muller, so a
// fixed seed produces the same bits on every platform (the distribution
// classes in <random> make no such promise).
class GaussianRng {
  public:
    explicit GaussianRng(uint64_t seed) : gen_(seed) {}

    // Standard normal (mean 0, variance 1).
    double normal();

    // Circularly symmetric complex normal with E|z|^2 = 1.
    std::complex<double> cnormal();

    // Uniform in [0, 1).
    double uniform();

    // Uniform integer in [0, n).
    uint64_t index(uint64_t n);

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace fbmc
