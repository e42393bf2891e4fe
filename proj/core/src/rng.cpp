#include "fbmc/rng.hpp"

#include <cmath>
#include <numbers>

namespace fbmc {

uint64_t derive_seed(uint64_t master, uint64_t stream_id) {
    // splitmix64 over (master, stream_id); one finalizer round each.
    uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream_id + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double GaussianRng::uniform() {
    // 53-bit mantissa, strictly < 1.
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

uint64_t GaussianRng::index(uint64_t n) {
    return static_cast<uint64_t>(uniform() * static_cast<double>(n));
}

double GaussianRng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(ang);
    has_spare_ = true;
    return r * std::cos(ang);
}

std::complex<double> GaussianRng::cnormal() {
    const double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
    const double re = normal() * inv_sqrt2;
    const double im = normal() * inv_sqrt2;
    return {re, im};
}

}  // namespace fbmc
