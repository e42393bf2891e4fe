#include "fbmc/dft.hpp"

#include <numbers>
#include <stdexcept>

namespace fbmc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative Cooley-Tukey, decimation in time, forward sign convention.
void fft_pow2(std::vector<cplx>& a) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = -kTwoPi / static_cast<double>(len);
        const cplx wlen = std::polar(1.0, ang);
        for (size_t i = 0; i < n; i += len) {
            cplx w{1.0, 0.0};
            for (size_t k = 0; k < len / 2; ++k) {
                cplx u = a[i + k];
                cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// Bluestein chirp-z transform for arbitrary N, forward sign convention.
std::vector<cplx> bluestein(std::span<const cplx> x) {
    const size_t n = x.size();
    size_t m = 1;
    while (m < 2 * n - 1) m <<= 1;

    // chirp(k) = exp(-i pi k^2 / n); k^2 mod 2n keeps the argument small.
    std::vector<cplx> chirp(n);
    for (size_t k = 0; k < n; ++k) {
        const auto k2 = static_cast<double>((k * k) % (2 * n));
        chirp[k] = std::polar(1.0, -std::numbers::pi * k2 / static_cast<double>(n));
    }

    std::vector<cplx> a(m, cplx{0.0, 0.0});
    std::vector<cplx> b(m, cplx{0.0, 0.0});
    for (size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
    b[0] = std::conj(chirp[0]);
    for (size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);

    fft_pow2(a);
    fft_pow2(b);
    for (size_t k = 0; k < m; ++k) a[k] *= b[k];
    // Unscaled inverse FFT via conjugation.
    for (auto& v : a) v = std::conj(v);
    fft_pow2(a);
    for (auto& v : a) v = std::conj(v);

    std::vector<cplx> out(n);
    const double scale = 1.0 / static_cast<double>(m);
    for (size_t k = 0; k < n; ++k) out[k] = a[k] * chirp[k] * scale;
    return out;
}

}  // namespace

void dft_pow2_inplace(std::vector<cplx>& x) {
    if (!is_pow2(x.size())) throw std::invalid_argument("dft_pow2_inplace: size must be a power of two");
    fft_pow2(x);
}

std::vector<cplx> dft(std::span<const cplx> x) {
    if (x.empty()) throw std::invalid_argument("dft: empty input");
    if (is_pow2(x.size())) {
        std::vector<cplx> a(x.begin(), x.end());
        fft_pow2(a);
        return a;
    }
    return bluestein(x);
}

std::vector<cplx> idft(std::span<const cplx> x) {
    if (x.empty()) throw std::invalid_argument("idft: empty input");
    std::vector<cplx> a(x.begin(), x.end());
    for (auto& v : a) v = std::conj(v);
    std::vector<cplx> y = dft(a);
    const double scale = 1.0 / static_cast<double>(x.size());
    for (auto& v : y) v = std::conj(v) * scale;
    return y;
}

cplx i_pow(long long k) {
    switch (((k % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

}  // namespace fbmc
