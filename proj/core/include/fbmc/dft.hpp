#pragma once

#include <complex>
#include <span>
#include <vector>

namespace fbmc {

using cplx = std::complex<double>;

// Forward transform: X(l) = sum_k x(k) exp(-i 2 pi k l / N), no scale factor.
// Any length >= 1 is accepted (radix-2 when N is a power of two, Bluestein
// otherwise).
std::vector<cplx> dft(std::span<const cplx> x);

// Inverse transform: x(k) = (1/N) sum_l X(l) exp(+i 2 pi k l / N).
std::vector<cplx> idft(std::span<const cplx> x);

// In-place forward transform of a buffer whose size is a power of two.
// The hot path for the modem loops; dft() routes through this when it can.
void dft_pow2_inplace(std::vector<cplx>& x);

// i^k for any integer k, exact (no trig roundoff).
cplx i_pow(long long k);

}  // namespace fbmc
