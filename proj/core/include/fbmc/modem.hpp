#pragma once

// OQAM mapping, PPN transmitter, PPN and FS receivers, and an OFDM-with-CP
// baseline over a shared burst/grid data model.
//
// Scaling convention: transforms are orthonormal end to end (1/sqrt(M) on
// each side), and both FBMC receivers divide by the nominal link gain
// (filter energy / M) so an ideal round trip has unit gain for every filter.

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "fbmc/filters.hpp"

namespace fbmc {

struct ModemParams {
  std::size_t m = 0;
  std::size_t k_overlap = 1;
  std::size_t n_symbols = 0;  // FBMC half-spaced symbol count (OFDM: QAM symbol count)
  std::vector<std::size_t> active_set;
  std::size_t cp_len = 0;
  PrototypeFilter filter;  // FBMC paths
  std::optional<TruncatedFreqResponse> rx_taps;  // FS receiver

  void validate() const;  // throws std::invalid_argument naming the bad field
};

// Real PAM amplitudes a_n(m) on the half-symbol-spaced lattice.
struct OqamGrid {
  std::size_t n_symbols = 0;
  std::size_t m = 0;
  std::vector<double> a;  // symbol-major: a[n * m + sub]

  static OqamGrid zeros(std::size_t n_symbols, std::size_t m);
  double& at(std::size_t n, std::size_t sub) { return a[n * m + sub]; }
  double at(std::size_t n, std::size_t sub) const { return a[n * m + sub]; }
};

// Complex QAM symbols c_t(m) on the full-symbol-spaced lattice.
struct QamGrid {
  std::size_t n_symbols = 0;  // QAM symbol count (t index)
  std::size_t m = 0;
  std::vector<cplx> c;

  static QamGrid zeros(std::size_t n_symbols, std::size_t m);
  cplx& at(std::size_t t, std::size_t sub) { return c[t * m + sub]; }
  cplx at(std::size_t t, std::size_t sub) const { return c[t * m + sub]; }
};

struct BasebandSignal {
  std::vector<cplx> samples;
  long sample_index_origin = 0;

  std::size_t size() const { return samples.size(); }
  double energy() const;
};

// Per-subcarrier equalizer coefficients C_n(m); flat across symbols unless
// per_symbol is set (then coeff has n_symbols * m entries).
struct Equalizer {
  std::size_t m = 0;
  bool per_symbol = false;
  std::vector<cplx> coeff;

  static Equalizer unit(std::size_t m);
  cplx at(std::size_t n, std::size_t sub) const {
    return per_symbol ? coeff[n * m + sub] : coeff[sub];
  }
};

// Staggering: QAM symbol t maps to FBMC symbols 2t (real part) and 2t+1
// (imaginary part) on every subcarrier. The lattice phase i^{n+m} is applied
// in modulation, not stored in the grid.
OqamGrid qam_to_oqam(const QamGrid& qam);

// Exact inverse on noiseless grids; n_symbols must be even.
QamGrid oqam_to_qam(const OqamGrid& pam);

// Overlap-add synthesis: per symbol n, the inverse transform of
// a_n(m) i^{n+m} e^{-i 2 pi m D / M} over m is windowed by the prototype
// taps and placed at stride M/2 (D = filter phase center). Algebraically
// identical to the direct two-index synthesis sum.
BasebandSignal ppn_modulate(const OqamGrid& grid, const ModemParams& p);

// Windowing by g, orthonormal DFT, equalization, lattice de-rotation, real
// part, link-gain normalization.
OqamGrid ppn_demodulate(const BasebandSignal& r, const ModemParams& p, const Equalizer& eq);

// Per symbol: M-sample window, orthonormal DFT, per-bin equalization,
// circular convolution with the truncated frequency taps (center phase and
// scale re-applied internally), de-rotation, real part. With untruncated
// taps this is algebraically the PPN receiver.
OqamGrid fs_demodulate(const BasebandSignal& r, const ModemParams& p, const Equalizer& eq);

// Standard CP-OFDM baseline. The receiver window starts at the middle of the
// cyclic prefix; the induced circular shift is compensated internally.
BasebandSignal ofdm_modulate(const QamGrid& qam, const ModemParams& p);
QamGrid ofdm_demodulate(const BasebandSignal& r, const ModemParams& p, const Equalizer& eq);

// Zero-forcing coefficients 1 / H(m) from a known channel impulse response.
Equalizer zf_equalizer_coeffs(const std::vector<cplx>& channel_taps, const ModemParams& p);

// Gray-mapped 16-QAM with unit average energy; nibble layout: two Gray bits
// per axis (b3 b2 -> I, b1 b0 -> Q). The per-axis helpers expose one
// 4-level Gray axis at the same scaling, for staggered-lattice bit counting.
cplx qam16_gray_map(unsigned nibble);
unsigned qam16_gray_demap(cplx y);
double pam4_gray_level(unsigned bits2);
unsigned pam4_gray_slice(double v);

}  // namespace fbmc
