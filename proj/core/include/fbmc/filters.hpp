#pragma once

// Short prototype filters for FBMC/OQAM (overlapping factor K = 1), their
// frequency responses, truncated/normalized receive tap sets, and filter-bank
// impulse responses used by the analytical SIR machinery.

#include <complex>
#include <cstddef>
#include <vector>

namespace fbmc {

using cplx = std::complex<double>;

enum class FilterName { QMF1, TFL1, NPR1, Custom };

const char* filter_name_str(FilterName name);

// Real impulse response g(0..L-1), L = k_overlap * m, plus metadata.
//
// phase_center is the filter's symmetry center in samples. Per-subcarrier
// exponentials are referenced to this point throughout the modem and the
// analytical formulas: without it, filters whose symmetry axis is not at the
// window origin (TFL1 sits at (m-1)/2) lose orthogonality in the real field
// and the modem shows a false interference floor. For QMF1/NPR1 the center is
// m/2, where the reference phase degenerates to a per-subcarrier sign.
struct PrototypeFilter {
  FilterName name = FilterName::Custom;
  std::size_t m = 0;
  std::size_t k_overlap = 1;
  std::vector<double> taps;
  double phase_center = 0.0;

  std::size_t length() const { return taps.size(); }
  double energy() const;  // sum of squared taps
};

// g(k) = sin(pi k / m). Unit peak, even about sample m/2.
PrototypeFilter gen_qmf1(std::size_t m);

// Closed-form time-frequency-localized filter; half-sample symmetric
// (g(k) = g(m-1-k)), peak-normalized after generation.
PrototypeFilter gen_tfl1(std::size_t m);

// g(k) = sqrt(1 - 2 sum_{l=0..2} P(l) cos(2 pi k (2l+1) / m)).
// Even about sample m/2; unit energy sum g^2 = m by construction. The peak
// tap is sqrt(2) (at k = m/2), not 1 -- the closed form is kept verbatim.
PrototypeFilter gen_npr1(std::size_t m);

// Reconstructs the NPR1 shape from the quantized 7-entry filter-bank column
// (harmonics {0,+-1,+-2,+-3} placed about the m/2 symmetry center). Matches
// gen_npr1 only as well as the 3-decimal source values allow: the error is
// below 8e-2 everywhere (square-root steepening near the zero-valued edges)
// and below 3.2e-3 where g > 0.6.
PrototypeFilter gen_npr1_from_fb(std::size_t m);

// Full complex frequency response, forward transform with no scale factor.
// Bins addressable by centered index l in [-n/2, n/2-1].
struct FreqResponse {
  std::vector<cplx> bins;  // natural DFT order

  std::size_t size() const { return bins.size(); }
  cplx at(long l) const;
};

// DFT of the taps zero-padded to n_points (n_points >= filter length).
FreqResponse freq_response(const PrototypeFilter& f, std::size_t n_points);

// Centered, odd-length, real, normalized frequency-domain tap set G'(l),
// l in [-delta, delta], with G'(0) = 1. The linear phase of the filter's
// symmetry center is compensated before the realness check; phase_center
// records where, so downstream consumers can re-apply it.
struct TruncatedFreqResponse {
  std::vector<double> taps;  // index i maps to l = i - delta
  std::size_t n_g = 0;
  std::size_t delta = 0;
  double scale = 1.0;         // G(0) factored out
  double phase_center = 0.0;  // in samples of the originating filter
  std::size_t m = 0;          // DFT length the taps were drawn from

  double at(long l) const;  // |l| <= delta
};

// Keep bins -delta..delta of G, divide by G(0); imaginary residue above
// 1e-9 relative magnitude (after center-phase compensation) is an error.
TruncatedFreqResponse truncate_normalize(const FreqResponse& G, std::size_t n_g,
                                         double phase_center);

// Convenience: m-point response of f, truncated to n_g taps, phase-centered
// at the filter's own symmetry center.
TruncatedFreqResponse truncate_normalize(const PrototypeFilter& f, std::size_t n_g);

// Inverse-transform of the truncated response back to a length-m real pulse:
// gt(k) = (scale / m) * sum_l G'(l) e^{+i 2 pi l (k - phase_center) / m}.
// With n_g = m + 1 (full circle) this reproduces the original taps.
std::vector<double> truncated_time_taps(const TruncatedFreqResponse& rx);

// Complex transceiver gain table F(p, q) over frequency offset p (subcarriers)
// and time offset q (samples, or half-symbol units for the printed reference
// table below).
struct FilterBankResponse {
  std::vector<long> p_values;
  std::vector<long> q_values;
  std::vector<cplx> table;  // row-major: p index major, q index minor

  cplx at(long p, long q) const;
  bool has(long p, long q) const;
};

// The printed 7x3 reference table for the K=4 MMB filter: p in {-1,0,1}
// (columns), q in {-3..3} half-symbol units (rows).
FilterBankResponse mmb4_fb_table();

// F(p, q) = sum_k g_tx(k + q) g_rx(k) e^{-i 2 pi p (k - center) / M} / (|g_tx| |g_rx|),
// with out-of-range g_tx indices reading zero and both filters normalized to
// unit energy, so F(0,0) = 1 when g_rx = g_tx. p spans the full range
// [-M/2, M/2-1]; q is any set of sample offsets.
FilterBankResponse fb_impulse_response(const std::vector<double>& g_tx,
                                       const std::vector<double>& g_rx,
                                       const std::vector<long>& q_samples,
                                       std::size_t m, double center);

// Same, with p and q taken from the filter: full p, q in {-Q..Q} half symbols.
FilterBankResponse fb_impulse_response(const PrototypeFilter& g_tx, int q_max_half_symbols);

// Single fractional-frequency evaluation of the same sum (used for CFO,
// where the frequency offset r + p is not an integer subcarrier count).
cplx fb_response_at(const std::vector<double>& g_tx, const std::vector<double>& g_rx,
                    double p_frac, long q_samples, std::size_t m, double center);

}  // namespace fbmc
