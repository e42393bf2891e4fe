#pragma once

// Bit-accurate fixed-point model of the frequency-domain filter stage:
// even/odd coefficient banks, canonical-signed-digit multipliers, two-phase
// input schedule, plus abstract complexity accounting.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fbmc/filters.hpp"

namespace fbmc {

enum class Rounding { HalfUp, Truncate };

struct FixedPointFormat {
  int total_bits = 16;
  int frac_bits = 15;
  Rounding rounding = Rounding::HalfUp;
  bool saturation = true;

  void validate() const;  // 2 <= total_bits <= 32, frac_bits < total_bits
  int64_t max_code() const { return (int64_t{1} << (total_bits - 1)) - 1; }
  int64_t min_code() const { return -(int64_t{1} << (total_bits - 1)); }
};

// Value -> integer code at 2^-frac_bits resolution.
int64_t quantize(double x, const FixedPointFormat& fmt);
double dequantize(int64_t code, const FixedPointFormat& fmt);

// Digits over {-1, 0, +1} with weight 2^k at index k; canonical form has no
// two adjacent nonzero digits and the minimal nonzero count.
struct CsdCode {
  std::vector<int8_t> digits;
  long long value = 0;

  std::size_t nonzero_count() const;
};

CsdCode csd_encode(long long v);

// Nonnegative-index taps split by parity: even = {G'(0), G'(2), ...},
// odd = {G'(1), G'(3), ...}. Negative indices are covered by symmetry.
std::pair<std::vector<double>, std::vector<double>> split_even_odd(const TruncatedFreqResponse& rx);

struct QuantizedBin {
  int64_t re = 0;
  int64_t im = 0;
};

struct FsTraceRow {
  uint64_t cycle = 0;
  int phase = 0;          // 0: real-part routing, 1: imaginary-part routing
  long input_bin = 0;     // wrapped input index consumed this phase pair
  std::string enables;    // active data paths, e.g. "ERDP" or "OIDP"
  int64_t acc = 0;        // accumulator of the output completing this cycle
  long output_bin = -1;   // -1 while the pipeline is filling
  int64_t output_code = 0;
};

struct FsFixedResult {
  std::vector<int64_t> pam;      // one code per output bin, fmt_data scale
  std::vector<FsTraceRow> trace; // two rows per consumed input when enabled
};

// Streams the M quantized bins of one symbol through the two-phase filter
// stage: per input, the real part feeds one parity's coefficient bank and
// the imaginary part the other (which pairing depends on the input parity
// against schedule_index), transposed-form accumulators complete one output
// per input after a delta-bin fill, and the lattice sign of (n+m) is applied
// at the output. Arithmetic is integer-exact: coefficients are quantized to
// fmt_coeff and multiplied via their CSD digits; the single rounding to
// fmt_data happens at the output. schedule_index is the half-spaced symbol
// index n fixing the phase schedule. Throws std::overflow_error if the
// accumulator exceeds its derived width while fmt_data.saturation is off.
FsFixedResult fs_filter_fixed(const std::vector<QuantizedBin>& bins,
                              const TruncatedFreqResponse& rx, FixedPointFormat fmt_coeff,
                              FixedPointFormat fmt_data, long schedule_index,
                              bool emit_trace = false);

// The floating-point counterpart of fs_filter_fixed over the same routing
// (unquantized taps, exact reals): the reference for error-bound checks.
std::vector<double> fs_filter_float(const std::vector<cplx>& bins,
                                    const TruncatedFreqResponse& rx, long schedule_index);

struct ComplexityReport {
  std::size_t real_mults_per_symbol = 0;  // delta * n_c
  std::size_t real_adds_per_symbol = 0;   // 2 * delta * n_c
  std::size_t ppn_real_mults_per_symbol = 0;  // 2 * m baseline
  std::size_t csd_adders = 0;   // sum over quantized taps of (nonzeros - 1)
  std::size_t registers = 0;    // 4 * taps per parity FIR
  double ratio_vs_ppn = 0.0;    // (n_c / m) * delta / 2
};

ComplexityReport complexity_report(const TruncatedFreqResponse& rx, std::size_t m,
                                   std::size_t n_c, const FixedPointFormat& fmt_coeff);

}  // namespace fbmc
