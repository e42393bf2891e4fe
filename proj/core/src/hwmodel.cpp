#include "fbmc/hwmodel.hpp"

#include <cmath>
#include <stdexcept>

namespace fbmc {

void FixedPointFormat::validate() const {
  if (total_bits < 2 || total_bits > 32)
    throw std::invalid_argument("fixed-point format: total_bits outside [2, 32]");
  if (frac_bits >= total_bits)
    throw std::invalid_argument("fixed-point format: frac_bits must be below total_bits");
}

int64_t quantize(double x, const FixedPointFormat& fmt) {
  fmt.validate();
  const double scaled = std::ldexp(x, fmt.frac_bits);
  const double raw = (fmt.rounding == Rounding::HalfUp) ? std::floor(scaled + 0.5)
                                                        : std::floor(scaled);
  if (raw > static_cast<double>(fmt.max_code()) || raw < static_cast<double>(fmt.min_code())) {
    if (!fmt.saturation) throw std::overflow_error("quantize: value exceeds format range");
    return raw > 0 ? fmt.max_code() : fmt.min_code();
  }
  return static_cast<int64_t>(raw);
}

double dequantize(int64_t code, const FixedPointFormat& fmt) {
  fmt.validate();
  return std::ldexp(static_cast<double>(code), -fmt.frac_bits);
}

std::size_t CsdCode::nonzero_count() const {
  std::size_t n = 0;
  for (int8_t d : digits) n += (d != 0);
  return n;
}

CsdCode csd_encode(long long v) {
  CsdCode out;
  out.value = v;
  // Non-adjacent form: strip one signed digit per bit from the low end;
  // choosing d = 2 - (v mod 4) on odd v forces the next bit to zero, which
  // yields the canonical (minimal, no-adjacent-nonzeros) representation.
  long long x = v;
  while (x != 0) {
    if (x % 2 != 0) {
      const long long mod4 = ((x % 4) + 4) % 4;
      const long long d = 2 - mod4;  // +1 or -1
      out.digits.push_back(static_cast<int8_t>(d));
      x -= d;
    } else {
      out.digits.push_back(0);
    }
    x /= 2;
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>> split_even_odd(
    const TruncatedFreqResponse& rx) {
  std::vector<double> even, odd;
  for (long l = 0; l <= static_cast<long>(rx.delta); ++l) {
    (l % 2 == 0 ? even : odd).push_back(rx.at(l));
  }
  return {even, odd};
}

namespace {

int64_t csd_multiply(const CsdCode& coeff, int64_t x) {
  int64_t acc = 0;
  for (std::size_t k = 0; k < coeff.digits.size(); ++k) {
    const int8_t d = coeff.digits[k];
    if (d == 0) continue;
    const int64_t shifted = x << k;
    acc += (d > 0) ? shifted : -shifted;
  }
  return acc;
}

int quadrant(long n, long o) {
  return static_cast<int>((((n + o) % 4) + 4) % 4);
}

int64_t round_to_data(int64_t acc, int shift, const FixedPointFormat& fmt_data) {
  int64_t v;
  if (shift <= 0) {
    v = acc;
  } else if (fmt_data.rounding == Rounding::HalfUp) {
    v = (acc + (int64_t{1} << (shift - 1))) >> shift;
  } else {
    v = acc >> shift;
  }
  if (v > fmt_data.max_code() || v < fmt_data.min_code()) {
    if (!fmt_data.saturation) throw std::overflow_error("fs_filter_fixed: output overflow");
    return v > 0 ? fmt_data.max_code() : fmt_data.min_code();
  }
  return v;
}

}  // namespace

FsFixedResult fs_filter_fixed(const std::vector<QuantizedBin>& bins,
                              const TruncatedFreqResponse& rx, FixedPointFormat fmt_coeff,
                              FixedPointFormat fmt_data, long schedule_index, bool emit_trace) {
  fmt_coeff.validate();
  fmt_data.validate();
  const long m = static_cast<long>(bins.size());
  if (m == 0 || bins.size() != rx.m)
    throw std::invalid_argument("fs_filter_fixed: bin count must match the tap grid");
  const long delta = static_cast<long>(rx.delta);
  const long n = schedule_index;

  std::vector<int64_t> qg(rx.taps.size());
  std::vector<CsdCode> csd(rx.taps.size());
  for (long l = -delta; l <= delta; ++l) {
    qg[static_cast<std::size_t>(l + delta)] = quantize(rx.at(l), fmt_coeff);
    csd[static_cast<std::size_t>(l + delta)] =
        csd_encode(qg[static_cast<std::size_t>(l + delta)]);
  }

  // Derived accumulator width: full product growth plus tap-count guard.
  int guard = 0;
  while ((std::size_t{1} << guard) < rx.n_g) ++guard;
  const int accum_bits = fmt_data.total_bits + fmt_coeff.total_bits + guard;
  const int64_t accum_limit = (accum_bits >= 63) ? INT64_MAX : (int64_t{1} << (accum_bits - 1));

  FsFixedResult res;
  res.pam.assign(static_cast<std::size_t>(m), 0);
  std::vector<int64_t> acc(static_cast<std::size_t>(m), 0);

  uint64_t cycle = 0;
  for (long jj = -delta; jj < m + delta; ++jj) {
    const long j = ((jj % m) + m) % m;
    const QuantizedBin x = bins[static_cast<std::size_t>(j)];
    const bool re_even_bank = ((n + jj) % 2 + 2) % 2 == 0;

    for (int phase = 0; phase < 2; ++phase, ++cycle) {
      const int64_t part = (phase == 0) ? x.re : x.im;
      // Phase 0 routes the real part through the bank whose tap parity keeps
      // (n + output) even; phase 1 routes the imaginary part through the
      // complementary bank.
      const int tap_parity = (phase == 0) == re_even_bank ? 0 : 1;
      for (long l = -delta; l <= delta; ++l) {
        if ((((l % 2) + 2) % 2) != tap_parity) continue;
        const long o = jj + l;
        if (o < 0 || o >= m) continue;  // each output/tap pair counted once
        acc[static_cast<std::size_t>(o)] +=
            csd_multiply(csd[static_cast<std::size_t>(l + delta)], part);
      }

      FsTraceRow row;
      if (emit_trace) {
        row.cycle = cycle;
        row.phase = phase;
        row.input_bin = j;
        row.enables = (tap_parity == 0) ? (phase == 0 ? "ERDP" : "EIDP")
                                        : (phase == 0 ? "ORDP" : "OIDP");
        row.output_bin = -1;
      }

      // One output completes per phase pair, after the delta-bin fill.
      if (phase == 1) {
        const long o = jj - delta;
        if (o >= 0 && o < m) {
          int64_t a = acc[static_cast<std::size_t>(o)];
          if ((a > accum_limit - 1 || a < -accum_limit) && !fmt_data.saturation)
            throw std::overflow_error("fs_filter_fixed: accumulator overflow");
          const int q = quadrant(n, o);
          if (q >= 2) a = -a;
          const int64_t code = round_to_data(a, fmt_coeff.frac_bits, fmt_data);
          res.pam[static_cast<std::size_t>(o)] = code;
          if (emit_trace) {
            row.acc = a;
            row.output_bin = o;
            row.output_code = code;
          }
        }
      }
      if (emit_trace) res.trace.push_back(std::move(row));
    }
  }
  return res;
}

std::vector<double> fs_filter_float(const std::vector<cplx>& bins,
                                    const TruncatedFreqResponse& rx, long schedule_index) {
  const long m = static_cast<long>(bins.size());
  if (m == 0 || bins.size() != rx.m)
    throw std::invalid_argument("fs_filter_float: bin count must match the tap grid");
  const long delta = static_cast<long>(rx.delta);
  std::vector<double> out(static_cast<std::size_t>(m), 0.0);
  for (long o = 0; o < m; ++o) {
    const int q = quadrant(schedule_index, o);
    double sum = 0.0;
    for (long l = -delta; l <= delta; ++l) {
      const long j = (((o - l) % m) + m) % m;
      const cplx v = bins[static_cast<std::size_t>(j)];
      sum += rx.at(l) * (q % 2 == 0 ? v.real() : v.imag());
    }
    out[static_cast<std::size_t>(o)] = (q >= 2) ? -sum : sum;
  }
  return out;
}

ComplexityReport complexity_report(const TruncatedFreqResponse& rx, std::size_t m,
                                   std::size_t n_c, const FixedPointFormat& fmt_coeff) {
  fmt_coeff.validate();
  ComplexityReport rep;
  const std::size_t delta = rx.delta;
  rep.real_mults_per_symbol = delta * n_c;
  rep.real_adds_per_symbol = 2 * delta * n_c;
  rep.ppn_real_mults_per_symbol = 2 * m;
  for (long l = 1; l <= static_cast<long>(delta); ++l) {
    const CsdCode code = csd_encode(quantize(rx.at(l), fmt_coeff));
    const std::size_t nz = code.nonzero_count();
    rep.csd_adders += (nz > 0) ? nz - 1 : 0;
  }
  rep.registers = 4 * ((delta + 2) / 2);
  rep.ratio_vs_ppn =
      (static_cast<double>(n_c) / static_cast<double>(m)) * static_cast<double>(delta) / 2.0;
  return rep;
}

}  // namespace fbmc
