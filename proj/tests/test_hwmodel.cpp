#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "fbmc/filters.hpp"
#include "fbmc/hwmodel.hpp"
#include "fbmc/rng.hpp"

using fbmc::cplx;
using fbmc::FixedPointFormat;
using fbmc::QuantizedBin;
using fbmc::Rounding;

namespace {

FixedPointFormat fmt(int total, int frac, Rounding r = Rounding::HalfUp, bool sat = true) {
  FixedPointFormat f;
  f.total_bits = total;
  f.frac_bits = frac;
  f.rounding = r;
  f.saturation = sat;
  return f;
}

}  // namespace

TEST_CASE("scalar quantization landmarks") {
  const auto q1_11 = fmt(12, 11);
  CHECK(q1_11.max_code() == 2047);
  CHECK(q1_11.min_code() == -2048);
  CHECK(fbmc::quantize(0.0, q1_11) == 0);
  CHECK(fbmc::quantize(0.564447, q1_11) == 1156);
  CHECK(fbmc::quantize(-0.564447, q1_11) == -1156);

  // +1.0 does not fit a frac = total-1 format: saturate or throw.
  CHECK(fbmc::quantize(1.0, fmt(16, 15)) == 32767);
  CHECK(fbmc::quantize(-1.0, fmt(16, 15)) == -32768);
  CHECK_THROWS_AS(fbmc::quantize(1.0, fmt(16, 15, Rounding::HalfUp, false)),
                  std::overflow_error);

  // Rounding semantics: half-up rounds to nearest, truncate floors.
  CHECK(fbmc::quantize(0.375, fmt(8, 2)) == 2);
  CHECK(fbmc::quantize(0.375, fmt(8, 2, Rounding::Truncate)) == 1);
  CHECK(fbmc::quantize(-0.375, fmt(8, 2)) == -1);
  CHECK(fbmc::quantize(-0.375, fmt(8, 2, Rounding::Truncate)) == -2);

  // Round trip within a half step.
  for (double x = -0.999; x < 1.0; x += 0.0137) {
    const double back = fbmc::dequantize(fbmc::quantize(x, q1_11), q1_11);
    CHECK(std::abs(back - x) <= std::ldexp(1.0, -12) + 1e-15);
  }

  CHECK_THROWS_AS(fbmc::quantize(0.1, fmt(1, 0)), std::invalid_argument);
  CHECK_THROWS_AS(fbmc::quantize(0.1, fmt(33, 2)), std::invalid_argument);
  CHECK_THROWS_AS(fbmc::quantize(0.1, fmt(8, 8)), std::invalid_argument);
}

TEST_CASE("signed-digit recoding is canonical") {
  const auto seven = fbmc::csd_encode(7);
  REQUIRE(seven.digits.size() == 4);  // 8 - 1
  CHECK(seven.digits[0] == -1);
  CHECK(seven.digits[1] == 0);
  CHECK(seven.digits[2] == 0);
  CHECK(seven.digits[3] == 1);
  CHECK(seven.nonzero_count() == 2);
  CHECK(seven.value == 7);

  const auto zero = fbmc::csd_encode(0);
  CHECK(zero.digits.empty());
  CHECK(zero.nonzero_count() == 0);

  // Exhaustive over the 12-bit coefficient range: exact value, no two
  // adjacent nonzero digits.
  for (long long v = -2048; v <= 2047; ++v) {
    const auto c = fbmc::csd_encode(v);
    long long r = 0;
    for (std::size_t k = 0; k < c.digits.size(); ++k)
      r += static_cast<long long>(c.digits[k]) << k;
    REQUIRE(r == v);
    REQUIRE(c.value == v);
    for (std::size_t k = 1; k < c.digits.size(); ++k)
      REQUIRE(!(c.digits[k] != 0 && c.digits[k - 1] != 0));
  }

  // Minimal nonzero count: brute force all signed-digit strings of length 8.
  for (long long v = -64; v <= 63; ++v) {
    std::size_t best = 99;
    for (int code = 0; code < 6561; ++code) {  // 3^8
      int c2 = code;
      long long r = 0;
      std::size_t nz = 0;
      for (int k = 0; k < 8; ++k) {
        const int d = c2 % 3 - 1;
        c2 /= 3;
        r += static_cast<long long>(d) << k;
        nz += (d != 0);
      }
      if (r == v) best = std::min(best, nz);
    }
    CHECK(fbmc::csd_encode(v).nonzero_count() == best);
  }
}

TEST_CASE("coefficient banks split by tap parity") {
  const auto f = fbmc::gen_npr1(512);
  const auto rx = fbmc::truncate_normalize(f, 7);
  const auto [even, odd] = fbmc::split_even_odd(rx);
  REQUIRE(even.size() == 2);
  REQUIRE(odd.size() == 2);
  CHECK(even[0] == 1.0);
  CHECK(even[1] == rx.at(2));
  CHECK(odd[0] == rx.at(1));
  CHECK(odd[1] == rx.at(3));

  // Re-interleaving recovers the nonnegative tap side.
  for (long l = 0; l <= static_cast<long>(rx.delta); ++l) {
    const double v = (l % 2 == 0) ? even[static_cast<std::size_t>(l / 2)]
                                  : odd[static_cast<std::size_t>(l / 2)];
    CHECK(v == rx.at(l));
  }

  const auto rx1 = fbmc::truncate_normalize(f, 1);
  const auto [e1, o1] = fbmc::split_even_odd(rx1);
  REQUIRE(e1.size() == 1);
  CHECK(e1[0] == 1.0);
  CHECK(o1.empty());
}

TEST_CASE("filter stage: zero input, impulse routing, schedule quadrants") {
  const auto f = fbmc::gen_npr1(16);
  const auto rx = fbmc::truncate_normalize(f, 7);
  const auto coeff = fmt(24, 22);
  const auto data = fmt(16, 11);

  const std::vector<QuantizedBin> zeros(16, QuantizedBin{0, 0});
  const auto z = fbmc::fs_filter_fixed(zeros, rx, coeff, data, 0);
  for (auto v : z.pam) CHECK(v == 0);
  CHECK(z.trace.empty());

  // A lone real input spreads only to outputs of matching lattice parity,
  // through taps of the complementary parity; the float path is the oracle.
  std::vector<QuantizedBin> imp(16, QuantizedBin{0, 0});
  imp[5] = {1 << 11, 0};
  std::vector<cplx> impf(16, cplx(0.0, 0.0));
  impf[5] = cplx(1.0, 0.0);
  for (long n : {0L, 1L, 2L, 3L, 7L}) {
    const auto fx = fbmc::fs_filter_fixed(imp, rx, coeff, data, n);
    const auto fl = fbmc::fs_filter_float(impf, rx, n);
    for (std::size_t o = 0; o < 16; ++o) {
      CHECK(std::abs(fbmc::dequantize(fx.pam[o], data) - fl[o]) <=
            1.5 * std::ldexp(1.0, -11));
      // Real input + (n+o) odd means the imaginary routing: exact zero.
      if ((n + static_cast<long>(o)) % 2 != 0) CHECK(fx.pam[o] == 0);
    }
  }

  // Bin count must match the grid the taps were drawn from.
  CHECK_THROWS_AS(
      fbmc::fs_filter_fixed(zeros, fbmc::truncate_normalize(fbmc::gen_npr1(32), 7), coeff,
                            data, 0),
      std::invalid_argument);
}

TEST_CASE("filter stage: two-phase trace schedule") {
  const auto f = fbmc::gen_npr1(16);
  const auto rx = fbmc::truncate_normalize(f, 7);  // delta = 3
  const auto coeff = fmt(12, 11);
  const auto data = fmt(16, 11);
  fbmc::GaussianRng rng(3);
  std::vector<QuantizedBin> bins(16);
  for (auto& b : bins)
    b = {fbmc::quantize(rng.normal() * 0.2, data), fbmc::quantize(rng.normal() * 0.2, data)};

  const auto res = fbmc::fs_filter_fixed(bins, rx, coeff, data, 0, true);
  REQUIRE(res.trace.size() == 2 * (16 + 6));
  for (std::size_t i = 0; i < res.trace.size(); ++i) {
    const auto& row = res.trace[i];
    CHECK(row.cycle == i);
    CHECK(row.phase == static_cast<int>(i % 2));
    if (row.phase == 0) CHECK(row.output_bin == -1);
  }
  // The stream starts delta bins early (wrapped) and the first output
  // completes only after the fill: 2*delta input pairs, then one per pair.
  CHECK(res.trace[0].input_bin == 13);
  CHECK(res.trace[6].input_bin == 0);
  std::size_t first_out = 0;
  while (first_out < res.trace.size() && res.trace[first_out].output_bin < 0) ++first_out;
  CHECK(first_out == 13);  // 4*delta + 1
  CHECK(res.trace[first_out].output_bin == 0);
  CHECK(res.trace.back().output_bin == 15);

  // Phase pairing: real programs one parity bank, imaginary the other.
  for (std::size_t i = 0; i + 1 < res.trace.size(); i += 2) {
    const auto& a = res.trace[i].enables;
    const auto& b = res.trace[i + 1].enables;
    const bool ok = (a == "ERDP" && b == "OIDP") || (a == "ORDP" && b == "EIDP");
    CHECK(ok);
  }
  CHECK(res.trace[0].enables == "ORDP");  // (n + jj) = 0 - 3 is odd
  CHECK(res.trace[6].enables == "ERDP");  // jj = 0 is even

  // Completed trace rows agree with the output vector.
  for (const auto& row : res.trace)
    if (row.output_bin >= 0)
      CHECK(row.output_code == res.pam[static_cast<std::size_t>(row.output_bin)]);
}

TEST_CASE("filter stage: accumulators are exactly linear") {
  const auto f = fbmc::gen_npr1(16);
  const auto rx = fbmc::truncate_normalize(f, 7);
  const auto coeff = fmt(12, 11);
  const auto data = fmt(16, 11);
  fbmc::GaussianRng rng(4);
  std::vector<QuantizedBin> a(16), b(16), ab(16);
  for (std::size_t i = 0; i < 16; ++i) {
    a[i] = {fbmc::quantize(rng.normal() * 0.1, data), fbmc::quantize(rng.normal() * 0.1, data)};
    b[i] = {fbmc::quantize(rng.normal() * 0.1, data), fbmc::quantize(rng.normal() * 0.1, data)};
    ab[i] = {a[i].re + b[i].re, a[i].im + b[i].im};
  }
  const auto ra = fbmc::fs_filter_fixed(a, rx, coeff, data, 1, true);
  const auto rb = fbmc::fs_filter_fixed(b, rx, coeff, data, 1, true);
  const auto rab = fbmc::fs_filter_fixed(ab, rx, coeff, data, 1, true);
  REQUIRE(ra.trace.size() == rab.trace.size());
  for (std::size_t i = 0; i < ra.trace.size(); ++i) {
    if (ra.trace[i].output_bin < 0) continue;
    CHECK(rab.trace[i].acc == ra.trace[i].acc + rb.trace[i].acc);  // integer-exact
  }
  for (std::size_t o = 0; o < 16; ++o)  // one final rounding each: off by at most 1
    CHECK(std::llabs(rab.pam[o] - (ra.pam[o] + rb.pam[o])) <= 1);
}

TEST_CASE("filter stage: error against the floating reference") {
  const auto f = fbmc::gen_npr1(64);
  const auto rx = fbmc::truncate_normalize(f, 7);
  double sum_g = 1.0;
  for (long l = 1; l <= static_cast<long>(rx.delta); ++l) sum_g += 2.0 * std::abs(rx.at(l));

  const auto coeff = fmt(12, 11);
  const auto data = fmt(16, 11);
  fbmc::GaussianRng rng(7);
  std::vector<QuantizedBin> qb(64);
  std::vector<cplx> fb(64);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    for (std::size_t i = 0; i < 64; ++i) {
      fb[i] = cplx(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
      qb[i] = {fbmc::quantize(fb[i].real(), data), fbmc::quantize(fb[i].imag(), data)};
    }
    const auto fx = fbmc::fs_filter_fixed(qb, rx, coeff, data, trial, false);
    const auto fl = fbmc::fs_filter_float(fb, rx, trial);
    for (std::size_t i = 0; i < 64; ++i)
      worst = std::max(worst, std::abs(fbmc::dequantize(fx.pam[i], data) - fl[i]));
  }
  CHECK(worst <= std::ldexp(sum_g, -11) * 4.0);
  CHECK(worst > 0.0);

  // Growing the data word by 7 fractional bits shrinks the error by far
  // more than the factor-2-per-bit guarantee.
  const auto fine_coeff = fmt(24, 22);
  double w7 = 0.0, w14 = 0.0;
  for (int frac : {7, 14}) {
    const auto d2 = fmt(24, frac);
    double w = 0.0;
    fbmc::GaussianRng r2(11);
    for (int trial = 0; trial < 20; ++trial) {
      for (std::size_t i = 0; i < 64; ++i) {
        fb[i] = cplx(2.0 * r2.uniform() - 1.0, 2.0 * r2.uniform() - 1.0);
        qb[i] = {fbmc::quantize(fb[i].real(), d2), fbmc::quantize(fb[i].imag(), d2)};
      }
      const auto fx = fbmc::fs_filter_fixed(qb, rx, fine_coeff, d2, trial, false);
      const auto fl = fbmc::fs_filter_float(fb, rx, trial);
      for (std::size_t i = 0; i < 64; ++i)
        w = std::max(w, std::abs(fbmc::dequantize(fx.pam[i], d2) - fl[i]));
    }
    (frac == 7 ? w7 : w14) = w;
  }
  CHECK(w14 <= w7 / 2.0);
}

TEST_CASE("filter stage: output saturation policy") {
  const auto f = fbmc::gen_npr1(64);
  const auto rx = fbmc::truncate_normalize(f, 7);
  const std::vector<QuantizedBin> big(64, QuantizedBin{127, 127});  // ~2.0 in Q1.6
  const auto coeff = fmt(24, 22);
  const auto sat = fmt(8, 6);
  const auto res = fbmc::fs_filter_fixed(big, rx, coeff, sat, 0);
  for (auto v : res.pam) {
    CHECK(v <= sat.max_code());
    CHECK(v >= sat.min_code());
  }
  CHECK_THROWS_AS(
      fbmc::fs_filter_fixed(big, rx, coeff, fmt(8, 6, Rounding::HalfUp, false), 0),
      std::overflow_error);
}

TEST_CASE("complexity accounting") {
  const auto mk = [](const fbmc::PrototypeFilter& f, std::size_t n_g) {
    return fbmc::truncate_normalize(f, n_g);
  };
  const auto rx_n = mk(fbmc::gen_npr1(512), 7);
  const auto rx_t = mk(fbmc::gen_tfl1(512), 31);
  const auto rx_q = mk(fbmc::gen_qmf1(512), 41);
  const auto coeff = fmt(12, 11);

  const auto rep_n = fbmc::complexity_report(rx_n, 512, 300, coeff);
  const auto rep_t = fbmc::complexity_report(rx_t, 512, 300, coeff);
  const auto rep_q = fbmc::complexity_report(rx_q, 512, 300, coeff);

  CHECK(rep_n.ratio_vs_ppn == 0.87890625);  // (300/512) * 3/2, exact in binary
  CHECK(rep_t.ratio_vs_ppn == 4.39453125);
  CHECK(rep_q.ratio_vs_ppn == 5.859375);
  CHECK(std::abs(rep_n.ratio_vs_ppn - 0.879) < 1e-3);
  CHECK(std::abs(rep_t.ratio_vs_ppn - 4.395) < 1e-3);
  CHECK(std::abs(rep_q.ratio_vs_ppn - 5.86) < 1e-3);

  CHECK(rep_n.real_mults_per_symbol == 3 * 300);
  CHECK(rep_n.real_adds_per_symbol == 2 * 3 * 300);
  CHECK(rep_t.real_mults_per_symbol == 15 * 300);
  CHECK(rep_q.real_mults_per_symbol == 20 * 300);
  CHECK(rep_n.ppn_real_mults_per_symbol == 2 * 512);

  // Adder count pins the published definition: one adder per extra nonzero
  // digit of each one-sided quantized tap.
  std::size_t adders = 0;
  for (long l = 1; l <= static_cast<long>(rx_n.delta); ++l) {
    const auto c = fbmc::csd_encode(fbmc::quantize(rx_n.at(l), coeff));
    if (c.nonzero_count() > 0) adders += c.nonzero_count() - 1;
  }
  CHECK(rep_n.csd_adders == adders);
  CHECK(rep_n.registers == 8);  // two parity FIRs of two taps, 4 registers each

  const auto rx1 = mk(fbmc::gen_npr1(512), 1);
  const auto rep1 = fbmc::complexity_report(rx1, 512, 300, coeff);
  CHECK(rep1.ratio_vs_ppn == 0.0);
  CHECK(rep1.real_mults_per_symbol == 0);
  CHECK(rep1.real_adds_per_symbol == 0);
  CHECK(rep1.csd_adders == 0);
}
