#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "fbmc/dft.hpp"
#include "fbmc/filters.hpp"

using fbmc::cplx;

TEST_CASE("half-cosine shape at the smallest even size") {
  const auto f = fbmc::gen_qmf1(4);
  REQUIRE(f.length() == 4);
  CHECK(f.taps[0] == 0.0);
  CHECK(f.taps[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(f.taps[2] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f.taps[3] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(f.phase_center == 2.0);
}

TEST_CASE("peak and symmetry conventions per filter") {
  const std::size_t m = 512;
  const auto qmf1 = fbmc::gen_qmf1(m);
  const auto tfl1 = fbmc::gen_tfl1(m);
  const auto npr1 = fbmc::gen_npr1(m);

  // Unit peak for the half-cosine and the localized filter.
  CHECK(*std::max_element(qmf1.taps.begin(), qmf1.taps.end()) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(*std::max_element(tfl1.taps.begin(), tfl1.taps.end()) ==
        doctest::Approx(1.0).epsilon(1e-9));

  // The near-perfect-reconstruction filter keeps its closed form verbatim:
  // unit energy per subcarrier (sum of squares = m), peak sqrt(2) at m/2.
  CHECK(npr1.energy() == doctest::Approx(double(m)).epsilon(1e-12));
  CHECK(npr1.taps[m / 2] == doctest::Approx(1.4142086126169647).epsilon(1e-12));

  // Whole-sample symmetry g(k) = g(m-k) for the filters centered at m/2.
  for (std::size_t k = 1; k < m; ++k) {
    CHECK(qmf1.taps[k] == doctest::Approx(qmf1.taps[m - k]).epsilon(1e-12));
    CHECK(npr1.taps[k] == doctest::Approx(npr1.taps[m - k]).epsilon(1e-12));
  }
  // Half-sample symmetry g(k) = g(m-1-k) for the localized filter.
  for (std::size_t k = 0; k < m; ++k)
    CHECK(tfl1.taps[k] == doctest::Approx(tfl1.taps[m - 1 - k]).epsilon(1e-12));

  CHECK(qmf1.phase_center == double(m) / 2.0);
  CHECK(npr1.phase_center == double(m) / 2.0);
  CHECK(tfl1.phase_center == (double(m) - 1.0) / 2.0);

  // Half-cosine energy: sum of sin^2 over a full period is exactly m/2.
  CHECK(qmf1.energy() == doctest::Approx(double(m) / 2.0).epsilon(1e-12));
}

TEST_CASE("generators are deterministic") {
  for (std::size_t m : {16u, 512u}) {
    CHECK(fbmc::gen_qmf1(m).taps == fbmc::gen_qmf1(m).taps);
    CHECK(fbmc::gen_tfl1(m).taps == fbmc::gen_tfl1(m).taps);
    CHECK(fbmc::gen_npr1(m).taps == fbmc::gen_npr1(m).taps);
  }
}

TEST_CASE("shape rebuilt from the quantized response column tracks the closed form") {
  const std::size_t m = 512;
  const auto exact = fbmc::gen_npr1(m);
  const auto rebuilt = fbmc::gen_npr1_from_fb(m);
  double worst = 0.0, worst_high = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double d = std::abs(exact.taps[k] - rebuilt.taps[k]);
    worst = std::max(worst, d);
    if (exact.taps[k] > 0.6) worst_high = std::max(worst_high, d);
  }
  // The square root steepens quantization error near the zero-valued edges;
  // away from them the 3-decimal source reproduces the shape tightly.
  CHECK(worst < 0.08);
  CHECK(worst_high < 3.2e-3);
}

TEST_CASE("spectrum round trip reproduces the taps") {
  for (std::size_t m : {16u, 64u, 512u}) {
    for (const auto& f : {fbmc::gen_qmf1(m), fbmc::gen_tfl1(m), fbmc::gen_npr1(m)}) {
      std::vector<cplx> t(f.taps.begin(), f.taps.end());
      const auto back = fbmc::idft(fbmc::dft(t));
      for (std::size_t k = 0; k < m; ++k)
        CHECK(std::abs(back[k] - t[k]) < 1e-12 * double(m));
    }
  }
}

TEST_CASE("centered spectrum addressing wraps correctly") {
  const auto f = fbmc::gen_npr1(64);
  const auto G = fbmc::freq_response(f, 64);
  REQUIRE(G.size() == 64);
  CHECK(G.at(0) == G.bins[0]);
  CHECK(G.at(-1) == G.bins[63]);
  CHECK(G.at(63) == G.at(-1));
  CHECK_THROWS_AS((void)fbmc::freq_response(f, 32), std::invalid_argument);
}

TEST_CASE("normalized truncated taps: frozen values and contract checks") {
  const auto f = fbmc::gen_npr1(512);
  const auto rx = fbmc::truncate_normalize(f, 7);
  REQUIRE(rx.n_g == 7);
  REQUIRE(rx.delta == 3);
  CHECK(rx.at(0) == 1.0);
  CHECK(rx.at(1) == doctest::Approx(0.420193).epsilon(2e-6));
  CHECK(rx.at(-1) == doctest::Approx(rx.at(1)).epsilon(1e-12));
  CHECK(rx.at(2) == doctest::Approx(-0.083714).epsilon(2e-5));
  CHECK(rx.at(3) == doctest::Approx(-0.010713).epsilon(2e-4));
  CHECK(rx.scale > 0.0);
  CHECK(rx.m == 512);

  CHECK_THROWS_AS((void)fbmc::truncate_normalize(f, 8), std::invalid_argument);
  CHECK_THROWS_AS((void)fbmc::truncate_normalize(f, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)fbmc::truncate_normalize(f, 515), std::invalid_argument);
}

TEST_CASE("full-circle truncation plus inverse transform reproduces the filter") {
  for (std::size_t m : {16u, 64u}) {
    for (const auto& f : {fbmc::gen_qmf1(m), fbmc::gen_tfl1(m), fbmc::gen_npr1(m)}) {
      const auto rx = fbmc::truncate_normalize(f, m + 1);
      const auto gt = fbmc::truncated_time_taps(rx);
      REQUIRE(gt.size() == m);
      for (std::size_t k = 0; k < m; ++k)
        CHECK(gt[k] == doctest::Approx(f.taps[k]).epsilon(1e-9));
    }
  }
}

TEST_CASE("transceiver gain table is unit at the origin and bounded") {
  for (const auto& f : {fbmc::gen_qmf1(512), fbmc::gen_tfl1(512), fbmc::gen_npr1(512)}) {
    const auto F = fbmc::fb_impulse_response(f, 1);
    CHECK(std::abs(F.at(0, 0) - cplx(1.0, 0.0)) < 1e-12);
    for (long p = -256; p < 256; ++p)
      for (long q : {-256, 0, 256}) CHECK(std::abs(F.at(p, q)) <= 1.0 + 1e-12);
    // Real symmetric pulses give a centro-symmetric magnitude pattern.
    for (long p : {1L, 2L, 3L})
      for (long q : {-256L, 0L, 256L})
        CHECK(std::abs(F.at(p, q)) == doctest::Approx(std::abs(F.at(-p, -q))).epsilon(1e-9));
  }
}

TEST_CASE("printed long-filter reference table") {
  const auto T = fbmc::mmb4_fb_table();
  CHECK(T.has(0, 0));
  CHECK(T.has(-1, 3));
  CHECK(!T.has(2, 0));
  CHECK(T.at(0, 0) == cplx(1.0, 0.0));
  CHECK(T.at(0, 1) == cplx(0.564, 0.0));
  CHECK(T.at(0, -1) == cplx(0.564, 0.0));
  CHECK(T.at(0, 2) == cplx(0.0, 0.0));
  CHECK(T.at(0, 3) == cplx(-0.067, 0.0));
  CHECK(T.at(1, 0) == cplx(0.239, 0.0));
  CHECK(T.at(-1, 0) == cplx(0.239, 0.0));
  CHECK(T.at(1, 1) == cplx(0.0, -0.206));
  CHECK(T.at(-1, 1) == cplx(0.0, 0.206));
}

TEST_CASE("short-filter gain grid equals the long-filter table transposed") {
  // Time-frequency duality: the short filter's (p, q) gain grid, q in
  // half-symbol steps, matches the printed long-filter table with the roles
  // of p and q swapped, to within the table's print precision. The printed
  // table's time-shift sense is opposite to this library's (it delays the
  // receive pulse where fb_impulse_response advances the transmit one), so
  // corresponding entries are complex conjugates of each other; magnitudes
  // and every interference sum built from them are unaffected.
  const auto f = fbmc::gen_npr1(512);
  const auto F = fbmc::fb_impulse_response(f, 3);
  const auto T = fbmc::mmb4_fb_table();
  double worst = 0.0;
  for (long a = -3; a <= 3; ++a)
    for (long b = -1; b <= 1; ++b)
      worst = std::max(worst, std::abs(std::conj(F.at(a, b * 256)) - T.at(b, a)));
  CHECK(worst < 5e-3);
}

TEST_CASE("single-point fractional-frequency evaluation matches the table on the grid") {
  const auto f = fbmc::gen_npr1(512);
  const auto F = fbmc::fb_impulse_response(f, 1);
  for (long p : {-2L, 0L, 1L, 5L})
    for (long q : {-256L, 0L, 256L}) {
      const cplx direct =
          fbmc::fb_response_at(f.taps, f.taps, double(p), q, f.m, f.phase_center);
      CHECK(std::abs(direct - F.at(p, q)) < 1e-12);
    }
}
