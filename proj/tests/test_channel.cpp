#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fbmc/analysis.hpp"
#include "fbmc/channel.hpp"
#include "fbmc/rng.hpp"

using fbmc::cplx;

namespace {

fbmc::BasebandSignal random_signal(std::size_t n, uint64_t seed) {
  fbmc::BasebandSignal s;
  s.samples.resize(n);
  fbmc::GaussianRng rng(seed);
  for (auto& v : s.samples) v = rng.cnormal();
  return s;
}

// Expected per-bin mean power after nearest-sample rounding, merging, and
// unit-total normalization — computed independently of the implementation.
std::vector<double> expected_bin_power(const fbmc::ChannelProfile& prof) {
  std::vector<double> w;
  for (const auto& tap : prof.taps) {
    const auto bin = static_cast<std::size_t>(std::llround(tap.delay_s * prof.sample_rate));
    if (w.size() <= bin) w.resize(bin + 1, 0.0);
    w[bin] += std::pow(10.0, tap.mean_power_db / 10.0);
  }
  double total = 0.0;
  for (double v : w) total += v;
  for (double& v : w) v /= total;
  return w;
}

}  // namespace

TEST_CASE("built-in tap tables carry the standard delay spreads") {
  const auto epa = fbmc::epa_profile();
  const auto eva = fbmc::eva_profile();
  const auto etu = fbmc::etu_profile();
  epa.validate();
  eva.validate();
  etu.validate();
  CHECK(epa.delay_spread_s() == doctest::Approx(410e-9).epsilon(1e-12));
  CHECK(eva.delay_spread_s() == doctest::Approx(2510e-9).epsilon(1e-12));
  CHECK(etu.delay_spread_s() == doctest::Approx(5000e-9).epsilon(1e-12));
  CHECK(epa.taps.size() == 7);
  CHECK(eva.taps.size() == 9);
  CHECK(etu.taps.size() == 9);

  // At the 7.68 MHz reference rate the longest pedestrian echo rounds to at
  // most 4 samples.
  CHECK(std::llround(epa.delay_spread_s() * epa.sample_rate) <= 4);
}

TEST_CASE("bundled tap-table files reproduce the built-ins") {
  const std::filesystem::path dir = FBMC_TEST_DATA_DIR;
  const struct {
    const char* file;
    fbmc::ChannelProfile ref;
  } cases[] = {{"epa.csv", fbmc::epa_profile()},
               {"eva.csv", fbmc::eva_profile()},
               {"etu.csv", fbmc::etu_profile()}};
  for (const auto& c : cases) {
    const auto prof = fbmc::load_profile_csv((dir / c.file).string());
    CHECK(prof.label == c.ref.label);
    REQUIRE(prof.taps.size() == c.ref.taps.size());
    for (std::size_t i = 0; i < prof.taps.size(); ++i) {
      CHECK(prof.taps[i].delay_s == doctest::Approx(c.ref.taps[i].delay_s).epsilon(1e-12));
      CHECK(prof.taps[i].mean_power_db ==
            doctest::Approx(c.ref.taps[i].mean_power_db).epsilon(1e-12));
    }
  }
}

TEST_CASE("malformed tap-table files are rejected with the reason") {
  const auto tmp = std::filesystem::temp_directory_path() / "fbmc_bad_profile.csv";
  {
    std::ofstream out(tmp);
    out << "delay,power\n0,0\n";
  }
  try {
    (void)fbmc::load_profile_csv(tmp.string());
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("header") != std::string::npos);
  }
  std::filesystem::remove(tmp);
  CHECK_THROWS_AS((void)fbmc::load_profile_csv((tmp.parent_path() / "absent.csv").string()),
                  std::runtime_error);
}

TEST_CASE("realizations are reproducible and profile-faithful") {
  const auto epa = fbmc::epa_profile();
  const auto a = fbmc::realize_multipath(epa, 123);
  const auto b = fbmc::realize_multipath(epa, 123);
  CHECK(a.taps == b.taps);
  CHECK(fbmc::realize_multipath(epa, 124).taps != a.taps);

  // Empirical per-bin power over many seeds tracks the dB profile.
  const auto expect = expected_bin_power(epa);
  std::vector<double> acc(expect.size(), 0.0);
  const int n_seeds = 10000;
  for (int i = 0; i < n_seeds; ++i) {
    const auto h = fbmc::realize_multipath(epa, 1000 + i);
    REQUIRE(h.taps.size() == expect.size());
    for (std::size_t k = 0; k < h.taps.size(); ++k) acc[k] += std::norm(h.taps[k]);
  }
  double total = 0.0;
  for (double v : acc) total += v;
  CHECK(total / n_seeds == doctest::Approx(1.0).epsilon(0.03));
  for (std::size_t k = 0; k < expect.size(); ++k) {
    if (expect[k] == 0.0) {
      CHECK(acc[k] == 0.0);
    } else {
      CHECK(acc[k] / n_seeds == doctest::Approx(expect[k]).epsilon(0.03));
    }
  }
}

TEST_CASE("echoes beyond the guard window are reported, not fatal") {
  const auto h = fbmc::realize_multipath(fbmc::etu_profile(), 5, 10);
  CHECK(!h.warnings.empty());
  const auto ok = fbmc::realize_multipath(fbmc::epa_profile(), 5, 36);
  CHECK(ok.warnings.empty());
}

TEST_CASE("single-echo channel is a pure complex scaling") {
  fbmc::ChannelProfile prof;
  prof.label = "flat";
  prof.taps = {{0.0, 0.0}};
  const auto h = fbmc::realize_multipath(prof, 9);
  REQUIRE(h.taps.size() == 1);
  const auto s = random_signal(64, 2);
  const auto y = fbmc::apply_multipath(s, h);
  REQUIRE(y.size() == s.size());
  for (std::size_t k = 0; k < s.size(); ++k)
    CHECK(std::abs(y.samples[k] - h.taps[0] * s.samples[k]) < 1e-15);
}

TEST_CASE("window-shift impairment semantics") {
  const auto s = random_signal(128, 3);
  const auto same = fbmc::apply_timing_offset(s, 0);
  CHECK(same.samples == s.samples);

  const long l_d = 5;
  const auto fwd = fbmc::apply_timing_offset(s, l_d);
  for (std::size_t k = 0; k + l_d < s.size(); ++k)
    CHECK(fwd.samples[k] == s.samples[k + l_d]);
  const auto back = fbmc::apply_timing_offset(fwd, -l_d);
  for (std::size_t k = l_d; k + l_d < s.size(); ++k)
    CHECK(back.samples[k] == s.samples[k]);

  // Energy is preserved except for the samples shifted off the edge.
  double clipped = 0.0;
  for (long k = 0; k < l_d; ++k) clipped += std::norm(s.samples[k]);
  CHECK(fwd.energy() == doctest::Approx(s.energy() - clipped).epsilon(1e-12));
}

TEST_CASE("frequency-offset impairment is a unit-modulus rotation") {
  const auto s = random_signal(256, 4);
  const auto y = fbmc::apply_cfo(s, 0.13, 64);
  REQUIRE(y.size() == s.size());
  for (std::size_t k = 0; k < s.size(); ++k)
    CHECK(std::abs(std::abs(y.samples[k]) - std::abs(s.samples[k])) < 1e-13);
  CHECK(y.energy() == doctest::Approx(s.energy()).epsilon(1e-12));

  const auto back = fbmc::apply_cfo(y, -0.13, 64);
  for (std::size_t k = 0; k < s.size(); ++k)
    CHECK(std::abs(back.samples[k] - s.samples[k]) < 1e-12);

  CHECK(fbmc::apply_cfo(s, 0.0, 64).samples == s.samples);
}

TEST_CASE("compensation coefficients at landmark arguments") {
  CHECK(fbmc::timing_compensation(7, 0, 512) == cplx(1.0, 0.0));
  CHECK(fbmc::timing_compensation(0, 33, 512) == cplx(1.0, 0.0));
  CHECK(std::abs(fbmc::timing_compensation(1, 256, 512) - cplx(-1.0, 0.0)) < 1e-12);

  CHECK(fbmc::cpe_compensation(5, 0.0) == cplx(1.0, 0.0));
  CHECK(fbmc::cpe_compensation(0, 0.37) == cplx(1.0, 0.0));
  CHECK(std::abs(fbmc::cpe_compensation(2, 0.5) - cplx(-1.0, 0.0)) < 1e-12);
}

TEST_CASE("reference receiver rides out shifts inside half the prefix") {
  fbmc::LinkConfig link;
  link.waveform = fbmc::Waveform::Ofdm;
  link.params.m = 512;
  link.params.n_symbols = 8;
  link.params.cp_len = 36;
  for (std::size_t s = 1; s <= 300; ++s) link.params.active_set.push_back(s);
  fbmc::Impairments imp;
  imp.timing_offset = 8;  // below cp_len / 2
  const auto ms = fbmc::measure_sir(link, imp, 21);
  CHECK(ms.sir_db > 100.0);
}

TEST_CASE("noise injection: level, determinism, and the bypass flag") {
  fbmc::BasebandSignal zeros;
  zeros.samples.assign(1000000, cplx(0.0, 0.0));

  // Eb = reference_energy / info_bits = 1, so at 0 dB the per-sample noise
  // variance is 1; at 10 dB it is 0.1.
  for (double ebn0 : {0.0, 10.0}) {
    const auto noisy = fbmc::add_awgn(zeros, ebn0, 1e6, 42, 1e6);
    const double var = noisy.energy() / double(noisy.size());
    CHECK(var == doctest::Approx(std::pow(10.0, -ebn0 / 10.0)).epsilon(0.01));
  }

  const auto s = random_signal(512, 6);
  const auto a = fbmc::add_awgn(s, 12.0, 2048.0, 7, 512.0);
  const auto b = fbmc::add_awgn(s, 12.0, 2048.0, 7, 512.0);
  CHECK(a.samples == b.samples);

  const auto clean = fbmc::add_awgn(s, std::numeric_limits<double>::infinity(), 2048.0, 7);
  CHECK(clean.samples == s.samples);
}
