#pragma once

// Channel impairments -- timing offset, CFO, static multipath, AWGN -- and
// their per-subcarrier / per-symbol compensation coefficients.
//
// Sign conventions: the impairments are defined so the compensation terms
// below are exactly correct. A timing offset advances the signal
// (s'(k) = s(k + l_d)); CFO multiplies sample k by e^{+i 2 pi k r / M}.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "fbmc/modem.hpp"

namespace fbmc {

enum class ProfileName { EPA, EVA, ETU, Custom };

struct ProfileTap {
  double delay_s = 0.0;
  double mean_power_db = 0.0;
};

struct ChannelProfile {
  ProfileName name = ProfileName::Custom;
  std::string label;
  double sample_rate = 7.68e6;
  std::vector<ProfileTap> taps;  // delays nonnegative, strictly increasing

  void validate() const;
  double delay_spread_s() const;  // last delay
};

// LTE multipath tap tables (delay spreads 410 ns / 2510 ns / 5000 ns).
ChannelProfile epa_profile(double sample_rate = 7.68e6);
ChannelProfile eva_profile(double sample_rate = 7.68e6);
ChannelProfile etu_profile(double sample_rate = 7.68e6);

// CSV with mandatory header "delay_ns,power_db"; profile label from the file
// stem. Throws std::runtime_error on malformed input.
ChannelProfile load_profile_csv(const std::string& path, double sample_rate = 7.68e6);

struct ChannelRealization {
  std::vector<cplx> taps;  // complex gains on the sample grid
  uint64_t seed = 0;
  std::vector<std::string> warnings;
};

// Delays rounded to the nearest sample; complex Gaussian gains with per-tap
// variance from the dB profile, normalized to unit total mean power; static.
// Profile taps that round past guard_samples (when > 0) add a warning record.
ChannelRealization realize_multipath(const ChannelProfile& profile, uint64_t seed,
                                     std::size_t guard_samples = 0);

// Linear convolution with the realization taps (output grows by taps-1).
BasebandSignal apply_multipath(const BasebandSignal& s, const ChannelRealization& h);

// s'(k) = s(k + l_d): shifts the receiver's window alignment, zero-fill at
// the edges.
BasebandSignal apply_timing_offset(const BasebandSignal& s, long l_d);

// C_TO(m) = e^{-i 2 pi m l_d / M}; multiply the demodulated bin by this to
// undo the timing-offset phase ramp.
cplx timing_compensation(std::size_t m, long l_d, std::size_t m_total);

// Sample k multiplied by e^{+i 2 pi k r / M}, r in (-0.5, 0.5] relative to
// the subcarrier spacing; k is the absolute index (origin-aware).
BasebandSignal apply_cfo(const BasebandSignal& s, double r, std::size_t m_total);

// C_CPE(n) = e^{+i pi n r}, the per-symbol common phase error; receivers
// multiply by its conjugate.
cplx cpe_compensation(long n, double r);

// Per-subcarrier equalizer with coeff[m] = C_TO(m).
Equalizer timing_equalizer(long l_d, std::size_t m_total);

// Per-symbol equalizer with coeff[n][m] = conj(C_CPE(n)).
Equalizer cpe_equalizer(double r, std::size_t m_total, std::size_t n_symbols);

// Complex white Gaussian noise at a level set by Eb/N0 and the energy the
// bits actually occupy on the air: Eb = reference_energy / total_info_bits,
// noise variance per complex sample N0 = Eb / 10^(ebn0_db/10). When
// reference_energy < 0 the input signal's own energy is used; Monte-Carlo
// loops over fading realizations pass the transmit-side energy instead so
// the noise level tracks the ensemble mean, not the per-burst fade.
// ebn0_db = +infinity returns the signal unchanged.
BasebandSignal add_awgn(const BasebandSignal& s, double ebn0_db, double total_info_bits,
                        uint64_t seed, double reference_energy = -1.0);

}  // namespace fbmc
