#pragma once

// Closed-form SIR evaluators, Monte-Carlo SIR/BER measurement, Welch PSD
// estimation, and per-subcarrier diagnostics.

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fbmc/channel.hpp"
#include "fbmc/filters.hpp"
#include "fbmc/modem.hpp"

namespace fbmc {

struct SirReport {
  double sir_db = 0.0;
  double numerator = 0.0;
  // (p, q) -> squared real-field contribution, q in half-symbol units.
  std::map<std::pair<long, long>, double> interference_terms;
  int omega_q = 1;

  double interference_total() const;
};

// Ratios above this cap (or exactly zero interference) report as 300 dB.
inline constexpr double kSirCapDb = 300.0;

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
  std::string series;
};

// ---- Closed forms -------------------------------------------------------

// SIR = Re(F(0,0))^2 / sum_{(p,q) != (0,0)} Re(i^{p+q} F(p, q M/2))^2 over
// the response table (q in samples, multiples of M/2 required).
SirReport sir_nominal(const FilterBankResponse& F, std::size_t m);
SirReport sir_nominal(const PrototypeFilter& f);

// Same sum with the receive pulse rebuilt from the truncated tap set.
SirReport sir_truncation(const PrototypeFilter& f, const TruncatedFreqResponse& rx);

// Timing offset through the time-domain receiver: Q = 2 (symbols a full
// period away start to interfere), per-term phase e^{-i 2 pi p l_d / M}
// reflecting the post-filter compensation.
SirReport sir_timing_ppn(const PrototypeFilter& f, long l_d);

// Timing offset through the frequency-domain receiver:
// SIR = 1 / (truncation residual + 2 sum_{l < |l_d|} g^2(l)), unit-energy g.
SirReport sir_timing_fs(const PrototypeFilter& f, const TruncatedFreqResponse& rx, long l_d);

// Carrier frequency offset, fractional-frequency evaluation of the response;
// optional truncated receive taps to include the (small) truncation residue.
SirReport sir_cfo(const PrototypeFilter& f, double r);
SirReport sir_cfo(const PrototypeFilter& f, const TruncatedFreqResponse& rx, double r);

// CP-OFDM with ideal CPE removal: Dirichlet-kernel ICI ratio,
// SIR = |D(r)|^2 / sum_{p != 0} |D(r+p)|^2, D(x) = sin(pi x)/(M sin(pi x/M)).
double ofdm_cfo_sir_db(std::size_t m, double r);

// ---- Monte-Carlo --------------------------------------------------------

enum class Waveform { Ofdm, FbmcPpn, FbmcFs };

const char* waveform_str(Waveform w);

struct LinkConfig {
  Waveform waveform = Waveform::FbmcPpn;
  ModemParams params;
};

struct Impairments {
  long timing_offset = 0;
  double cfo = 0.0;
  const ChannelRealization* multipath = nullptr;  // borrowed, may be null
  double ebn0_db = std::numeric_limits<double>::infinity();
  double info_bits = 0.0;  // for the noise level; 0 = derive from the grid
  bool compensate = true;  // apply C_TO / CPE / ZF at the receiver
};

struct MeasuredSir {
  double sir_db = 0.0;
  double gain = 1.0;  // fitted scalar link gain
  double signal_power = 0.0;
  double error_power = 0.0;
  std::size_t cells = 0;
};

// Random-payload round trip; error vector against the transmitted grid on
// active subcarriers, with edge_skip symbols dropped at each burst end. A
// scalar gain is fitted first so deterministic link gain (e.g. truncation
// loss) is not booked as interference, mirroring the closed forms'
// normalization by the (0,0) response.
MeasuredSir measure_sir(const LinkConfig& link, const Impairments& imp, uint64_t seed,
                        std::size_t edge_skip = 1);

// Per-subcarrier SIR over one long burst with a fixed channel realization
// and ZF equalization; x = subcarrier index, one point per active entry.
std::vector<CurvePoint> sir_per_subcarrier(const LinkConfig& link,
                                           const ChannelRealization& h, uint64_t seed);

// ---- PSD ----------------------------------------------------------------

enum class PsdWindow { Rect, Hann, BlackmanHarris4 };

struct PsdEstimate {
  std::vector<double> power;  // linear, natural bin order, size = segment_len
  std::size_t segments = 0;

  // Sum of per-bin power equals mean signal power (Parseval bookkeeping).
  double mean_power() const;
};

// Welch averaged periodogram: segments of segment_len samples, fractional
// overlap in [0, 0.95], window applied per segment with power normalization.
PsdEstimate estimate_psd(const BasebandSignal& s, std::size_t segment_len, double overlap,
                         PsdWindow window);

// Curve in subcarrier units: x = centered bin * m_sub / segment_len,
// y = dB relative to the mean over the active subcarriers' bins.
std::vector<CurvePoint> psd_curve_db(const PsdEstimate& est, std::size_t m_sub,
                                     const std::vector<std::size_t>& active,
                                     const std::string& series);

// ---- BER ----------------------------------------------------------------

struct BerPoint {
  double ebn0_db = 0.0;
  double ber = 0.0;
  uint64_t errors = 0;
  uint64_t bits = 0;
};

// Gray 16-QAM, perfect-CSI ZF over a static channel: one realization drawn
// from the seed is shared by every burst and every Eb/N0 point; only data and
// noise are redrawn. Noise level is referenced to transmit energy over the
// whole payload. Per point, bursts accumulate until target_errors bit errors
// or max_bits counted bits.
std::vector<BerPoint> measure_ber(const LinkConfig& link, const ChannelProfile& profile,
                                  const std::vector<double>& ebn0_list,
                                  std::size_t target_errors, uint64_t max_bits, uint64_t seed);

}  // namespace fbmc
