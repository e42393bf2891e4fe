#pragma once

// Reference experiment layouts and sweep runners shared by the command-line
// runner and the acceptance checks: the 4G/LTE 25-RB grid, the fragmented
// (notched) spectrum layout, per-filter receive tap budgets, and curve
// producers for the timing / CFO / PSD / BER studies.

#include <cstdint>
#include <string>
#include <vector>

#include "fbmc/analysis.hpp"
#include "fbmc/channel.hpp"
#include "fbmc/filters.hpp"

namespace fbmc {

// ---- Reference layout -----------------------------------------------------

// n_rb resource blocks of 12 subcarriers around an unused DC: indices
// -6*n_rb..-1 and 1..6*n_rb, stored mod m in natural bin order.
std::vector<std::size_t> rb_active_set(std::size_t m = 512, std::size_t n_rb = 25);

// Same grid with one notch silenced: subcarriers notch_first..notch_first +
// notch_len - 1 removed (defaults: one RB at 42..53).
std::vector<std::size_t> notched_active_set(std::size_t m = 512, std::size_t n_rb = 25,
                                            std::size_t notch_first = 42,
                                            std::size_t notch_len = 12);

// ---- Link presets -----------------------------------------------------------

// Receive tap budget used across the experiments, matched to the hardware
// model's configurations: NPR1 7, TFL1 31, QMF1 41.
std::size_t reference_n_g(FilterName name);

// Generator dispatch for the three built-in prototypes.
PrototypeFilter make_filter(FilterName name, std::size_t m);

// Assembled link over the given grid. FBMC FS links carry the reference
// truncated receive taps; pass an even n_symbols for FBMC.
LinkConfig make_link(Waveform w, FilterName filter, std::size_t m, std::size_t n_symbols,
                     std::size_t cp_len, std::vector<std::size_t> active);

struct VariantSpec {
  Waveform waveform = Waveform::Ofdm;
  FilterName filter = FilterName::Custom;  // ignored for OFDM
  std::string label;                       // "ofdm", "ppn-npr1", "fs-npr1", ...
};

// ofdm, then ppn/fs pairs per filter (npr1, tfl1, qmf1), presentation order.
const std::vector<VariantSpec>& all_variants();

// ---- Timing-offset sweep ----------------------------------------------------

struct TimingSweepConfig {
  std::size_t m = 512;
  std::size_t cp_len = 36;
  std::vector<long> offsets_samples;  // e.g. {5, 10, 15, 20, 26}
  bool simulate = false;              // add measured overlays ("sim:" prefix)
  std::size_t n_symbols = 24;         // per measured burst
  int n_seeds = 2;                    // pooled measurement bursts
  uint64_t seed = 1;
};

// Analytic SIR-vs-offset curves for FS/PPN x {NPR1, TFL1, QMF1}, plus
// measured overlays (including OFDM) when simulate is set. x is the offset
// as a percentage of m; series name each curve.
std::vector<CurvePoint> timing_sweep(const TimingSweepConfig& cfg);

// ---- CFO sweep ---------------------------------------------------------------

struct CfoSweepConfig {
  std::size_t m = 512;
  std::size_t cp_len = 36;
  std::vector<double> r_values;  // fractions of subcarrier spacing
  bool simulate = false;
  std::size_t n_symbols = 24;
  int n_seeds = 2;
  uint64_t seed = 1;
};

// Analytic SIR-vs-CFO for FBMC FS x {NPR1, TFL1, QMF1} and OFDM, plus
// measured overlays (PPN and FS) when simulate is set. x = r.
std::vector<CurvePoint> cfo_sweep(const CfoSweepConfig& cfg);

// ---- PSD experiment -----------------------------------------------------------

struct PsdConfig {
  std::size_t m = 512;
  std::size_t cp_len = 36;
  std::size_t n_symbols = 1200;  // FBMC half-symbol count / OFDM symbol count
  std::size_t segment_len = 2048;
  double overlap = 0.5;
  uint64_t seed = 77;
};

struct PsdResult {
  std::vector<CurvePoint> curves;  // series "ofdm", "fbmc-npr1", "fbmc-qmf1"
  // Mean OFDM-minus-NPR1 gap at the 5 MHz channel edges (+-2.5 MHz, i.e.
  // 16.7 subcarriers beyond the outermost active one), and the largest gap
  // anywhere out of band.
  double edge_gap_db = 0.0;
  double edge_gap_max_db = 0.0;
  // In-notch gaps at the notch's central pair of subcarriers.
  double notch_npr1_ofdm_db = 0.0;
  double notch_npr1_qmf1_db = 0.0;
};

// Fragmented-spectrum layout: 25 RBs with one RB notched out, random 16-QAM
// payloads, Welch periodogram per the pinned estimator settings.
PsdResult psd_experiment(const PsdConfig& cfg);

// ---- BER experiment -------------------------------------------------------------

struct BerConfig {
  std::size_t m = 512;
  std::size_t cp_len = 36;
  std::size_t n_symbols = 12;
  std::vector<double> ebn0_db;
  std::size_t target_errors = 200;
  uint64_t max_bits = 20000000;
  uint64_t seed = 1;
  std::vector<VariantSpec> variants;  // empty = all_variants()
};

struct BerSeries {
  std::string label;  // variant label
  std::vector<BerPoint> points;
};

// Static-channel BER curves over the 25-RB grid for each variant.
std::vector<BerSeries> ber_experiment(const BerConfig& cfg, const ChannelProfile& profile);

// Flattened curve form (x = Eb/N0 dB, y = BER, series = variant label).
std::vector<CurvePoint> ber_curves(const std::vector<BerSeries>& series);

}  // namespace fbmc
