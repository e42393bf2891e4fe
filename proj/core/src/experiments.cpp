#include "fbmc/experiments.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "fbmc/modem.hpp"
#include "fbmc/rng.hpp"

namespace fbmc {

namespace {

const char* filter_label(FilterName name) {
  switch (name) {
    case FilterName::QMF1:
      return "qmf1";
    case FilterName::TFL1:
      return "tfl1";
    case FilterName::NPR1:
      return "npr1";
    default:
      throw std::invalid_argument("filter_label: prototype has no experiment label");
  }
}

// Pools several independent bursts into one SIR figure (signal_power and
// error_power are per-burst totals, so the pool is a straight sum).
double pooled_sir_db(const LinkConfig& link, const Impairments& imp, uint64_t seed, int n_seeds) {
  double sig = 0.0;
  double err = 0.0;
  for (int i = 0; i < n_seeds; ++i) {
    const MeasuredSir ms = measure_sir(link, imp, derive_seed(seed, static_cast<uint64_t>(i)));
    sig += ms.signal_power;
    err += ms.error_power;
  }
  if (err <= 0.0) return kSirCapDb;
  return std::min(kSirCapDb, 10.0 * std::log10(sig / err));
}

QamGrid random_payload(std::size_t n_qam, std::size_t m, const std::vector<std::size_t>& active,
                       GaussianRng& rng) {
  QamGrid grid = QamGrid::zeros(n_qam, m);
  for (std::size_t t = 0; t < n_qam; ++t)
    for (std::size_t sub : active)
      grid.at(t, sub) = qam16_gray_map(static_cast<unsigned>(rng.index(16)));
  return grid;
}

// Transmit-only burst for spectrum studies (no channel, no receiver).
BasebandSignal modulated_burst(const LinkConfig& link, uint64_t seed) {
  const ModemParams& p = link.params;
  GaussianRng rng(seed);
  if (link.waveform == Waveform::Ofdm)
    return ofdm_modulate(random_payload(p.n_symbols, p.m, p.active_set, rng), p);
  const QamGrid payload = random_payload(p.n_symbols / 2, p.m, p.active_set, rng);
  return ppn_modulate(qam_to_oqam(payload), p);
}

// Mean y over curve points whose x lies in [lo, hi].
double band_mean(const std::vector<CurvePoint>& curve, double lo, double hi) {
  double sum = 0.0;
  int n = 0;
  for (const CurvePoint& pt : curve)
    if (pt.x >= lo && pt.x <= hi) {
      sum += pt.y;
      ++n;
    }
  if (n == 0) throw std::invalid_argument("band_mean: no spectrum points in the requested band");
  return sum / n;
}

// Fragmented-layout constants: one silenced resource block.
constexpr double kNotchFirst = 42.0;
constexpr double kNotchLen = 12.0;

}  // namespace

std::vector<std::size_t> rb_active_set(std::size_t m, std::size_t n_rb) {
  const long half = 6L * static_cast<long>(n_rb);
  if (m == 0 || 2 * half >= static_cast<long>(m))
    throw std::invalid_argument("rb_active_set: resource blocks do not fit the transform size");
  std::vector<std::size_t> active;
  active.reserve(2 * static_cast<std::size_t>(half));
  for (long c = -half; c <= half; ++c) {
    if (c == 0) continue;
    active.push_back(static_cast<std::size_t>((c + static_cast<long>(m)) % static_cast<long>(m)));
  }
  return active;
}

std::vector<std::size_t> notched_active_set(std::size_t m, std::size_t n_rb,
                                            std::size_t notch_first, std::size_t notch_len) {
  const long half = 6L * static_cast<long>(n_rb);
  if (m == 0 || 2 * half >= static_cast<long>(m))
    throw std::invalid_argument("notched_active_set: resource blocks do not fit the transform size");
  const long lo = static_cast<long>(notch_first);
  const long hi = lo + static_cast<long>(notch_len);
  std::vector<std::size_t> active;
  active.reserve(2 * static_cast<std::size_t>(half));
  for (long c = -half; c <= half; ++c) {
    if (c == 0) continue;
    if (c >= lo && c < hi) continue;
    active.push_back(static_cast<std::size_t>((c + static_cast<long>(m)) % static_cast<long>(m)));
  }
  return active;
}

std::size_t reference_n_g(FilterName name) {
  switch (name) {
    case FilterName::NPR1:
      return 7;
    case FilterName::TFL1:
      return 31;
    case FilterName::QMF1:
      return 41;
    default:
      throw std::invalid_argument("reference_n_g: prototype has no reference tap budget");
  }
}

PrototypeFilter make_filter(FilterName name, std::size_t m) {
  switch (name) {
    case FilterName::QMF1:
      return gen_qmf1(m);
    case FilterName::TFL1:
      return gen_tfl1(m);
    case FilterName::NPR1:
      return gen_npr1(m);
    default:
      throw std::invalid_argument("make_filter: Custom prototypes have no generator");
  }
}

LinkConfig make_link(Waveform w, FilterName filter, std::size_t m, std::size_t n_symbols,
                     std::size_t cp_len, std::vector<std::size_t> active) {
  LinkConfig link;
  link.waveform = w;
  link.params.m = m;
  link.params.n_symbols = n_symbols;
  link.params.cp_len = cp_len;
  link.params.active_set = std::move(active);
  if (w != Waveform::Ofdm) {
    link.params.filter = make_filter(filter, m);
    link.params.k_overlap = link.params.filter.k_overlap;
    if (w == Waveform::FbmcFs)
      link.params.rx_taps = truncate_normalize(link.params.filter, reference_n_g(filter));
  }
  return link;
}

const std::vector<VariantSpec>& all_variants() {
  static const std::vector<VariantSpec> variants = {
      {Waveform::Ofdm, FilterName::Custom, "ofdm"},
      {Waveform::FbmcPpn, FilterName::NPR1, "ppn-npr1"},
      {Waveform::FbmcFs, FilterName::NPR1, "fs-npr1"},
      {Waveform::FbmcPpn, FilterName::TFL1, "ppn-tfl1"},
      {Waveform::FbmcFs, FilterName::TFL1, "fs-tfl1"},
      {Waveform::FbmcPpn, FilterName::QMF1, "ppn-qmf1"},
      {Waveform::FbmcFs, FilterName::QMF1, "fs-qmf1"},
  };
  return variants;
}

std::vector<CurvePoint> timing_sweep(const TimingSweepConfig& cfg) {
  if (cfg.offsets_samples.empty())
    throw std::invalid_argument("timing_sweep: offsets_samples is empty");
  std::vector<CurvePoint> out;
  const std::array<FilterName, 3> names{FilterName::NPR1, FilterName::TFL1, FilterName::QMF1};
  for (FilterName name : names) {
    const PrototypeFilter f = make_filter(name, cfg.m);
    const TruncatedFreqResponse rx = truncate_normalize(f, reference_n_g(name));
    for (long l_d : cfg.offsets_samples) {
      const double pct = 100.0 * static_cast<double>(l_d) / static_cast<double>(cfg.m);
      out.push_back({pct, sir_timing_fs(f, rx, l_d).sir_db, std::string("fs-") + filter_label(name)});
      out.push_back({pct, sir_timing_ppn(f, l_d).sir_db, std::string("ppn-") + filter_label(name)});
    }
  }
  if (!cfg.simulate) return out;
  const std::vector<std::size_t> active = rb_active_set(cfg.m);
  uint64_t stream = 0;
  for (const VariantSpec& v : all_variants()) {
    const LinkConfig link = make_link(v.waveform, v.filter, cfg.m, cfg.n_symbols, cfg.cp_len, active);
    for (long l_d : cfg.offsets_samples) {
      Impairments imp;
      imp.timing_offset = l_d;
      const double pct = 100.0 * static_cast<double>(l_d) / static_cast<double>(cfg.m);
      const double sir = pooled_sir_db(link, imp, derive_seed(cfg.seed, stream++), cfg.n_seeds);
      out.push_back({pct, sir, "sim:" + v.label});
    }
  }
  return out;
}

std::vector<CurvePoint> cfo_sweep(const CfoSweepConfig& cfg) {
  if (cfg.r_values.empty()) throw std::invalid_argument("cfo_sweep: r_values is empty");
  std::vector<CurvePoint> out;
  const std::array<FilterName, 3> names{FilterName::NPR1, FilterName::TFL1, FilterName::QMF1};
  for (FilterName name : names) {
    const PrototypeFilter f = make_filter(name, cfg.m);
    const TruncatedFreqResponse rx = truncate_normalize(f, reference_n_g(name));
    for (double r : cfg.r_values) {
      out.push_back({r, sir_cfo(f, rx, r).sir_db, std::string("fs-") + filter_label(name)});
      out.push_back({r, sir_cfo(f, r).sir_db, std::string("ppn-") + filter_label(name)});
    }
  }
  for (double r : cfg.r_values) out.push_back({r, ofdm_cfo_sir_db(cfg.m, r), "ofdm"});
  if (!cfg.simulate) return out;
  const std::vector<std::size_t> active = rb_active_set(cfg.m);
  uint64_t stream = 0;
  for (const VariantSpec& v : all_variants()) {
    const LinkConfig link = make_link(v.waveform, v.filter, cfg.m, cfg.n_symbols, cfg.cp_len, active);
    for (double r : cfg.r_values) {
      Impairments imp;
      imp.cfo = r;
      const double sir = pooled_sir_db(link, imp, derive_seed(cfg.seed, stream++), cfg.n_seeds);
      out.push_back({r, sir, "sim:" + v.label});
    }
  }
  return out;
}

PsdResult psd_experiment(const PsdConfig& cfg) {
  const std::vector<std::size_t> active =
      notched_active_set(cfg.m, 25, static_cast<std::size_t>(kNotchFirst),
                         static_cast<std::size_t>(kNotchLen));
  struct Spec {
    Waveform w;
    FilterName f;
    const char* series;
  };
  const std::array<Spec, 3> specs{{{Waveform::Ofdm, FilterName::NPR1, "ofdm"},
                                   {Waveform::FbmcPpn, FilterName::NPR1, "fbmc-npr1"},
                                   {Waveform::FbmcPpn, FilterName::QMF1, "fbmc-qmf1"}}};
  std::array<std::vector<CurvePoint>, 3> curves;
  PsdResult res;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const LinkConfig link =
        make_link(specs[i].w, specs[i].f, cfg.m, cfg.n_symbols, cfg.cp_len, active);
    const BasebandSignal s = modulated_burst(link, cfg.seed);
    const PsdEstimate est =
        estimate_psd(s, cfg.segment_len, cfg.overlap, PsdWindow::BlackmanHarris4);
    curves[i] = psd_curve_db(est, cfg.m, active, specs[i].series);
    res.curves.insert(res.curves.end(), curves[i].begin(), curves[i].end());
  }
  const std::vector<CurvePoint>& ofdm = curves[0];
  const std::vector<CurvePoint>& npr1 = curves[1];
  const std::vector<CurvePoint>& qmf1 = curves[2];

  // Out-of-band gap at the channel edges: +-2.5 MHz is 500/3 subcarrier
  // spacings from DC at the 15 kHz grid, one subcarrier of margin each way,
  // both edges averaged.
  const double channel_edge = 500.0 / 3.0;
  auto two_sided_gap = [&](double center, double half_width) {
    const double hi_side = band_mean(ofdm, center - half_width, center + half_width) -
                           band_mean(npr1, center - half_width, center + half_width);
    const double lo_side = band_mean(ofdm, -center - half_width, -center + half_width) -
                           band_mean(npr1, -center - half_width, -center + half_width);
    return 0.5 * (hi_side + lo_side);
  };
  res.edge_gap_db = two_sided_gap(channel_edge, 1.0);
  const double n_active_half = 6.0 * 25.0;
  double max_gap = -kSirCapDb;
  for (double center = n_active_half + 3.0; center <= static_cast<double>(cfg.m) / 2.0 - 2.0;
       center += 1.0)
    max_gap = std::max(max_gap, two_sided_gap(center, 1.0));
  res.edge_gap_max_db = max_gap;

  // In-notch gaps at the notch's central pair of subcarriers.
  const double notch_center = kNotchFirst + 0.5 * (kNotchLen - 1.0);
  const double o = band_mean(ofdm, notch_center - 0.5, notch_center + 0.5);
  const double n = band_mean(npr1, notch_center - 0.5, notch_center + 0.5);
  const double q = band_mean(qmf1, notch_center - 0.5, notch_center + 0.5);
  res.notch_npr1_ofdm_db = o - n;
  res.notch_npr1_qmf1_db = q - n;
  return res;
}

std::vector<BerSeries> ber_experiment(const BerConfig& cfg, const ChannelProfile& profile) {
  if (cfg.ebn0_db.empty()) throw std::invalid_argument("ber_experiment: ebn0_db is empty");
  const std::vector<VariantSpec>& variants = cfg.variants.empty() ? all_variants() : cfg.variants;
  const std::vector<std::size_t> active = rb_active_set(cfg.m);
  std::vector<BerSeries> out;
  out.reserve(variants.size());
  for (const VariantSpec& v : variants) {
    const LinkConfig link = make_link(v.waveform, v.filter, cfg.m, cfg.n_symbols, cfg.cp_len, active);
    out.push_back(
        {v.label, measure_ber(link, profile, cfg.ebn0_db, cfg.target_errors, cfg.max_bits, cfg.seed)});
  }
  return out;
}

std::vector<CurvePoint> ber_curves(const std::vector<BerSeries>& series) {
  std::vector<CurvePoint> out;
  for (const BerSeries& s : series)
    for (const BerPoint& pt : s.points) out.push_back({pt.ebn0_db, pt.ber, s.label});
  return out;
}

}  // namespace fbmc
