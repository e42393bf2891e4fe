#include "fbmc/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fbmc/dft.hpp"
#include "fbmc/rng.hpp"

namespace fbmc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx expi(double phase) { return {std::cos(phase), std::sin(phase)}; }

double to_db_capped(double num, double den) {
  if (den <= 0.0) return kSirCapDb;
  return std::min(10.0 * std::log10(num / den), kSirCapDb);
}

double contribution(cplx f, long p, long q_half, cplx extra = {1.0, 0.0}) {
  const double re = (i_pow(p + q_half) * f * extra).real();
  return re * re;
}

SirReport finish(double numerator, std::map<std::pair<long, long>, double> terms, int q) {
  SirReport rep;
  rep.numerator = numerator;
  rep.interference_terms = std::move(terms);
  rep.omega_q = q;
  rep.sir_db = to_db_capped(numerator, rep.interference_total());
  return rep;
}

}  // namespace

double SirReport::interference_total() const {
  double s = 0.0;
  for (const auto& [pq, v] : interference_terms) s += v;
  return s;
}

SirReport sir_nominal(const FilterBankResponse& F, std::size_t m) {
  const long half = static_cast<long>(m) / 2;
  double num = 0.0;
  std::map<std::pair<long, long>, double> terms;
  int q_max = 0;
  for (long q_samples : F.q_values) {
    if (q_samples % half != 0)
      throw std::invalid_argument("sir_nominal: q offsets must be multiples of M/2");
    const long q_half = q_samples / half;
    q_max = std::max(q_max, static_cast<int>(std::labs(q_half)));
    for (long p : F.p_values) {
      const cplx f = F.at(p, q_samples);
      if (p == 0 && q_half == 0) {
        num = f.real() * f.real();
        continue;
      }
      terms[{p, q_half}] = contribution(f, p, q_half);
    }
  }
  if (num <= 0.0) throw std::invalid_argument("sir_nominal: zero (0,0) response");
  return finish(num, std::move(terms), q_max);
}

SirReport sir_nominal(const PrototypeFilter& f) {
  return sir_nominal(fb_impulse_response(f, 1), f.m);
}

SirReport sir_truncation(const PrototypeFilter& f, const TruncatedFreqResponse& rx) {
  if (rx.m != f.m) throw std::invalid_argument("sir_truncation: tap grids differ");
  const std::vector<double> gt = truncated_time_taps(rx);
  const long half = static_cast<long>(f.m) / 2;
  const FilterBankResponse F =
      fb_impulse_response(f.taps, gt, {-half, 0, half}, f.m, f.phase_center);
  return sir_nominal(F, f.m);
}

SirReport sir_timing_ppn(const PrototypeFilter& f, long l_d) {
  const long half = static_cast<long>(f.m) / 2;
  std::vector<long> q_samples;
  for (long q = -2; q <= 2; ++q) q_samples.push_back(q * half + l_d);
  const FilterBankResponse F =
      fb_impulse_response(f.taps, f.taps, q_samples, f.m, f.phase_center);

  double num = 0.0;
  std::map<std::pair<long, long>, double> terms;
  for (long q = -2; q <= 2; ++q) {
    for (long p : F.p_values) {
      const cplx v = F.at(p, q * half + l_d);
      if (p == 0 && q == 0) {
        num = v.real() * v.real();
        continue;
      }
      const cplx residual_phase =
          expi(-kTwoPi * static_cast<double>(p) * static_cast<double>(l_d) /
               static_cast<double>(f.m));
      terms[{p, q}] = contribution(v, p, q, residual_phase);
    }
  }
  if (num <= 0.0) throw std::invalid_argument("sir_timing_ppn: zero (0, l_d) response");
  return finish(num, std::move(terms), 2);
}

SirReport sir_timing_fs(const PrototypeFilter& f, const TruncatedFreqResponse& rx, long l_d) {
  SirReport trunc = sir_truncation(f, rx);
  const double residual = trunc.interference_total() / trunc.numerator;

  double edge = 0.0;
  const double energy = f.energy();
  const long n = std::min<long>(std::labs(l_d), static_cast<long>(f.length()));
  for (long l = 0; l < n; ++l) edge += f.taps[static_cast<std::size_t>(l)] * f.taps[static_cast<std::size_t>(l)];
  edge = 2.0 * edge / energy;

  SirReport rep;
  rep.numerator = 1.0;
  rep.omega_q = trunc.omega_q;
  rep.interference_terms = std::move(trunc.interference_terms);
  for (auto& [pq, v] : rep.interference_terms) v /= trunc.numerator;
  // The window-edge energy loss enters as one aggregate term; key it at the
  // own-symbol slot it physically belongs to.
  if (edge > 0.0) rep.interference_terms[{0, 0}] = edge;
  rep.sir_db = to_db_capped(1.0, residual + edge);
  return rep;
}

namespace {

SirReport cfo_sum(const std::vector<double>& g_tx, const std::vector<double>& g_rx,
                  std::size_t m, double center, double r) {
  const long half = static_cast<long>(m) / 2;
  const cplx f00 = fb_response_at(g_tx, g_rx, r, 0, m, center);
  const double num = f00.real() * f00.real();
  if (num <= 0.0) throw std::invalid_argument("sir_cfo: zero main response");

  std::map<std::pair<long, long>, double> terms;
  for (long q = -1; q <= 1; ++q) {
    for (long p = -half; p < half; ++p) {
      if (p == 0 && q == 0) continue;
      const cplx v = fb_response_at(g_tx, g_rx, static_cast<double>(p) + r, q * half, m, center);
      terms[{p, q}] = contribution(v, p, q);
    }
  }
  return finish(num, std::move(terms), 1);
}

}  // namespace

SirReport sir_cfo(const PrototypeFilter& f, double r) {
  return cfo_sum(f.taps, f.taps, f.m, f.phase_center, r);
}

SirReport sir_cfo(const PrototypeFilter& f, const TruncatedFreqResponse& rx, double r) {
  if (rx.m != f.m) throw std::invalid_argument("sir_cfo: tap grids differ");
  return cfo_sum(f.taps, truncated_time_taps(rx), f.m, f.phase_center, r);
}

double ofdm_cfo_sir_db(std::size_t m, double r) {
  const double md = static_cast<double>(m);
  auto d2 = [md](double x) {
    const double den = md * std::sin(std::numbers::pi * x / md);
    if (std::abs(den) < 1e-300) return 1.0;
    const double v = std::sin(std::numbers::pi * x) / den;
    return v * v;
  };
  const double num = (r == 0.0) ? 1.0 : d2(r);
  double den = 0.0;
  const long half = static_cast<long>(m) / 2;
  for (long p = -half; p < half; ++p) {
    if (p == 0) continue;
    den += d2(static_cast<double>(p) + r);
  }
  return to_db_capped(num, den);
}

// ---- Monte-Carlo --------------------------------------------------------

const char* waveform_str(Waveform w) {
  switch (w) {
    case Waveform::Ofdm: return "ofdm";
    case Waveform::FbmcPpn: return "fbmc-ppn";
    case Waveform::FbmcFs: return "fbmc-fs";
  }
  return "?";
}

namespace {

Equalizer compose(const Equalizer& a, const Equalizer& b, std::size_t n_symbols) {
  if (!a.per_symbol && !b.per_symbol) {
    Equalizer out = a;
    for (std::size_t i = 0; i < out.coeff.size(); ++i) out.coeff[i] *= b.coeff[i];
    return out;
  }
  Equalizer out;
  out.m = a.m;
  out.per_symbol = true;
  out.coeff.resize(n_symbols * a.m);
  for (std::size_t n = 0; n < n_symbols; ++n)
    for (std::size_t sub = 0; sub < a.m; ++sub)
      out.coeff[n * a.m + sub] = a.at(n, sub) * b.at(n, sub);
  return out;
}

// CP-OFDM accumulates the CFO common phase per windowed symbol at the
// window's absolute start position.
Equalizer ofdm_cpe_equalizer(double r, const ModemParams& p) {
  Equalizer eq;
  eq.m = p.m;
  eq.per_symbol = true;
  eq.coeff.assign(p.n_symbols * p.m, cplx{1.0, 0.0});
  const std::size_t stride = p.m + p.cp_len;
  for (std::size_t t = 0; t < p.n_symbols; ++t) {
    const double start = static_cast<double>(t * stride + p.cp_len / 2);
    const cplx c = expi(-kTwoPi * r * start / static_cast<double>(p.m));
    for (std::size_t sub = 0; sub < p.m; ++sub) eq.coeff[t * p.m + sub] = c;
  }
  return eq;
}

Equalizer fbmc_cpe_equalizer(double r, const ModemParams& p) {
  Equalizer eq = cpe_equalizer(r, p.m, p.n_symbols);
  // The offset also accrues a fixed phase across the filter's group delay;
  // PAM detection takes a real projection, so unlike a complex gain fit this
  // rotation is not absorbed downstream and must be undone here.
  const double ang = kTwoPi * r * p.filter.phase_center / static_cast<double>(p.m);
  const cplx fixed = std::conj(cplx(std::cos(ang), std::sin(ang)));
  for (cplx& c : eq.coeff) c *= fixed;
  return eq;
}

struct Burst {
  OqamGrid pam;       // FBMC reference
  QamGrid qam;        // OFDM reference
  BasebandSignal tx;
};

Burst make_burst(const LinkConfig& link, GaussianRng& rng) {
  Burst b;
  const ModemParams& p = link.params;
  if (link.waveform == Waveform::Ofdm) {
    b.qam = QamGrid::zeros(p.n_symbols, p.m);
    for (std::size_t t = 0; t < p.n_symbols; ++t)
      for (std::size_t sub : p.active_set)
        b.qam.at(t, sub) = qam16_gray_map(static_cast<unsigned>(rng.index(16)));
    b.tx = ofdm_modulate(b.qam, p);
  } else {
    b.pam = OqamGrid::zeros(p.n_symbols, p.m);
    for (std::size_t n = 0; n < p.n_symbols; ++n)
      for (std::size_t sub : p.active_set)
        b.pam.at(n, sub) = rng.uniform() < 0.5 ? -1.0 : 1.0;
    b.tx = ppn_modulate(b.pam, p);
  }
  return b;
}

BasebandSignal run_channel(const BasebandSignal& tx, const Impairments& imp,
                           const ModemParams& p, double info_bits, uint64_t noise_seed) {
  BasebandSignal r = tx;
  const double tx_energy = tx.energy();
  if (imp.multipath != nullptr) r = apply_multipath(r, *imp.multipath);
  if (imp.cfo != 0.0) r = apply_cfo(r, imp.cfo, p.m);
  if (imp.timing_offset != 0) r = apply_timing_offset(r, imp.timing_offset);
  if (std::isfinite(imp.ebn0_db)) r = add_awgn(r, imp.ebn0_db, info_bits, noise_seed, tx_energy);
  return r;
}

Equalizer receiver_equalizer(const LinkConfig& link, const Impairments& imp) {
  const ModemParams& p = link.params;
  Equalizer eq = Equalizer::unit(p.m);
  if (!imp.compensate) return eq;
  if (imp.multipath != nullptr) eq = zf_equalizer_coeffs(imp.multipath->taps, p);
  if (imp.timing_offset != 0) eq = compose(eq, timing_equalizer(imp.timing_offset, p.m), p.n_symbols);
  if (imp.cfo != 0.0) {
    const Equalizer cpe = (link.waveform == Waveform::Ofdm) ? ofdm_cpe_equalizer(imp.cfo, p)
                                                            : fbmc_cpe_equalizer(imp.cfo, p);
    eq = compose(eq, cpe, p.n_symbols);
  }
  return eq;
}

double payload_info_bits(const LinkConfig& link, double bits_per_qam = 4.0) {
  const ModemParams& p = link.params;
  const double qam_symbols = (link.waveform == Waveform::Ofdm)
                                 ? static_cast<double>(p.n_symbols)
                                 : static_cast<double>(p.n_symbols) / 2.0;
  return qam_symbols * static_cast<double>(p.active_set.size()) * bits_per_qam;
}

}  // namespace

MeasuredSir measure_sir(const LinkConfig& link, const Impairments& imp, uint64_t seed,
                        std::size_t edge_skip) {
  const ModemParams& p = link.params;
  p.validate();
  GaussianRng data_rng(derive_seed(seed, 1));
  Burst b = make_burst(link, data_rng);
  const double info_bits = imp.info_bits > 0.0 ? imp.info_bits : payload_info_bits(link);
  const BasebandSignal r = run_channel(b.tx, imp, p, info_bits, derive_seed(seed, 2));
  const Equalizer eq = receiver_equalizer(link, imp);

  MeasuredSir out;
  if (link.waveform == Waveform::Ofdm) {
    const QamGrid rx = ofdm_demodulate(r, p, eq);
    // Complex LS gain absorbs any common rotation left by the impairments.
    cplx dot{0.0, 0.0};
    double ref_pow = 0.0;
    const std::size_t lo = std::min<std::size_t>(edge_skip, p.n_symbols);
    const std::size_t hi = p.n_symbols > edge_skip ? p.n_symbols - edge_skip : 0;
    for (std::size_t t = lo; t < hi; ++t)
      for (std::size_t sub : p.active_set) {
        dot += rx.at(t, sub) * std::conj(b.qam.at(t, sub));
        ref_pow += std::norm(b.qam.at(t, sub));
      }
    if (ref_pow <= 0.0) throw std::invalid_argument("measure_sir: no cells to measure");
    const cplx alpha = dot / ref_pow;
    double sig = 0.0, err = 0.0;
    for (std::size_t t = lo; t < hi; ++t)
      for (std::size_t sub : p.active_set) {
        const cplx want = alpha * b.qam.at(t, sub);
        sig += std::norm(want);
        err += std::norm(rx.at(t, sub) - want);
        ++out.cells;
      }
    out.gain = std::abs(alpha);
    out.signal_power = sig;
    out.error_power = err;
    out.sir_db = to_db_capped(sig, err);
    return out;
  }

  const OqamGrid rx = (link.waveform == Waveform::FbmcFs) ? fs_demodulate(r, p, eq)
                                                          : ppn_demodulate(r, p, eq);
  double dot = 0.0, ref_pow = 0.0;
  const std::size_t lo = std::min<std::size_t>(edge_skip, p.n_symbols);
  const std::size_t hi = p.n_symbols > edge_skip ? p.n_symbols - edge_skip : 0;
  for (std::size_t n = lo; n < hi; ++n)
    for (std::size_t sub : p.active_set) {
      dot += rx.at(n, sub) * b.pam.at(n, sub);
      ref_pow += b.pam.at(n, sub) * b.pam.at(n, sub);
    }
  if (ref_pow <= 0.0) throw std::invalid_argument("measure_sir: no cells to measure");
  const double alpha = dot / ref_pow;
  double sig = 0.0, err = 0.0;
  for (std::size_t n = lo; n < hi; ++n)
    for (std::size_t sub : p.active_set) {
      const double want = alpha * b.pam.at(n, sub);
      sig += want * want;
      const double e = rx.at(n, sub) - want;
      err += e * e;
      ++out.cells;
    }
  out.gain = alpha;
  out.signal_power = sig;
  out.error_power = err;
  out.sir_db = to_db_capped(sig, err);
  return out;
}

std::vector<CurvePoint> sir_per_subcarrier(const LinkConfig& link, const ChannelRealization& h,
                                           uint64_t seed) {
  const ModemParams& p = link.params;
  p.validate();
  GaussianRng data_rng(derive_seed(seed, 1));
  Burst b = make_burst(link, data_rng);
  Impairments imp;
  imp.multipath = &h;
  const BasebandSignal r = run_channel(b.tx, imp, p, payload_info_bits(link), 0);
  const Equalizer eq = zf_equalizer_coeffs(h.taps, p);

  std::vector<CurvePoint> out;
  const std::string series = waveform_str(link.waveform);
  const std::size_t lo = 1;
  const std::size_t hi = p.n_symbols - 1;
  if (link.waveform == Waveform::Ofdm) {
    const QamGrid rx = ofdm_demodulate(r, p, eq);
    for (std::size_t sub : p.active_set) {
      cplx dot{0.0, 0.0};
      double ref_pow = 0.0;
      for (std::size_t t = lo; t < hi; ++t) {
        dot += rx.at(t, sub) * std::conj(b.qam.at(t, sub));
        ref_pow += std::norm(b.qam.at(t, sub));
      }
      const cplx alpha = dot / ref_pow;
      double sig = 0.0, err = 0.0;
      for (std::size_t t = lo; t < hi; ++t) {
        const cplx want = alpha * b.qam.at(t, sub);
        sig += std::norm(want);
        err += std::norm(rx.at(t, sub) - want);
      }
      out.push_back({static_cast<double>(sub), to_db_capped(sig, err), series});
    }
    return out;
  }

  const OqamGrid rx = (link.waveform == Waveform::FbmcFs) ? fs_demodulate(r, p, eq)
                                                          : ppn_demodulate(r, p, eq);
  for (std::size_t sub : p.active_set) {
    double dot = 0.0, ref_pow = 0.0;
    for (std::size_t n = lo; n < hi; ++n) {
      dot += rx.at(n, sub) * b.pam.at(n, sub);
      ref_pow += b.pam.at(n, sub) * b.pam.at(n, sub);
    }
    const double alpha = dot / ref_pow;
    double sig = 0.0, err = 0.0;
    for (std::size_t n = lo; n < hi; ++n) {
      const double want = alpha * b.pam.at(n, sub);
      sig += want * want;
      const double e = rx.at(n, sub) - want;
      err += e * e;
    }
    out.push_back({static_cast<double>(sub), to_db_capped(sig, err), series});
  }
  return out;
}

// ---- PSD ----------------------------------------------------------------

double PsdEstimate::mean_power() const {
  double s = 0.0;
  for (double v : power) s += v;
  return s;
}

namespace {

std::vector<double> make_window(PsdWindow kind, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (kind == PsdWindow::Rect) return w;
  if (kind == PsdWindow::Hann) {
    for (std::size_t k = 0; k < n; ++k)
      w[k] = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(k) / static_cast<double>(n));
    return w;
  }
  // 4-term Blackman-Harris.
  constexpr double a0 = 0.35875, a1 = 0.48829, a2 = 0.14128, a3 = 0.01168;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = kTwoPi * static_cast<double>(k) / static_cast<double>(n);
    w[k] = a0 - a1 * std::cos(t) + a2 * std::cos(2.0 * t) - a3 * std::cos(3.0 * t);
  }
  return w;
}

}  // namespace

PsdEstimate estimate_psd(const BasebandSignal& s, std::size_t segment_len, double overlap,
                         PsdWindow window) {
  if (segment_len < 2) throw std::invalid_argument("estimate_psd: segment too short");
  if (s.samples.size() < segment_len)
    throw std::invalid_argument("estimate_psd: signal shorter than one segment");
  if (overlap < 0.0 || overlap > 0.95) throw std::invalid_argument("estimate_psd: overlap range");

  const std::vector<double> w = make_window(window, segment_len);
  double u = 0.0;
  for (double v : w) u += v * v;

  const std::size_t hop =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(
                                  static_cast<double>(segment_len) * (1.0 - overlap))));
  PsdEstimate est;
  est.power.assign(segment_len, 0.0);
  std::vector<cplx> seg(segment_len);
  for (std::size_t start = 0; start + segment_len <= s.samples.size(); start += hop) {
    for (std::size_t k = 0; k < segment_len; ++k) seg[k] = w[k] * s.samples[start + k];
    std::vector<cplx> spec = dft(seg);
    for (std::size_t l = 0; l < segment_len; ++l) est.power[l] += std::norm(spec[l]);
    ++est.segments;
  }
  if (est.segments == 0) throw std::invalid_argument("estimate_psd: no full segment fits");
  const double norm = 1.0 / (static_cast<double>(est.segments) * u * static_cast<double>(segment_len));
  for (double& v : est.power) v *= norm;
  return est;
}

std::vector<CurvePoint> psd_curve_db(const PsdEstimate& est, std::size_t m_sub,
                                     const std::vector<std::size_t>& active,
                                     const std::string& series) {
  const std::size_t nfft = est.power.size();
  const double bins_per_sub = static_cast<double>(nfft) / static_cast<double>(m_sub);

  double in_band = 0.0;
  for (std::size_t sub : active) {
    const std::size_t bin =
        static_cast<std::size_t>(std::lround(static_cast<double>(sub) * bins_per_sub)) % nfft;
    in_band += est.power[bin];
  }
  if (active.empty() || in_band <= 0.0)
    throw std::invalid_argument("psd_curve_db: no usable in-band reference");
  in_band /= static_cast<double>(active.size());

  std::vector<CurvePoint> out(nfft);
  const long half = static_cast<long>(nfft) / 2;
  for (long c = -half; c < half; ++c) {
    const std::size_t bin = static_cast<std::size_t>((c + static_cast<long>(nfft)) % static_cast<long>(nfft));
    const double rel = est.power[bin] / in_band;
    out[static_cast<std::size_t>(c + half)] = {
        static_cast<double>(c) / bins_per_sub,
        10.0 * std::log10(std::max(rel, 1e-30)), series};
  }
  return out;
}

// ---- BER ----------------------------------------------------------------

std::vector<BerPoint> measure_ber(const LinkConfig& link, const ChannelProfile& profile,
                                  const std::vector<double>& ebn0_list,
                                  std::size_t target_errors, uint64_t max_bits, uint64_t seed) {
  const ModemParams& p = link.params;
  p.validate();
  if (link.waveform != Waveform::Ofdm && p.n_symbols % 2 != 0)
    throw std::invalid_argument("measure_ber: FBMC burst needs an even symbol count");

  std::vector<BerPoint> out;
  const double info_bits = payload_info_bits(link);
  uint64_t stream = 0;

  // The channel is static for the whole measurement: one realization drawn
  // from the seed, shared by every burst and every Eb/N0 point. Only data and
  // noise are redrawn per burst.
  const ChannelRealization h = realize_multipath(profile, derive_seed(seed, 0xC0FFEE));

  for (double ebn0 : ebn0_list) {
    BerPoint pt;
    pt.ebn0_db = ebn0;
    while (pt.errors < target_errors && pt.bits < max_bits) {
      const uint64_t burst_seed = derive_seed(seed, stream++);
      GaussianRng data_rng(derive_seed(burst_seed, 1));

      Impairments imp;
      imp.multipath = &h;
      imp.ebn0_db = ebn0;
      imp.info_bits = info_bits;

      if (link.waveform == Waveform::Ofdm) {
        QamGrid tx = QamGrid::zeros(p.n_symbols, p.m);
        std::vector<unsigned> nibbles(p.n_symbols * p.active_set.size());
        std::size_t w = 0;
        for (std::size_t t = 0; t < p.n_symbols; ++t)
          for (std::size_t sub : p.active_set) {
            nibbles[w] = static_cast<unsigned>(data_rng.index(16));
            tx.at(t, sub) = qam16_gray_map(nibbles[w]);
            ++w;
          }
        BasebandSignal sig = ofdm_modulate(tx, p);
        sig = run_channel(sig, imp, p, info_bits, derive_seed(burst_seed, 3));
        const Equalizer eq = zf_equalizer_coeffs(h.taps, p);
        const QamGrid rx = ofdm_demodulate(sig, p, eq);
        w = 0;
        for (std::size_t t = 0; t < p.n_symbols; ++t)
          for (std::size_t sub : p.active_set) {
            if (t >= 1 && t + 1 < p.n_symbols) {
              const unsigned got = qam16_gray_demap(rx.at(t, sub));
              const unsigned diff = got ^ nibbles[w];
              pt.errors += static_cast<uint64_t>(std::popcount(diff));
              pt.bits += 4;
            }
            ++w;
          }
      } else {
        QamGrid payload = QamGrid::zeros(p.n_symbols / 2, p.m);
        std::vector<unsigned> nibbles(payload.n_symbols * p.active_set.size());
        std::size_t w = 0;
        for (std::size_t t = 0; t < payload.n_symbols; ++t)
          for (std::size_t sub : p.active_set) {
            nibbles[w] = static_cast<unsigned>(data_rng.index(16));
            payload.at(t, sub) = qam16_gray_map(nibbles[w]);
            ++w;
          }
        const OqamGrid tx = qam_to_oqam(payload);
        BasebandSignal sig = ppn_modulate(tx, p);
        sig = run_channel(sig, imp, p, info_bits, derive_seed(burst_seed, 3));
        const Equalizer eq = zf_equalizer_coeffs(h.taps, p);
        const OqamGrid rx = (link.waveform == Waveform::FbmcFs) ? fs_demodulate(sig, p, eq)
                                                                : ppn_demodulate(sig, p, eq);
        // Each PAM cell carries one Gray axis pair; skip the first and last
        // half-spaced symbols.
        w = 0;
        for (std::size_t t = 0; t < payload.n_symbols; ++t)
          for (std::size_t sub : p.active_set) {
            const unsigned sent = nibbles[w];
            const std::size_t n_re = 2 * t, n_im = 2 * t + 1;
            if (n_re >= 1 && n_re + 1 < p.n_symbols) {
              const unsigned got = pam4_gray_slice(rx.at(n_re, sub));
              pt.errors += static_cast<uint64_t>(std::popcount(got ^ ((sent >> 2) & 3u)));
              pt.bits += 2;
            }
            if (n_im >= 1 && n_im + 1 < p.n_symbols) {
              const unsigned got = pam4_gray_slice(rx.at(n_im, sub));
              pt.errors += static_cast<uint64_t>(std::popcount(got ^ (sent & 3u)));
              pt.bits += 2;
            }
            ++w;
          }
      }
    }
    pt.ber = pt.bits > 0 ? static_cast<double>(pt.errors) / static_cast<double>(pt.bits) : 0.0;
    out.push_back(pt);
  }
  return out;
}

}  // namespace fbmc
