#include "fbmc/modem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fbmc/dft.hpp"

namespace fbmc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx expi(double phase) { return {std::cos(phase), std::sin(phase)}; }

// Sample accessor that reads zero outside the buffer, so shifted or clipped
// bursts stay well-defined at the edges.
cplx sample_at(const BasebandSignal& s, long k) {
  if (k < 0 || static_cast<std::size_t>(k) >= s.samples.size()) return {0.0, 0.0};
  return s.samples[static_cast<std::size_t>(k)];
}

void check_active(const ModemParams& p) {
  for (std::size_t sub : p.active_set) {
    if (sub >= p.m) throw std::invalid_argument("active_set entry exceeds subcarrier count");
  }
}

void require_filter(const ModemParams& p) {
  if (p.filter.taps.empty()) throw std::invalid_argument("filter: empty taps");
  if (p.filter.m != p.m) throw std::invalid_argument("filter: tap grid does not match m");
}

}  // namespace

void ModemParams::validate() const {
  if (m < 4 || m % 2 != 0) throw std::invalid_argument("m: need an even subcarrier count >= 4");
  if (n_symbols == 0) throw std::invalid_argument("n_symbols: need at least one symbol");
  if (active_set.empty()) throw std::invalid_argument("active_set: empty");
  if (cp_len >= m) throw std::invalid_argument("cp_len: must be below m");
  check_active(*this);
}

OqamGrid OqamGrid::zeros(std::size_t n_symbols, std::size_t m) {
  return OqamGrid{n_symbols, m, std::vector<double>(n_symbols * m, 0.0)};
}

QamGrid QamGrid::zeros(std::size_t n_symbols, std::size_t m) {
  return QamGrid{n_symbols, m, std::vector<cplx>(n_symbols * m, cplx{0.0, 0.0})};
}

double BasebandSignal::energy() const {
  double e = 0.0;
  for (const cplx& v : samples) e += std::norm(v);
  return e;
}

Equalizer Equalizer::unit(std::size_t m) {
  return Equalizer{m, false, std::vector<cplx>(m, cplx{1.0, 0.0})};
}

OqamGrid qam_to_oqam(const QamGrid& qam) {
  OqamGrid out = OqamGrid::zeros(2 * qam.n_symbols, qam.m);
  for (std::size_t t = 0; t < qam.n_symbols; ++t) {
    for (std::size_t sub = 0; sub < qam.m; ++sub) {
      out.at(2 * t, sub) = qam.at(t, sub).real();
      out.at(2 * t + 1, sub) = qam.at(t, sub).imag();
    }
  }
  return out;
}

QamGrid oqam_to_qam(const OqamGrid& pam) {
  if (pam.n_symbols % 2 != 0)
    throw std::invalid_argument("oqam_to_qam: odd symbol count cannot pair back to QAM");
  QamGrid out = QamGrid::zeros(pam.n_symbols / 2, pam.m);
  for (std::size_t t = 0; t < out.n_symbols; ++t) {
    for (std::size_t sub = 0; sub < pam.m; ++sub) {
      out.at(t, sub) = cplx{pam.at(2 * t, sub), pam.at(2 * t + 1, sub)};
    }
  }
  return out;
}

BasebandSignal ppn_modulate(const OqamGrid& grid, const ModemParams& p) {
  p.validate();
  require_filter(p);
  if (grid.m != p.m || grid.n_symbols != p.n_symbols)
    throw std::invalid_argument("ppn_modulate: grid does not match params");

  const std::size_t m = p.m;
  const std::size_t len = (p.n_symbols - 1) * (m / 2) + p.filter.length();
  BasebandSignal out;
  out.samples.assign(len, cplx{0.0, 0.0});

  std::vector<cplx> spectrum(m);
  const double d = p.filter.phase_center;
  const double amp = std::sqrt(static_cast<double>(m));  // orthonormal synthesis
  for (std::size_t n = 0; n < p.n_symbols; ++n) {
    std::fill(spectrum.begin(), spectrum.end(), cplx{0.0, 0.0});
    for (std::size_t sub : p.active_set) {
      const double a = grid.at(n, sub);
      if (a == 0.0) continue;
      spectrum[sub] = a * i_pow(static_cast<long long>(n + sub)) *
                      expi(-kTwoPi * static_cast<double>(sub) * d / static_cast<double>(m));
    }
    std::vector<cplx> chunk = idft(spectrum);
    const std::size_t base = n * (m / 2);
    for (std::size_t k = 0; k < p.filter.length(); ++k) {
      // K = 1 keeps the chunk and the filter the same length; longer filters
      // repeat the m-periodic chunk across their support.
      out.samples[base + k] += amp * p.filter.taps[k] * chunk[k % m];
    }
  }
  return out;
}

OqamGrid ppn_demodulate(const BasebandSignal& r, const ModemParams& p, const Equalizer& eq) {
  p.validate();
  require_filter(p);
  if (eq.m != p.m) throw std::invalid_argument("ppn_demodulate: equalizer size mismatch");

  const std::size_t m = p.m;
  const double d = p.filter.phase_center;
  const double gain = p.filter.energy() / static_cast<double>(m);
  const double inv_amp = 1.0 / std::sqrt(static_cast<double>(m));

  OqamGrid out = OqamGrid::zeros(p.n_symbols, m);
  std::vector<cplx> window(m);
  for (std::size_t n = 0; n < p.n_symbols; ++n) {
    const long base = static_cast<long>(n * (m / 2)) - r.sample_index_origin;
    for (std::size_t k = 0; k < m; ++k) {
      cplx acc{0.0, 0.0};
      // Fold the filter's full support back onto one m-periodic window.
      for (std::size_t seg = k; seg < p.filter.length(); seg += m) {
        acc += p.filter.taps[seg] * sample_at(r, base + static_cast<long>(seg));
      }
      window[k] = acc;
    }
    std::vector<cplx> spec = dft(window);
    for (std::size_t sub : p.active_set) {
      const cplx ref = i_pow(static_cast<long long>(n + sub)) *
                       expi(-kTwoPi * static_cast<double>(sub) * d / static_cast<double>(m));
      const cplx y = spec[sub] * inv_amp * eq.at(n, sub) * std::conj(ref);
      out.at(n, sub) = y.real() / gain;
    }
  }
  return out;
}

OqamGrid fs_demodulate(const BasebandSignal& r, const ModemParams& p, const Equalizer& eq) {
  p.validate();
  require_filter(p);
  if (!p.rx_taps) throw std::invalid_argument("fs_demodulate: rx_taps not set");
  if (eq.m != p.m) throw std::invalid_argument("fs_demodulate: equalizer size mismatch");
  const TruncatedFreqResponse& rx = *p.rx_taps;
  if (rx.m != p.m) throw std::invalid_argument("fs_demodulate: rx_taps grid does not match m");

  const std::size_t m = p.m;
  const long mm = static_cast<long>(m);
  const double d = p.filter.phase_center;
  const double gain = p.filter.energy() / static_cast<double>(m);
  const double inv_amp = 1.0 / std::sqrt(static_cast<double>(m));
  const long delta = static_cast<long>(rx.delta);

  // Complex frequency taps with the symmetry-center phase restored.
  std::vector<cplx> taps(rx.taps.size());
  for (long l = -delta; l <= delta; ++l) {
    taps[static_cast<std::size_t>(l + delta)] =
        rx.at(l) * expi(-kTwoPi * static_cast<double>(l) * rx.phase_center / static_cast<double>(m));
  }
  const double conv_scale = rx.scale / static_cast<double>(m);

  OqamGrid out = OqamGrid::zeros(p.n_symbols, m);
  std::vector<cplx> window(m);
  std::vector<cplx> eq_bins(m);
  for (std::size_t n = 0; n < p.n_symbols; ++n) {
    const long base = static_cast<long>(n * (m / 2)) - r.sample_index_origin;
    for (std::size_t k = 0; k < m; ++k) window[k] = sample_at(r, base + static_cast<long>(k));
    std::vector<cplx> spec = dft(window);
    for (std::size_t sub = 0; sub < m; ++sub) spec[sub] *= inv_amp;
    for (std::size_t sub = 0; sub < m; ++sub) eq_bins[sub] = spec[sub] * eq.at(n, sub);
    for (std::size_t sub : p.active_set) {
      cplx y{0.0, 0.0};
      for (long l = -delta; l <= delta; ++l) {
        const long j = (static_cast<long>(sub) - l % mm + mm) % mm;
        y += taps[static_cast<std::size_t>(l + delta)] * eq_bins[static_cast<std::size_t>(j)];
      }
      y *= conv_scale;
      const cplx ref = i_pow(static_cast<long long>(n + sub)) *
                       expi(-kTwoPi * static_cast<double>(sub) * d / static_cast<double>(m));
      out.at(n, sub) = (y * std::conj(ref)).real() / gain;
    }
  }
  return out;
}

BasebandSignal ofdm_modulate(const QamGrid& qam, const ModemParams& p) {
  p.validate();
  if (qam.m != p.m || qam.n_symbols != p.n_symbols)
    throw std::invalid_argument("ofdm_modulate: grid does not match params");

  const std::size_t m = p.m;
  const std::size_t stride = m + p.cp_len;
  BasebandSignal out;
  out.samples.assign(p.n_symbols * stride, cplx{0.0, 0.0});

  std::vector<cplx> spectrum(m);
  const double amp = std::sqrt(static_cast<double>(m));
  for (std::size_t t = 0; t < p.n_symbols; ++t) {
    std::fill(spectrum.begin(), spectrum.end(), cplx{0.0, 0.0});
    for (std::size_t sub : p.active_set) spectrum[sub] = qam.at(t, sub);
    std::vector<cplx> x = idft(spectrum);
    const std::size_t base = t * stride;
    for (std::size_t j = 0; j < p.cp_len; ++j) out.samples[base + j] = amp * x[m - p.cp_len + j];
    for (std::size_t k = 0; k < m; ++k) out.samples[base + p.cp_len + k] = amp * x[k];
  }
  return out;
}

QamGrid ofdm_demodulate(const BasebandSignal& r, const ModemParams& p, const Equalizer& eq) {
  p.validate();
  if (eq.m != p.m) throw std::invalid_argument("ofdm_demodulate: equalizer size mismatch");

  const std::size_t m = p.m;
  const std::size_t stride = m + p.cp_len;
  const std::size_t half_cp = p.cp_len / 2;
  // Samples of prefix left between the window start and the symbol body; the
  // DFT sees a circular shift by this amount.
  const std::size_t shift = p.cp_len - half_cp;
  const double inv_amp = 1.0 / std::sqrt(static_cast<double>(m));

  QamGrid out = QamGrid::zeros(p.n_symbols, m);
  std::vector<cplx> window(m);
  for (std::size_t t = 0; t < p.n_symbols; ++t) {
    const long base = static_cast<long>(t * stride + half_cp) - r.sample_index_origin;
    for (std::size_t k = 0; k < m; ++k) window[k] = sample_at(r, base + static_cast<long>(k));
    std::vector<cplx> spec = dft(window);
    for (std::size_t sub : p.active_set) {
      const cplx undo_shift =
          expi(kTwoPi * static_cast<double>(sub) * static_cast<double>(shift) / static_cast<double>(m));
      out.at(t, sub) = spec[sub] * inv_amp * undo_shift * eq.at(t, sub);
    }
  }
  return out;
}

Equalizer zf_equalizer_coeffs(const std::vector<cplx>& channel_taps, const ModemParams& p) {
  p.validate();
  if (channel_taps.empty()) throw std::invalid_argument("zf_equalizer_coeffs: empty channel");
  std::vector<cplx> padded(p.m, cplx{0.0, 0.0});
  if (channel_taps.size() > p.m)
    throw std::invalid_argument("zf_equalizer_coeffs: channel longer than the transform");
  std::copy(channel_taps.begin(), channel_taps.end(), padded.begin());
  std::vector<cplx> h = dft(padded);

  Equalizer eq = Equalizer::unit(p.m);
  for (std::size_t sub = 0; sub < p.m; ++sub) {
    if (std::abs(h[sub]) < 1e-12)
      throw std::runtime_error("zf_equalizer_coeffs: spectral null at subcarrier " +
                               std::to_string(sub));
    eq.coeff[sub] = 1.0 / h[sub];
  }
  return eq;
}

namespace {

// Gray pair -> PAM level in {-3,-1,+1,+3}: 00 -3, 01 -1, 11 +1, 10 +3.
double gray2_to_level(unsigned b) {
  switch (b & 3u) {
    case 0u: return -3.0;
    case 1u: return -1.0;
    case 3u: return 1.0;
    default: return 3.0;
  }
}

unsigned level_to_gray2(double v) {
  if (v < -2.0) return 0u;
  if (v < 0.0) return 1u;
  if (v < 2.0) return 3u;
  return 2u;
}

}  // namespace

cplx qam16_gray_map(unsigned nibble) {
  return cplx{pam4_gray_level((nibble >> 2) & 3u), pam4_gray_level(nibble & 3u)};
}

unsigned qam16_gray_demap(cplx y) {
  return (pam4_gray_slice(y.real()) << 2) | pam4_gray_slice(y.imag());
}

double pam4_gray_level(unsigned bits2) {
  return gray2_to_level(bits2) / std::sqrt(10.0);  // unit average QAM energy
}

unsigned pam4_gray_slice(double v) { return level_to_gray2(v * std::sqrt(10.0)); }

}  // namespace fbmc
