#include "fbmc/filters.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fbmc/dft.hpp"

namespace fbmc {

namespace {

constexpr double kPi = std::numbers::pi;

void check_even_min(std::size_t m, std::size_t min_m, const char* who) {
  if (m < min_m || (m % 2) != 0) {
    throw std::invalid_argument(std::string(who) + ": m must be even and >= " +
                                std::to_string(min_m) + ", got " + std::to_string(m));
  }
}

}  // namespace

const char* filter_name_str(FilterName name) {
  switch (name) {
    case FilterName::QMF1: return "QMF1";
    case FilterName::TFL1: return "TFL1";
    case FilterName::NPR1: return "NPR1";
    case FilterName::Custom: return "Custom";
  }
  return "?";
}

double PrototypeFilter::energy() const {
  double e = 0.0;
  for (double t : taps) e += t * t;
  return e;
}

PrototypeFilter gen_qmf1(std::size_t m) {
  check_even_min(m, 4, "gen_qmf1");
  PrototypeFilter f;
  f.name = FilterName::QMF1;
  f.m = m;
  f.k_overlap = 1;
  f.taps.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    f.taps[k] = std::sin(kPi * static_cast<double>(k) / static_cast<double>(m));
  }
  f.phase_center = static_cast<double>(m) / 2.0;
  return f;
}

PrototypeFilter gen_tfl1(std::size_t m) {
  check_even_min(m, 4, "gen_tfl1");
  // Closed-form constants for the time-frequency-localization criterion.
  static constexpr double X[8] = {
      4.1284847578,     1.9727736832,     1.2781855004e-1, -1.4505800309e2,
      -2.1107642825e1, -6.6774831778e-3, -1.0150558822e2,  1.9143799092e-2};
  const double mhalf = static_cast<double>(m) / 2.0;
  const double gamma0 = 1.0 / (X[0] + X[1] * mhalf);
  const double beta1 = X[2] + 1.0 / (X[3] + X[4] * mhalf);
  const double beta2 = X[5] + 1.0 / (X[6] + X[7] * mhalf);

  PrototypeFilter f;
  f.name = FilterName::TFL1;
  f.m = m;
  f.k_overlap = 1;
  f.taps.resize(m);
  for (std::size_t k = 0; k < m / 2; ++k) {
    const double x = (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(m);
    const double t = 2.0 * x - 1.0;
    const double angle =
        kPi / 2.0 * (1.0 - x) + gamma0 * t + 2.0 * t * (t * t - 1.0) * (beta1 + 4.0 * beta2 * t * t);
    f.taps[k] = std::cos(angle);
    f.taps[m - 1 - k] = f.taps[k];  // half-sample symmetry g(k) = g(m-1-k)
  }
  const double peak = *std::max_element(f.taps.begin(), f.taps.end());
  for (double& t : f.taps) t /= peak;
  f.phase_center = (static_cast<double>(m) - 1.0) / 2.0;
  return f;
}

namespace {

constexpr double kNprHarmonics[3] = {0.564447, -0.066754, 0.002300};

}  // namespace

PrototypeFilter gen_npr1(std::size_t m) {
  check_even_min(m, 8, "gen_npr1");
  PrototypeFilter f;
  f.name = FilterName::NPR1;
  f.m = m;
  f.k_overlap = 1;
  f.taps.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    double radicand = 1.0;
    for (int l = 0; l < 3; ++l) {
      radicand -= 2.0 * kNprHarmonics[l] *
                  std::cos(2.0 * kPi * static_cast<double>(k) * (2.0 * l + 1.0) /
                           static_cast<double>(m));
    }
    if (radicand < 0.0) {
      if (radicand < -1e-12) {
        throw std::runtime_error("gen_npr1: negative radicand beyond rounding noise (" +
                                 std::to_string(radicand) + ") -- corrupted constants");
      }
      radicand = 0.0;
    }
    f.taps[k] = std::sqrt(radicand);
  }
  f.phase_center = static_cast<double>(m) / 2.0;
  return f;
}

PrototypeFilter gen_npr1_from_fb(std::size_t m) {
  check_even_min(m, 8, "gen_npr1_from_fb");
  // Quantized transceiver-column values at harmonic offsets 0..3, taken from
  // the printed reference table (see mmb4_fb_table, column p = 0).
  static constexpr double kColumn[4] = {1.0, 0.564, 0.0, -0.067};

  PrototypeFilter f;
  f.name = FilterName::Custom;
  f.m = m;
  f.k_overlap = 1;
  f.taps.resize(m);
  const double center = static_cast<double>(m) / 2.0;
  for (std::size_t k = 0; k < m; ++k) {
    // Harmonics are referenced to the symmetry center: exp(i 2 pi l (k - m/2) / m).
    cplx radicand = 0.0;
    for (long l = -3; l <= 3; ++l) {
      const double v = kColumn[std::labs(l)];
      if (v == 0.0) continue;
      const double ang = 2.0 * kPi * static_cast<double>(l) *
                         (static_cast<double>(k) - center) / static_cast<double>(m);
      radicand += v * cplx(std::cos(ang), std::sin(ang));
    }
    if (std::abs(radicand.imag()) > 1e-9) {
      throw std::runtime_error("gen_npr1_from_fb: non-real radicand -- wrong index mapping");
    }
    f.taps[k] = std::sqrt(std::max(0.0, radicand.real()));
  }
  f.phase_center = center;
  return f;
}

cplx FreqResponse::at(long l) const {
  const long n = static_cast<long>(bins.size());
  long idx = l % n;
  if (idx < 0) idx += n;
  return bins[static_cast<std::size_t>(idx)];
}

FreqResponse freq_response(const PrototypeFilter& f, std::size_t n_points) {
  if (n_points < f.length()) {
    throw std::invalid_argument("freq_response: n_points must be >= filter length");
  }
  std::vector<cplx> padded(n_points, cplx(0.0, 0.0));
  for (std::size_t k = 0; k < f.length(); ++k) padded[k] = f.taps[k];
  FreqResponse out;
  out.bins = dft(padded);
  return out;
}

double TruncatedFreqResponse::at(long l) const {
  if (std::labs(l) > static_cast<long>(delta)) {
    throw std::out_of_range("TruncatedFreqResponse::at: |l| exceeds delta");
  }
  return taps[static_cast<std::size_t>(l + static_cast<long>(delta))];
}

TruncatedFreqResponse truncate_normalize(const FreqResponse& G, std::size_t n_g,
                                         double phase_center) {
  // n_g = size + 1 is the untruncated case: l spans a full circle and the two
  // endpoint taps alias to the same (Nyquist) bin, so each carries half of it.
  if (n_g % 2 == 0 || n_g == 0 || n_g > G.size() + 1) {
    throw std::invalid_argument("truncate_normalize: n_g must be odd and within the DFT length");
  }
  const bool full_circle = (n_g == G.size() + 1);
  const cplx g0 = G.at(0);
  if (std::abs(g0) < 1e-300) {
    throw std::invalid_argument("truncate_normalize: G(0) is zero");
  }
  const std::size_t n = G.size();
  const long delta = static_cast<long>((n_g - 1) / 2);

  TruncatedFreqResponse out;
  out.n_g = n_g;
  out.delta = static_cast<std::size_t>(delta);
  out.phase_center = phase_center;
  out.m = n;
  out.taps.resize(n_g);
  for (long l = -delta; l <= delta; ++l) {
    // Remove the linear phase of the symmetry center so the tap is real.
    const double ang = 2.0 * kPi * static_cast<double>(l) * phase_center / static_cast<double>(n);
    cplx v = G.at(l) * cplx(std::cos(ang), std::sin(ang)) / g0;
    if (full_circle && (l == -delta || l == delta)) v *= 0.5;
    if (std::abs(v.imag()) > 1e-9) {
      throw std::runtime_error("truncate_normalize: non-real tap after center-phase compensation");
    }
    out.taps[static_cast<std::size_t>(l + delta)] = v.real();
  }
  // The compensated G(0) is real by construction of the division; keep the
  // physical scale as a real value with the center phase folded out.
  out.scale = std::abs(g0);
  if (g0.real() < 0.0) out.scale = -out.scale;
  return out;
}

TruncatedFreqResponse truncate_normalize(const PrototypeFilter& f, std::size_t n_g) {
  return truncate_normalize(freq_response(f, f.length()), n_g, f.phase_center);
}

std::vector<double> truncated_time_taps(const TruncatedFreqResponse& rx) {
  const std::size_t m = rx.m;
  std::vector<double> g(m, 0.0);
  const long delta = static_cast<long>(rx.delta);
  for (std::size_t k = 0; k < m; ++k) {
    double acc = 0.0;
    for (long l = -delta; l <= delta; ++l) {
      const double ang = 2.0 * kPi * static_cast<double>(l) *
                         (static_cast<double>(k) - rx.phase_center) / static_cast<double>(m);
      acc += rx.at(l) * std::cos(ang);  // taps are symmetric: imaginary parts cancel
    }
    g[k] = rx.scale * acc / static_cast<double>(m);
  }
  return g;
}

cplx FilterBankResponse::at(long p, long q) const {
  const auto pit = std::find(p_values.begin(), p_values.end(), p);
  const auto qit = std::find(q_values.begin(), q_values.end(), q);
  if (pit == p_values.end() || qit == q_values.end()) {
    throw std::out_of_range("FilterBankResponse::at: (p,q) outside the table");
  }
  const std::size_t pi = static_cast<std::size_t>(pit - p_values.begin());
  const std::size_t qi = static_cast<std::size_t>(qit - q_values.begin());
  return table[pi * q_values.size() + qi];
}

bool FilterBankResponse::has(long p, long q) const {
  return std::find(p_values.begin(), p_values.end(), p) != p_values.end() &&
         std::find(q_values.begin(), q_values.end(), q) != q_values.end();
}

FilterBankResponse mmb4_fb_table() {
  FilterBankResponse fb;
  fb.p_values = {-1, 0, 1};
  fb.q_values = {-3, -2, -1, 0, 1, 2, 3};  // half-symbol units
  const cplx i(0.0, 1.0);
  // Column-wise entries over q = -3..3.
  const cplx col_m1[7] = {i * 0.043, -0.125, -i * 0.206, 0.239, i * 0.206, -0.125, -i * 0.043};
  const cplx col_0[7] = {-0.067, 0.0, 0.564, 1.0, 0.564, 0.0, -0.067};
  const cplx col_p1[7] = {-i * 0.043, -0.125, i * 0.206, 0.239, -i * 0.206, -0.125, i * 0.043};
  fb.table.reserve(21);
  for (const cplx* col : {col_m1, col_0, col_p1}) {
    fb.table.insert(fb.table.end(), col, col + 7);
  }
  return fb;
}

namespace {

double seq_norm(const std::vector<double>& v) {
  double e = 0.0;
  for (double x : v) e += x * x;
  return std::sqrt(e);
}

}  // namespace

FilterBankResponse fb_impulse_response(const std::vector<double>& g_tx,
                                       const std::vector<double>& g_rx,
                                       const std::vector<long>& q_samples,
                                       std::size_t m, double center) {
  if (g_tx.empty() || g_rx.empty()) {
    throw std::invalid_argument("fb_impulse_response: empty filter");
  }
  if (g_rx.size() != m) {
    throw std::invalid_argument("fb_impulse_response: receive filter length must equal m");
  }
  const double norm = seq_norm(g_tx) * seq_norm(g_rx);
  const long mlen = static_cast<long>(m);
  const long txlen = static_cast<long>(g_tx.size());

  FilterBankResponse fb;
  fb.p_values.resize(m);
  for (long p = -mlen / 2; p < mlen / 2; ++p) fb.p_values[static_cast<std::size_t>(p + mlen / 2)] = p;
  fb.q_values = q_samples;
  fb.table.assign(m * q_samples.size(), cplx(0.0, 0.0));

  // For each q, compute the windowed product once, then take its transform at
  // every p via a single DFT of the center-referenced sequence.
  std::vector<cplx> prod(m);
  for (std::size_t qi = 0; qi < q_samples.size(); ++qi) {
    const long q = q_samples[qi];
    bool any = false;
    for (long k = 0; k < mlen; ++k) {
      const long kt = k + q;
      double v = 0.0;
      if (kt >= 0 && kt < txlen) {
        v = g_tx[static_cast<std::size_t>(kt)] * g_rx[static_cast<std::size_t>(k)];
        if (v != 0.0) any = true;
      }
      prod[static_cast<std::size_t>(k)] = v;
    }
    if (!any) continue;  // disjoint support: row stays zero
    std::vector<cplx> spec = dft(prod);
    for (long p = -mlen / 2; p < mlen / 2; ++p) {
      long bin = p % mlen;
      if (bin < 0) bin += mlen;
      const double ang = 2.0 * kPi * static_cast<double>(p) * center / static_cast<double>(m);
      const cplx ph(std::cos(ang), std::sin(ang));
      fb.table[static_cast<std::size_t>(p + mlen / 2) * q_samples.size() + qi] =
          spec[static_cast<std::size_t>(bin)] * ph / norm;
    }
  }
  return fb;
}

FilterBankResponse fb_impulse_response(const PrototypeFilter& g_tx, int q_max_half_symbols) {
  std::vector<long> q;
  const long half = static_cast<long>(g_tx.m) / 2;
  for (int j = -q_max_half_symbols; j <= q_max_half_symbols; ++j) q.push_back(j * half);
  return fb_impulse_response(g_tx.taps, g_tx.taps, q, g_tx.m, g_tx.phase_center);
}

cplx fb_response_at(const std::vector<double>& g_tx, const std::vector<double>& g_rx,
                    double p_frac, long q_samples, std::size_t m, double center) {
  if (g_rx.size() != m) {
    throw std::invalid_argument("fb_response_at: receive filter length must equal m");
  }
  const double norm = seq_norm(g_tx) * seq_norm(g_rx);
  const long mlen = static_cast<long>(m);
  const long txlen = static_cast<long>(g_tx.size());
  cplx acc(0.0, 0.0);
  for (long k = 0; k < mlen; ++k) {
    const long kt = k + q_samples;
    if (kt < 0 || kt >= txlen) continue;
    const double v = g_tx[static_cast<std::size_t>(kt)] * g_rx[static_cast<std::size_t>(k)];
    if (v == 0.0) continue;
    const double ang =
        -2.0 * kPi * p_frac * (static_cast<double>(k) - center) / static_cast<double>(m);
    acc += v * cplx(std::cos(ang), std::sin(ang));
  }
  return acc / norm;
}

}  // namespace fbmc
