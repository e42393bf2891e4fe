#include "fbmc/channel.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fbmc/rng.hpp"

namespace fbmc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx expi(double phase) { return {std::cos(phase), std::sin(phase)}; }

ChannelProfile make_profile(ProfileName name, const char* label, double fs,
                            std::initializer_list<double> delays_ns,
                            std::initializer_list<double> powers_db) {
  ChannelProfile p;
  p.name = name;
  p.label = label;
  p.sample_rate = fs;
  auto d = delays_ns.begin();
  auto w = powers_db.begin();
  for (; d != delays_ns.end(); ++d, ++w) p.taps.push_back({*d * 1e-9, *w});
  p.validate();
  return p;
}

}  // namespace

void ChannelProfile::validate() const {
  if (taps.empty()) throw std::invalid_argument("profile: no taps");
  if (sample_rate <= 0.0) throw std::invalid_argument("profile: sample_rate must be positive");
  double prev = -1.0;
  for (const ProfileTap& t : taps) {
    if (t.delay_s < 0.0 || t.delay_s <= prev)
      throw std::invalid_argument("profile: delays must be nonnegative and increasing");
    if (!std::isfinite(t.mean_power_db)) throw std::invalid_argument("profile: power not finite");
    prev = t.delay_s;
  }
}

double ChannelProfile::delay_spread_s() const { return taps.empty() ? 0.0 : taps.back().delay_s; }

ChannelProfile epa_profile(double fs) {
  return make_profile(ProfileName::EPA, "epa", fs, {0, 30, 70, 90, 110, 190, 410},
                      {0.0, -1.0, -2.0, -3.0, -8.0, -17.2, -20.8});
}

ChannelProfile eva_profile(double fs) {
  return make_profile(ProfileName::EVA, "eva", fs, {0, 30, 150, 310, 370, 710, 1090, 1730, 2510},
                      {0.0, -1.5, -1.4, -3.6, -0.6, -9.1, -7.0, -12.0, -16.9});
}

ChannelProfile etu_profile(double fs) {
  return make_profile(ProfileName::ETU, "etu", fs, {0, 50, 120, 200, 230, 500, 1600, 2300, 5000},
                      {-1.0, -1.0, -1.0, 0.0, 0.0, 0.0, -3.0, -5.0, -7.0});
}

ChannelProfile load_profile_csv(const std::string& path, double fs) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty profile: " + path);
  // Tolerate a UTF-8 BOM and surrounding whitespace in the header check.
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
  if (line != "delay_ns,power_db")
    throw std::runtime_error("profile header must be 'delay_ns,power_db': " + path);

  ChannelProfile p;
  p.name = ProfileName::Custom;
  p.sample_rate = fs;
  std::size_t stem_begin = path.find_last_of("/\\");
  stem_begin = (stem_begin == std::string::npos) ? 0 : stem_begin + 1;
  std::size_t stem_end = path.find_last_of('.');
  if (stem_end == std::string::npos || stem_end < stem_begin) stem_end = path.size();
  p.label = path.substr(stem_begin, stem_end - stem_begin);
  if (p.label == "epa") p.name = ProfileName::EPA;
  if (p.label == "eva") p.name = ProfileName::EVA;
  if (p.label == "etu") p.name = ProfileName::ETU;

  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    double delay_ns = 0.0, power_db = 0.0;
    char comma = 0;
    if (!(row >> delay_ns >> comma >> power_db) || comma != ',')
      throw std::runtime_error("malformed profile row '" + line + "' in " + path);
    p.taps.push_back({delay_ns * 1e-9, power_db});
  }
  p.validate();
  return p;
}

ChannelRealization realize_multipath(const ChannelProfile& profile, uint64_t seed,
                                     std::size_t guard_samples) {
  profile.validate();
  ChannelRealization out;
  out.seed = seed;

  // Accumulate per-sample-bin variance, then draw one complex Gaussian per
  // occupied bin (a sum of independent Gaussians is one Gaussian with the
  // summed variance, and this keeps the draw order deterministic).
  std::vector<double> variance;
  double total = 0.0;
  for (const ProfileTap& t : profile.taps) {
    const auto idx = static_cast<std::size_t>(std::llround(t.delay_s * profile.sample_rate));
    if (idx >= variance.size()) variance.resize(idx + 1, 0.0);
    const double lin = std::pow(10.0, t.mean_power_db / 10.0);
    variance[idx] += lin;
    total += lin;
    if (guard_samples > 0 && idx > guard_samples)
      out.warnings.push_back("tap at " + std::to_string(t.delay_s * 1e9) +
                             " ns lands beyond the guard of " + std::to_string(guard_samples) +
                             " samples");
  }

  GaussianRng rng(seed);
  out.taps.assign(variance.size(), cplx{0.0, 0.0});
  for (std::size_t i = 0; i < variance.size(); ++i) {
    if (variance[i] <= 0.0) continue;
    out.taps[i] = rng.cnormal() * std::sqrt(variance[i] / total);
  }
  return out;
}

BasebandSignal apply_multipath(const BasebandSignal& s, const ChannelRealization& h) {
  if (h.taps.empty()) throw std::invalid_argument("apply_multipath: empty realization");
  BasebandSignal out;
  out.sample_index_origin = s.sample_index_origin;
  out.samples.assign(s.samples.size() + h.taps.size() - 1, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    const cplx v = s.samples[i];
    if (v == cplx{0.0, 0.0}) continue;
    for (std::size_t j = 0; j < h.taps.size(); ++j) out.samples[i + j] += v * h.taps[j];
  }
  return out;
}

BasebandSignal apply_timing_offset(const BasebandSignal& s, long l_d) {
  const long n = static_cast<long>(s.samples.size());
  if (std::labs(l_d) >= n) throw std::invalid_argument("apply_timing_offset: |l_d| >= length");
  BasebandSignal out;
  out.sample_index_origin = s.sample_index_origin;
  out.samples.assign(s.samples.size(), cplx{0.0, 0.0});
  for (long k = 0; k < n; ++k) {
    const long src = k + l_d;
    if (src >= 0 && src < n) out.samples[static_cast<std::size_t>(k)] = s.samples[static_cast<std::size_t>(src)];
  }
  return out;
}

cplx timing_compensation(std::size_t m, long l_d, std::size_t m_total) {
  return expi(-kTwoPi * static_cast<double>(m) * static_cast<double>(l_d) /
              static_cast<double>(m_total));
}

BasebandSignal apply_cfo(const BasebandSignal& s, double r, std::size_t m_total) {
  if (!(r > -0.5 && r <= 0.5)) throw std::invalid_argument("apply_cfo: r outside (-0.5, 0.5]");
  BasebandSignal out = s;
  for (std::size_t k = 0; k < out.samples.size(); ++k) {
    const double abs_k = static_cast<double>(s.sample_index_origin + static_cast<long>(k));
    out.samples[k] *= expi(kTwoPi * abs_k * r / static_cast<double>(m_total));
  }
  return out;
}

cplx cpe_compensation(long n, double r) {
  return expi(std::numbers::pi * static_cast<double>(n) * r);
}

Equalizer timing_equalizer(long l_d, std::size_t m_total) {
  Equalizer eq = Equalizer::unit(m_total);
  for (std::size_t m = 0; m < m_total; ++m) eq.coeff[m] = timing_compensation(m, l_d, m_total);
  return eq;
}

Equalizer cpe_equalizer(double r, std::size_t m_total, std::size_t n_symbols) {
  Equalizer eq;
  eq.m = m_total;
  eq.per_symbol = true;
  eq.coeff.assign(n_symbols * m_total, cplx{1.0, 0.0});
  for (std::size_t n = 0; n < n_symbols; ++n) {
    const cplx c = std::conj(cpe_compensation(static_cast<long>(n), r));
    for (std::size_t m = 0; m < m_total; ++m) eq.coeff[n * m_total + m] = c;
  }
  return eq;
}

BasebandSignal add_awgn(const BasebandSignal& s, double ebn0_db, double total_info_bits,
                        uint64_t seed, double reference_energy) {
  if (std::isinf(ebn0_db) && ebn0_db > 0.0) return s;
  if (total_info_bits <= 0.0) throw std::invalid_argument("add_awgn: total_info_bits <= 0");
  const double energy = reference_energy < 0.0 ? s.energy() : reference_energy;
  const double eb = energy / total_info_bits;
  const double n0 = eb / std::pow(10.0, ebn0_db / 10.0);

  GaussianRng rng(seed);
  BasebandSignal out = s;
  const double sigma = std::sqrt(n0);
  for (cplx& v : out.samples) v += sigma * rng.cnormal();
  return out;
}

}  // namespace fbmc
