// fbmc_sim: reproducible experiment runner. Subcommands expose the library's
// analyses; every run writes CSV artifacts plus a manifest (effective config,
// seed, tool version, content hashes) to an output directory, atomically, at
// run end. Exit codes: 0 success, 2 config error, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbmc/experiments.hpp"
#include "fbmc/hwmodel.hpp"
#include "fbmc/io.hpp"
#include "fbmc/rng.hpp"

using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& field, const std::string& why)
      : std::runtime_error("config error: field '" + field + "': " + why) {}
};

struct ExperimentConfig {
  std::string waveform = "fbmc-fs";
  std::string filter = "npr1";
  std::size_t m = 512;
  std::size_t n_symbols = 24;   // burst length (FBMC half-symbols / OFDM symbols)
  std::size_t n_g = 0;          // 0 = per-filter reference receive-tap budget
  std::size_t cp_len = 36;
  std::size_t n_rb = 25;
  std::vector<double> timing_pct = {1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> cfo = {0.02, 0.05, 0.10, 0.15, 0.20};
  std::string profile = "etu";
  std::vector<double> ebn0_db = {18.0, 22.0, 26.0};
  std::size_t target_errors = 200;
  std::uint64_t max_bits = 20000000;
  std::size_t psd_symbols = 1200;
  std::string variants = "all";  // "all" or "single" (BER experiment scope)
  std::uint64_t seed = 1;
  std::string out = "out";
  int jobs = 1;
};

json to_json(const ExperimentConfig& c) {
  return json{{"waveform", c.waveform},
              {"filter", c.filter},
              {"m", c.m},
              {"n_symbols", c.n_symbols},
              {"n_g", c.n_g},
              {"cp_len", c.cp_len},
              {"n_rb", c.n_rb},
              {"timing_pct", c.timing_pct},
              {"cfo", c.cfo},
              {"profile", c.profile},
              {"ebn0_db", c.ebn0_db},
              {"target_errors", c.target_errors},
              {"max_bits", c.max_bits},
              {"psd_symbols", c.psd_symbols},
              {"variants", c.variants},
              {"seed", c.seed},
              {"out", c.out},
              {"jobs", c.jobs}};
}

template <typename T>
T get_field(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(key, e.what());
  }
}

void apply_json(ExperimentConfig& c, const json& j) {
  if (!j.is_object()) throw ConfigError("(root)", "config document must be a JSON object");
  for (const auto& item : j.items()) {
    const std::string& k = item.key();
    if (k == "waveform") c.waveform = get_field<std::string>(j, k);
    else if (k == "filter") c.filter = get_field<std::string>(j, k);
    else if (k == "m") c.m = get_field<std::size_t>(j, k);
    else if (k == "n_symbols") c.n_symbols = get_field<std::size_t>(j, k);
    else if (k == "n_g") c.n_g = get_field<std::size_t>(j, k);
    else if (k == "cp_len") c.cp_len = get_field<std::size_t>(j, k);
    else if (k == "n_rb") c.n_rb = get_field<std::size_t>(j, k);
    else if (k == "timing_pct") c.timing_pct = get_field<std::vector<double>>(j, k);
    else if (k == "cfo") c.cfo = get_field<std::vector<double>>(j, k);
    else if (k == "profile") c.profile = get_field<std::string>(j, k);
    else if (k == "ebn0_db") c.ebn0_db = get_field<std::vector<double>>(j, k);
    else if (k == "target_errors") c.target_errors = get_field<std::size_t>(j, k);
    else if (k == "max_bits") c.max_bits = get_field<std::uint64_t>(j, k);
    else if (k == "psd_symbols") c.psd_symbols = get_field<std::size_t>(j, k);
    else if (k == "variants") c.variants = get_field<std::string>(j, k);
    else if (k == "seed") c.seed = get_field<std::uint64_t>(j, k);
    else if (k == "out") c.out = get_field<std::string>(j, k);
    else if (k == "jobs") c.jobs = get_field<int>(j, k);
    else throw ConfigError(k, "unknown field");
  }
}

fbmc::Waveform parse_waveform(const std::string& s) {
  if (s == "ofdm") return fbmc::Waveform::Ofdm;
  if (s == "fbmc-ppn") return fbmc::Waveform::FbmcPpn;
  if (s == "fbmc-fs") return fbmc::Waveform::FbmcFs;
  throw ConfigError("waveform", "expected ofdm | fbmc-ppn | fbmc-fs, got '" + s + "'");
}

fbmc::FilterName parse_filter(const std::string& s) {
  if (s == "qmf1") return fbmc::FilterName::QMF1;
  if (s == "tfl1") return fbmc::FilterName::TFL1;
  if (s == "npr1") return fbmc::FilterName::NPR1;
  throw ConfigError("filter", "expected qmf1 | tfl1 | npr1, got '" + s + "'");
}

fbmc::ChannelProfile parse_profile(const std::string& s) {
  if (s == "epa") return fbmc::epa_profile();
  if (s == "eva") return fbmc::eva_profile();
  if (s == "etu") return fbmc::etu_profile();
  throw ConfigError("profile", "expected epa | eva | etu, got '" + s + "'");
}

void validate(const ExperimentConfig& c) {
  parse_waveform(c.waveform);
  parse_filter(c.filter);
  if (c.m < 4 || c.m % 2 != 0) throw ConfigError("m", "need an even subcarrier count >= 4");
  if (c.n_symbols < 2) throw ConfigError("n_symbols", "need at least 2 symbols");
  if (c.cp_len >= c.m) throw ConfigError("cp_len", "must be below m");
  if (c.n_rb == 0 || 12 * c.n_rb >= c.m)
    throw ConfigError("n_rb", "12 subcarriers per block must fit below m");
  if (c.n_g != 0 && c.n_g % 2 == 0) throw ConfigError("n_g", "receive tap count must be odd");
  parse_profile(c.profile);
  if (c.ebn0_db.empty()) throw ConfigError("ebn0_db", "need at least one point");
  for (double v : c.timing_pct)
    if (v < 0.0 || v > 50.0) throw ConfigError("timing_pct", "points must lie in [0, 50] %");
  for (double v : c.cfo)
    if (std::abs(v) > 0.5) throw ConfigError("cfo", "|r| must be <= 0.5 subcarrier spacings");
  if (c.target_errors == 0) throw ConfigError("target_errors", "must be positive");
  if (c.max_bits == 0) throw ConfigError("max_bits", "must be positive");
  if (c.psd_symbols < 4) throw ConfigError("psd_symbols", "need at least 4 symbols");
  if (c.variants != "all" && c.variants != "single")
    throw ConfigError("variants", "expected all | single");
  if (c.jobs < 1) throw ConfigError("jobs", "must be >= 1");
}

// Artifacts accumulate in memory and hit the disk once, at run end.
struct RunWriter {
  std::filesystem::path dir;
  std::vector<std::pair<std::string, std::string>> files;  // relpath -> content

  void add(const std::string& rel, std::string content) {
    files.emplace_back(rel, std::move(content));
  }
  void add_csv(const std::string& rel, const fbmc::CsvTable& t) { add(rel, t.to_string()); }

  void commit(const std::string& command, const ExperimentConfig& cfg) {
    json manifest;
    manifest["schema_version"] = 1;
    manifest["tool"] = "fbmc_sim";
    manifest["tool_version"] = FBMC_SIM_VERSION;
    manifest["command"] = command;
    manifest["config"] = to_json(cfg);
    json arts = json::array();
    for (const auto& [rel, content] : files)
      arts.push_back({{"file", rel}, {"git_blob_sha1", fbmc::git_blob_sha1(content)}});
    manifest["artifacts"] = arts;
    for (const auto& [rel, content] : files) fbmc::write_file_atomic(dir / rel, content);
    fbmc::write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
  }
};

std::string dtos(double v) { return fbmc::format_double(v); }

// ---- subcommands ------------------------------------------------------------

int cmd_filters(const ExperimentConfig& cfg) {
  RunWriter run{std::filesystem::path(cfg.out) / "filters", {}};

  fbmc::CsvTable taps;
  taps.header = {"filter", "k", "tap"};
  fbmc::CsvTable resp;
  resp.header = {"filter", "l", "g_prime"};
  fbmc::CsvTable table;
  table.header = {"filter", "n_g", "sir_db"};

  const std::map<fbmc::FilterName, std::vector<std::size_t>> budgets = {
      {fbmc::FilterName::QMF1, {29, 41, 59, 83, 115}},
      {fbmc::FilterName::TFL1, {23, 31, 45, 65, 91}},
      {fbmc::FilterName::NPR1, {7, 15, 23, 35}},
  };
  for (auto name : {fbmc::FilterName::QMF1, fbmc::FilterName::TFL1, fbmc::FilterName::NPR1}) {
    const auto f = fbmc::make_filter(name, cfg.m);
    const char* label = fbmc::filter_name_str(name);
    for (std::size_t k = 0; k < f.taps.size(); ++k)
      taps.add_row({label, std::to_string(k), dtos(f.taps[k])});

    const std::size_t n_g = cfg.n_g != 0 ? cfg.n_g : fbmc::reference_n_g(name);
    const auto rx = fbmc::truncate_normalize(f, n_g);
    for (long l = -static_cast<long>(rx.delta); l <= static_cast<long>(rx.delta); ++l)
      resp.add_row({label, std::to_string(l), dtos(rx.at(l))});

    for (std::size_t b : budgets.at(name)) {
      const double sir = fbmc::sir_truncation(f, fbmc::truncate_normalize(f, b)).sir_db;
      table.add_row({label, std::to_string(b), dtos(sir)});
    }
  }
  run.add_csv("taps.csv", taps);
  run.add_csv("freq_response.csv", resp);
  run.add_csv("truncation_sir.csv", table);
  run.commit("filters", cfg);
  return 0;
}

int cmd_sir(const ExperimentConfig& cfg) {
  RunWriter run{std::filesystem::path(cfg.out) / "sir", {}};

  fbmc::TimingSweepConfig tc;
  tc.m = cfg.m;
  tc.cp_len = cfg.cp_len;
  for (double pct : cfg.timing_pct)
    tc.offsets_samples.push_back(std::lround(pct / 100.0 * static_cast<double>(cfg.m)));
  tc.simulate = true;
  tc.n_symbols = cfg.n_symbols;
  tc.seed = cfg.seed;
  run.add_csv("timing_sir.csv",
              fbmc::curve_csv(fbmc::timing_sweep(tc), "offset_pct", "sir_db"));

  fbmc::CfoSweepConfig cc;
  cc.m = cfg.m;
  cc.cp_len = cfg.cp_len;
  cc.r_values = cfg.cfo;
  cc.simulate = true;
  cc.n_symbols = cfg.n_symbols;
  cc.seed = cfg.seed;
  run.add_csv("cfo_sir.csv", fbmc::curve_csv(fbmc::cfo_sweep(cc), "cfo_fraction", "sir_db"));

  run.commit("sir", cfg);
  return 0;
}

int cmd_psd(const ExperimentConfig& cfg) {
  RunWriter run{std::filesystem::path(cfg.out) / "psd", {}};
  fbmc::PsdConfig pc;
  pc.m = cfg.m;
  pc.cp_len = cfg.cp_len;
  pc.n_symbols = cfg.psd_symbols;
  pc.seed = cfg.seed;
  const auto res = fbmc::psd_experiment(pc);
  run.add_csv("psd.csv", fbmc::curve_csv(res.curves, "freq_subcarriers", "psd_db"));
  json summary;
  summary["edge_gap_db"] = res.edge_gap_db;
  summary["edge_gap_max_db"] = res.edge_gap_max_db;
  summary["notch_npr1_ofdm_db"] = res.notch_npr1_ofdm_db;
  summary["notch_npr1_qmf1_db"] = res.notch_npr1_qmf1_db;
  run.add("summary.json", summary.dump(2) + "\n");
  run.commit("psd", cfg);
  return 0;
}

int cmd_ber(const ExperimentConfig& cfg) {
  RunWriter run{std::filesystem::path(cfg.out) / "ber", {}};
  fbmc::BerConfig bc;
  bc.m = cfg.m;
  bc.cp_len = cfg.cp_len;
  bc.n_symbols = cfg.n_symbols % 2 == 0 ? cfg.n_symbols : cfg.n_symbols + 1;
  bc.ebn0_db = cfg.ebn0_db;
  bc.target_errors = cfg.target_errors;
  bc.max_bits = cfg.max_bits;
  bc.seed = cfg.seed;
  if (cfg.variants == "single") {
    std::string label = cfg.waveform == "ofdm"
                            ? "ofdm"
                            : (cfg.waveform.substr(5) + "-" + cfg.filter);
    bc.variants = {{parse_waveform(cfg.waveform), parse_filter(cfg.filter), label}};
  }
  const auto series = fbmc::ber_experiment(bc, parse_profile(cfg.profile));

  fbmc::CsvTable t;
  t.header = {"series", "ebn0_db", "ber", "errors", "bits"};
  for (const auto& s : series)
    for (const auto& p : s.points)
      t.add_row({s.label, dtos(p.ebn0_db), dtos(p.ber), std::to_string(p.errors),
                 std::to_string(p.bits)});
  run.add_csv("ber.csv", t);
  run.commit("ber", cfg);
  return 0;
}

int cmd_hw(const ExperimentConfig& cfg) {
  RunWriter run{std::filesystem::path(cfg.out) / "hw", {}};
  fbmc::FixedPointFormat coeff;
  coeff.total_bits = 12;
  coeff.frac_bits = 11;
  fbmc::FixedPointFormat data;  // Q1.15 default per the design decision
  data.total_bits = 16;
  data.frac_bits = 15;

  json rep;
  for (auto name : {fbmc::FilterName::QMF1, fbmc::FilterName::TFL1, fbmc::FilterName::NPR1}) {
    const auto f = fbmc::make_filter(name, cfg.m);
    const std::size_t n_g = cfg.n_g != 0 ? cfg.n_g : fbmc::reference_n_g(name);
    const auto rx = fbmc::truncate_normalize(f, n_g);
    const auto r =
        fbmc::complexity_report(rx, cfg.m, 12 * cfg.n_rb, coeff);
    json e;
    e["n_g"] = rx.n_g;
    e["delta"] = rx.delta;
    e["real_mults_per_symbol"] = r.real_mults_per_symbol;
    e["real_adds_per_symbol"] = r.real_adds_per_symbol;
    e["ppn_real_mults_per_symbol"] = r.ppn_real_mults_per_symbol;
    e["csd_adders"] = r.csd_adders;
    e["registers"] = r.registers;
    e["ratio_vs_ppn"] = r.ratio_vs_ppn;
    rep[fbmc::filter_name_str(name)] = e;
  }
  run.add("complexity.json", rep.dump(2) + "\n");

  // Fixed vs float error summary on random bins (data scaled to stay in Q1.15).
  {
    const auto f = fbmc::make_filter(parse_filter(cfg.filter), cfg.m);
    const std::size_t n_g =
        cfg.n_g != 0 ? cfg.n_g : fbmc::reference_n_g(parse_filter(cfg.filter));
    const auto rx = fbmc::truncate_normalize(f, n_g);
    double sum_g = 1.0;
    for (long l = 1; l <= static_cast<long>(rx.delta); ++l)
      sum_g += 2.0 * std::abs(rx.at(l));
    fbmc::GaussianRng rng(cfg.seed);
    std::vector<fbmc::cplx> fb(cfg.m);
    std::vector<fbmc::QuantizedBin> qb(cfg.m);
    double worst = 0.0;
    std::size_t bins = 0;
    for (int trial = 0; trial < 20; ++trial) {
      for (std::size_t i = 0; i < cfg.m; ++i) {
        const double re = (2.0 * rng.uniform() - 1.0) * 0.4;
        const double im = (2.0 * rng.uniform() - 1.0) * 0.4;
        fb[i] = fbmc::cplx(re, im);
        qb[i] = {fbmc::quantize(re, data), fbmc::quantize(im, data)};
      }
      const auto fx = fbmc::fs_filter_fixed(qb, rx, coeff, data, trial, false);
      const auto fl = fbmc::fs_filter_float(fb, rx, trial);
      for (std::size_t i = 0; i < cfg.m; ++i)
        worst = std::max(worst, std::abs(fbmc::dequantize(fx.pam[i], data) - fl[i]));
      bins += cfg.m;
    }
    json err;
    err["filter"] = cfg.filter;
    err["bins"] = bins;
    err["worst_abs_error"] = worst;
    err["bound"] = std::ldexp(sum_g, -data.frac_bits) * 4.0;
    err["coeff_format"] = "Q1.11";
    err["data_format"] = "Q1.15";
    run.add("error_summary.json", err.dump(2) + "\n");
  }

  // Cycle trace of one short symbol for waveform-level debugging.
  {
    const auto f16 = fbmc::make_filter(fbmc::FilterName::NPR1, 16);
    const auto rx16 = fbmc::truncate_normalize(f16, 7);
    fbmc::GaussianRng rng(cfg.seed);
    std::vector<fbmc::QuantizedBin> qb(16);
    for (auto& b : qb)
      b = {fbmc::quantize(0.3 * rng.normal(), data), fbmc::quantize(0.3 * rng.normal(), data)};
    const auto res = fbmc::fs_filter_fixed(qb, rx16, coeff, data, 0, true);
    fbmc::CsvTable t;
    t.header = {"cycle", "phase", "input_bin", "enables", "acc", "output_bin", "output_code"};
    for (const auto& row : res.trace)
      t.add_row({std::to_string(row.cycle), std::to_string(row.phase),
                 std::to_string(row.input_bin), row.enables, std::to_string(row.acc),
                 std::to_string(row.output_bin), std::to_string(row.output_code)});
    run.add_csv("trace.csv", t);
  }

  run.commit("hw", cfg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FBMC/OQAM physical-layer experiment runner"};
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  std::optional<std::string> preset;
  std::optional<std::uint64_t> seed_flag;
  std::optional<std::string> out_flag;
  std::optional<int> jobs_flag;
  app.add_option("--config", config_path, "JSON config file (fields match the manifest)");
  app.add_option("--preset", preset, "named preset: lte25rb");
  app.add_option("--seed", seed_flag, "master seed (overrides config)");
  app.add_option("--out", out_flag, "output directory (overrides config)");
  app.add_option("--jobs", jobs_flag, "worker cap for sweep points (overrides config)");

  auto* sc_filters = app.add_subcommand("filters", "prototype taps, responses, SIR table");
  auto* sc_psd = app.add_subcommand("psd", "fragmented-spectrum PSD experiment");
  auto* sc_sir = app.add_subcommand("sir", "timing and CFO SIR sweeps");
  auto* sc_ber = app.add_subcommand("ber", "multipath BER curves");
  auto* sc_hw = app.add_subcommand("hw", "complexity report and fixed-point summary");
  for (auto* sc : {sc_filters, sc_psd, sc_sir, sc_ber, sc_hw}) sc->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  ExperimentConfig cfg;
  try {
    if (preset) {
      if (*preset == "lte25rb") {
        cfg = ExperimentConfig{};  // the defaults are the 4G/LTE reference setting
      } else {
        throw ConfigError("preset", "unknown preset '" + *preset + "'");
      }
    }
    if (config_path) {
      json doc;
      try {
        doc = json::parse(fbmc::read_file(*config_path));
      } catch (const json::exception& e) {
        throw ConfigError("config", std::string("parse failure: ") + e.what());
      }
      apply_json(cfg, doc);
    }
    if (seed_flag) cfg.seed = *seed_flag;
    if (out_flag) cfg.out = *out_flag;
    if (jobs_flag) cfg.jobs = *jobs_flag;
    validate(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }

  try {
    if (sc_filters->parsed()) return cmd_filters(cfg);
    if (sc_psd->parsed()) return cmd_psd(cfg);
    if (sc_sir->parsed()) return cmd_sir(cfg);
    if (sc_ber->parsed()) return cmd_ber(cfg);
    if (sc_hw->parsed()) return cmd_hw(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  }
  return 2;  // no subcommand matched (require_subcommand should prevent this)
}
