#include <omp.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cohertest/config.hpp"
#include "cohertest/io.hpp"
#include "cohertest/rng.hpp"

using nlohmann::json;
using namespace cohertest;

namespace {

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad JSON in ") + path + ": " + e.what());
  }
}

std::uint64_t hash_of(const json& j) { return fnv1a64(j.dump()); }

void emit(const json& j, const std::optional<std::string>& out_path) {
  if (out_path) {
    write_text_file(*out_path, j.dump(2) + "\n");
  } else {
    std::cout << j.dump(2) << "\n";
  }
}

json provenance(const std::string& command, std::uint64_t config_hash) {
  json j;
  j["version"] = kVersion;
  j["command"] = command;
  j["config_hash"] = config_hash;
  return j;
}

struct GlobalOpts {
  std::optional<int> threads;
  bool full_precision = false;

  int resolve_threads(int fallback) const {
    if (threads) return *threads;
    if (const char* env = std::getenv("COHERTEST_THREADS")) {
      const int v = std::atoi(env);
      if (v > 0) return v;
    }
    return fallback;
  }
};

int cmd_simulate(const std::string& config_path, std::optional<std::string> out_path,
                 std::optional<std::uint64_t> seed_override, const GlobalOpts& opts) {
  const json config_json = load_json(config_path);
  SimulateConfig config = parse_simulate_config(config_json);
  if (seed_override) config.seed = *seed_override;
  if (!out_path) throw ConfigError("simulate needs --out");

  const SimResult sim = simulate_panel(config.dgp, config.m, config.n, config.seed);
  if (config.format == "cpnl")
    write_panel_cpnl(sim.panel, *out_path);
  else
    write_panel_csv(sim.panel, *out_path);

  json out = provenance("simulate", hash_of(config_json));
  out["seed"] = config.seed;
  out["m"] = config.m;
  out["n"] = config.n;
  out["dgp"] = dgp_spec_to_json(config.dgp);
  out["out"] = *out_path;
  if (!std::isfinite(config.dgp.innovation.second_moment()))
    out["warning"] = "innovation second moment is infinite";
  std::cout << out.dump() << "\n";
  (void)opts;
  return 0;
}

json outcome_json(const TestOutcome& outcome, const std::string& calibration) {
  json j;
  j["value"] = outcome.statistic;
  j["p_value"] = outcome.p_value;
  j["reject"] = outcome.reject;
  j["calibration"] = calibration;
  return j;
}

int cmd_test(const std::string& panel_path, const std::string& config_path,
             std::optional<std::string> out_path, std::optional<std::string> xi0_csv,
             std::optional<std::string> coherence_csv, const GlobalOpts& opts) {
  const json config_json = load_json(config_path);
  const TestConfig config = parse_test_config(config_json);
  const Panel panel = read_panel(panel_path);

  const int m = panel.m;
  if (config.m_override && *config.m_override != m)
    throw ConfigError("config m does not match the panel");
  int b;
  if (config.b_override) {
    b = normalize_even_span(*config.b_override);
  } else {
    long bb = static_cast<long>(std::floor(m / config.c * (1.0 + 1e-12)));
    bb -= bb % 2;
    b = static_cast<int>(bb);
  }
  if (b + 1 > panel.n) throw ConfigError("B+1 > N for this panel");
  if (config.lss.correction == Correction::oracle &&
      static_cast<int>(config.oracle_phi.size()) != m)
    throw ConfigError("oracle coefficients must have one entry per channel");

  const GridSpec grid = build_grid(panel.n, b, config.lss.delta);
  const MpContext mp = MpContext::from_dims(m, b, panel.n, config.lss.ratio);
  const TestFunction& f = config.lss.f;
  const double sigma = std::sqrt(sigma2(f, mp.c));
  const FreqPanel freq = dft_panel(panel);

  std::optional<LagWindowEstimator> lw;
  if (config.lss.correction == Correction::estimated) {
    LagWindowSpec spec;
    spec.l_max = config.lss.lag_truncation.value_or(default_lag_truncation(panel.n));
    spec.floor_eps = config.lss.floor_eps;
    lw.emplace(panel, spec);
  }

  std::vector<double> xi0_values;
  xi0_values.reserve(grid.freq_indices.size());
  for (int index : grid.freq_indices) {
    const CoherenceEstimate est = coherence(smoothed_periodogram(freq, index, b), index);
    if (coherence_csv && index == grid.freq_indices.front())
      write_hermitian_csv(est.c_hat, *coherence_csv);
    const double f_hat = lss(est.c_hat, f);
    const double nu = static_cast<double>(index) / static_cast<double>(panel.n);
    double r_value = 0.0;
    if (config.lss.correction == Correction::oracle)
      r_value = oracle_r(config.oracle_phi, config.oracle_psi, nu);
    else if (config.lss.correction == Correction::estimated)
      r_value = lw->rhat(nu);
    xi0_values.push_back(xi0(theta(f_hat, mp, r_value, f), b, sigma));
  }

  const double v1 = xi1(xi0_values);
  const Xi2 v2 = xi2(xi0_values);

  json out = provenance("test", hash_of(config_json));
  out["panel"] = panel_path;
  out["m"] = m;
  out["n"] = panel.n;
  out["b"] = b;
  out["c_n"] = mp.c;
  out["k_prime"] = grid.k_prime;
  out["sigma"] = sigma;
  out["correction"] = correction_name(config.lss.correction);
  json stats;
  stats["xi1"] = outcome_json(
      calibrate(v1, Calibration::normal, v2.k_prime, config.level, config.lss.two_sided),
      "normal");
  stats["xi2_normal"] = outcome_json(
      calibrate(v2.normal_form, Calibration::normal, v2.k_prime, config.level,
                config.lss.two_sided),
      "normal");
  stats["xi2_chi2"] = outcome_json(
      calibrate(v2.chi2_form, Calibration::chi2, v2.k_prime, config.level), "chi2");
  if (grid.k_prime >= 2) {
    const double v3 = xi3(xi0_values);
    stats["xi3"] = outcome_json(
        calibrate(v3, Calibration::gumbel, v2.k_prime, config.level), "gumbel (heuristic)");
  }
  out["statistics"] = stats;
  out["xi0"] = xi0_values;
  if (lw) out["lag_window_clamped"] = lw->any_clamped();

  if (xi0_csv) {
    std::string csv = "nu_index,nu,xi0\n";
    for (size_t i = 0; i < xi0_values.size(); ++i) {
      const int index = grid.freq_indices[i];
      csv += std::to_string(index) + "," +
             (opts.full_precision
                  ? format_full(static_cast<double>(index) / panel.n)
                  : format_short(static_cast<double>(index) / panel.n)) +
             "," +
             (opts.full_precision ? format_full(xi0_values[i])
                                  : format_short(xi0_values[i])) +
             "\n";
    }
    write_text_file(*xi0_csv, csv);
  }
  emit(out, out_path);
  return 0;
}

int cmd_mc(const std::string& config_path, std::optional<std::string> out_path,
           std::optional<std::uint64_t> seed_override, bool timings,
           const GlobalOpts& opts) {
  const json config_json = load_json(config_path);
  McConfig config = parse_mc_config(config_json);
  if (seed_override) config.master_seed = *seed_override;
  if (opts.threads) config.threads = *opts.threads;
  else config.threads = opts.resolve_threads(config.threads);

  const McReport report = mc_table(config);
  const std::string csv = mc_report_csv(report, opts.full_precision, timings);
  if (out_path)
    write_text_file(*out_path, csv);
  else
    std::cout << csv;

  const json canonical = mc_config_to_json(config);
  json meta = provenance("mc", hash_of(canonical));
  meta["master_seed"] = config.master_seed;
  meta["seed_rule"] = "rep_seed = splitmix64(splitmix64(row_seed) ^ splitmix64(rep_index + 0x632BE59BD9B4E019))";
  meta["config"] = canonical;
  bool any_flagged = false;
  double total_wall = 0.0;
  for (const McRow& row : report.rows) {
    any_flagged |= row.flagged;
    total_wall += row.wall_seconds;
  }
  meta["wall_seconds_total"] = total_wall / 4.0;  // 4 rows share each timing
  if (any_flagged) meta["warning"] = "some rows had >1% failed replications";
  if (!std::isfinite(config.dgp.innovation.second_moment()))
    meta["innovation_warning"] = "innovation second moment is infinite";
  if (out_path) {
    write_text_file(*out_path + ".meta.json", meta.dump(2) + "\n");
    std::cout << meta.dump() << "\n";
  } else {
    std::cerr << meta.dump() << "\n";
  }
  return 0;
}

int cmd_rmt(double c, std::optional<int> b, std::optional<long> n,
            const std::string& f_name, std::optional<std::string> out_path) {
  json fj;
  if (f_name == "quadratic" || f_name == "log")
    fj = f_name;
  else
    fj = json::parse(f_name);
  const TestFunction f = parse_test_function(fj);
  const MpContext mp = MpContext::from_ratio(c, b.value_or(0), n.value_or(0));

  json out = provenance("rmt", fnv1a64(f_name + "@" + format_full(c)));
  out["c"] = c;
  out["f"] = f.name();
  out["lambda_minus"] = mp.lambda_minus;
  out["lambda_plus"] = mp.lambda_plus;
  out["mp_integral"] = mp_integral(f, c);
  out["d_pairing"] = d_pairing(f, c);
  json dl = json::array();
  for (int l = 1; l <= 6; ++l) dl.push_back(dl_pairing(f, c, l));
  out["dl_pairing"] = dl;
  out["sigma2"] = sigma2(f, c);
  if (b && n && *b % 2 == 0) out["v_n"] = v_n(*b, *n);
  emit(out, out_path);
  return 0;
}

int cmd_specdens(const std::string& panel_path, std::optional<int> b_opt, double c,
                 std::optional<int> l_opt, std::optional<std::string> out_path,
                 const GlobalOpts& opts) {
  const Panel panel = read_panel(panel_path);
  int b;
  if (b_opt) {
    b = normalize_even_span(*b_opt);
  } else {
    long bb = static_cast<long>(std::floor(panel.m / c * (1.0 + 1e-12)));
    bb -= bb % 2;
    b = static_cast<int>(bb);
  }
  const GridSpec grid = build_grid(panel.n, b, 0.0);
  LagWindowSpec spec;
  spec.l_max = l_opt.value_or(default_lag_truncation(panel.n));
  const LagWindowEstimator lw(panel, spec);

  auto fmt = [&opts](double x) {
    return opts.full_precision ? format_full(x) : format_short(x);
  };
  std::string csv = "nu_index,nu,channel,s_hat,s_deriv,r_hat\n";
  for (int index : grid.freq_indices) {
    const double nu = static_cast<double>(index) / panel.n;
    const double r = lw.rhat(nu);
    for (int ch = 0; ch < panel.m; ++ch) {
      const SpectralDensityEstimate est = lw.at(ch, nu);
      csv += std::to_string(index) + "," + fmt(nu) + "," + std::to_string(ch) + "," +
             fmt(est.s) + "," + fmt(est.s_deriv) + "," + fmt(r) + "\n";
    }
  }
  if (out_path)
    write_text_file(*out_path, csv);
  else
    std::cout << csv;
  json meta = provenance("specdens", fnv1a64(panel_path));
  meta["l_max"] = spec.l_max;
  meta["clamped"] = lw.any_clamped();
  std::cerr << meta.dump() << "\n";
  return 0;
}

int cmd_power(int m, double sigma, double c, std::optional<std::string> out_path) {
  // Column-Gram convention: A with A^* A = Sigma, the adjoint of the
  // lower-triangular mixing root.
  const Eigen::MatrixXcd a = ar1_mixing_root(m, sigma).adjoint().cast<cplx>();
  const Eigen::VectorXd d = Eigen::VectorXd::Ones(m);
  const double shift = tr_h2_minus_1(a, d);
  const auto [first, second] = mu1_moments(a, d, c);

  json out = provenance("power", fnv1a64("power"));
  out["m"] = m;
  out["sigma"] = sigma;
  out["c"] = c;
  out["tr_h2_minus_1"] = shift;
  out["mu1_first_moment"] = first;
  out["mu1_second_moment"] = second;
  out["large_m_limit"] = 2.0 * sigma * sigma / (1.0 - sigma * sigma);
  emit(out, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Independence tests for high-dimensional complex time series via "
               "linear spectral statistics of the sample spectral coherence matrix"};
  app.require_subcommand(1);

  GlobalOpts opts;
  int threads_flag = 0;
  app.add_option("--threads", threads_flag, "worker threads (env COHERTEST_THREADS)");
  app.add_flag("--full-precision", opts.full_precision, "print 17 significant digits");

  std::string config_path, panel_path, f_name = "quadratic";
  std::optional<std::string> out_path, xi0_csv;
  std::optional<std::uint64_t> seed_override;
  std::uint64_t seed_value = 0;
  bool timings = false;
  double c_value = 0.5, sigma_value = 0.0;
  std::optional<int> b_value, l_value;
  std::optional<long> n_value;
  int m_value = 0;

  auto* sim = app.add_subcommand("simulate", "generate a synthetic panel");
  sim->add_option("--config", config_path, "JSON config")->required();
  sim->add_option("--out", out_path, "output panel path")->required();
  sim->add_option("--seed", seed_value, "seed override");

  auto* test = app.add_subcommand("test", "run the independence test on a panel");
  std::optional<std::string> coherence_csv;
  test->add_option("--panel", panel_path, "panel file (csv or cpnl)")->required();
  test->add_option("--config", config_path, "JSON config")->required();
  test->add_option("--out", out_path, "output JSON path (default stdout)");
  test->add_option("--xi0-csv", xi0_csv, "per-frequency xi0 CSV path");
  test->add_option("--coherence-csv", coherence_csv,
                   "dump C_hat at the first grid frequency (i,j,re,im)");

  auto* mc = app.add_subcommand("mc", "Monte Carlo size/power table");
  mc->add_option("--config", config_path, "JSON McConfig")->required();
  mc->add_option("--out", out_path, "output CSV path (default stdout)");
  mc->add_option("--seed", seed_value, "master seed override");
  mc->add_flag("--timings", timings, "record wall-clock times in the CSV");

  auto* rmt = app.add_subcommand("rmt", "deterministic RMT quantities as JSON");
  rmt->add_option("--c", c_value, "aspect ratio in (0,1)")->required();
  rmt->add_option("--b", b_value, "smoothing span (even), for v_n");
  rmt->add_option("--n", n_value, "sample count, for v_n");
  rmt->add_option("--f", f_name, "quadratic | log | {\"poly\": [...]}");
  rmt->add_option("--out", out_path, "output JSON path (default stdout)");

  auto* sd = app.add_subcommand("specdens", "lag-window spectral density diagnostics");
  sd->add_option("--panel", panel_path, "panel file")->required();
  sd->add_option("--b", b_value, "smoothing span (even)");
  sd->add_option("--c", c_value, "aspect ratio used to derive B when --b absent");
  sd->add_option("--l", l_value, "lag truncation (default floor(N^{1/4}))");
  sd->add_option("--out", out_path, "output CSV path (default stdout)");

  auto* power = app.add_subcommand("power", "closed-form power quantities");
  power->add_option("--m", m_value, "dimension M")->required();
  power->add_option("--sigma", sigma_value, "AR(1) mixing strength in [0,1)")->required();
  power->add_option("--c", c_value, "aspect ratio for the second moment");
  power->add_option("--out", out_path, "output JSON path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << json{{"error", "config"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }

  if (threads_flag > 0) opts.threads = threads_flag;
  omp_set_num_threads(opts.resolve_threads(omp_get_max_threads()));

  try {
    if (sim->parsed()) {
      if (sim->count("--seed")) seed_override = seed_value;
      return cmd_simulate(config_path, out_path, seed_override, opts);
    }
    if (test->parsed())
      return cmd_test(panel_path, config_path, out_path, xi0_csv, coherence_csv, opts);
    if (mc->parsed()) {
      if (mc->count("--seed")) seed_override = seed_value;
      return cmd_mc(config_path, out_path, seed_override, timings, opts);
    }
    if (rmt->parsed()) return cmd_rmt(c_value, b_value, n_value, f_name, out_path);
    if (sd->parsed())
      return cmd_specdens(panel_path, b_value, c_value, l_value, out_path, opts);
    if (power->parsed()) return cmd_power(m_value, sigma_value, c_value, out_path);
    throw ConfigError("no subcommand");
  } catch (const ConfigError& e) {
    std::cerr << json{{"error", "config"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "runtime"}, {"message", e.what()}}.dump() << "\n";
    return 3;
  }
}
