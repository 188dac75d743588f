#include "cohertest/harness.hpp"

#include <omp.h>

#include <array>
#include <chrono>
#include <cmath>

#include "cohertest/rng.hpp"

namespace cohertest {

const char* correction_name(Correction c) {
  switch (c) {
    case Correction::oracle: return "oracle";
    case Correction::estimated: return "estimated";
    case Correction::none: return "none";
  }
  return "?";
}

std::uint64_t rep_seed(std::uint64_t master_seed, std::uint64_t rep_index) {
  return mix_seed(master_seed, rep_index);
}

std::vector<RepStats> run_rep_modes(const RepConfig& config,
                                    std::span<const Correction> modes,
                                    std::uint64_t master_seed, long rep_index) {
  std::vector<RepStats> results(modes.size());
  try {
    const std::uint64_t seed = rep_seed(master_seed, static_cast<std::uint64_t>(rep_index));
    const SimResult sim = simulate_panel(config.dgp, config.m, config.n, seed);
    const GridSpec grid = build_grid(config.n, config.b, config.lss.delta);
    const MpContext mp =
        MpContext::from_dims(config.m, config.b, config.n, config.lss.ratio);
    const TestFunction& f = config.lss.f;
    const double sigma = std::sqrt(sigma2(f, mp.c));
    const FreqPanel freq = dft_panel(sim.panel);

    bool need_estimated = false;
    for (Correction mode : modes) need_estimated |= (mode == Correction::estimated);
    std::optional<LagWindowEstimator> lw;
    if (need_estimated) {
      LagWindowSpec spec;
      spec.l_max = config.lss.lag_truncation.value_or(default_lag_truncation(config.n));
      spec.floor_eps = config.lss.floor_eps;
      lw.emplace(sim.panel, spec);
    }

    std::vector<std::vector<double>> xi0_per_mode(modes.size());
    for (auto& v : xi0_per_mode) v.reserve(grid.freq_indices.size());

    // Ascending frequency order keeps the downstream sums bit-stable.
    for (int index : grid.freq_indices) {
      const Eigen::MatrixXcd s_hat = smoothed_periodogram(freq, index, config.b);
      const CoherenceEstimate est = coherence(s_hat, index);
      const double f_hat = lss(est.c_hat, f);
      const double nu = static_cast<double>(index) / static_cast<double>(config.n);
      for (size_t mi = 0; mi < modes.size(); ++mi) {
        double r_value = 0.0;
        switch (modes[mi]) {
          case Correction::oracle:
            r_value = oracle_r(sim.phi, sim.psi, nu);
            break;
          case Correction::estimated:
            r_value = lw->rhat(nu);
            break;
          case Correction::none:
            r_value = 0.0;
            break;
        }
        const double th = theta(f_hat, mp, r_value, f);
        xi0_per_mode[mi].push_back(xi0(th, config.b, sigma));
      }
    }

    for (size_t mi = 0; mi < modes.size(); ++mi) {
      RepStats& out = results[mi];
      out.xi0 = std::move(xi0_per_mode[mi]);
      out.xi1 = xi1(out.xi0);
      out.xi2v = xi2(out.xi0);
      out.xi3 = out.xi0.size() >= 2 ? xi3(out.xi0) : 0.0;
      out.lag_window_clamped = lw && lw->any_clamped();
    }
  } catch (const std::exception& e) {
    for (auto& out : results) {
      out.failed = true;
      out.error = e.what();
    }
  }
  return results;
}

RepStats run_rep(const RepConfig& config, std::uint64_t master_seed, long rep_index) {
  const std::array<Correction, 1> modes = {config.lss.correction};
  return run_rep_modes(config, modes, master_seed, rep_index)[0];
}

namespace {

struct RepDecisions {
  bool xi1_reject = false;
  bool xi2_normal_reject = false;
  bool xi2_chi2_reject = false;
  bool xi3_reject = false;
  bool failed = false;
};

}  // namespace

McReport mc_table(const McConfig& config) {
  if (config.reps < 1) throw ConfigError("mc_table needs reps >= 1");
  if (config.n_list.empty()) throw ConfigError("mc_table needs a nonempty n list");
  config.dgp.validate();

  McReport report;
  report.master_seed = config.master_seed;
  const int width = std::max(1, config.threads);

  for (size_t ni = 0; ni < config.n_list.size(); ++ni) {
    const long n = config.n_list[ni];
    RepConfig rep_config;
    rep_config.n = n;
    rep_config.dgp = config.dgp;
    rep_config.lss = config.lss;
    if (config.m_override && config.b_override) {
      rep_config.m = *config.m_override;
      rep_config.b = normalize_even_span(*config.b_override);
    } else if (config.m_override || config.b_override) {
      throw ConfigError("M and B overrides must be given together");
    } else {
      const ChosenParams params = choose_params(n, config.alpha, config.c);
      rep_config.m = params.m;
      rep_config.b = params.b;
    }

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<RepDecisions> decisions(config.reps);
    // Every replication is a pure function of (master_seed, ni, rep index),
    // and each one writes only its own slot, so the table does not depend on
    // the worker-pool width.
    const std::uint64_t row_seed = mix_seed(config.master_seed, ni);
#pragma omp parallel for schedule(dynamic) num_threads(width)
    for (int rep = 0; rep < config.reps; ++rep) {
      const RepStats stats = run_rep(rep_config, row_seed, rep);
      RepDecisions& d = decisions[rep];
      if (stats.failed) {
        d.failed = true;
        continue;
      }
      const int k_prime = stats.xi2v.k_prime;
      d.xi1_reject = calibrate(stats.xi1, Calibration::normal, k_prime, config.level,
                               config.lss.two_sided)
                         .reject;
      d.xi2_normal_reject = calibrate(stats.xi2v.normal_form, Calibration::normal,
                                      k_prime, config.level, config.lss.two_sided)
                                .reject;
      d.xi2_chi2_reject =
          calibrate(stats.xi2v.chi2_form, Calibration::chi2, k_prime, config.level)
              .reject;
      if (stats.xi0.size() >= 2)
        d.xi3_reject =
            calibrate(stats.xi3, Calibration::gumbel, k_prime, config.level).reject;
    }
    const auto t1 = std::chrono::steady_clock::now();
    const double wall = std::chrono::duration<double>(t1 - t0).count();

    int failures = 0;
    std::array<int, 4> reject_counts{};
    for (const RepDecisions& d : decisions) {
      if (d.failed) {
        ++failures;
        continue;
      }
      reject_counts[0] += d.xi1_reject;
      reject_counts[1] += d.xi2_normal_reject;
      reject_counts[2] += d.xi2_chi2_reject;
      reject_counts[3] += d.xi3_reject;
    }
    const int valid = config.reps - failures;
    if (valid == 0) throw NumericError("all replications failed");
    const bool flagged = failures > config.reps / 100;

    const std::array<std::pair<const char*, const char*>, 4> names = {{
        {"xi1", "normal"},
        {"xi2", "normal"},
        {"xi2", "chi2"},
        {"xi3", "gumbel"},
    }};
    for (size_t si = 0; si < names.size(); ++si) {
      McRow row;
      row.n = n;
      row.dgp = config.dgp.name();
      row.statistic = names[si].first;
      row.calibration = names[si].second;
      row.rate = static_cast<double>(reject_counts[si]) / valid;
      row.reps = valid;
      row.failures = failures;
      row.wall_seconds = wall;
      row.flagged = flagged;
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

double tr_h2_minus_1(const Eigen::MatrixXcd& a, const Eigen::VectorXd& d_diag) {
  const int m = static_cast<int>(a.cols());
  if (a.rows() != m) throw ConfigError("mixing matrix must be square");
  if (d_diag.size() != m) throw ConfigError("diagonal length must match M");
  if ((d_diag.array() <= 0.0).any()) throw ConfigError("D must be positive");
  const Eigen::MatrixXcd t = a.adjoint() * d_diag.asDiagonal() * a;
  for (int i = 0; i < m; ++i)
    if (!(t(i, i).real() > 0.0)) throw ConfigError("mixing matrix has a zero column");
  double acc = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      acc += std::norm(t(i, j)) / (t(i, i).real() * t(j, j).real());
    }
  return acc / m;
}

std::pair<double, double> mu1_moments(const Eigen::MatrixXcd& a,
                                      const Eigen::VectorXd& d_diag, double c) {
  const int m = static_cast<int>(a.cols());
  if (a.rows() != m) throw ConfigError("mixing matrix must be square");
  if (d_diag.size() != m) throw ConfigError("diagonal length must match M");
  const Eigen::MatrixXcd t = a.adjoint() * d_diag.asDiagonal() * a;
  // H = Dy^{-1/2} A^* D A Dy^{-1/2} with Dy = dg(A^* D A), so each diagonal
  // entry of H is a ratio of a quantity to itself: exactly one.
  double first = 0.0;
  for (int i = 0; i < m; ++i) {
    if (!(t(i, i).real() > 0.0)) throw ConfigError("mixing matrix has a zero column");
    first += t(i, i).real() / t(i, i).real();
  }
  first /= m;
  double tr_h2 = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      tr_h2 += std::norm(t(i, j)) / (t(i, i).real() * t(j, j).real());
  tr_h2 /= m;
  return {first, tr_h2 + c * first * first};
}

}  // namespace cohertest
