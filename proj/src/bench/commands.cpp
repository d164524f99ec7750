#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "config.hpp"
#include "dpc/bayes.hpp"
#include "dpc/sampler.hpp"

namespace dpc::bench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr long kFullScaleM = 900'000;
constexpr std::uint64_t kDefaultSeed = 20160401;

double inverse_bound(double k, double fi) { return fi > 0.0 ? 1.0 / (k * fi) : kInf; }

// 1, 2, 5, 10, 20, 50, ... up to m, with m itself last.
std::vector<long> default_checkpoints(long m) {
  std::vector<long> out;
  for (long decade = 1; decade <= m; decade *= 10) {
    for (long f : {1L, 2L, 5L}) {
      if (decade * f < m) out.push_back(decade * f);
    }
  }
  out.push_back(m);
  return out;
}

long read_trials(Section& root, const RunOverrides& ov, json& resolved) {
  long trials = root.integer("trials", 100);
  if (ov.trials) trials = *ov.trials;
  if (trials < 1) root.fail("trials", "must be >= 1");
  resolved["trials"] = trials;
  return trials;
}

std::uint64_t read_seed(Section& root, const RunOverrides& ov, json& resolved) {
  std::uint64_t seed = root.unsigned64("seed", kDefaultSeed);
  if (ov.seed) seed = *ov.seed;
  resolved["seed"] = seed;
  return seed;
}

int read_grid_size(Section& root, json& resolved) {
  const long g = root.integer("grid_size", kDefaultGridSize);
  if (g < 65) root.fail("grid_size", "must be >= 65");
  resolved["grid_size"] = g;
  return static_cast<int>(g);
}

bool read_full_scale(Section& root, const RunOverrides& ov, json& resolved) {
  const bool full = root.boolean("full_scale", false) || ov.full_scale;
  resolved["full_scale"] = full;
  return full;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

CommandResult cmd_fi_curve(const json& config, const RunOverrides&) {
  Section root(config, "");
  CommandResult result;
  json& res = result.resolved;

  const auto probe = read_probe(root, 0.1, 0.1, res).probe;
  const auto model = read_model(root, LikelihoodModel::GeneralizedInterference, res);
  const auto opts = read_fi_options(root, model, res);
  std::vector<double> default_phis;
  for (int i = 0; i <= 180; ++i) default_phis.push_back(std::numbers::pi * i / 180.0);
  const auto phis = read_phase_grid(root, default_phis, false, res);

  std::vector<Scheme> schemes;
  const auto names = root.texts("schemes", {"displaced", "homodyne", "heterodyne"});
  for (const auto& n : names) {
    const Scheme s = parse_scheme(root, "schemes", n);
    if (std::find(schemes.begin(), schemes.end(), s) != schemes.end()) root.fail("schemes", "duplicate scheme " + n);
    schemes.push_back(s);
  }
  res["schemes"] = names;

  struct LabeledDetector {
    std::string label;
    DetectorModel det;
  };
  std::vector<LabeledDetector> detectors;
  res["detectors"] = json::array();
  const auto raw_sets = root.objects("detectors");
  for (std::size_t i = 0; i < raw_sets.size(); ++i) {
    Section sec(raw_sets[i], "detectors[" + std::to_string(i) + "]");
    const std::string label = sec.text("label", "");
    json out;
    auto det = read_detector_object(sec, DetectorModel::ideal(), probe, out);
    sec.finish();
    out["label"] = label;
    for (const auto& d : detectors) {
      if (d.label == label) sec.fail("label", "duplicate detector label \"" + label + "\"");
    }
    if (label.empty() && raw_sets.size() > 1) sec.fail("label", "required when several detector sets are given");
    detectors.push_back({label, det});
    res["detectors"].push_back(out);
  }
  if (detectors.empty()) {
    json out;
    Section empty(json::object(), "detectors[0]");
    detectors.push_back({"", read_detector_object(empty, DetectorModel::ideal(), probe, out)});
    out["label"] = "";
    res["detectors"].push_back(out);
  }
  root.finish();

  const bool want_displaced = std::find(schemes.begin(), schemes.end(), Scheme::DisplacedCounting) != schemes.end();
  auto& header = result.table.header;
  header = {"phi", "qfi"};
  for (Scheme s : schemes) {
    if (s == Scheme::DisplacedCounting) {
      for (const auto& d : detectors) {
        const std::string col = d.label.empty() ? "fi_displaced" : "fi_displaced_" + d.label;
        header.push_back(col);
        header.push_back(col + "_norm");
      }
    } else {
      const std::string col = "fi_" + std::string(scheme_name(s));
      header.push_back(col);
      header.push_back(col + "_norm");
    }
  }
  if (want_displaced) header.push_back("limit_substituted");

  const double qfi = qfi_coherent(probe);
  const auto normalized = [qfi](double f) { return qfi > 0.0 ? f / qfi : 0.0; };
  for (double phi : phis) {
    std::vector<double> row{phi, qfi};
    bool substituted = false;
    for (Scheme s : schemes) {
      if (s == Scheme::DisplacedCounting) {
        for (const auto& d : detectors) {
          const auto fi = fi_numeric(s, PhasePoint(phi), probe, d.det, opts);
          substituted = substituted || fi.limit_substituted;
          row.push_back(fi.value);
          row.push_back(normalized(fi.value));
        }
      } else {
        const double fi = fi_numeric(s, PhasePoint(phi), probe, DetectorModel::ideal(), opts).value;
        row.push_back(fi);
        row.push_back(normalized(fi));
      }
    }
    if (want_displaced) row.push_back(substituted ? 1.0 : 0.0);
    result.table.rows.push_back(std::move(row));
  }

  std::ostringstream report;
  report << "fi-curve: " << result.table.rows.size() << " phases, " << schemes.size() << " schemes, "
         << detectors.size() << " detector set(s)\n";
  result.report = report.str();
  return result;
}

CommandResult cmd_simulate(const json& config, const RunOverrides& ov) {
  Section root(config, "");
  CommandResult result;
  json& res = result.resolved;

  const auto scheme = read_scheme(root, "scheme", Scheme::DisplacedCounting, res);
  const auto probe = read_probe(root, 0.100, 0.101, res).probe;
  const auto det = read_detector(root, experiment_detector(), probe, res);
  const auto model = read_model(root, LikelihoodModel::GeneralizedInterference, res);
  const double phi_true_raw = root.real("phi_true", 1.0);
  if (!(phi_true_raw >= 0.0 && phi_true_raw <= std::numbers::pi)) root.fail("phi_true", "must lie in [0, pi]");
  const PhasePoint phi_true(phi_true_raw);
  res["phi_true"] = phi_true.value();
  const bool full = read_full_scale(root, ov, res);
  const long m = root.integer("m", full ? kFullScaleM : 10'000);
  if (m < 1) root.fail("m", "must be >= 1");
  res["m"] = m;
  const auto checkpoints = root.integers("checkpoints", default_checkpoints(m));
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > m || (i > 0 && checkpoints[i] <= checkpoints[i - 1])) {
      root.fail("checkpoints", "must increase strictly within [1, m]");
    }
  }
  res["checkpoints"] = checkpoints;
  const long trials = read_trials(root, ov, res);
  const std::uint64_t seed = read_seed(root, ov, res);
  const long designated = root.integer("designated_trial", 0);
  if (designated < 0 || designated >= trials) root.fail("designated_trial", "must lie in [0, trials)");
  res["designated_trial"] = designated;
  const int grid_size = read_grid_size(root, res);
  const auto opts = read_fi_options(root, model, res);
  root.finish();

  ExperimentConfig base;
  base.scheme = scheme;
  base.phi_true = phi_true;
  base.probe = probe;
  base.det = det;
  base.model = model;
  base.m = checkpoints.back();
  base.count_tail_mass = opts.count_tail_mass;

  std::vector<std::vector<SequentialEstimate>> per_trial(static_cast<std::size_t>(trials));
  parallel_for(per_trial.size(), ov.threads, [&](std::size_t t) {
    ExperimentConfig cfg = base;
    cfg.seed = split_seed(seed, t);
    per_trial[t] = sequential_estimates(sample(cfg), grid_size, checkpoints);
  });

  const ProbeConfig ideal_probe = ProbeConfig::matched(probe.alpha());
  const double fi_exp = fi_numeric(Scheme::DisplacedCounting, phi_true, probe, det, opts).value;
  const double fi_ideal = fi_analytic(Scheme::DisplacedCounting, phi_true, ideal_probe);
  const double fi_hom = fi_analytic(Scheme::Homodyne, phi_true, probe);
  const double fi_het = fi_analytic(Scheme::Heterodyne, phi_true, probe);
  const double qfi = qfi_coherent(probe);

  result.table.header = {"k",           "phi_hat",           "variance",           "mean_phi_hat",
                         "mean_variance", "crb_displaced_exp", "crb_displaced_ideal", "crb_homodyne",
                         "crb_heterodyne", "crb_qfi"};
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    double sum_phi = 0.0;
    double sum_var = 0.0;
    for (const auto& trial : per_trial) {
      sum_phi += trial[c].phi_hat;
      sum_var += trial[c].variance;
    }
    const auto& pick = per_trial[static_cast<std::size_t>(designated)][c];
    const double k = static_cast<double>(checkpoints[c]);
    result.table.rows.push_back({k, pick.phi_hat, pick.variance, sum_phi / trials, sum_var / trials,
                                 inverse_bound(k, fi_exp), inverse_bound(k, fi_ideal), inverse_bound(k, fi_hom),
                                 inverse_bound(k, fi_het), inverse_bound(k, qfi)});
  }

  std::ostringstream report;
  const auto& last = result.table.rows.back();
  report << "simulate: " << trials << " trial(s), " << checkpoints.size() << " checkpoint(s), phi_true "
         << phi_true.value() << "\n"
         << "  final k " << last[0] << ": mean phi_hat " << last[3] << ", mean variance " << last[4]
         << ", 1/(kF) " << last[5] << "\n";
  result.report = report.str();
  return result;
}

CommandResult cmd_saturate(const json& config, const RunOverrides& ov) {
  Section root(config, "");
  CommandResult result;
  json& res = result.resolved;

  const auto probe = read_probe(root, 0.100, 0.101, res).probe;
  const auto det = read_detector(root, experiment_detector(), probe, res);
  const auto model = read_model(root, LikelihoodModel::GeneralizedInterference, res);
  std::vector<double> default_phis;
  for (int i = 1; i <= 15; ++i) default_phis.push_back(0.2 * i);
  const auto phis = read_phase_grid(root, default_phis, true, res);
  const bool full = read_full_scale(root, ov, res);
  std::vector<long> default_m{1'000, 10'000};
  if (full) default_m.push_back(kFullScaleM);
  auto m_values = root.integers("m_values", default_m);
  for (long m : m_values) {
    if (m < 1) root.fail("m_values", "must be >= 1");
  }
  std::sort(m_values.begin(), m_values.end());
  if (std::adjacent_find(m_values.begin(), m_values.end()) != m_values.end()) root.fail("m_values", "duplicate value");
  res["m_values"] = m_values;
  const long trials = read_trials(root, ov, res);
  const std::uint64_t seed = read_seed(root, ov, res);
  const int grid_size = read_grid_size(root, res);
  const auto opts = read_fi_options(root, model, res);
  root.finish();

  // One record per (phase, trial); the m values are nested prefixes of it.
  const std::size_t n_jobs = phis.size() * static_cast<std::size_t>(trials);
  std::vector<std::vector<SequentialEstimate>> runs(n_jobs);
  parallel_for(n_jobs, ov.threads, [&](std::size_t job) {
    ExperimentConfig cfg;
    cfg.scheme = Scheme::DisplacedCounting;
    cfg.phi_true = PhasePoint(phis[job / static_cast<std::size_t>(trials)]);
    cfg.probe = probe;
    cfg.det = det;
    cfg.model = model;
    cfg.m = m_values.back();
    cfg.seed = split_seed(seed, job);
    cfg.count_tail_mass = opts.count_tail_mass;
    runs[job] = sequential_estimates(sample(cfg), grid_size, m_values);
  });

  const ProbeConfig ideal_probe = ProbeConfig::matched(probe.alpha());
  result.table.header = {"phi",          "m",
                         "mean_inv_mvar", "sem_inv_mvar",
                         "mean_phi_hat", "fi_displaced_exp",
                         "fi_displaced_ideal", "fi_homodyne"};
  for (std::size_t p = 0; p < phis.size(); ++p) {
    const PhasePoint phi(phis[p]);
    const double fi_exp = fi_numeric(Scheme::DisplacedCounting, phi, probe, det, opts).value;
    const double fi_ideal = fi_analytic(Scheme::DisplacedCounting, phi, ideal_probe);
    const double fi_hom = fi_analytic(Scheme::Homodyne, phi, probe);
    for (std::size_t c = 0; c < m_values.size(); ++c) {
      std::vector<double> inv;
      std::vector<double> hats;
      for (long t = 0; t < trials; ++t) {
        const auto& est = runs[p * static_cast<std::size_t>(trials) + static_cast<std::size_t>(t)][c];
        inv.push_back(est.variance > 0.0 ? 1.0 / (static_cast<double>(m_values[c]) * est.variance) : kInf);
        hats.push_back(est.phi_hat);
      }
      result.table.rows.push_back({phi.value(), static_cast<double>(m_values[c]), mean_of(inv),
                                   standard_error(inv), mean_of(hats), fi_exp, fi_ideal, fi_hom});
    }
  }

  std::ostringstream report;
  report << "saturate: " << phis.size() << " phase(s) x " << m_values.size() << " m value(s), " << trials
         << " trial(s) each\n";
  result.report = report.str();
  return result;
}

CommandResult cmd_povm_check(const json& config, const RunOverrides&) {
  Section root(config, "");
  CommandResult result;
  json& res = result.resolved;

  const auto probe = read_probe(root, 0.1, 0.1, res).probe;
  const auto model = read_model(root, LikelihoodModel::GeneralizedInterference, res);
  const long n_max = root.integer("n_max", 10);
  if (n_max < 0) root.fail("n_max", "must be >= 0");
  res["n_max"] = n_max;
  const auto phis = read_phase_grid(root, {0.0, 0.5, 1.0, 2.0, std::numbers::pi}, false, res);
  const auto etas = root.reals("eta_values", {1.0, 0.602});
  for (double e : etas) {
    if (!(e >= 0.0 && e <= 1.0)) root.fail("eta_values", "must lie in [0, 1]");
  }
  const auto nus = root.reals("nu_values", {0.0, 1.13e-4});
  for (double v : nus) {
    if (!(v >= 0.0)) root.fail("nu_values", "must be >= 0");
  }
  const long cutoff = root.integer("fock_cutoff", 30);
  if (cutoff < 1) root.fail("fock_cutoff", "must be >= 1");
  const double tolerance = root.real("tolerance", 1e-8);
  if (!(tolerance > 0.0)) root.fail("tolerance", "must be > 0");
  res["eta_values"] = etas;
  res["nu_values"] = nus;
  res["fock_cutoff"] = cutoff;
  res["tolerance"] = tolerance;
  root.finish();

  result.table.header = {"n", "phi", "eta", "nu", "likelihood", "oracle", "abs_dev"};
  double worst = 0.0;
  for (double eta : etas) {
    for (double nu : nus) {
      const DetectorModel det{eta, nu, 1.0, DetectorKind::NumberResolving, static_cast<int>(cutoff)};
      for (double phi : phis) {
        for (long n = 0; n <= n_max; ++n) {
          const double lik = pnrd_likelihood(n, PhasePoint(phi), probe, det, model);
          const double oracle = born_probability_oracle(n, PhasePoint(phi), probe, det);
          const double dev = std::abs(lik - oracle);
          worst = std::max(worst, dev);
          result.table.rows.push_back({static_cast<double>(n), phi, eta, nu, lik, oracle, dev});
        }
      }
    }
  }
  const bool ok = worst < tolerance;
  result.exit_code = ok ? kExitOk : kExitNumeric;
  std::ostringstream report;
  report.precision(3);
  report << "povm-check: " << result.table.rows.size() << " points, max |likelihood - oracle| = " << std::scientific
         << worst << " (tolerance " << tolerance << ") " << (ok ? "OK" : "FAIL") << "\n";
  result.report = report.str();
  return result;
}

}  // namespace dpc::bench
