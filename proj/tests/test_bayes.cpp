#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "dpc/bayes.hpp"

using namespace dpc;

namespace {

constexpr double kPi = std::numbers::pi;

ExperimentConfig experiment_config(long m, std::uint64_t seed) {
  ExperimentConfig c;
  c.scheme = Scheme::DisplacedCounting;
  c.phi_true = PhasePoint(1.0);
  c.probe = ProbeConfig::from_mean_photons(0.100, 0.101);
  c.det = DetectorModel{0.602, 1.13e-4, 0.993, DetectorKind::OnOff, 30};
  c.m = m;
  c.seed = seed;
  return c;
}

ExperimentConfig ideal_config(long m, std::uint64_t seed, double phi = 1.0) {
  ExperimentConfig c;
  c.scheme = Scheme::DisplacedCounting;
  c.phi_true = PhasePoint(phi);
  c.probe = ProbeConfig::from_mean_photons(0.1, 0.1);
  c.det = DetectorModel::ideal();
  c.m = m;
  c.seed = seed;
  return c;
}

double log_probability(const Outcome& o, double phi, const ExperimentConfig& c) {
  const PhasePoint p(phi);
  if (const auto* n = std::get_if<Count>(&o)) return std::log(pnrd_likelihood(n->n, p, c.probe, c.det, c.model));
  if (const auto* k = std::get_if<Click>(&o)) return std::log(onoff_likelihood(k->flag, p, c.probe, c.det, c.model));
  if (const auto* x = std::get_if<Quadrature>(&o)) return std::log(homodyne_density(x->x, p, c.probe));
  const auto& z = std::get<ComplexQuadrature>(o);
  return std::log(heterodyne_density(z.re, z.im, p, c.probe));
}

}  // namespace

TEST_CASE("phase grid") {
  const auto nodes = uniform_phase_nodes(kDefaultGridSize);
  REQUIRE(nodes.size() == 4097);
  CHECK(nodes.front() == 0.0);
  CHECK(nodes.back() == kPi);
  CHECK(std::is_sorted(nodes.begin(), nodes.end()));
  CHECK_THROWS_AS(uniform_phase_nodes(64), std::invalid_argument);
  CHECK_NOTHROW(uniform_phase_nodes(65));
}

TEST_CASE("empty record leaves the uniform prior") {
  OutcomeRecord empty{ideal_config(1, 1), {}};
  const auto post = posterior(empty);
  for (double d : post.density) CHECK(d == doctest::Approx(1.0 / kPi).epsilon(1e-14));
  const auto est = estimate(post);
  CHECK(est.phi_hat == doctest::Approx(kPi / 2).epsilon(1e-14));
  CHECK(est.variance == doctest::Approx(0.822467033424113).epsilon(1e-6));
}

TEST_CASE("all-zero counts give a posterior peaked at 0 and falling") {
  OutcomeRecord rec{ideal_config(50, 1), std::vector<Outcome>(50, Count{0})};
  const auto post = posterior(rec);
  CHECK(std::abs(post.total_mass() - 1.0) < 1e-9);
  for (std::size_t i = 1; i < post.density.size(); ++i) CHECK(post.density[i] < post.density[i - 1]);
}

TEST_CASE("delta-like posterior") {
  const auto nodes = uniform_phase_nodes(1025);
  std::vector<double> loglik(nodes.size(), -1e6);
  loglik[400] = 0.0;
  const auto post = posterior_from_log_likelihood(nodes, loglik);
  const auto est = estimate(post);
  CHECK(est.phi_hat == doctest::Approx(nodes[400]).epsilon(1e-12));
  CHECK(est.variance < 1e-12);
  CHECK(std::abs(post.total_mass() - 1.0) < 1e-12);
}

TEST_CASE("accumulated log-likelihood equals the direct sum up to a constant") {
  for (auto scheme : {Scheme::DisplacedCounting, Scheme::Homodyne, Scheme::Heterodyne}) {
    for (auto kind : {DetectorKind::NumberResolving, DetectorKind::OnOff}) {
      auto c = experiment_config(300, 9);
      c.scheme = scheme;
      c.det.kind = kind;
      c.probe = ProbeConfig::from_mean_photons(0.8, 0.85);
      const auto rec = sample(c);
      LogLikelihoodAccumulator acc(c);
      for (const auto& o : rec.outcomes) acc.add(o);
      CHECK(acc.size() == 300);
      const std::vector<double> nodes{0.05, 0.7, 1.0, 1.9, 3.0};
      const auto fast = acc.evaluate(nodes);
      std::vector<double> offset;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        double direct = 0.0;
        for (const auto& o : rec.outcomes) direct += log_probability(o, nodes[i], c);
        offset.push_back(fast[i] - direct);
      }
      for (double o : offset) CHECK(o == doctest::Approx(offset.front()).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("outcomes that do not fit the scheme are rejected") {
  LogLikelihoodAccumulator acc(experiment_config(10, 1));
  CHECK_THROWS_AS(acc.add(Count{1}), std::invalid_argument);
  CHECK_THROWS_AS(acc.add(Quadrature{0.1}), std::invalid_argument);
  CHECK_NOTHROW(acc.add(Click{true}));
  auto hom = experiment_config(10, 1);
  hom.scheme = Scheme::Homodyne;
  LogLikelihoodAccumulator acc_hom(hom);
  CHECK_THROWS_AS(acc_hom.add(ComplexQuadrature{0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("impossible records are reported") {
  auto c = ideal_config(1, 1);
  c.probe = ProbeConfig(0.0, 0.0);
  OutcomeRecord rec{c, {Count{1}}};
  CHECK_THROWS_AS(posterior(rec), ZeroPosteriorError);
}

TEST_CASE("sequential estimates") {
  const auto rec = sample(experiment_config(5000, 3));
  const auto one_shot = estimate(posterior(rec));
  const auto seq = sequential_estimates(rec, kDefaultGridSize, {5000});
  REQUIRE(seq.size() == 1);
  CHECK(seq[0].k == 5000);
  CHECK(seq[0].phi_hat == one_shot.phi_hat);
  CHECK(seq[0].variance == one_shot.variance);

  const auto many = sequential_estimates(rec, kDefaultGridSize, {1, 10, 100, 1000, 5000});
  REQUIRE(many.size() == 5);
  CHECK(many.back().phi_hat == one_shot.phi_hat);
  CHECK(many.back().variance == one_shot.variance);
  OutcomeRecord prefix{rec.config, {rec.outcomes.begin(), rec.outcomes.begin() + 100}};
  const auto at100 = estimate(posterior(prefix));
  CHECK(many[2].phi_hat == doctest::Approx(at100.phi_hat).epsilon(1e-12));
  CHECK(many[2].variance == doctest::Approx(at100.variance).epsilon(1e-12));

  CHECK_THROWS_AS(sequential_estimates(rec, kDefaultGridSize, {0}), std::invalid_argument);
  CHECK_THROWS_AS(sequential_estimates(rec, kDefaultGridSize, {10, 10}), std::invalid_argument);
  CHECK_THROWS_AS(sequential_estimates(rec, kDefaultGridSize, {100, 50}), std::invalid_argument);
  CHECK_THROWS_AS(sequential_estimates(rec, kDefaultGridSize, {5001}), std::invalid_argument);
  CHECK_THROWS_AS(sequential_estimates(rec, 33, {10}), std::invalid_argument);
}

TEST_CASE("posterior stays normalized after every batch") {
  const auto rec = sample(experiment_config(20000, 4));
  LogLikelihoodAccumulator acc(rec.config);
  const auto nodes = uniform_phase_nodes(kDefaultGridSize);
  long next = 1;
  for (long i = 0; i < rec.config.m; ++i) {
    acc.add(rec.outcomes[static_cast<std::size_t>(i)]);
    if (i + 1 == next) {
      const auto post = posterior_from_log_likelihood(nodes, acc.evaluate(nodes));
      CHECK(std::abs(post.total_mass() - 1.0) < 1e-9);
      for (double d : post.density) CHECK(d >= 0.0);
      next *= 3;
    }
  }
}

TEST_CASE("grid refinement from 4097 to 8193 nodes") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto rec = sample(experiment_config(10000, seed));
    const auto coarse = estimate(posterior(rec, 4097));
    const auto fine = estimate(posterior(rec, 8193));
    CHECK(std::abs(coarse.phi_hat - fine.phi_hat) < 1e-6);
    CHECK(std::abs(coarse.variance - fine.variance) < 1e-8);
  }
}

TEST_CASE("variance shrinks between 100 and 10000 pulses") {
  int shrunk = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto rec = sample(ideal_config(10000, split_seed(2024, t)));
    const auto seq = sequential_estimates(rec, kDefaultGridSize, {100, 10000});
    if (seq[1].variance < seq[0].variance) ++shrunk;
  }
  CHECK(shrunk >= 95);
}

TEST_CASE("mean posterior variance respects the Cramer-Rao bound") {
  const auto base = experiment_config(10000, 0);
  const double fi = fi_numeric(Scheme::DisplacedCounting, base.phi_true, base.probe, base.det).value;
  double sum = 0.0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    const auto rec = sample(experiment_config(10000, split_seed(31, static_cast<std::uint64_t>(t))));
    sum += rec.config.m * estimate(posterior(rec)).variance;
  }
  CHECK(sum / trials >= 0.9 / fi);
}

TEST_CASE("long experiment-scale run concentrates on the true phase") {
  const auto rec = sample(experiment_config(900000, 20160401));
  const auto post = posterior(rec);
  std::vector<double> window(post.nodes.size(), 0.0);
  for (std::size_t i = 0; i < post.nodes.size(); ++i) {
    window[i] = (post.nodes[i] >= 0.99 && post.nodes[i] <= 1.01) ? post.density[i] : 0.0;
  }
  CHECK(post.integrate(window) > 0.99);
}
