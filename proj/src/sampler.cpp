#include "dpc/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dpc {

namespace {

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Cumulative count distribution, cut where the remaining mass is below tail.
std::vector<double> count_cdf(const std::vector<PoissonBranch>& branches, double tail) {
  std::vector<double> cdf;
  long double mass = 0.0L;
  for (long n = 0; n < 1'000'000; ++n) {
    double p = 0.0;
    for (const auto& br : branches) p += br.weight * poisson_pmf(n, br.mean);
    mass += p;
    cdf.push_back(static_cast<double>(mass));
    if (static_cast<double>(1.0L - mass) < tail || poisson_tail_bound(n, branches) < tail) return cdf;
  }
  throw std::runtime_error("count distribution did not reach its tail guard");
}

}  // namespace

void ExperimentConfig::validate() const {
  det.validate();
  if (m < 1) throw std::invalid_argument("experiment needs m >= 1 pulses");
  if (!(count_tail_mass > 0.0 && count_tail_mass <= 1e-6)) {
    throw std::invalid_argument("count_tail_mass must lie in (0, 1e-6]");
  }
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t trial_index) {
  return mix64(seed + (trial_index + 1) * kGoldenGamma);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double standard_normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);  // (0, 1]
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

OutcomeRecord sample(const ExperimentConfig& config) {
  config.validate();
  OutcomeRecord record{config, {}};
  record.outcomes.reserve(static_cast<std::size_t>(config.m));
  std::mt19937_64 rng(config.seed);
  const double phi = config.phi_true.value();

  switch (config.scheme) {
    case Scheme::DisplacedCounting: {
      const auto branches = poisson_branches(phi, config.probe, config.det, config.model);
      if (config.det.kind == DetectorKind::OnOff) {
        const double p_click = onoff_likelihood(true, config.phi_true, config.probe, config.det, config.model);
        for (long i = 0; i < config.m; ++i) record.outcomes.emplace_back(Click{uniform01(rng) < p_click});
      } else {
        const auto cdf = count_cdf(branches, config.count_tail_mass);
        for (long i = 0; i < config.m; ++i) {
          const double u = uniform01(rng);
          const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
          const long n = it == cdf.end() ? static_cast<long>(cdf.size()) - 1
                                         : static_cast<long>(it - cdf.begin());
          record.outcomes.emplace_back(Count{n});
        }
      }
      break;
    }
    case Scheme::Homodyne: {
      const double mean = homodyne_mean(phi, config.probe);
      for (long i = 0; i < config.m; ++i) {
        record.outcomes.emplace_back(Quadrature{mean + std::numbers::sqrt2 * 0.5 * standard_normal(rng)});
      }
      break;
    }
    case Scheme::Heterodyne: {
      const double re0 = config.probe.alpha() * std::cos(phi);
      const double im0 = config.probe.alpha() * std::sin(phi);
      for (long i = 0; i < config.m; ++i) {
        const double zr = standard_normal(rng);
        const double zi = standard_normal(rng);
        record.outcomes.emplace_back(
            ComplexQuadrature{re0 + std::numbers::sqrt2 * 0.5 * zr, im0 + std::numbers::sqrt2 * 0.5 * zi});
      }
      break;
    }
  }
  return record;
}

}  // namespace dpc
