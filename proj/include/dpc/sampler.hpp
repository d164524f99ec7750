#pragma once

// Seeded, reproducible outcome generation for every receiver.
//
// Random numbers come from std::mt19937_64, whose output sequence is fixed
// by the standard. Uniform and normal deviates are derived here rather than
// through <random> distributions, which are implementation-defined.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "dpc/fisher.hpp"
#include "dpc/photonics.hpp"

namespace dpc {

inline constexpr std::string_view kPrngIdentity = "mt19937_64/u53/box-muller";

struct ExperimentConfig {
  Scheme scheme = Scheme::DisplacedCounting;
  PhasePoint phi_true{0.0};
  ProbeConfig probe{0.0, 0.0};
  DetectorModel det{};
  LikelihoodModel model = LikelihoodModel::GeneralizedInterference;
  long m = 1;
  std::uint64_t seed = 0;
  /// Inverse-CDF truncation for count sampling.
  double count_tail_mass = 1e-15;

  void validate() const;
};

struct OutcomeRecord {
  ExperimentConfig config;
  std::vector<Outcome> outcomes;
};

/// Per-trial seed: splitmix64 finalizer of seed + (trial + 1) * golden gamma.
/// Injective in trial_index for a fixed seed.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t trial_index);

/// Uniform deviate on [0, 1) with 53 random bits.
double uniform01(std::mt19937_64& rng);

/// Standard normal deviate (Box-Muller, one value per call).
double standard_normal(std::mt19937_64& rng);

/// Draws config.m i.i.d. outcomes at config.phi_true. Counts for a
/// number-resolving displaced receiver, clicks for on/off, real quadratures
/// for homodyne, complex quadratures for heterodyne.
OutcomeRecord sample(const ExperimentConfig& config);

}  // namespace dpc
