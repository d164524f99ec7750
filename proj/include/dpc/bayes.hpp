#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <vector>

#include "dpc/sampler.hpp"

namespace dpc {

/// Every grid node has zero likelihood: the record is impossible under its model.
class ZeroPosteriorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultGridSize = 4097;

/// Posterior density over phase on uniform nodes spanning [0, pi],
/// normalized under the trapezoid rule. The prior is uniform on [0, pi].
struct PosteriorGrid {
  std::vector<double> nodes;
  std::vector<double> density;

  /// Trapezoid integral of samples taken at `nodes`.
  double integrate(const std::vector<double>& values) const;
  double total_mass() const { return integrate(density); }
};

struct Estimate {
  double phi_hat = 0.0;
  double variance = 0.0;
};

struct SequentialEstimate {
  long k = 0;
  double phi_hat = 0.0;
  double variance = 0.0;
};

/// Sufficient statistics of an outcome stream. Adding outcomes one at a time
/// and evaluating the log-likelihood at any point gives the same result as
/// summing per-outcome log-probabilities, up to a phase-independent constant.
class LogLikelihoodAccumulator {
 public:
  explicit LogLikelihoodAccumulator(const ExperimentConfig& config);

  /// Throws std::invalid_argument if the outcome kind does not fit the scheme.
  void add(const Outcome& outcome);
  long size() const { return size_; }

  /// log P(outcomes | phi) up to a constant independent of phi.
  std::vector<double> evaluate(const std::vector<double>& nodes) const;

 private:
  ExperimentConfig config_;
  long size_ = 0;
  std::map<long, long> counts_;
  long clicks_ = 0;
  double sum_x_ = 0.0;
  double sum_re_ = 0.0;
  double sum_im_ = 0.0;
};

std::vector<double> uniform_phase_nodes(int grid_size);

/// Normalized posterior from a log-likelihood sampled at `nodes`.
PosteriorGrid posterior_from_log_likelihood(std::vector<double> nodes,
                                            const std::vector<double>& log_likelihood);

PosteriorGrid posterior(const OutcomeRecord& record, int grid_size = kDefaultGridSize);

/// Posterior mean and posterior variance.
Estimate estimate(const PosteriorGrid& post);

/// estimate(posterior(first k outcomes)) for each k in `checkpoints`,
/// accumulated in a single pass. Checkpoints must increase within [1, m].
std::vector<SequentialEstimate> sequential_estimates(const OutcomeRecord& record, int grid_size,
                                                     const std::vector<long>& checkpoints);

}  // namespace dpc
