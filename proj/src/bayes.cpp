#include "dpc/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>

namespace dpc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log sum_b w_b Pois(n; lambda_b)
double log_count_probability(long n, const std::vector<PoissonBranch>& branches) {
  double best = kNegInf;
  std::vector<double> terms;
  terms.reserve(branches.size());
  for (const auto& br : branches) {
    double t = kNegInf;
    if (br.weight > 0.0) {
      if (br.mean == 0.0) {
        t = n == 0 ? std::log(br.weight) : kNegInf;
      } else {
        t = std::log(br.weight) + n * std::log(br.mean) - br.mean - std::lgamma(n + 1.0);
      }
    }
    terms.push_back(t);
    best = std::max(best, t);
  }
  if (best == kNegInf) return kNegInf;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - best);
  return best + std::log(s);
}

}  // namespace

double PosteriorGrid::integrate(const std::vector<double>& values) const {
  double acc = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    acc += 0.5 * (nodes[i] - nodes[i - 1]) * (values[i] + values[i - 1]);
  }
  return acc;
}

LogLikelihoodAccumulator::LogLikelihoodAccumulator(const ExperimentConfig& config) : config_(config) {
  config_.det.validate();
}

void LogLikelihoodAccumulator::add(const Outcome& outcome) {
  const Scheme scheme = config_.scheme;
  const bool on_off = config_.det.kind == DetectorKind::OnOff;
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, Count>) {
          if (scheme != Scheme::DisplacedCounting || on_off || o.n < 0) {
            throw std::invalid_argument("count outcome does not fit the configured receiver");
          }
          ++counts_[o.n];
        } else if constexpr (std::is_same_v<T, Click>) {
          if (scheme != Scheme::DisplacedCounting || !on_off) {
            throw std::invalid_argument("click outcome does not fit the configured receiver");
          }
          if (o.flag) ++clicks_;
        } else if constexpr (std::is_same_v<T, Quadrature>) {
          if (scheme != Scheme::Homodyne || !std::isfinite(o.x)) {
            throw std::invalid_argument("quadrature outcome does not fit the configured receiver");
          }
          sum_x_ += o.x;
        } else {
          if (scheme != Scheme::Heterodyne || !std::isfinite(o.re) || !std::isfinite(o.im)) {
            throw std::invalid_argument("complex outcome does not fit the configured receiver");
          }
          sum_re_ += o.re;
          sum_im_ += o.im;
        }
      },
      outcome);
  ++size_;
}

std::vector<double> LogLikelihoodAccumulator::evaluate(const std::vector<double>& nodes) const {
  std::vector<double> out(nodes.size(), 0.0);
  if (size_ == 0) return out;
  const double m = static_cast<double>(size_);
  const auto& probe = config_.probe;

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double phi = nodes[i];
    double ll = 0.0;
    switch (config_.scheme) {
      case Scheme::DisplacedCounting: {
        const auto branches = poisson_branches(phi, probe, config_.det, config_.model);
        if (config_.det.kind == DetectorKind::OnOff) {
          double p0 = 0.0;
          double p1 = 0.0;
          for (const auto& br : branches) {
            p0 += br.weight * std::exp(-br.mean);
            p1 += br.weight * -std::expm1(-br.mean);
          }
          const long misses = size_ - clicks_;
          if (clicks_ > 0) ll += clicks_ * (p1 > 0.0 ? std::log(p1) : kNegInf);
          if (misses > 0) ll += misses * (p0 > 0.0 ? std::log(p0) : kNegInf);
        } else {
          for (const auto& [n, c] : counts_) ll += c * log_count_probability(n, branches);
        }
        break;
      }
      case Scheme::Homodyne: {
        // -sum (x - mu)^2 without the phase-independent sum x^2
        const double mu = homodyne_mean(phi, probe);
        ll = 2.0 * mu * sum_x_ - m * mu * mu;
        break;
      }
      case Scheme::Heterodyne: {
        const double a = probe.alpha();
        ll = 2.0 * a * (std::cos(phi) * sum_re_ + std::sin(phi) * sum_im_) - m * a * a;
        break;
      }
    }
    out[i] = ll;
  }
  return out;
}

std::vector<double> uniform_phase_nodes(int grid_size) {
  if (grid_size < 65) throw std::invalid_argument("posterior grid needs at least 65 nodes");
  std::vector<double> nodes(static_cast<std::size_t>(grid_size));
  const double h = std::numbers::pi / (grid_size - 1);
  for (int i = 0; i < grid_size; ++i) nodes[static_cast<std::size_t>(i)] = h * i;
  nodes.back() = std::numbers::pi;
  return nodes;
}

PosteriorGrid posterior_from_log_likelihood(std::vector<double> nodes,
                                            const std::vector<double>& log_likelihood) {
  const double peak = *std::max_element(log_likelihood.begin(), log_likelihood.end());
  if (!(peak > kNegInf)) {
    throw ZeroPosteriorError("posterior vanishes at every grid node; the record is impossible under the model");
  }
  PosteriorGrid post{std::move(nodes), {}};
  post.density.resize(log_likelihood.size());
  std::transform(log_likelihood.begin(), log_likelihood.end(), post.density.begin(),
                 [peak](double ll) { return std::exp(ll - peak); });
  const double mass = post.total_mass();
  if (!(mass > 0.0)) throw ZeroPosteriorError("posterior has zero mass under the trapezoid rule");
  for (double& d : post.density) d /= mass;
  return post;
}

PosteriorGrid posterior(const OutcomeRecord& record, int grid_size) {
  auto nodes = uniform_phase_nodes(grid_size);
  LogLikelihoodAccumulator acc(record.config);
  for (const auto& o : record.outcomes) acc.add(o);
  const auto ll = acc.evaluate(nodes);
  return posterior_from_log_likelihood(std::move(nodes), ll);
}

Estimate estimate(const PosteriorGrid& post) {
  std::vector<double> moment(post.nodes.size());
  for (std::size_t i = 0; i < moment.size(); ++i) moment[i] = post.nodes[i] * post.density[i];
  const double phi_hat = post.integrate(moment);
  for (std::size_t i = 0; i < moment.size(); ++i) {
    const double d = post.nodes[i] - phi_hat;
    moment[i] = d * d * post.density[i];
  }
  return {phi_hat, std::max(0.0, post.integrate(moment))};
}

std::vector<SequentialEstimate> sequential_estimates(const OutcomeRecord& record, int grid_size,
                                                     const std::vector<long>& checkpoints) {
  const long m = static_cast<long>(record.outcomes.size());
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > m || (i > 0 && checkpoints[i] <= checkpoints[i - 1])) {
      throw std::invalid_argument("checkpoints must increase strictly within [1, " + std::to_string(m) + "]");
    }
  }
  const auto nodes = uniform_phase_nodes(grid_size);
  LogLikelihoodAccumulator acc(record.config);
  std::vector<SequentialEstimate> out;
  out.reserve(checkpoints.size());
  auto next = checkpoints.begin();
  for (long k = 0; k < m && next != checkpoints.end(); ++k) {
    acc.add(record.outcomes[static_cast<std::size_t>(k)]);
    if (k + 1 == *next) {
      const auto est = estimate(posterior_from_log_likelihood(nodes, acc.evaluate(nodes)));
      out.push_back({k + 1, est.phi_hat, est.variance});
      ++next;
    }
  }
  return out;
}

}  // namespace dpc
