#include "dpc/photonics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

namespace dpc {

namespace {

constexpr double kPhaseSlack = 1e-12;
constexpr double kMatchTolerance = 1e-6;
constexpr double kOracleTailMass = 1e-12;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

// C(k, j) eta^j (1 - eta)^(k - j)
double binomial_pmf(long j, long k, double eta) {
  if (j < 0 || j > k) return 0.0;
  if (eta == 1.0) return j == k ? 1.0 : 0.0;
  if (eta == 0.0) return j == 0 ? 1.0 : 0.0;
  const double log_choose = std::lgamma(k + 1.0) - std::lgamma(j + 1.0) - std::lgamma(k - j + 1.0);
  return std::exp(log_choose + j * std::log(eta) + (k - j) * std::log1p(-eta));
}

// 1 - cos(phi), exact near zero.
double one_minus_cos(double phi) {
  const double s = std::sin(0.5 * phi);
  return 2.0 * s * s;
}

// <k| D(z) |m> for real z.
double displacement_element(long k, long m, double z) {
  const double x = z * z;
  const double envelope = std::exp(-0.5 * x);
  if (k >= m) {
    const double ratio = std::exp(0.5 * (std::lgamma(m + 1.0) - std::lgamma(k + 1.0)));
    return ratio * envelope * std::pow(z, static_cast<int>(k - m)) *
           std::assoc_laguerre(static_cast<unsigned>(m), static_cast<unsigned>(k - m), x);
  }
  const double ratio = std::exp(0.5 * (std::lgamma(k + 1.0) - std::lgamma(m + 1.0)));
  return ratio * envelope * std::pow(-z, static_cast<int>(m - k)) *
         std::assoc_laguerre(static_cast<unsigned>(k), static_cast<unsigned>(m - k), x);
}

}  // namespace

ProbeConfig::ProbeConfig(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  require(std::isfinite(alpha) && alpha >= 0.0, "probe alpha must be finite and >= 0");
  require(std::isfinite(beta) && beta >= 0.0, "probe beta must be finite and >= 0");
}

ProbeConfig ProbeConfig::from_mean_photons(double alpha2, double beta2) {
  require(std::isfinite(alpha2) && alpha2 >= 0.0, "|alpha|^2 must be finite and >= 0");
  require(std::isfinite(beta2) && beta2 >= 0.0, "|beta|^2 must be finite and >= 0");
  return {std::sqrt(alpha2), std::sqrt(beta2)};
}

void DetectorModel::validate() const {
  require(eta >= 0.0 && eta <= 1.0, "detector eta must lie in [0, 1]");
  require(std::isfinite(nu) && nu >= 0.0, "detector nu must be finite and >= 0");
  require(xi >= 0.0 && xi <= 1.0, "detector xi must lie in [0, 1]");
  require(fock_cutoff >= 1, "detector fock_cutoff must be >= 1");
}

PhasePoint::PhasePoint(double phi) : phi_(phi) {
  require(phi >= -kPhaseSlack && phi <= std::numbers::pi + kPhaseSlack,
          "phase must lie in [0, pi], got " + std::to_string(phi));
  phi_ = std::clamp(phi, 0.0, std::numbers::pi);
}

std::vector<PoissonBranch> poisson_branches(double phi, const ProbeConfig& probe,
                                            const DetectorModel& det, LikelihoodModel model) {
  det.validate();
  const double a = probe.alpha();
  const double b = probe.beta();
  const double eta = det.eta;
  const double nu = det.nu;
  const double xi = det.xi;

  if (model == LikelihoodModel::PaperVerbatim) {
    if (std::abs(a - b) > kMatchTolerance * std::max(a, b)) {
      throw ModelMismatchError("PaperVerbatim likelihood assumes beta = alpha (alpha = " +
                               std::to_string(a) + ", beta = " + std::to_string(b) +
                               "); use GeneralizedInterference");
    }
    const double a2 = a * a;
    const double total = 2.0 - xi;
    std::vector<PoissonBranch> out;
    out.push_back({xi / total, 2.0 * eta * a2 * one_minus_cos(phi) + nu,
                   2.0 * eta * a2 * std::sin(phi)});
    if (xi < 1.0) out.push_back({2.0 * (1.0 - xi) / total, eta * a2 + nu, 0.0});
    return out;
  }

  // a^2 + b^2 - 2 xi a b cos(phi) = (a - b)^2 + 2ab[(1 - xi) + xi (1 - cos phi)]
  const double diff = a - b;
  const double interference = (1.0 - xi) + xi * one_minus_cos(phi);
  const double mean = eta * (diff * diff + 2.0 * a * b * interference) + nu;
  return {{1.0, mean, 2.0 * eta * xi * a * b * std::sin(phi)}};
}

double poisson_pmf(long n, double mean) {
  if (n < 0) return 0.0;
  if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0));
}

double poisson_tail_bound(long n, const std::vector<PoissonBranch>& branches) {
  double bound = 0.0;
  for (const auto& br : branches) {
    const double ratio = br.mean / (n + 2.0);
    if (ratio >= 1.0) return std::numeric_limits<double>::infinity();
    bound += br.weight * poisson_pmf(n + 1, br.mean) / (1.0 - ratio);
  }
  return bound;
}

std::vector<double> povm_element(long n, const DetectorModel& det) {
  det.validate();
  require(n >= 0, "photon count must be >= 0");
  require(det.kind == DetectorKind::NumberResolving, "POVM elements need a number-resolving detector");

  std::vector<double> diag(static_cast<std::size_t>(det.fock_cutoff) + 1, 0.0);
  for (long k = 0; k <= det.fock_cutoff; ++k) {
    double c = 0.0;
    for (long l = 0; l <= n; ++l) {
      c += poisson_pmf(l, det.nu) * binomial_pmf(n - l, k, det.eta);
    }
    diag[static_cast<std::size_t>(k)] = std::clamp(c, 0.0, 1.0);
  }
  return diag;
}

double pnrd_likelihood(long n, PhasePoint phi, const ProbeConfig& probe,
                       const DetectorModel& det, LikelihoodModel model) {
  require(n >= 0, "photon count must be >= 0");
  require(det.kind == DetectorKind::NumberResolving, "count likelihood needs a number-resolving detector");
  double p = 0.0;
  for (const auto& br : poisson_branches(phi.value(), probe, det, model)) {
    p += br.weight * poisson_pmf(n, br.mean);
  }
  return std::clamp(p, 0.0, 1.0);
}

double pnrd_likelihood_unnormalized(long n, PhasePoint phi, const ProbeConfig& probe,
                                    const DetectorModel& det) {
  require(n >= 0, "photon count must be >= 0");
  double p = 0.0;
  for (const auto& br : poisson_branches(phi.value(), probe, det, LikelihoodModel::PaperVerbatim)) {
    p += br.weight * poisson_pmf(n, br.mean);
  }
  return p * (2.0 - det.xi);
}

double onoff_likelihood(bool click, PhasePoint phi, const ProbeConfig& probe,
                        const DetectorModel& det, LikelihoodModel model) {
  double p = 0.0;
  for (const auto& br : poisson_branches(phi.value(), probe, det, model)) {
    p += br.weight * (click ? -std::expm1(-br.mean) : std::exp(-br.mean));
  }
  return std::clamp(p, 0.0, 1.0);
}

double homodyne_mean(double phi, const ProbeConfig& probe) {
  return std::numbers::sqrt2 * probe.alpha() * std::sin(phi);
}

double homodyne_density(double x, PhasePoint phi, const ProbeConfig& probe) {
  const double d = x - homodyne_mean(phi.value(), probe);
  return std::exp(-d * d) * std::numbers::inv_sqrtpi;
}

double heterodyne_density(double re, double im, PhasePoint phi, const ProbeConfig& probe) {
  const double dr = re - probe.alpha() * std::cos(phi.value());
  const double di = im - probe.alpha() * std::sin(phi.value());
  return std::exp(-(dr * dr + di * di)) * std::numbers::inv_pi;
}

double born_probability_oracle(long n, PhasePoint phi, const ProbeConfig& probe,
                               const DetectorModel& det) {
  det.validate();
  require(n >= 0, "photon count must be >= 0");
  require(det.kind == DetectorKind::NumberResolving, "oracle needs a number-resolving detector");
  require(det.xi == 1.0, "oracle models perfect mode overlap only (xi = 1)");

  const long cutoff = det.fock_cutoff;
  const std::complex<double> gamma = std::polar(probe.alpha(), phi.value());
  const double gamma2 = std::norm(gamma);

  // |alpha e^{i phi}> in the truncated basis
  std::vector<std::complex<double>> signal(static_cast<std::size_t>(cutoff) + 1);
  double signal_mass = 0.0;
  for (long m = 0; m <= cutoff; ++m) {
    const double mag = std::exp(0.5 * (m * std::log(gamma2) - gamma2 - std::lgamma(m + 1.0)));
    const auto amp = gamma2 == 0.0 ? std::complex<double>(m == 0 ? 1.0 : 0.0)
                                   : std::polar(mag, static_cast<double>(m) * phi.value());
    signal[static_cast<std::size_t>(m)] = amp;
    signal_mass += std::norm(amp);
  }
  if (1.0 - signal_mass > kOracleTailMass) {
    throw TruncationError("Fock cutoff " + std::to_string(cutoff) + " drops " +
                          std::to_string(1.0 - signal_mass) + " of the probe state's mass");
  }

  // D(-beta) applied in the truncated space
  std::vector<double> photon_dist(signal.size());
  double displaced_mass = 0.0;
  for (long k = 0; k <= cutoff; ++k) {
    std::complex<double> amp = 0.0;
    for (long m = 0; m <= cutoff; ++m) {
      amp += displacement_element(k, m, -probe.beta()) * signal[static_cast<std::size_t>(m)];
    }
    photon_dist[static_cast<std::size_t>(k)] = std::norm(amp);
    displaced_mass += std::norm(amp);
  }
  if (1.0 - displaced_mass > kOracleTailMass) {
    throw TruncationError("Fock cutoff " + std::to_string(cutoff) + " drops " +
                          std::to_string(1.0 - displaced_mass) + " of the displaced state's mass");
  }

  const auto povm = povm_element(n, det);
  double p = 0.0;
  for (std::size_t k = 0; k < povm.size(); ++k) p += povm[k] * photon_dist[k];
  return p;
}

int default_fock_cutoff(const ProbeConfig& probe) {
  const double s = probe.alpha() + probe.beta();
  const double lambda = s * s;
  return std::max(30, static_cast<int>(std::ceil(lambda + 10.0 * std::sqrt(lambda))));
}

}  // namespace dpc
