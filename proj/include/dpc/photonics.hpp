#pragma once

// Physical parameters, detector POVMs and outcome likelihoods for phase
// sensing with a coherent probe. Three receivers are modeled: displaced
// photon counting (number-resolving or on/off detector), homodyne and
// heterodyne. Quadrature convention: x = (a + a†)/√2, vacuum variance 1/2.

#include <cstddef>
#include <stdexcept>
#include <variant>
#include <vector>

namespace dpc {

/// Raised when a likelihood model is used outside the amplitudes it assumes.
class ModelMismatchError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a truncated Fock space loses more mass than the tail guard.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coherent probe |alpha> and receiver displacement amplitude beta.
/// Amplitudes are real and nonnegative; the phase enters only through the
/// shift applied to the signal arm.
class ProbeConfig {
 public:
  ProbeConfig(double alpha, double beta);

  /// Probe with beta = alpha, i.e. perfect nulling at zero phase.
  static ProbeConfig matched(double alpha) { return {alpha, alpha}; }
  /// Builds the probe from mean photon numbers |alpha|^2 and |beta|^2.
  static ProbeConfig from_mean_photons(double alpha2, double beta2);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double mean_photon_number() const { return alpha_ * alpha_; }

 private:
  double alpha_;
  double beta_;
};

enum class DetectorKind { NumberResolving, OnOff };

/// Imperfect photon detector behind the displacement.
struct DetectorModel {
  double eta = 1.0;  ///< detection efficiency in [0, 1]
  double nu = 0.0;   ///< dark counts per pulse
  double xi = 1.0;   ///< interference visibility in [0, 1]
  DetectorKind kind = DetectorKind::NumberResolving;
  int fock_cutoff = 30;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;

  static DetectorModel ideal(DetectorKind kind = DetectorKind::NumberResolving) {
    return DetectorModel{1.0, 0.0, 1.0, kind, 30};
  }
};

/// Phase shift in [0, pi]; the identifiable half-interval under cos symmetry.
class PhasePoint {
 public:
  explicit PhasePoint(double phi);
  double value() const { return phi_; }

 private:
  double phi_;
};

/// How the displaced-counting mean photon number depends on the phase.
enum class LikelihoodModel {
  /// Two-branch Poisson mixture assuming beta = alpha: a phase-sensitive
  /// branch weighted xi and a phase-insensitive branch weighted 2(1 - xi),
  /// renormalized by the total mass 2 - xi.
  PaperVerbatim,
  /// Single Poisson with mean eta(alpha^2 + beta^2 - 2 xi alpha beta cos phi) + nu.
  GeneralizedInterference,
};

struct Count {
  long n = 0;
  bool operator==(const Count&) const = default;
};
struct Click {
  bool flag = false;
  bool operator==(const Click&) const = default;
};
struct Quadrature {
  double x = 0.0;
  bool operator==(const Quadrature&) const = default;
};
struct ComplexQuadrature {
  double re = 0.0;
  double im = 0.0;
  bool operator==(const ComplexQuadrature&) const = default;
};

using Outcome = std::variant<Count, Click, Quadrature, ComplexQuadrature>;

/// One Poisson component of a displaced-counting count distribution.
struct PoissonBranch {
  double weight;
  double mean;
  double mean_derivative;  ///< d(mean)/d(phi)
};

/// The count distribution after displacement is a weighted sum of Poisson
/// laws. Exposed at raw angles so analysis code can step across phi = 0.
/// Throws ModelMismatchError for PaperVerbatim with beta != alpha.
std::vector<PoissonBranch> poisson_branches(double phi, const ProbeConfig& probe,
                                            const DetectorModel& det, LikelihoodModel model);

double poisson_pmf(long n, double mean);

/// Upper bound on the mixture mass above count n, from the geometric bound on
/// Poisson tails. Infinite while n + 2 does not exceed every branch mean.
double poisson_tail_bound(long n, const std::vector<PoissonBranch>& branches);

/// Diagonal of the n-count POVM element in the Fock basis, k = 0..fock_cutoff.
std::vector<double> povm_element(long n, const DetectorModel& det);

double pnrd_likelihood(long n, PhasePoint phi, const ProbeConfig& probe,
                       const DetectorModel& det, LikelihoodModel model);

/// Mixture mass before renormalization; equals 2 - xi summed over n.
double pnrd_likelihood_unnormalized(long n, PhasePoint phi, const ProbeConfig& probe,
                                    const DetectorModel& det);

double onoff_likelihood(bool click, PhasePoint phi, const ProbeConfig& probe,
                        const DetectorModel& det, LikelihoodModel model);

/// Mean of the homodyne quadrature, sqrt(2) alpha sin(phi).
double homodyne_mean(double phi, const ProbeConfig& probe);

double homodyne_density(double x, PhasePoint phi, const ProbeConfig& probe);

/// Husimi density of |alpha e^{i phi}>.
double heterodyne_density(double re, double im, PhasePoint phi, const ProbeConfig& probe);

/// Tr[Pi_n rho] computed by brute force in a truncated Fock space: the
/// displacement operator D(-beta) is applied to |alpha e^{i phi}> through
/// its matrix elements and the result is contracted with povm_element.
/// Requires xi = 1. Throws TruncationError when more than 1e-12 of the
/// state's mass lies beyond det.fock_cutoff.
double born_probability_oracle(long n, PhasePoint phi, const ProbeConfig& probe,
                               const DetectorModel& det);

/// max(30, ceil(lambda + 10 sqrt(lambda))) for the largest displaced mean
/// photon number (alpha + beta)^2.
int default_fock_cutoff(const ProbeConfig& probe);

}  // namespace dpc
