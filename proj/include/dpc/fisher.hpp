#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string_view>
#include <variant>

#include "dpc/photonics.hpp"

namespace dpc {

enum class Scheme { DisplacedCounting, Homodyne, Heterodyne };

std::string_view scheme_name(Scheme s);

/// Raised when a discrete FI sum never meets its tail guard.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AnalyticDerivative {};

/// Central difference with one Richardson extrapolation level.
struct CentralDifference {
  double step = 1e-5;
};

using DerivativeRule = std::variant<AnalyticDerivative, CentralDifference>;

struct FiOptions {
  DerivativeRule derivative = AnalyticDerivative{};
  /// Count sums stop once the unsummed probability drops below this.
  double count_tail_mass = 1e-15;
  /// Gauss-Hermite nodes per continuous dimension.
  int quad_points = 64;
  /// Only consulted for displaced counting.
  LikelihoodModel model = LikelihoodModel::GeneralizedInterference;

  void validate() const;
};

struct FiResult {
  double value = 0.0;
  double phi_evaluated = 0.0;
  /// Set when phi sat on a degenerate point (p(0|phi) = 1) and the FI was
  /// taken as the right limit at phi_evaluated instead.
  bool limit_substituted = false;
};

/// Phase used in place of a degenerate phi = 0.
inline constexpr double kLimitPhase = 1e-6;

/// 4 (<K^2> - <K>^2) for a pure state given by its Fock amplitudes.
double qfi_pure_state(std::span<const std::complex<double>> amplitudes);

/// 4 |alpha|^2.
double qfi_coherent(const ProbeConfig& probe);

/// Closed forms for ideal receivers (eta = 1, nu = 0, xi = 1, beta = alpha):
///   homodyne     4 a^2 cos^2(phi)
///   heterodyne   2 a^2
///   displaced    2 a^2 (1 + cos phi)
/// The displaced form is the FI of the Poisson family with mean
/// 2 a^2 (1 - cos phi); fi_numeric reproduces it.
double fi_analytic(Scheme scheme, PhasePoint phi, const ProbeConfig& probe);

/// 2 a^2 (1 + cos^2 phi): the squared-cosine variant of the displaced
/// closed form. Agrees with fi_analytic at phi = 0 and pi/2 only; kept for
/// comparison.
double fi_displaced_squared_cosine_form(PhasePoint phi, const ProbeConfig& probe);

/// Classical FI straight from the outcome likelihood of the scheme.
/// Homodyne and heterodyne are ideal and ignore `det`.
FiResult fi_numeric(Scheme scheme, PhasePoint phi, const ProbeConfig& probe,
                    const DetectorModel& det, const FiOptions& opts = {});

/// Same as fi_numeric at a raw angle (no range check, no limit substitution).
/// Useful for symmetry checks at negative phases.
double fi_numeric_raw(Scheme scheme, double phi, const ProbeConfig& probe,
                      const DetectorModel& det, const FiOptions& opts = {});

}  // namespace dpc
