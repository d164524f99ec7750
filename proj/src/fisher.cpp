#include "dpc/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace dpc {

namespace {

constexpr double kNegligibleProbability = 1e-300;
constexpr long kMaxCountTerms = 1'000'000;

struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Nodes and weights for the weight function exp(-t^2), by Newton iteration
// on orthonormal Hermite polynomials.
GaussHermite gauss_hermite(int n) {
  constexpr double kPiToMinusQuarter = 0.7511255444649425;
  GaussHermite gh{std::vector<double>(n), std::vector<double>(n)};
  const int half = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < half; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * gh.nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * gh.nodes[1];
    } else {
      z = 2.0 * z - gh.nodes[i - 2];
    }
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = kPiToMinusQuarter;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double prev = z;
      z = prev - p1 / pp;
      if (std::abs(z - prev) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    gh.nodes[i] = z;
    gh.nodes[n - 1 - i] = -z;
    gh.weights[i] = gh.weights[n - 1 - i] = 2.0 / (pp * pp);
  }
  return gh;
}

// Derivative of f at phi under the configured rule; `analytic` supplies the
// exact value when the rule asks for it.
template <class F, class G>
double derivative(const DerivativeRule& rule, double phi, F&& f, G&& analytic) {
  if (std::holds_alternative<AnalyticDerivative>(rule)) return analytic();
  const double h = std::get<CentralDifference>(rule).step;
  const double coarse = (f(phi + h) - f(phi - h)) / (2.0 * h);
  const double fine = (f(phi + 0.5 * h) - f(phi - 0.5 * h)) / h;
  return (4.0 * fine - coarse) / 3.0;
}

double mixture_pmf(long n, const std::vector<PoissonBranch>& branches) {
  double p = 0.0;
  for (const auto& br : branches) p += br.weight * poisson_pmf(n, br.mean);
  return p;
}

double mixture_no_click(const std::vector<PoissonBranch>& branches) {
  double p = 0.0;
  for (const auto& br : branches) p += br.weight * std::exp(-br.mean);
  return p;
}

double mixture_click(const std::vector<PoissonBranch>& branches) {
  double p = 0.0;
  for (const auto& br : branches) p += br.weight * -std::expm1(-br.mean);
  return p;
}

double displaced_fi(double phi, const ProbeConfig& probe, const DetectorModel& det,
                    const FiOptions& opts) {
  const auto branches = poisson_branches(phi, probe, det, opts.model);
  const auto branches_at = [&](double p) { return poisson_branches(p, probe, det, opts.model); };

  if (det.kind == DetectorKind::OnOff) {
    const double p0 = mixture_no_click(branches);
    const double p1 = mixture_click(branches);
    const double d0 = derivative(
        opts.derivative, phi, [&](double p) { return mixture_no_click(branches_at(p)); },
        [&] {
          double d = 0.0;
          for (const auto& br : branches) d -= br.weight * std::exp(-br.mean) * br.mean_derivative;
          return d;
        });
    double fi = 0.0;
    if (p0 > kNegligibleProbability) fi += d0 * d0 / p0;
    if (p1 > kNegligibleProbability) fi += d0 * d0 / p1;
    return fi;
  }

  long double mass = 0.0L;
  double fi = 0.0;
  for (long n = 0; n < kMaxCountTerms; ++n) {
    const double p = mixture_pmf(n, branches);
    mass += p;
    if (p > kNegligibleProbability) {
      const double dp = derivative(
          opts.derivative, phi, [&](double q) { return mixture_pmf(n, branches_at(q)); },
          [&] {
            // d/dlambda Pois(n; lambda) = Pois(n - 1; lambda) - Pois(n; lambda)
            double d = 0.0;
            for (const auto& br : branches) {
              d += br.weight * (poisson_pmf(n - 1, br.mean) - poisson_pmf(n, br.mean)) *
                   br.mean_derivative;
            }
            return d;
          });
      fi += dp * dp / p;
    }
    if (static_cast<double>(1.0L - mass) < opts.count_tail_mass ||
        poisson_tail_bound(n, branches) < opts.count_tail_mass) {
      return fi;
    }
  }
  throw ConvergenceError("count Fisher information sum did not reach tail mass " +
                         std::to_string(opts.count_tail_mass) + " within " +
                         std::to_string(kMaxCountTerms) + " terms");
}

double homodyne_fi(double phi, const ProbeConfig& probe, const FiOptions& opts) {
  const auto gh = gauss_hermite(opts.quad_points);
  const double mean = homodyne_mean(phi, probe);
  const auto density = [&](double x, double p) {
    const double d = x - homodyne_mean(p, probe);
    return std::exp(-d * d) * std::numbers::inv_sqrtpi;
  };
  const double mean_derivative = std::numbers::sqrt2 * probe.alpha() * std::cos(phi);

  double fi = 0.0;
  for (int i = 0; i < opts.quad_points; ++i) {
    const double t = gh.nodes[i];
    const double x = mean + t;
    const double p = density(x, phi);
    if (p <= kNegligibleProbability) continue;
    const double dp = derivative(
        opts.derivative, phi, [&](double q) { return density(x, q); },
        [&] { return p * 2.0 * (x - mean) * mean_derivative; });
    fi += gh.weights[i] * std::exp(t * t) * dp * dp / p;
  }
  return fi;
}

double heterodyne_fi(double phi, const ProbeConfig& probe, const FiOptions& opts) {
  const auto gh = gauss_hermite(opts.quad_points);
  const double a = probe.alpha();
  const double re0 = a * std::cos(phi);
  const double im0 = a * std::sin(phi);
  const auto density = [&](double re, double im, double p) {
    const double dr = re - a * std::cos(p);
    const double di = im - a * std::sin(p);
    return std::exp(-(dr * dr + di * di)) * std::numbers::inv_pi;
  };

  double fi = 0.0;
  for (int i = 0; i < opts.quad_points; ++i) {
    for (int j = 0; j < opts.quad_points; ++j) {
      const double tr = gh.nodes[i];
      const double ti = gh.nodes[j];
      const double re = re0 + tr;
      const double im = im0 + ti;
      const double p = density(re, im, phi);
      if (p <= kNegligibleProbability) continue;
      const double dp = derivative(
          opts.derivative, phi, [&](double q) { return density(re, im, q); },
          [&] { return p * 2.0 * (-(re - re0) * im0 + (im - im0) * re0); });
      fi += gh.weights[i] * gh.weights[j] * std::exp(tr * tr + ti * ti) * dp * dp / p;
    }
  }
  return fi;
}

}  // namespace

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::DisplacedCounting:
      return "displaced";
    case Scheme::Homodyne:
      return "homodyne";
    case Scheme::Heterodyne:
      return "heterodyne";
  }
  return "unknown";
}

void FiOptions::validate() const {
  if (const auto* cd = std::get_if<CentralDifference>(&derivative); cd && !(cd->step > 0.0)) {
    throw std::invalid_argument("central-difference step must be > 0");
  }
  if (!(count_tail_mass > 0.0 && count_tail_mass <= 1e-6)) {
    throw std::invalid_argument("count_tail_mass must lie in (0, 1e-6]");
  }
  if (quad_points < 64) throw std::invalid_argument("quad_points must be >= 64");
}

double qfi_pure_state(std::span<const std::complex<double>> amplitudes) {
  double norm = 0.0;
  double mean = 0.0;
  for (std::size_t k = 0; k < amplitudes.size(); ++k) {
    const double w = std::norm(amplitudes[k]);
    norm += w;
    mean += static_cast<double>(k) * w;
  }
  if (std::abs(norm - 1.0) > 1e-9) {
    throw std::invalid_argument("state is not normalized (norm " + std::to_string(norm) + ")");
  }
  double var = 0.0;
  for (std::size_t k = 0; k < amplitudes.size(); ++k) {
    const double d = static_cast<double>(k) - mean;
    var += d * d * std::norm(amplitudes[k]);
  }
  return 4.0 * var;
}

double qfi_coherent(const ProbeConfig& probe) { return 4.0 * probe.mean_photon_number(); }

double fi_analytic(Scheme scheme, PhasePoint phi, const ProbeConfig& probe) {
  const double a2 = probe.mean_photon_number();
  const double c = std::cos(phi.value());
  switch (scheme) {
    case Scheme::Homodyne:
      return 4.0 * a2 * c * c;
    case Scheme::Heterodyne:
      return 2.0 * a2;
    case Scheme::DisplacedCounting:
      return std::max(0.0, 2.0 * a2 * (1.0 + c));
  }
  return 0.0;
}

double fi_displaced_squared_cosine_form(PhasePoint phi, const ProbeConfig& probe) {
  const double c = std::cos(phi.value());
  return 2.0 * probe.mean_photon_number() * (1.0 + c * c);
}

double fi_numeric_raw(Scheme scheme, double phi, const ProbeConfig& probe,
                      const DetectorModel& det, const FiOptions& opts) {
  opts.validate();
  switch (scheme) {
    case Scheme::DisplacedCounting:
      return displaced_fi(phi, probe, det, opts);
    case Scheme::Homodyne:
      return homodyne_fi(phi, probe, opts);
    case Scheme::Heterodyne:
      return heterodyne_fi(phi, probe, opts);
  }
  return 0.0;
}

FiResult fi_numeric(Scheme scheme, PhasePoint phi, const ProbeConfig& probe,
                    const DetectorModel& det, const FiOptions& opts) {
  FiResult result{0.0, phi.value(), false};
  if (scheme == Scheme::DisplacedCounting && phi.value() == 0.0) {
    const auto branches = poisson_branches(0.0, probe, det, opts.model);
    if (mixture_no_click(branches) == 1.0) {
      result.phi_evaluated = kLimitPhase;
      result.limit_substituted = true;
    }
  }
  result.value = fi_numeric_raw(scheme, result.phi_evaluated, probe, det, opts);
  return result;
}

}  // namespace dpc
