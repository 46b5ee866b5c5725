#include "qheng/substance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qheng/errors.hpp"
#include "qheng/kernels.hpp"

namespace qheng {
namespace {

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(std::string(what) + " must be positive and finite, got " + std::to_string(value));
  }
}

double family_level(Family family, double unit, std::size_t n) {
  const double k = static_cast<double>(n);
  switch (family) {
    case Family::TwoLevel: return n == 0 ? 0.0 : unit;
    case Family::HarmonicOscillator: return unit * k;
    // n here is zero-based, so the quantum number is n + 1
    case Family::InfiniteSquareWell: return unit * ((k + 1.0) * (k + 1.0) - 1.0);
    case Family::Custom: break;
  }
  throw UnsupportedError("custom spectra have no generating rule");
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::TwoLevel: return "tls";
    case Family::HarmonicOscillator: return "ho";
    case Family::InfiniteSquareWell: return "isw";
    case Family::Custom: return "custom";
  }
  return "unknown";
}

std::optional<Family> parse_family(std::string_view name) {
  if (name == "tls" || name == "two-level" || name == "TwoLevel") return Family::TwoLevel;
  if (name == "ho" || name == "oscillator" || name == "HarmonicOscillator") return Family::HarmonicOscillator;
  if (name == "isw" || name == "square-well" || name == "InfiniteSquareWell") return Family::InfiniteSquareWell;
  if (name == "custom" || name == "Custom") return Family::Custom;
  return std::nullopt;
}

EnergySpectrum EnergySpectrum::custom(std::vector<double> levels) {
  if (levels.size() < 2) throw DomainError("a spectrum needs at least 2 levels");
  if (levels.front() != 0.0) throw DomainError("ground level must be exactly 0");
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (!std::isfinite(levels[i]) || levels[i] < levels[i - 1]) {
      throw DomainError("levels must be finite and nondecreasing (index " + std::to_string(i) + ")");
    }
  }
  return EnergySpectrum(std::move(levels), Family::Custom, 1.0, 1.0);
}

Populations Populations::from(std::vector<double> probs) {
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DomainError("population " + std::to_string(i) + " outside [0, 1]: " + std::to_string(p));
    }
    total += p;
  }
  if (probs.empty() || std::abs(total - 1.0) > 1e-12) {
    throw DomainError("populations must sum to 1, got " + std::to_string(total));
  }
  return Populations(std::move(probs));
}

Bath::Bath(double temperature) : temperature_(temperature), beta_(0.0) {
  require_positive(temperature, "bath temperature");
  beta_ = 1.0 / temperature;
  if (!std::isfinite(beta_)) throw DomainError("bath temperature too small to represent beta");
}

Bath Bath::from_beta(double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("beta must be finite and >= 0");
  if (beta == 0.0) return Bath(std::numeric_limits<double>::infinity(), 0.0);
  return Bath(1.0 / beta, beta);
}

EnergySpectrum generate_spectrum(Family family, double primary_param, std::size_t n_levels) {
  if (family == Family::Custom) throw UnsupportedError("use EnergySpectrum::custom for custom levels");
  require_positive(primary_param, "family parameter");
  if (n_levels < 2) throw DomainError("n_levels must be >= 2");
  if (family == Family::TwoLevel) n_levels = 2;

  std::vector<double> levels(n_levels);
  for (std::size_t n = 0; n < n_levels; ++n) levels[n] = family_level(family, primary_param, n);
  return EnergySpectrum(std::move(levels), family, primary_param, 1.0);
}

EnergySpectrum scale_spectrum(const EnergySpectrum& spectrum, double lambda) {
  require_positive(lambda, "scale factor");
  const double scale = spectrum.scale_ * lambda;
  std::vector<double> levels(spectrum.size());
  if (spectrum.family_ == Family::Custom) {
    kernels::scale(spectrum.levels_, lambda, levels);
  } else {
    // regenerate from the rule so repeated scaling does not accumulate rounding
    const double unit = spectrum.unit_ * scale;
    for (std::size_t n = 0; n < levels.size(); ++n) levels[n] = family_level(spectrum.family_, unit, n);
  }
  return EnergySpectrum(std::move(levels), spectrum.family_, spectrum.unit_, scale);
}

std::vector<double> shift_spectrum(const EnergySpectrum& spectrum, double delta) {
  std::vector<double> out(spectrum.levels().begin(), spectrum.levels().end());
  for (double& e : out) e -= delta;
  return out;
}

TruncationReport truncation_levels(Family family, double primary_param, double beta_scale) {
  require_positive(primary_param, "family parameter");
  if (!(beta_scale >= 0.0)) throw DomainError("beta * scale must be >= 0");
  TruncationReport report;
  if (family == Family::TwoLevel) {
    report.n_levels = 2;
    report.tail_weight = std::exp(-beta_scale * primary_param);
    return report;
  }
  if (family == Family::Custom) throw UnsupportedError("truncation applies to infinite families only");

  const double x = beta_scale * primary_param;
  const double target = -std::log(kTruncationTail);
  std::size_t n = kMaxLevels;
  if (x > 0.0) {
    const double estimate = family == Family::HarmonicOscillator ? target / x + 1.0
                                                                 : std::sqrt(target / x + 1.0);
    n = estimate >= static_cast<double>(kMaxLevels) ? kMaxLevels
                                                    : std::max<std::size_t>(2, static_cast<std::size_t>(estimate));
    while (n < kMaxLevels && std::exp(-x * family_level(family, 1.0, n - 1)) >= kTruncationTail) ++n;
  }
  report.n_levels = n;
  report.tail_weight = std::exp(-x * family_level(family, 1.0, n - 1));
  report.capped = report.tail_weight >= kTruncationTail;
  return report;
}

double partition_function_raw(std::span<const double> levels, double beta) {
  std::vector<double> w(levels.size());
  return kernels::boltzmann_weights(levels, beta, w);
}

double partition_function(const EnergySpectrum& spectrum, const Bath& bath) {
  return partition_function_raw(spectrum.levels(), bath.beta());
}

Populations thermal_populations_raw(std::span<const double> levels, double beta) {
  if (levels.empty()) throw DomainError("empty level list");
  std::vector<double> w(levels.size());
  double z = kernels::boltzmann_weights(levels, beta, w);
  if (!(z > 0.0) || !std::isfinite(z)) {
    // weights over/underflowed on raw levels; fall back to the ground-relative form
    const double e0 = *std::min_element(levels.begin(), levels.end());
    std::vector<double> rel(levels.begin(), levels.end());
    for (double& e : rel) e -= e0;
    z = kernels::boltzmann_weights(rel, beta, w);
  }
  kernels::scale(w, 1.0 / z, w);
  return Populations(std::move(w));
}

Populations thermal_populations(const EnergySpectrum& spectrum, const Bath& bath) {
  return thermal_populations_raw(spectrum.levels(), bath.beta());
}

double internal_energy_raw(std::span<const double> levels, const Populations& populations) {
  if (levels.size() != populations.size()) {
    throw DomainError("spectrum has " + std::to_string(levels.size()) + " levels but populations have " +
                      std::to_string(populations.size()));
  }
  return kernels::dot(levels, populations.probs());
}

double internal_energy(const EnergySpectrum& spectrum, const Populations& populations) {
  return internal_energy_raw(spectrum.levels(), populations);
}

double von_neumann_entropy(const Populations& populations) {
  return kernels::entropy_sum(populations.probs());
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binary entropy needs p in [0, 1]");
  double s = 0.0;
  if (p > 0.0) s -= p * std::log(p);
  if (p < 1.0) s -= (1.0 - p) * std::log1p(-p);
  return s;
}

double excited_population(double beta_gap) {
  if (beta_gap >= 0.0) {
    const double e = std::exp(-beta_gap);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(beta_gap));
}

double gap_for_population(double temperature, double p) {
  require_positive(temperature, "temperature");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("population must lie in (0, 1)");
  return temperature * (std::log1p(-p) - std::log(p));
}

double EffectiveTemperature::value() const {
  if (kind_ != Kind::Finite) {
    throw DomainError(kind_ == Kind::Unbounded ? "effective temperature is unbounded"
                                               : "effective temperature is undefined");
  }
  return value_;
}

EffectiveTemperature effective_temperature(double gap, double p_ground, double p_excited) {
  require_positive(gap, "gap");
  if (!(p_ground > 0.0 && p_ground < 1.0 && p_excited > 0.0 && p_excited < 1.0)) {
    return EffectiveTemperature::undefined();
  }
  if (p_ground == p_excited) return EffectiveTemperature::unbounded();
  return EffectiveTemperature::finite(gap / std::log(p_ground / p_excited));
}

TemperatureConsistency effective_temperature_consistent(const EnergySpectrum& spectrum,
                                                        const Populations& populations,
                                                        double rel_tol) {
  if (spectrum.size() != populations.size()) throw DomainError("spectrum/populations length mismatch");
  TemperatureConsistency out;
  out.pair_temperatures.reserve(spectrum.size() - 1);

  bool any_finite = false, any_unbounded = false, agree = true;
  double reference = 0.0;
  for (std::size_t n = 0; n + 1 < spectrum.size(); ++n) {
    const double gap = spectrum[n + 1] - spectrum[n];
    if (!(gap > 0.0)) throw DomainError("degenerate levels at index " + std::to_string(n));
    const double a = populations[n], b = populations[n + 1];
    if (a >= 1.0 || b >= 1.0) throw DomainError("population of 1 leaves no temperature to define");
    if (a == 0.0 || b == 0.0) {
      out.pair_temperatures.push_back(EffectiveTemperature::undefined());
      ++out.skipped_pairs;
      continue;
    }
    const EffectiveTemperature t = effective_temperature(gap, a, b);
    out.pair_temperatures.push_back(t);
    if (t.kind() == EffectiveTemperature::Kind::Unbounded) {
      any_unbounded = true;
    } else if (!any_finite) {
      any_finite = true;
      reference = t.value();
    } else {
      const double v = t.value();
      if (std::abs(v - reference) > rel_tol * std::max(std::abs(v), std::abs(reference))) agree = false;
    }
  }
  out.consistent = agree && !(any_finite && any_unbounded);
  if (out.consistent && any_finite) out.common_temperature = reference;
  return out;
}

double internal_energy_derivative(Family family, double zeta, const Bath& bath, double base_param) {
  require_positive(zeta, "zeta");
  require_positive(base_param, "family parameter");
  const double beta = bath.beta();
  switch (family) {
    case Family::TwoLevel: {
      const double x = beta * zeta * base_param;
      const double p = excited_population(x);
      return base_param * p * (1.0 - x * (1.0 - p));
    }
    case Family::HarmonicOscillator: {
      const double x = beta * zeta * base_param;
      if (x == 0.0) throw DomainError("oscillator derivative needs a finite temperature");
      const double em1 = std::expm1(x);
      return base_param * (1.0 - x) / em1 - base_param * x / (em1 * em1);
    }
    case Family::InfiniteSquareWell:
      if (beta == 0.0) throw DomainError("square-well derivative needs a finite temperature");
      return -1.0 / (beta * zeta);
    case Family::Custom: break;
  }
  throw UnsupportedError("no closed-form dU/dzeta for custom spectra");
}

double two_level_entropy(double beta_gap) {
  const double x = 0.5 * beta_gap;
  const double ax = std::abs(x);
  const double log_z = ax + std::log1p(std::exp(-2.0 * ax));
  return log_z - x * std::tanh(x);
}

double two_level_entropy_printed(double beta_gap) {
  const double x = 0.5 * beta_gap;
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) + x * std::tanh(x);
}

double oscillator_entropy(double beta_omega) {
  require_positive(beta_omega, "beta * omega");
  return -std::log1p(-std::exp(-beta_omega)) + beta_omega / std::expm1(beta_omega);
}

double square_well_entropy_printed(double beta_gamma) {
  require_positive(beta_gamma, "beta * gamma");
  return 0.5 * std::pow(beta_gamma, 0.75) + std::log(0.5 * std::sqrt(std::numbers::pi / beta_gamma));
}

double square_well_entropy_gaussian(double beta_gamma) {
  require_positive(beta_gamma, "beta * gamma");
  return 0.5 + std::log(0.5 * std::sqrt(std::numbers::pi / beta_gamma));
}

}  // namespace qheng
