#pragma once

// Working-substance models: discrete spectra, baths, thermal states and the
// equilibrium quantities built on them.
//
// Units: k_B = 1 and hbar = 1. Every spectrum keeps its ground level pinned at
// exactly zero; observables that matter for engines are invariant under a
// uniform shift, and the raw-level overloads below exist so that invariance
// can be checked directly.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace qheng {

enum class Family { TwoLevel, HarmonicOscillator, InfiniteSquareWell, Custom };

std::string_view to_string(Family family);

/// Accepts the short CLI names (tls, ho, isw, custom) and the full names.
std::optional<Family> parse_family(std::string_view name);

/// Ordered eigen-energies with E_0 == 0.
///
/// For the parametric families the levels always follow the generating rule
/// at the stored scale zeta:
///   TwoLevel            {0, zeta*Delta}
///   HarmonicOscillator  {0, zeta*omega, 2*zeta*omega, ...}  (zero-point dropped)
///   InfiniteSquareWell  {zeta*gamma*(n^2 - 1)}, n = 1, 2, ...  (n = 1 shifted to 0)
class EnergySpectrum {
 public:
  /// Validates: at least two levels, levels[0] == 0, nondecreasing.
  static EnergySpectrum custom(std::vector<double> levels);

  std::span<const double> levels() const { return levels_; }
  std::size_t size() const { return levels_.size(); }
  double operator[](std::size_t i) const { return levels_[i]; }

  Family family() const { return family_; }
  /// Dimensionless family scale zeta; 1 for freshly generated spectra.
  double scale() const { return scale_; }
  /// The family parameter (Delta, omega or gamma) at scale 1.
  double unit() const { return unit_; }
  /// The family parameter at the current scale.
  double scaled_unit() const { return unit_ * scale_; }

  bool operator==(const EnergySpectrum&) const = default;

 private:
  EnergySpectrum(std::vector<double> levels, Family family, double unit, double scale)
      : levels_(std::move(levels)), family_(family), unit_(unit), scale_(scale) {}

  std::vector<double> levels_;
  Family family_ = Family::Custom;
  double unit_ = 1.0;
  double scale_ = 1.0;

  friend EnergySpectrum generate_spectrum(Family, double, std::size_t);
  friend EnergySpectrum scale_spectrum(const EnergySpectrum&, double);
};

/// Probability vector over spectrum levels.
class Populations {
 public:
  /// Validates each entry in [0, 1] and the sum within 1e-12 of one.
  static Populations from(std::vector<double> probs);

  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }

  bool operator==(const Populations&) const = default;

 private:
  explicit Populations(std::vector<double> probs) : probs_(std::move(probs)) {}
  std::vector<double> probs_;

  friend Populations thermal_populations_raw(std::span<const double>, double);
};

/// Heat reservoir. Temperatures are strictly positive; beta == 0 (infinite
/// temperature) is representable through from_beta(0).
class Bath {
 public:
  explicit Bath(double temperature);
  static Bath from_beta(double beta);

  double temperature() const { return temperature_; }
  double beta() const { return beta_; }

  bool operator==(const Bath&) const = default;

 private:
  Bath(double temperature, double beta) : temperature_(temperature), beta_(beta) {}
  double temperature_;
  double beta_;
};

// --- spectra ----------------------------------------------------------------

/// TwoLevel ignores n_levels other than requiring it to be >= 2.
EnergySpectrum generate_spectrum(Family family, double primary_param, std::size_t n_levels);

/// Multiplies every level by lambda > 0 and updates the scale. For the square
/// well this is gamma -> lambda * gamma, i.e. L -> L / sqrt(lambda).
EnergySpectrum scale_spectrum(const EnergySpectrum& spectrum, double lambda);

/// Raw levels E_n - delta. Not a valid spectrum unless re-pinned.
std::vector<double> shift_spectrum(const EnergySpectrum& spectrum, double delta);

inline constexpr double kTruncationTail = 1e-14;
inline constexpr std::size_t kMaxLevels = 10'000;

struct TruncationReport {
  std::size_t n_levels = 0;
  bool capped = false;
  /// exp(-beta * E_last) at the requested beta*scale product.
  double tail_weight = 0.0;
};

/// Smallest level count with exp(-beta * E_last) < kTruncationTail, where
/// beta_scale is the smallest beta*zeta the spectrum will be used at.
/// Capped at kMaxLevels.
TruncationReport truncation_levels(Family family, double primary_param, double beta_scale);

// --- equilibrium ------------------------------------------------------------

double partition_function(const EnergySpectrum& spectrum, const Bath& bath);
double partition_function_raw(std::span<const double> levels, double beta);

Populations thermal_populations(const EnergySpectrum& spectrum, const Bath& bath);
/// Boltzmann populations evaluated directly on arbitrary (possibly shifted)
/// levels, without re-pinning the ground state.
Populations thermal_populations_raw(std::span<const double> levels, double beta);

/// U = sum P_n E_n.
double internal_energy(const EnergySpectrum& spectrum, const Populations& populations);
double internal_energy_raw(std::span<const double> levels, const Populations& populations);

/// S = -sum P_n ln P_n.
double von_neumann_entropy(const Populations& populations);

/// -p ln p - (1 - p) ln(1 - p), with 0 ln 0 = 0.
double binary_entropy(double p);

/// Thermal excited-state population of a two-level system, 1 / (1 + e^x)
/// with x = beta * gap.
double excited_population(double beta_gap);

/// Inverse of excited_population at fixed temperature: the gap that yields
/// excited population p at temperature T, T ln(1/p - 1).
double gap_for_population(double temperature, double p);

// --- effective temperatures -------------------------------------------------

class EffectiveTemperature {
 public:
  enum class Kind {
    Finite,
    /// Equal populations: infinite temperature.
    Unbounded,
    /// A population at 0 or 1; no temperature reproduces it.
    Undefined,
  };

  static EffectiveTemperature finite(double value) { return {Kind::Finite, value}; }
  static EffectiveTemperature unbounded() { return {Kind::Unbounded, 0.0}; }
  static EffectiveTemperature undefined() { return {Kind::Undefined, 0.0}; }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  /// Throws DomainError unless finite.
  double value() const;

 private:
  EffectiveTemperature(Kind kind, double value) : kind_(kind), value_(value) {}
  Kind kind_;
  double value_;
};

/// T_eff = gap / ln(p_ground / p_excited). Negative under inversion.
EffectiveTemperature effective_temperature(double gap, double p_ground, double p_excited);

struct TemperatureConsistency {
  bool consistent = false;
  /// One entry per adjacent level pair (n, n+1).
  std::vector<EffectiveTemperature> pair_temperatures;
  /// Pairs skipped because a population underflowed to zero.
  std::size_t skipped_pairs = 0;
  /// Common temperature when consistent and finite.
  std::optional<double> common_temperature;
};

/// Pairwise effective temperatures of adjacent levels; consistent iff all of
/// them agree within the relative tolerance.
/// Throws DomainError on degenerate adjacent levels or on a population
/// outside [0, 1).
TemperatureConsistency effective_temperature_consistent(const EnergySpectrum& spectrum,
                                                        const Populations& populations,
                                                        double rel_tol);

// --- closed forms -----------------------------------------------------------

/// dU/dzeta for an isothermal rescaling E_n -> zeta E_n at fixed bath.
///   TwoLevel:            (E e^{-x} / Z) (1 - x / Z),      x = beta zeta Delta
///   HarmonicOscillator:  omega (1 - x)/(e^x - 1) - omega x/(e^x - 1)^2
///   InfiniteSquareWell:  -1 / (beta zeta)   (Gaussian replacement of Z)
/// Throws UnsupportedError for Custom.
double internal_energy_derivative(Family family, double zeta, const Bath& bath, double base_param);

/// Two-level entropy written with the spin-1/2 mapping Delta = 2MB:
/// ln Z - x tanh x with x = beta Delta / 2 and Z = 2 cosh x.
double two_level_entropy(double beta_gap);

/// The same expression with the sign of the tanh term flipped, as it appears
/// in the closed-form table. Kept only so reports can show the difference.
double two_level_entropy_printed(double beta_gap);

/// Oscillator entropy with the zero-point energy dropped:
/// -ln(1 - e^{-x}) + x / (e^x - 1), x = beta omega.
double oscillator_entropy(double beta_omega);

/// Square-well entropy exactly as printed in the closed-form table:
/// (1/2)(beta gamma)^{3/4} + ln((1/2) sqrt(pi / (beta gamma))).
double square_well_entropy_printed(double beta_gamma);

/// Square-well entropy consistent with the Gaussian replacement of Z:
/// 1/2 + ln((1/2) sqrt(pi / (beta gamma))).
double square_well_entropy_gaussian(double beta_gamma);

}  // namespace qheng
