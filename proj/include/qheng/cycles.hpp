#pragma once

// Carnot and Otto cycle runners built from the stroke primitives, the
// positive-work conditions, the per-family closed-form work and the
// matched-conditions Carnot/Otto comparison.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qheng/processes.hpp"
#include "qheng/substance.hpp"

namespace qheng {

/// A working-substance description: a parametric family with its parameter at
/// scale 1, or explicit levels for Custom.
struct Substance {
  Family family = Family::TwoLevel;
  double param = 1.0;
  /// 0 picks the count adaptively from the coldest beta*scale in the cycle.
  std::size_t n_levels = 0;
  std::vector<double> custom_levels;

  static Substance two_level(double gap) { return {Family::TwoLevel, gap, 2, {}}; }
  static Substance oscillator(double omega, std::size_t n = 0) { return {Family::HarmonicOscillator, omega, n, {}}; }
  static Substance square_well(double gamma, std::size_t n = 0) { return {Family::InfiniteSquareWell, gamma, n, {}}; }
  static Substance custom(std::vector<double> levels) { return {Family::Custom, 1.0, 0, std::move(levels)}; }
};

struct CarnotSpec {
  Substance substance;
  double T_h = 2.0;
  double T_l = 1.0;
  /// Scale at the start (A) and end (B) of the hot isotherm. The hot isotherm
  /// must lower the gaps, so zeta_a > zeta_b.
  double zeta_a = 2.0;
  double zeta_b = 1.0;
};

struct OttoSpec {
  /// Describes the cold spectrum; the hot spectrum is alpha times it.
  Substance substance;
  double T_h = 4.0;
  double T_l = 1.0;
  double alpha = 2.0;
};

struct CycleReport {
  std::vector<StrokeRecord> strokes;
  double W_net = 0.0;
  /// Heat exchanged with the hot bath (signed, positive when absorbed).
  double Q_in = 0.0;
  /// Heat handed to the cold bath (signed, positive when released).
  double Q_out = 0.0;
  std::optional<double> efficiency;
  bool positive_work = false;

  /// Carnot only: Boltzmann form and bath match after both adiabats.
  std::optional<bool> reversibility_ok;
  /// Carnot only: 1 - (E_1 - E_0)(C) / (E_1 - E_0)(B).
  std::optional<double> gap_ratio_efficiency;

  std::optional<double> closed_form_W;
  std::optional<double> closed_form_gap;
  /// Square well only: the same work with the entropy/energy that follow
  /// from the Gaussian replacement of Z.
  std::optional<double> closed_form_W_gaussian;

  /// Otto with a two-level substance: effective temperatures at A, B, C, D.
  std::optional<std::array<double, 4>> effective_temperatures;

  double sum_dU = 0.0;
  /// Largest deviation between final and initial levels/populations.
  double closure_error = 0.0;
  double max_first_law_residual = 0.0;

  std::size_t n_levels = 0;
  bool truncation_capped = false;

  std::vector<std::string> notes;
};

inline constexpr double kPositiveWorkThreshold = 1e-12;

/// Builds the scale-1 spectrum. n_levels == 0 sizes infinite families so the
/// Boltzmann tail at min_beta_scale stays below kTruncationTail.
EnergySpectrum build_spectrum(const Substance& substance, double min_beta_scale,
                              TruncationReport* report = nullptr);

CycleReport run_carnot(const CarnotSpec& spec, std::size_t n_steps = kDefaultIsothermSteps);

/// Carnot loop with a caller-chosen adiabatic ratio. When lambda differs from
/// T_l/T_h the state after each adiabat is not thermal for the next bath; an
/// isochoric thermalization is inserted there and reversibility_ok is false.
CycleReport run_carnot_diagnostic(const CarnotSpec& spec, double lambda,
                                  std::size_t n_steps = kDefaultIsothermSteps);

CycleReport run_otto(const OttoSpec& spec);

/// Otto cycle evaluated on raw level lists shifted down by delta (both hot and
/// cold), without re-pinning the ground level. Strokes carry Q/W only.
CycleReport run_otto_shifted(const OttoSpec& spec, double delta);

/// Carnot: T_h > T_l. Otto: T_h > alpha * T_l.
bool positive_work_condition(const CarnotSpec& spec);
bool positive_work_condition(const OttoSpec& spec);

/// Table closed forms. Throws UnsupportedError for Custom substances.
double closed_form_work(const CarnotSpec& spec);
double closed_form_work(const OttoSpec& spec);

/// Square-well work from the Gaussian replacement of Z.
double closed_form_work_gaussian(const CarnotSpec& spec);
double closed_form_work_gaussian(const OttoSpec& spec);

struct ComparisonReport {
  double W_C = 0.0;
  double W_O = 0.0;
  /// W_C from quadrature of T ln(1/p - 1) over the population interval.
  double W_C_quadrature = 0.0;
  double eta_C = 0.0;
  double eta_O = 0.0;
  double delta_h = 0.0;
  double delta_l = 0.0;
  /// W_C > W_O and eta_O < eta_C (both strict); false for an empty interval.
  bool carnot_dominates = false;
  CycleReport carnot;
  CycleReport otto;
};

/// Two-level Carnot A-B'-C-D' and Otto A'-B'-C'-D' sharing B' and D'.
/// Requires 0 < p_l <= p_h < 0.5 and T_h > T_l.
ComparisonReport compare_carnot_otto(double T_h, double T_l, double p_h, double p_l,
                                     std::size_t n_steps = 256);

}  // namespace qheng
