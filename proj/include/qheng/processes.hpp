#pragma once

// The three stroke primitives. Each returns the bookkeeping record and the
// state the substance is left in.
//
// Sign convention: Q > 0 is heat absorbed by the substance, W_by > 0 is work
// done by the substance on the outside, so dU = Q - W_by.

#include <cstddef>
#include <optional>
#include <string_view>

#include "qheng/substance.hpp"

namespace qheng {

struct StateSnapshot {
  EnergySpectrum spectrum;
  Populations populations;
  std::optional<Bath> bath;
  /// True when populations are thermal for `bath` on `spectrum`.
  bool equilibrated = false;

  /// Thermal state of `spectrum` in contact with `bath`.
  static StateSnapshot thermal(EnergySpectrum spectrum, const Bath& bath);
};

enum class StrokeKind { Isothermal, Isochoric, Adiabatic };

std::string_view to_string(StrokeKind kind);

struct StrokeRecord {
  StrokeKind kind = StrokeKind::Isochoric;
  double dU = 0.0;
  double Q = 0.0;
  double W_by = 0.0;
  double dS = 0.0;
  double first_law_residual = 0.0;

  // isothermal only: heat from the discretized sum_n E_n dP_n and its
  // distance from the entropy-endpoint value stored in Q
  std::optional<double> Q_quantum;
  std::optional<double> quadrature_error;
};

struct StrokeResult {
  StrokeRecord record;
  StateSnapshot state;
};

inline constexpr std::size_t kDefaultIsothermSteps = 4096;

/// Quasi-static rescaling of the spectrum from its current scale to zeta_end
/// while the substance stays thermal with its bath.
///
/// Throws ContractViolation when the snapshot has no bath or is not
/// equilibrated with it, DomainError for zeta_end <= 0, n_steps == 0 or an
/// infinite-temperature bath.
StrokeResult isothermal_stroke(const StateSnapshot& snapshot, double zeta_end,
                               std::size_t n_steps = kDefaultIsothermSteps);

/// Fixed spectrum, populations relax to thermal at target_bath. The input
/// populations may be arbitrary.
StrokeResult isochoric_stroke(const StateSnapshot& snapshot, const Bath& target_bath);

/// Spectrum scaled by lambda with populations frozen. The result is detached
/// from any bath.
StrokeResult adiabatic_stroke(const StateSnapshot& snapshot, double lambda);

struct AdiabatTemperature {
  bool consistent = false;
  std::optional<double> temperature;
  TemperatureConsistency details;
};

inline constexpr double kReversibilityTolerance = 1e-9;

/// Runs the adiabat and asks whether the frozen populations still describe a
/// Boltzmann state on the scaled spectrum. For a thermal input at T and a
/// uniform scaling this yields lambda * T.
AdiabatTemperature effective_temperature_after_adiabat(const StateSnapshot& snapshot, double lambda,
                                                       double rel_tol = kReversibilityTolerance);

}  // namespace qheng
