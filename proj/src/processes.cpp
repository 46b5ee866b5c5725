#include "qheng/processes.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "qheng/errors.hpp"

namespace qheng {
namespace {

bool is_thermal(const StateSnapshot& s, double tol) {
  if (!s.bath) return false;
  const Populations ref = thermal_populations(s.spectrum, *s.bath);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    if (std::abs(ref[i] - s.populations[i]) > tol) return false;
  }
  return true;
}

}  // namespace

StateSnapshot StateSnapshot::thermal(EnergySpectrum spectrum, const Bath& bath) {
  Populations p = thermal_populations(spectrum, bath);
  return StateSnapshot{std::move(spectrum), std::move(p), bath, true};
}

std::string_view to_string(StrokeKind kind) {
  switch (kind) {
    case StrokeKind::Isothermal: return "isothermal";
    case StrokeKind::Isochoric: return "isochoric";
    case StrokeKind::Adiabatic: return "adiabatic";
  }
  return "unknown";
}

StrokeResult isothermal_stroke(const StateSnapshot& snapshot, double zeta_end, std::size_t n_steps) {
  if (!snapshot.bath) throw ContractViolation("isothermal stroke needs a snapshot attached to a bath");
  if (!snapshot.equilibrated && !is_thermal(snapshot, 1e-10)) {
    throw ContractViolation("isothermal stroke needs a snapshot equilibrated with its bath");
  }
  if (!(zeta_end > 0.0) || !std::isfinite(zeta_end)) throw DomainError("zeta_end must be positive");
  if (n_steps == 0) throw DomainError("n_steps must be >= 1");
  const Bath bath = *snapshot.bath;
  if (bath.beta() == 0.0) throw DomainError("isothermal stroke needs a finite bath temperature");

  const double zeta0 = snapshot.spectrum.scale();
  StrokeRecord rec;
  rec.kind = StrokeKind::Isothermal;
  if (zeta_end == zeta0) {
    rec.Q_quantum = 0.0;
    rec.quadrature_error = 0.0;
    return {rec, snapshot};
  }

  const double total_ratio = zeta_end / zeta0;
  const double log_ratio = std::log(total_ratio);
  const std::size_t n_levels = snapshot.spectrum.size();

  std::vector<double> e_prev(snapshot.spectrum.levels().begin(), snapshot.spectrum.levels().end());
  std::vector<double> p_prev(snapshot.populations.probs().begin(), snapshot.populations.probs().end());
  double q_trap = 0.0;

  StateSnapshot current = snapshot;
  for (std::size_t k = 1; k <= n_steps; ++k) {
    const double ratio =
        k == n_steps ? total_ratio : std::exp(log_ratio * static_cast<double>(k) / static_cast<double>(n_steps));
    EnergySpectrum spec = scale_spectrum(snapshot.spectrum, ratio);
    Populations pop = thermal_populations(spec, bath);
    double step = 0.0;
    for (std::size_t n = 0; n < n_levels; ++n) {
      step += 0.5 * (e_prev[n] + spec[n]) * (pop[n] - p_prev[n]);
      e_prev[n] = spec[n];
      p_prev[n] = pop[n];
    }
    q_trap += step;
    if (k == n_steps) current = StateSnapshot{std::move(spec), std::move(pop), bath, true};
  }

  const double s0 = von_neumann_entropy(snapshot.populations);
  const double s1 = von_neumann_entropy(current.populations);
  const double u0 = internal_energy(snapshot.spectrum, snapshot.populations);
  const double u1 = internal_energy(current.spectrum, current.populations);

  rec.dS = s1 - s0;
  rec.Q = bath.temperature() * rec.dS;
  rec.dU = u1 - u0;
  rec.W_by = rec.Q - rec.dU;
  rec.first_law_residual = rec.dU - rec.Q + rec.W_by;
  rec.Q_quantum = q_trap;
  rec.quadrature_error = std::abs(rec.Q - q_trap);
  return {rec, std::move(current)};
}

StrokeResult isochoric_stroke(const StateSnapshot& snapshot, const Bath& target_bath) {
  if (snapshot.populations.size() != snapshot.spectrum.size()) {
    throw DomainError("populations do not match the spectrum");
  }
  Populations final_pop = thermal_populations(snapshot.spectrum, target_bath);

  StrokeRecord rec;
  rec.kind = StrokeKind::Isochoric;
  double q = 0.0;
  for (std::size_t n = 0; n < final_pop.size(); ++n) {
    q += snapshot.spectrum[n] * (final_pop[n] - snapshot.populations[n]);
  }
  rec.Q = q;
  rec.W_by = 0.0;
  rec.dU = internal_energy(snapshot.spectrum, final_pop) - internal_energy(snapshot.spectrum, snapshot.populations);
  rec.dS = von_neumann_entropy(final_pop) - von_neumann_entropy(snapshot.populations);
  rec.first_law_residual = rec.dU - rec.Q + rec.W_by;

  return {rec, StateSnapshot{snapshot.spectrum, std::move(final_pop), target_bath, true}};
}

StrokeResult adiabatic_stroke(const StateSnapshot& snapshot, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("adiabatic scale factor must be positive, got " + std::to_string(lambda));
  }
  EnergySpectrum spec = scale_spectrum(snapshot.spectrum, lambda);
  const double u0 = internal_energy(snapshot.spectrum, snapshot.populations);
  const double u1 = internal_energy(spec, snapshot.populations);

  StrokeRecord rec;
  rec.kind = StrokeKind::Adiabatic;
  rec.Q = 0.0;
  rec.dS = 0.0;
  rec.W_by = (1.0 - lambda) * u0;
  rec.dU = u1 - u0;
  rec.first_law_residual = rec.dU - rec.Q + rec.W_by;

  return {rec, StateSnapshot{std::move(spec), snapshot.populations, std::nullopt, false}};
}

AdiabatTemperature effective_temperature_after_adiabat(const StateSnapshot& snapshot, double lambda,
                                                       double rel_tol) {
  const StrokeResult r = adiabatic_stroke(snapshot, lambda);
  AdiabatTemperature out;
  out.details = effective_temperature_consistent(r.state.spectrum, r.state.populations, rel_tol);
  out.consistent = out.details.consistent;
  if (out.consistent) out.temperature = out.details.common_temperature;
  return out;
}

}  // namespace qheng
