#include "qheng/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qheng/errors.hpp"
#include "qheng/quadrature.hpp"

namespace qheng {
namespace {

void require_temperature(double t, const char* name) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError(std::string(name) + " must be positive and finite");
}

void require_scale(double z, const char* name) {
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError(std::string(name) + " must be positive and finite");
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void finish(CycleReport& r) {
  r.W_net = 0.0;
  r.sum_dU = 0.0;
  r.max_first_law_residual = 0.0;
  for (const StrokeRecord& s : r.strokes) {
    r.W_net += s.W_by;
    r.sum_dU += s.dU;
    r.max_first_law_residual = std::max(r.max_first_law_residual, std::abs(s.first_law_residual));
  }
  r.positive_work = r.W_net > kPositiveWorkThreshold;
  if (r.Q_in > 0.0) r.efficiency = 1.0 - r.Q_out / r.Q_in;
}

// Checks that an adiabat left a Boltzmann state at the expected temperature.
bool reversible_at(const StateSnapshot& s, double expected_t, std::string* why) {
  TemperatureConsistency c;
  try {
    c = effective_temperature_consistent(s.spectrum, s.populations, kReversibilityTolerance);
  } catch (const DomainError& e) {
    if (why) *why = e.what();
    return false;
  }
  if (!c.consistent || !c.common_temperature) {
    if (why) *why = "populations are not of Boltzmann form";
    return false;
  }
  const double t = *c.common_temperature;
  if (std::abs(t - expected_t) > kReversibilityTolerance * expected_t) {
    if (why) {
      std::ostringstream os;
      os.precision(17);
      os << "effective temperature " << t << " does not match bath " << expected_t;
      *why = os.str();
    }
    return false;
  }
  return true;
}

CycleReport carnot_loop(const CarnotSpec& spec, double lambda, std::size_t n_steps) {
  require_temperature(spec.T_h, "T_h");
  require_temperature(spec.T_l, "T_l");
  require_scale(spec.zeta_a, "zeta_a");
  require_scale(spec.zeta_b, "zeta_b");
  require_scale(lambda, "lambda");
  if (spec.zeta_a == spec.zeta_b) throw DomainError("degenerate Carnot cycle: zeta_a == zeta_b");
  if (spec.zeta_a < spec.zeta_b) {
    throw DomainError("the hot isotherm must lower the gaps (zeta_a > zeta_b)");
  }

  const Bath hot(spec.T_h), cold(spec.T_l);
  const double zmin = std::min(spec.zeta_a, spec.zeta_b);
  TruncationReport trunc;
  const EnergySpectrum base =
      build_spectrum(spec.substance, std::min(zmin / spec.T_h, zmin * lambda / spec.T_l), &trunc);

  CycleReport r;
  r.n_levels = base.size();
  r.truncation_capped = trunc.capped;
  if (trunc.capped) r.notes.push_back("level count capped; Boltzmann tail above target");

  const StateSnapshot a = StateSnapshot::thermal(scale_spectrum(base, spec.zeta_a), hot);
  bool reversible = true;
  std::string why;

  // A -> B
  StrokeResult s1 = isothermal_stroke(a, spec.zeta_b, n_steps);
  r.strokes.push_back(s1.record);
  r.Q_in += s1.record.Q;
  const StateSnapshot b = s1.state;

  // B -> C
  StrokeResult s2 = adiabatic_stroke(b, lambda);
  r.strokes.push_back(s2.record);
  StateSnapshot c = s2.state;
  if (reversible_at(c, spec.T_l, &why)) {
    c.bath = cold;
    c.equilibrated = true;
  } else {
    reversible = false;
    r.notes.push_back("after hot->cold adiabat: " + why);
    StrokeResult fix = isochoric_stroke(c, cold);
    r.strokes.push_back(fix.record);
    r.Q_out -= fix.record.Q;
    c = fix.state;
  }
  r.gap_ratio_efficiency = 1.0 - (c.spectrum[1] - c.spectrum[0]) / (b.spectrum[1] - b.spectrum[0]);

  // C -> D
  StrokeResult s3 = isothermal_stroke(c, spec.zeta_a * lambda, n_steps);
  r.strokes.push_back(s3.record);
  r.Q_out -= s3.record.Q;

  // D -> A
  StrokeResult s4 = adiabatic_stroke(s3.state, 1.0 / lambda);
  r.strokes.push_back(s4.record);
  StateSnapshot end = s4.state;
  if (!reversible_at(end, spec.T_h, &why)) {
    reversible = false;
    r.notes.push_back("after cold->hot adiabat: " + why);
    StrokeResult fix = isochoric_stroke(end, hot);
    r.strokes.push_back(fix.record);
    r.Q_in += fix.record.Q;
    end = fix.state;
  }

  r.closure_error = std::max(max_abs_diff(end.spectrum.levels(), a.spectrum.levels()),
                             max_abs_diff(end.populations.probs(), a.populations.probs()));
  r.reversibility_ok = reversible;
  finish(r);

  if (spec.substance.family != Family::Custom) {
    r.closed_form_W = closed_form_work(spec);
    r.closed_form_gap = std::abs(*r.closed_form_W - r.W_net);
    if (spec.substance.family == Family::InfiniteSquareWell) {
      r.closed_form_W_gaussian = closed_form_work_gaussian(spec);
    }
  }
  return r;
}

void otto_closed_forms(const OttoSpec& spec, CycleReport& r) {
  if (spec.substance.family == Family::Custom) return;
  r.closed_form_W = closed_form_work(spec);
  r.closed_form_gap = std::abs(*r.closed_form_W - r.W_net);
  if (spec.substance.family == Family::InfiniteSquareWell) r.closed_form_W_gaussian = closed_form_work_gaussian(spec);
}

void validate(const OttoSpec& spec) {
  require_temperature(spec.T_h, "T_h");
  require_temperature(spec.T_l, "T_l");
  require_scale(spec.alpha, "alpha");
}

double otto_min_beta_scale(const OttoSpec& spec) { return std::min(spec.alpha / spec.T_h, 1.0 / spec.T_l); }

}  // namespace

EnergySpectrum build_spectrum(const Substance& substance, double min_beta_scale, TruncationReport* report) {
  if (substance.family == Family::Custom) {
    EnergySpectrum s = EnergySpectrum::custom(substance.custom_levels);
    if (report) *report = TruncationReport{s.size(), false, 0.0};
    return s;
  }
  std::size_t n = substance.n_levels;
  TruncationReport t;
  if (substance.family == Family::TwoLevel) {
    n = 2;
    t.n_levels = 2;
  } else if (n == 0) {
    t = truncation_levels(substance.family, substance.param, min_beta_scale);
    n = t.n_levels;
  } else {
    t.n_levels = n;
  }
  if (report) *report = t;
  return generate_spectrum(substance.family, substance.param, n);
}

CycleReport run_carnot(const CarnotSpec& spec, std::size_t n_steps) {
  require_temperature(spec.T_h, "T_h");
  require_temperature(spec.T_l, "T_l");
  return carnot_loop(spec, spec.T_l / spec.T_h, n_steps);
}

CycleReport run_carnot_diagnostic(const CarnotSpec& spec, double lambda, std::size_t n_steps) {
  return carnot_loop(spec, lambda, n_steps);
}

CycleReport run_otto(const OttoSpec& spec) {
  validate(spec);
  const Bath hot(spec.T_h), cold(spec.T_l);
  TruncationReport trunc;
  const EnergySpectrum cold_spec = build_spectrum(spec.substance, otto_min_beta_scale(spec), &trunc);
  const EnergySpectrum hot_spec = scale_spectrum(cold_spec, spec.alpha);

  CycleReport r;
  r.n_levels = cold_spec.size();
  r.truncation_capped = trunc.capped;
  if (trunc.capped) r.notes.push_back("level count capped; Boltzmann tail above target");

  // A: hot spectrum carrying the populations the cold isochore left behind
  const StateSnapshot a{hot_spec, thermal_populations(cold_spec, cold), std::nullopt, false};

  StrokeResult s1 = isochoric_stroke(a, hot);
  StrokeResult s2 = adiabatic_stroke(s1.state, 1.0 / spec.alpha);
  StrokeResult s3 = isochoric_stroke(s2.state, cold);
  StrokeResult s4 = adiabatic_stroke(s3.state, spec.alpha);
  for (const StrokeResult* s : {&s1, &s2, &s3, &s4}) r.strokes.push_back(s->record);

  r.Q_in = s1.record.Q;
  r.Q_out = -s3.record.Q;
  r.closure_error = std::max(max_abs_diff(s4.state.spectrum.levels(), a.spectrum.levels()),
                             max_abs_diff(s4.state.populations.probs(), a.populations.probs()));
  finish(r);
  otto_closed_forms(spec, r);

  if (spec.substance.family == Family::TwoLevel) {
    const StateSnapshot* states[4] = {&a, &s1.state, &s2.state, &s3.state};
    std::array<double, 4> t{};
    bool ok = true;
    for (int i = 0; i < 4 && ok; ++i) {
      const StateSnapshot& s = *states[i];
      const EffectiveTemperature e = effective_temperature(s.spectrum[1], s.populations[0], s.populations[1]);
      if (e.is_finite()) t[i] = e.value();
      else ok = false;
    }
    if (ok) r.effective_temperatures = t;
    else r.notes.push_back("effective temperature undefined at some cycle point");
  }
  return r;
}

CycleReport run_otto_shifted(const OttoSpec& spec, double delta) {
  validate(spec);
  const Bath hot(spec.T_h), cold(spec.T_l);
  const EnergySpectrum cold_spec = build_spectrum(spec.substance, otto_min_beta_scale(spec));
  const EnergySpectrum hot_spec = scale_spectrum(cold_spec, spec.alpha);
  const std::vector<double> el = shift_spectrum(cold_spec, delta);
  const std::vector<double> eh = shift_spectrum(hot_spec, delta);

  const Populations pa = thermal_populations_raw(el, cold.beta());
  const Populations pb = thermal_populations_raw(eh, hot.beta());

  CycleReport r;
  r.n_levels = el.size();
  StrokeRecord heat_hot, expand, heat_cold, compress;
  heat_hot.kind = heat_cold.kind = StrokeKind::Isochoric;
  expand.kind = compress.kind = StrokeKind::Adiabatic;
  for (std::size_t n = 0; n < el.size(); ++n) {
    heat_hot.Q += eh[n] * (pb[n] - pa[n]);
    heat_cold.Q += el[n] * (pa[n] - pb[n]);
    expand.W_by -= pb[n] * (el[n] - eh[n]);
    compress.W_by -= pa[n] * (eh[n] - el[n]);
  }
  heat_hot.dU = internal_energy_raw(eh, pb) - internal_energy_raw(eh, pa);
  heat_cold.dU = internal_energy_raw(el, pa) - internal_energy_raw(el, pb);
  expand.dU = -expand.W_by;
  compress.dU = -compress.W_by;
  for (StrokeRecord* s : {&heat_hot, &expand, &heat_cold, &compress}) {
    s->first_law_residual = s->dU - s->Q + s->W_by;
    r.strokes.push_back(*s);
  }
  r.Q_in = heat_hot.Q;
  r.Q_out = -heat_cold.Q;
  finish(r);
  return r;
}

bool positive_work_condition(const CarnotSpec& spec) { return spec.T_h > spec.T_l; }

bool positive_work_condition(const OttoSpec& spec) { return spec.T_h > spec.alpha * spec.T_l; }

double closed_form_work(const CarnotSpec& spec) {
  const double bh = 1.0 / spec.T_h;
  const double xa = bh * spec.substance.param * spec.zeta_a;
  const double xb = bh * spec.substance.param * spec.zeta_b;
  const double dt = spec.T_h - spec.T_l;
  switch (spec.substance.family) {
    case Family::TwoLevel: return dt * (two_level_entropy(xb) - two_level_entropy(xa));
    case Family::HarmonicOscillator: return dt * (oscillator_entropy(xb) - oscillator_entropy(xa));
    case Family::InfiniteSquareWell: return dt * (square_well_entropy_printed(xb) - square_well_entropy_printed(xa));
    case Family::Custom: break;
  }
  throw UnsupportedError("no closed-form work for custom spectra");
}

double closed_form_work(const OttoSpec& spec) {
  const double el = spec.substance.param;
  const double eh = spec.alpha * el;
  const double xh = eh / spec.T_h, xl = el / spec.T_l;
  switch (spec.substance.family) {
    case Family::TwoLevel: return (eh - el) * (excited_population(xh) - excited_population(xl));
    case Family::HarmonicOscillator: return (eh - el) * (1.0 / std::expm1(xh) - 1.0 / std::expm1(xl));
    case Family::InfiniteSquareWell:
      return std::numbers::pi / 8.0 * (eh - el) * (1.0 / (xh * xh) - 1.0 / (xl * xl));
    case Family::Custom: break;
  }
  throw UnsupportedError("no closed-form work for custom spectra");
}

double closed_form_work_gaussian(const CarnotSpec& spec) {
  if (spec.substance.family != Family::InfiniteSquareWell) throw UnsupportedError("Gaussian form is square-well only");
  return (spec.T_h - spec.T_l) * 0.5 * std::log(spec.zeta_a / spec.zeta_b);
}

double closed_form_work_gaussian(const OttoSpec& spec) {
  if (spec.substance.family != Family::InfiniteSquareWell) throw UnsupportedError("Gaussian form is square-well only");
  const double el = spec.substance.param;
  const double eh = spec.alpha * el;
  return (eh - el) * (0.5 * spec.T_h / eh - 0.5 * spec.T_l / el);
}

ComparisonReport compare_carnot_otto(double T_h, double T_l, double p_h, double p_l, std::size_t n_steps) {
  require_temperature(T_h, "T_h");
  require_temperature(T_l, "T_l");
  if (!(T_h > T_l)) throw DomainError("comparison needs T_h > T_l");
  if (!(p_l > 0.0 && p_l <= p_h && p_h < 0.5)) throw DomainError("comparison needs 0 < p_l <= p_h < 0.5");

  ComparisonReport out;
  out.delta_h = gap_for_population(T_h, p_h);
  out.delta_l = gap_for_population(T_l, p_l);
  out.eta_C = 1.0 - T_l / T_h;
  if (p_h == p_l) {
    out.eta_O = 1.0 - out.delta_l / out.delta_h;
    return out;
  }

  CarnotSpec cs{Substance::two_level(1.0), T_h, T_l, gap_for_population(T_h, p_l), out.delta_h};
  out.carnot = run_carnot(cs, n_steps);
  OttoSpec os{Substance::two_level(out.delta_l), T_h, T_l, out.delta_h / out.delta_l};
  out.otto = run_otto(os);

  out.W_C = out.carnot.W_net;
  out.W_O = out.otto.W_net;
  out.eta_C = out.carnot.efficiency.value_or(out.eta_C);
  out.eta_O = out.otto.efficiency.value_or(0.0);
  const QuadratureResult q = adaptive_simpson(
      [](double p) { return std::log1p(-p) - std::log(p); }, p_l, p_h, 1e-13);
  out.W_C_quadrature = (T_h - T_l) * q.value;
  out.carnot_dominates = out.W_C > out.W_O && out.eta_O < out.eta_C;
  return out;
}

}  // namespace qheng
