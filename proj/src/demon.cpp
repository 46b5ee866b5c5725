#include "qheng/demon.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "qheng/errors.hpp"

namespace qheng {
namespace {

JointState permute(const JointState& rho, std::size_t i, std::size_t j) {
  JointState::Entries u{};
  for (std::size_t k = 0; k < 4; ++k) u[k * 4 + k] = 1.0;
  u[i * 4 + i] = u[j * 4 + j] = 0.0;
  u[i * 4 + j] = u[j * 4 + i] = 1.0;
  return rho.conjugate(u);
}

std::array<double, 2> qubit_h(double gap) { return {0.0, gap}; }

}  // namespace

QubitSpec::QubitSpec(double gap_, const Bath& bath_) : gap(gap_), bath(bath_) {
  if (!(gap_ > 0.0) || !std::isfinite(gap_)) throw DomainError("qubit gap must be positive");
}

QubitState thermal_qubit(const QubitSpec& q) {
  const double p = excited_population(q.bath.beta() * q.gap);
  return QubitState::diagonal({1.0 - p, p});
}

QubitState rotate(const QubitState& rho, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return rho.conjugate({c, s, -s, c});
}

EffectiveTemperature virtual_temperature(double P0, double P1, double theta, double gap) {
  if (!(gap > 0.0)) throw DomainError("gap must be positive");
  if (!(P0 > 0.0 && P0 < 1.0 && P1 > 0.0 && P1 < 1.0) || std::abs(P0 + P1 - 1.0) > 1e-9) {
    throw DomainError("virtual temperature needs P0, P1 in (0, 1) with P0 + P1 = 1");
  }
  const double c2 = std::cos(theta) * std::cos(theta), s2 = std::sin(theta) * std::sin(theta);
  const double ground = P1 * s2 + P0 * c2;
  const double excited = P1 * c2 + P0 * s2;
  if (std::abs(ground - excited) <= 1e-12 * (ground + excited)) return EffectiveTemperature::unbounded();
  return EffectiveTemperature::finite(gap / std::log(ground / excited));
}

double szilard_work(double gap, const Bath& bath) {
  if (!(gap > 0.0)) throw DomainError("gap must be positive");
  return gap * excited_population(bath.beta() * gap);
}

SingleBathReport single_bath_cycle(const QubitSpec& q, double theta) {
  const QubitState rho0 = thermal_qubit(q);
  const QubitState rho1 = rotate(rho0, theta);
  const QubitState rho2 = dephase(rho1);
  const auto h = qubit_h(q.gap);

  SingleBathReport r;
  const auto d = rho0.diag();
  r.virtual_temperature = virtual_temperature(d[0], d[1], theta, q.gap);
  r.work_extracted = rho0.energy(h) - rho1.energy(h);
  r.heat_absorbed = rho0.energy(h) - rho2.energy(h);
  r.entropy_before_dephase = rho1.entropy();
  r.entropy_after_dephase = rho2.entropy();
  r.apparent_second_law_violation =
      r.virtual_temperature.is_finite() && r.virtual_temperature.value() < 0.0;
  return r;
}

JointState tensor(const QubitState& s, const QubitState& d) {
  JointState::Entries e{};
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y) e[(2 * a + x) * 4 + (2 * b + y)] = s(a, b) * d(x, y);
  return JointState::from(e);
}

JointState cnot(const JointState& rho, Role control) {
  return control == Role::System ? permute(rho, 2, 3) : permute(rho, 1, 3);
}

JointState cev(const JointState& rho, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  JointState::Entries u{};
  u[0 * 4 + 0] = 1.0;
  u[2 * 4 + 2] = 1.0;
  u[1 * 4 + 1] = c;
  u[1 * 4 + 3] = s;
  u[3 * 4 + 1] = -s;
  u[3 * 4 + 3] = c;
  return rho.conjugate(u);
}

QubitState partial_trace(const JointState& rho, Role keep) {
  QubitState::Entries e{};
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) {
      complex acc = 0.0;
      for (std::size_t k = 0; k < 2; ++k) {
        acc += keep == Role::System ? rho(2 * a + k, 2 * b + k) : rho(2 * k + a, 2 * k + b);
      }
      e[a * 2 + b] = acc;
    }
  return QubitState::from(e);
}

double mutual_entropy(const JointState& rho) {
  return partial_trace(rho, Role::System).entropy() + partial_trace(rho, Role::Demon).entropy() - rho.entropy();
}

CycleReport swap_engine(const QubitSpec& system, const QubitSpec& demon) {
  const JointState rho1 = tensor(thermal_qubit(system), thermal_qubit(demon));
  // SWAP exchanges |0,1> and |1,0>
  const JointState rho2 = permute(rho1, 1, 2);
  const auto hs = qubit_h(system.gap), hd = qubit_h(demon.gap);

  const double es1 = partial_trace(rho1, Role::System).energy(hs);
  const double es2 = partial_trace(rho2, Role::System).energy(hs);
  const double ed1 = partial_trace(rho1, Role::Demon).energy(hd);
  const double ed2 = partial_trace(rho2, Role::Demon).energy(hd);

  CycleReport r;
  r.Q_in = es1 - es2;
  r.Q_out = ed2 - ed1;
  // the swap itself is the only work stroke
  r.W_net = (es1 + ed1) - (es2 + ed2);
  r.sum_dU = 0.0;
  r.positive_work = r.W_net > kPositiveWorkThreshold;
  if (r.Q_in > 0.0) r.efficiency = 1.0 - r.Q_out / r.Q_in;
  return r;
}

DemonCycleReport demon_cycle(const QubitSpec& system, const QubitSpec& demon, double theta) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) throw DomainError("theta must lie in [0, pi]");

  const QubitState s1 = thermal_qubit(system);
  const QubitState d1 = thermal_qubit(demon);
  const JointState rho1 = tensor(s1, d1);
  const JointState rho2 = cnot(rho1, Role::System);
  const JointState rho3 = cev(rho2, theta);
  const auto hs = qubit_h(system.gap), hd = qubit_h(demon.gap);

  const QubitState s2 = partial_trace(rho2, Role::System), s3 = partial_trace(rho3, Role::System);
  const QubitState d2 = partial_trace(rho2, Role::Demon), d3 = partial_trace(rho3, Role::Demon);

  DemonCycleReport r;
  r.W_D = d2.energy(hd) - d1.energy(hd);
  r.W_S = s2.energy(hs) - s3.energy(hs);
  r.Q_in = s1.energy(hs) - s3.energy(hs);
  r.Q_out = d3.energy(hd) - d1.energy(hd);
  r.W = r.W_S - r.W_D;
  if (r.Q_in > 0.0) r.eta = r.W / r.Q_in;

  r.S1 = rho1.entropy();
  r.S2 = rho2.entropy();
  r.S3 = rho3.entropy();
  r.S_M_before = mutual_entropy(rho1);
  r.S_M = mutual_entropy(rho2);
  r.system_marginal_shift = s2.distance(s1);
  r.demon_marginal_shift = d3.distance(d2);

  r.pwc = system.bath.temperature() >= demon.bath.temperature() * demon.gap / system.gap;
  r.positive_work = r.W > kPositiveWorkThreshold;
  r.P = rho1.diag();

  const double p10 = r.P[2], p01 = r.P[1], p11 = r.P[3];
  const double pd1 = d1.diag()[1];
  r.W_D_printed = demon.gap * (pd1 - p10 - p01);
  if (std::abs(theta - std::numbers::pi / 2) < 1e-12) {
    r.Q_in_cnot_form = system.gap * (p10 - p01);
    r.W_cnot_form = system.gap * (p10 - p01) - demon.gap * (p10 - p11);
    r.eta_printed = 1.0 - demon.gap / system.gap * (p11 - p10) / (p10 - p01);
  }
  return r;
}

}  // namespace qheng
