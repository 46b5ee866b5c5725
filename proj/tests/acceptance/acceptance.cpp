// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qheng/cycles.hpp"
#include "qheng/demon.hpp"
#include "qheng/limits.hpp"
#include "qheng/processes.hpp"

#ifndef QHENG_CLI_PATH
#error "QHENG_CLI_PATH must point at the qheng executable"
#endif

using namespace qheng;

namespace {

constexpr double kPi = std::numbers::pi;

// portable uniform draws: fixed bit conversion rather than a library distribution
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(gen_() >> 11) * 0x1p-53); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }

 private:
  std::mt19937_64 gen_;
};

const std::array<Family, 3> kFamilies = {Family::TwoLevel, Family::HarmonicOscillator, Family::InfiniteSquareWell};

Substance substance(Family f, double param) {
  switch (f) {
    case Family::TwoLevel: return Substance::two_level(param);
    case Family::HarmonicOscillator: return Substance::oscillator(param);
    default: return Substance::square_well(param);
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

int failures = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", id.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

// Runs fn, turning an unexpected exception into a failed criterion.
void criterion(const std::string& id, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

void carnot_efficiency() {
  Rng rng(101);
  double worst_eta = 0.0, worst_gap = 0.0;
  for (Family f : kFamilies) {
    for (int i = 0; i < 50; ++i) {
      const double t_l = rng.uniform(0.5, 2.0);
      const double t_h = t_l * rng.uniform(1.1, 4.0);
      const double zeta_b = rng.uniform(0.5, 1.5);
      const double zeta_a = zeta_b * rng.uniform(1.1, 3.0);
      const CarnotSpec spec{substance(f, rng.uniform(0.3, 2.0)), t_h, t_l, zeta_a, zeta_b};
      const auto r = run_carnot(spec);
      const double target = 1.0 - t_l / t_h;
      worst_eta = std::max(worst_eta, std::abs(r.efficiency.value() - target));
      worst_gap = std::max(worst_gap, std::abs(r.gap_ratio_efficiency.value() - target));
    }
  }
  report("1", worst_eta <= 1e-8 && worst_gap <= 1e-8,
         "Carnot 150 runs, max |eta - (1 - Tl/Th)| = " + fmt(worst_eta) + ", gap-ratio form " + fmt(worst_gap));
}

void otto_efficiency() {
  Rng rng(202);
  double worst_eta = 0.0, worst_t = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Family f = kFamilies[rng.index(3)];
    const double alpha = rng.uniform(1.1, 3.0);
    const double t_l = rng.uniform(0.3, 2.0);
    const double t_h = alpha * t_l * rng.uniform(1.05, 3.0);
    const OttoSpec spec{substance(f, rng.uniform(0.3, 2.0)), t_h, t_l, alpha};
    const auto r = run_otto(spec);
    worst_eta = std::max(worst_eta, std::abs(r.efficiency.value() - (1.0 - 1.0 / alpha)));

    const OttoSpec tls{Substance::two_level(spec.substance.param), t_h, t_l, alpha};
    const auto t = run_otto(tls).effective_temperatures.value();
    const std::array<double, 4> expected{alpha * t_l, t_h, t_h / alpha, t_l};
    for (int k = 0; k < 4; ++k) worst_t = std::max(worst_t, std::abs(t[k] - expected[k]));
  }
  report("2", worst_eta <= 1e-10 && worst_t <= 1e-10,
         "Otto 50 runs, max |eta - (1 - 1/alpha)| = " + fmt(worst_eta) + ", two-level T_A..T_D max dev " + fmt(worst_t));
}

void pwc_agreement() {
  Rng rng(303);
  int carnot_mismatch = 0, otto_mismatch = 0, banded = 0;
  for (int i = 0; i < 500; ++i) {
    const double t_h = rng.uniform(0.5, 4.0), t_l = rng.uniform(0.5, 4.0);
    const double zeta_b = rng.uniform(0.5, 1.5);
    const CarnotSpec spec{substance(kFamilies[rng.index(3)], rng.uniform(0.5, 2.0)), t_h, t_l,
                          zeta_b * rng.uniform(1.1, 3.0), zeta_b};
    const auto r = run_carnot(spec, 512);
    if (std::abs(r.W_net) <= 1e-12 || std::abs(t_h - t_l) <= 1e-12 * t_h) {
      ++banded;
      continue;
    }
    if ((r.W_net > 0.0) != positive_work_condition(spec)) ++carnot_mismatch;
  }
  for (int i = 0; i < 500; ++i) {
    const double alpha = rng.uniform(1.1, 3.0);
    const double t_l = rng.uniform(0.3, 2.0), t_h = rng.uniform(0.3, 6.0);
    const OttoSpec spec{substance(kFamilies[rng.index(3)], rng.uniform(0.3, 2.0)), t_h, t_l, alpha};
    const auto r = run_otto(spec);
    if (std::abs(r.W_net) <= 1e-12 || std::abs(t_h - alpha * t_l) <= 1e-12 * t_h) {
      ++banded;
      continue;
    }
    if ((r.W_net > 0.0) != positive_work_condition(spec)) ++otto_mismatch;
  }
  report("3", carnot_mismatch == 0 && otto_mismatch == 0,
         "sign(W) vs PWC mismatches: Carnot " + std::to_string(carnot_mismatch) + "/500, Otto " +
             std::to_string(otto_mismatch) + "/500 (" + std::to_string(banded) + " in boundary band)");
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

void closed_form_work_match() {
  const CarnotSpec c_tls{Substance::two_level(1.0), 2.0, 1.0, 2.0, 1.0};
  const CarnotSpec c_ho{Substance::oscillator(1.0), 2.0, 1.0, 2.0, 1.0};
  const OttoSpec o_tls{Substance::two_level(1.0), 4.0, 1.0, 2.0};
  const OttoSpec o_ho{Substance::oscillator(1.0), 4.0, 1.0, 2.0};
  const double g1 = rel(closed_form_work(o_tls), run_otto(o_tls).W_net);
  const double g2 = rel(closed_form_work(o_ho), run_otto(o_ho).W_net);
  const double g3 = rel(closed_form_work(c_tls), run_carnot(c_tls).W_net);
  const double g4 = rel(closed_form_work(c_ho), run_carnot(c_ho).W_net);
  const double worst = std::max({g1, g2, g3, g4});
  report("4a", worst <= 1e-8,
         "relative gaps W_O^TLS " + fmt(g1) + ", W_O^HO " + fmt(g2) + ", W_C^TLS " + fmt(g3) + ", W_C^HO " + fmt(g4));
}

void square_well_closed_forms() {
  // beta * gamma at the hot bath, the regime where the closed forms claim validity
  double worst = 0.0;
  std::ostringstream detail;
  for (double x : {1e-3, 1e-4, 1e-5}) {
    const double t_h = 1.0 / x;
    const CarnotSpec c{Substance::square_well(1.0), t_h, 0.5 * t_h, 2.0, 1.0};
    const auto rc = run_carnot(c, 1024);
    const OttoSpec o{Substance::square_well(1.0), 2.0 * t_h, 0.5 * t_h, 2.0};
    const auto ro = run_otto(o);
    const double c_printed = rel(rc.closed_form_W.value(), rc.W_net);
    const double c_gauss = rel(rc.closed_form_W_gaussian.value(), rc.W_net);
    const double o_printed = rel(ro.closed_form_W.value(), ro.W_net);
    const double o_gauss = rel(ro.closed_form_W_gaussian.value(), ro.W_net);
    worst = std::max({worst, c_printed, o_printed});
    detail << " bg=" << fmt(x) << ": W_C printed " << fmt(c_printed) << " (gaussian " << fmt(c_gauss) << "), W_O printed "
           << fmt(o_printed) << " (gaussian " << fmt(o_gauss) << ");";
  }
  report("4b", worst < 1e-3, "square-well closed-form relative gaps, need < 1e-3:" + detail.str());
}

void limit_convergence() {
  const double p_l = excited_population(1.0), p_h = excited_population(0.5);
  std::ostringstream detail;
  bool pass = true;
  const auto check = [&](const char* name, const std::function<DecompositionResult(std::size_t)>& run) {
    double worst_ratio = 0.0;
    DecompositionResult prev = run(8);
    for (std::size_t n = 16; n <= 1024; n *= 2) {
      const DecompositionResult cur = run(n);
      for (auto [e2, e1] : {std::pair{cur.error.Q_in, prev.error.Q_in}, std::pair{cur.error.Q_out, prev.error.Q_out},
                            std::pair{cur.error.W, prev.error.W}, std::pair{cur.error.eta, prev.error.eta}}) {
        if (e1 > 0.0) worst_ratio = std::max(worst_ratio, e2 / e1);
      }
      prev = cur;
    }
    const double worst_abs = std::max({prev.error.Q_in, prev.error.Q_out, prev.error.W, prev.error.eta});
    pass = pass && worst_ratio <= 0.55 && worst_abs < 1e-3;
    detail << name << " max error ratio " << fmt(worst_ratio) << ", max |err| at N=1024 " << fmt(worst_abs) << "; ";
  };
  check("carnot_as_otto", [&](std::size_t n) { return carnot_as_otto_limit(2.0, 1.0, p_l, p_h, n); });
  check("otto_as_carnot", [&](std::size_t n) { return otto_as_carnot_limit(2.0, 1.0, 4.0, 1.0, n); });
  report("5", pass, detail.str());
}

void comparison_theorem() {
  Rng rng(606);
  int violations = 0;
  double min_w = 1e300;
  for (int i = 0; i < 200; ++i) {
    const double t_l = rng.uniform(0.3, 2.0), t_h = t_l * rng.uniform(1.1, 4.0);
    double a = rng.uniform(0.02, 0.48), b = rng.uniform(0.02, 0.48);
    if (a > b) std::swap(a, b);
    if (b - a < 1e-3) b = a + 1e-3;
    const auto r = compare_carnot_otto(t_h, t_l, b, a);
    if (!(r.W_C > r.W_O && r.eta_O < r.eta_C)) ++violations;
    min_w = std::min(min_w, r.W_C - r.W_O);
  }
  report("6", violations == 0,
         std::to_string(violations) + "/200 violations of W_C > W_O, eta_O < eta_C; min W_C - W_O = " + fmt(min_w));
}

void shift_invariance() {
  double worst = 0.0;
  for (Family f : kFamilies) {
    const OttoSpec spec{substance(f, 1.0), 4.0, 1.0, 2.0};
    const auto base = run_otto(spec);
    for (double delta : {-1.0, 0.37, 5.0}) {
      const auto s = run_otto_shifted(spec, delta);
      worst = std::max({worst, std::abs(s.W_net - base.W_net), std::abs(s.Q_in - base.Q_in),
                        std::abs(s.Q_out - base.Q_out), std::abs(s.efficiency.value() - base.efficiency.value())});
    }
  }
  report("7", worst <= 1e-12, "max change of W, Q_in, Q_out, eta under shifts {-1, 0.37, 5}: " + fmt(worst));
}

double dU_finite_difference(Family f, double zeta, double t) {
  const double h = 1e-5;
  const std::size_t n = f == Family::TwoLevel ? 2 : truncation_levels(f, 1.0, (zeta - h) / t).n_levels;
  const auto base = generate_spectrum(f, 1.0, n);
  const auto u = [&](double z) {
    const auto s = scale_spectrum(base, z);
    return internal_energy(s, thermal_populations(s, Bath(t)));
  };
  return (u(zeta + h) - u(zeta - h)) / (2.0 * h);
}

void internal_energy_variation() {
  std::ostringstream detail;
  double min_du = 1e300;
  for (Family f : kFamilies) {
    const std::size_t n = f == Family::TwoLevel ? 2 : truncation_levels(f, 1.0, 0.5).n_levels;
    const auto start = StateSnapshot::thermal(scale_spectrum(generate_spectrum(f, 1.0, n), 2.0), Bath(2.0));
    const double du = std::abs(isothermal_stroke(start, 1.0).record.dU);
    min_du = std::min(min_du, du);
    detail << to_string(f) << " |dU| " << fmt(du) << ", ";
  }
  double worst = 0.0;
  for (Family f : {Family::TwoLevel, Family::HarmonicOscillator}) {
    for (double t : {0.5, 1.0, 2.0}) {
      for (double zeta : {0.5, 1.0, 2.0}) {
        worst = std::max(worst, rel(internal_energy_derivative(f, zeta, Bath(t), 1.0), dU_finite_difference(f, zeta, t)));
      }
    }
  }
  detail << "TLS/HO dU/dzeta max relative deviation " << fmt(worst);
  report("8a", min_du > 1e-6 && worst <= 1e-6, detail.str());

  double worst_isw = 0.0;
  std::ostringstream isw;
  for (double t : {1.0, 10.0, 1000.0}) {
    const double closed = internal_energy_derivative(Family::InfiniteSquareWell, 1.0, Bath(t), 1.0);
    const double fd = dU_finite_difference(Family::InfiniteSquareWell, 1.0, t);
    worst_isw = std::max(worst_isw, rel(closed, fd));
    isw << " T=" << fmt(t) << ": closed " << fmt(closed) << " vs finite difference " << fmt(fd) << ";";
  }
  report("8b", worst_isw <= 1e-6, "square-well dU/dzeta:" + isw.str());
}

void entropy_balance_check() {
  Rng rng(909);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double t0 = rng.uniform(0.2, 3.0);
    const auto r = entropy_balance(rng.uniform(0.2, 4.0), t0, t0 * rng.uniform(1.0, 5.0));
    worst = std::max(worst, std::abs(r.residual));
  }
  report("9", worst < 1e-9, "max entropy-balance residual over 20 cases " + fmt(worst));
}

void demon_checks() {
  const QubitSpec s(2.0, Bath(4.0)), d(1.0, Bath(1.0));
  const auto r = demon_cycle(s, d, kPi / 2);
  const double first_law = std::abs(r.W - (r.Q_in - r.Q_out));
  const double entropy = std::max(std::abs(r.S1 - r.S2), std::abs(r.S2 - r.S3));

  double worst_cold = 0.0;
  for (double beta_gap : {20.0, 30.0, 50.0}) {
    const auto c = demon_cycle(s, QubitSpec(1.0, Bath(1.0 / beta_gap)), kPi / 2);
    worst_cold = std::max(worst_cold, std::abs(c.eta.value() - 0.5));
  }

  std::size_t best = 0;
  double best_w = -1e300;
  for (std::size_t k = 0; k < 181; ++k) {
    const double w = demon_cycle(s, d, kPi * static_cast<double>(k) / 180.0).W;
    if (w > best_w) {
      best_w = w;
      best = k;
    }
  }
  const double swap_eta = swap_engine(s, d).efficiency.value();

  const bool pass = first_law <= 1e-12 && entropy <= 1e-12 && worst_cold <= 1e-6 && best == 90 && swap_eta == 0.5;
  report("10", pass,
         "W - (Q_in - Q_out) " + fmt(first_law) + ", max |S_i - S_j| " + fmt(entropy) + ", cold-demon |eta - 0.5| " +
             fmt(worst_cold) + ", argmax W on 181-point grid at theta = " + fmt(kPi * static_cast<double>(best) / 180.0) +
             ", swap eta - 0.5 = " + fmt(swap_eta - 0.5));
}

std::string capture(const std::string& command) {
  std::string out;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return out;
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;) out.append(buf, n);
  if (pclose(pipe) != 0) out = "<nonzero exit>";
  return out;
}

void cli_determinism() {
  const std::string args =
      " sweep --engine otto --substance ho --grid th=2:8:9 --grid dh=1.5:3:7 --tl 1 --dl 1";
  const std::string one = capture("QHENG_THREADS=1 " QHENG_CLI_PATH + args);
  const std::string many = capture("QHENG_THREADS=8 " QHENG_CLI_PATH + args);
  const std::string random_one = capture("QHENG_THREADS=1 " QHENG_CLI_PATH
                                         " sweep --engine demon --grid theta=0:3.14:2 --grid td=0.2:2:2 --random 64 --seed 42");
  const std::string random_many = capture("QHENG_THREADS=5 " QHENG_CLI_PATH
                                          " sweep --engine demon --grid theta=0:3.14:2 --grid td=0.2:2:2 --random 64 --seed 42");
  const bool pass = !one.empty() && one.rfind("index,", 0) == 0 && one == many && random_one == random_many &&
                    random_one.rfind("index,", 0) == 0;
  report("11", pass,
         "sweep CSV byte-identical across QHENG_THREADS=1/8 (" + std::to_string(one.size()) +
             " bytes) and seeded random sweep across 1/5 (" + std::to_string(random_one.size()) + " bytes)");
}

}  // namespace

int main() {
  criterion("1", carnot_efficiency);
  criterion("2", otto_efficiency);
  criterion("3", pwc_agreement);
  criterion("4a", closed_form_work_match);
  criterion("4b", square_well_closed_forms);
  criterion("5", limit_convergence);
  criterion("6", comparison_theorem);
  criterion("7", shift_invariance);
  criterion("8", internal_energy_variation);
  criterion("9", entropy_balance_check);
  criterion("10", demon_checks);
  criterion("11", cli_determinism);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
