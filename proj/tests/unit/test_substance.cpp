#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "qheng/errors.hpp"
#include "qheng/substance.hpp"

using namespace qheng;
using oracle::close;
using oracle::rel_close;

namespace {

std::vector<double> as_vector(const EnergySpectrum& s) { return {s.levels().begin(), s.levels().end()}; }

}  // namespace

TEST_CASE("family generating rules") {
  CHECK(as_vector(generate_spectrum(Family::TwoLevel, 1.0, 2)) == std::vector<double>{0, 1});
  CHECK(as_vector(generate_spectrum(Family::HarmonicOscillator, 1.0, 4)) == std::vector<double>{0, 1, 2, 3});
  CHECK(as_vector(generate_spectrum(Family::InfiniteSquareWell, 1.0, 3)) == std::vector<double>{0, 3, 8});
  CHECK_THROWS_AS(generate_spectrum(Family::TwoLevel, 1.0, 1), DomainError);
  CHECK_THROWS_AS(generate_spectrum(Family::HarmonicOscillator, -1.0, 3), DomainError);
  CHECK_THROWS_AS(generate_spectrum(Family::Custom, 1.0, 3), UnsupportedError);
}

TEST_CASE("family names round trip") {
  for (Family f : {Family::TwoLevel, Family::HarmonicOscillator, Family::InfiniteSquareWell, Family::Custom}) {
    CHECK(parse_family(to_string(f)) == f);
  }
  CHECK_FALSE(parse_family("qubit-ish").has_value());
}

TEST_CASE("custom spectra are validated") {
  CHECK_NOTHROW(EnergySpectrum::custom({0.0, 0.5, 0.5, 2.0}));
  CHECK_THROWS_AS(EnergySpectrum::custom({0.0}), DomainError);
  CHECK_THROWS_AS(EnergySpectrum::custom({0.1, 1.0}), DomainError);
  CHECK_THROWS_AS(EnergySpectrum::custom({0.0, 2.0, 1.0}), DomainError);
}

TEST_CASE("scaling and shifting") {
  const auto tls = generate_spectrum(Family::TwoLevel, 1.0, 2);
  CHECK(as_vector(scale_spectrum(tls, 2.0)) == std::vector<double>{0, 2});
  CHECK(scale_spectrum(tls, 2.0).scale() == 2.0);
  const auto ho = generate_spectrum(Family::HarmonicOscillator, 1.0, 4);
  CHECK(as_vector(scale_spectrum(ho, 0.5)) == std::vector<double>{0, 0.5, 1, 1.5});
  const auto isw = generate_spectrum(Family::InfiniteSquareWell, 1.0, 3);
  CHECK(scale_spectrum(isw, 1.0) == isw);
  CHECK_THROWS_AS(scale_spectrum(tls, 0.0), DomainError);

  const auto shifted = shift_spectrum(tls, 0.3);
  CHECK(close(shifted[0], -0.3, 1e-15));
  CHECK(close(shifted[1], 0.7, 1e-15));
  CHECK(shift_spectrum(tls, 0.0) == std::vector<double>{0, 1});
  const auto wide = EnergySpectrum::custom({0, 2, 4});
  CHECK(shift_spectrum(wide, -1.0) == std::vector<double>{1, 3, 5});
}

TEST_CASE("partition function") {
  const auto tls = generate_spectrum(Family::TwoLevel, 1.0, 2);
  CHECK(partition_function(tls, Bath::from_beta(0.0)) == 2.0);
  CHECK(close(partition_function(tls, Bath(1.0)), oracle::Z_tls_1, 1e-15));

  const double geometric = 1.0 / (1.0 - std::exp(-1.0));
  double previous_gap = std::numeric_limits<double>::infinity();
  for (std::size_t n : {4u, 8u, 16u, 32u}) {
    const double z = partition_function(generate_spectrum(Family::HarmonicOscillator, 1.0, n), Bath(1.0));
    const double gap = std::abs(z - geometric);
    CHECK(gap < previous_gap);
    previous_gap = gap;
  }
  CHECK(previous_gap < 1e-13);
}

TEST_CASE("thermal populations") {
  const auto tls = generate_spectrum(Family::TwoLevel, 1.0, 2);
  const auto hot = thermal_populations(tls, Bath::from_beta(0.0));
  CHECK(hot[0] == 0.5);
  CHECK(hot[1] == 0.5);
  const auto p = thermal_populations(tls, Bath(1.0));
  CHECK(close(p[0], oracle::p_ground_1, 1e-15));
  CHECK(close(p[1], oracle::p_excited_1, 1e-15));

  const auto cold = thermal_populations(EnergySpectrum::custom({0, 1, 2}), Bath(1e-6));
  CHECK(cold[0] == 1.0);
  CHECK(cold[1] == 0.0);
  CHECK(cold[2] == 0.0);

  // raw levels far above zero must not overflow or underflow to all-zero weights
  const auto shifted = thermal_populations_raw(std::vector<double>{-800.0, -799.0}, 1.0);
  CHECK(close(shifted[1], oracle::p_excited_1, 1e-15));
}

TEST_CASE("populations are validated") {
  CHECK_NOTHROW(Populations::from({0.25, 0.75}));
  CHECK_THROWS_AS(Populations::from({0.5, 0.6}), DomainError);
  CHECK_THROWS_AS(Populations::from({-0.1, 1.1}), DomainError);
}

TEST_CASE("baths") {
  CHECK_THROWS_AS(Bath(-1.0), DomainError);
  CHECK_THROWS_AS(Bath(0.0), DomainError);
  CHECK(std::isinf(Bath::from_beta(0.0).temperature()));
  CHECK(Bath(2.0).beta() == 0.5);
}

TEST_CASE("internal energy and entropy") {
  const auto tls = generate_spectrum(Family::TwoLevel, 1.0, 2);
  CHECK(internal_energy(tls, Populations::from({1, 0})) == 0.0);
  CHECK(internal_energy(tls, Populations::from({0.5, 0.5})) == 0.5);
  CHECK(close(internal_energy(tls, thermal_populations(tls, Bath(1.0))), oracle::p_excited_1, 1e-15));

  CHECK(von_neumann_entropy(Populations::from({1, 0})) == 0.0);
  CHECK(close(von_neumann_entropy(Populations::from({0.5, 0.5})), std::log(2.0), 1e-15));
  CHECK(close(von_neumann_entropy(thermal_populations(tls, Bath(1.0))), oracle::S_b_p1, 1e-15));
  CHECK(close(binary_entropy(oracle::fermi(0.5)), oracle::S_b_p05, 1e-15));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
}

TEST_CASE("excited population and its inverse") {
  CHECK(close(excited_population(1.0), oracle::p_excited_1, 1e-16));
  CHECK(close(excited_population(-1.0), oracle::p_ground_1, 1e-16));
  CHECK(excited_population(0.0) == 0.5);
  for (double p : {0.01, 0.2, 0.3, 0.49}) {
    CHECK(rel_close(excited_population(gap_for_population(1.7, p) / 1.7), p, 1e-14));
  }
}

TEST_CASE("effective temperature") {
  CHECK(close(effective_temperature(1.0, oracle::p_ground_1, oracle::p_excited_1).value(), 1.0, 1e-14));
  CHECK(close(effective_temperature(1.0, oracle::p_excited_1, oracle::p_ground_1).value(), -1.0, 1e-14));
  CHECK(effective_temperature(1.0, 0.5, 0.5).kind() == EffectiveTemperature::Kind::Unbounded);
  CHECK(effective_temperature(1.0, 1.0, 0.0).kind() == EffectiveTemperature::Kind::Undefined);
  CHECK_THROWS_AS(effective_temperature(1.0, 0.5, 0.5).value(), DomainError);
}

TEST_CASE("temperature consistency") {
  const auto ho = generate_spectrum(Family::HarmonicOscillator, 1.0, 12);
  for (double t : {0.3, 1.0, 7.0}) {
    const auto r = effective_temperature_consistent(ho, thermal_populations(ho, Bath(t)), 1e-9);
    CHECK(r.consistent);
    REQUIRE(r.common_temperature.has_value());
    CHECK(rel_close(*r.common_temperature, t, 1e-9));
  }

  const auto three = EnergySpectrum::custom({0, 1, 3});
  const auto r = effective_temperature_consistent(three, Populations::from({0.5, 0.3, 0.2}), 1e-9);
  CHECK_FALSE(r.consistent);
  REQUIRE(r.pair_temperatures.size() == 2);
  CHECK(close(r.pair_temperatures[0].value(), 1.0 / std::log(5.0 / 3.0), 1e-12));
  CHECK(close(r.pair_temperatures[1].value(), 2.0 / std::log(1.5), 1e-12));

  const auto tls = generate_spectrum(Family::TwoLevel, 1.0, 2);
  CHECK(effective_temperature_consistent(tls, Populations::from({0.9, 0.1}), 1e-9).consistent);
  CHECK_THROWS_AS(effective_temperature_consistent(EnergySpectrum::custom({0, 1, 1}),
                                                   Populations::from({0.5, 0.25, 0.25}), 1e-9),
                  DomainError);
}

TEST_CASE("truncation") {
  for (Family f : {Family::HarmonicOscillator, Family::InfiniteSquareWell}) {
    for (double x : {f == Family::InfiniteSquareWell ? 1e-5 : 4e-3, 0.05, 1.0, 20.0}) {
      const auto r = truncation_levels(f, 1.0, x);
      CHECK_FALSE(r.capped);
      CHECK(r.tail_weight < kTruncationTail);
      const auto s = generate_spectrum(f, 1.0, r.n_levels);
      CHECK(std::exp(-x * s[r.n_levels - 1]) < kTruncationTail);
      // minimal: one level fewer fails the criterion
      if (r.n_levels > 2) CHECK(std::exp(-x * s[r.n_levels - 2]) >= kTruncationTail);
    }
  }
  CHECK(truncation_levels(Family::HarmonicOscillator, 1.0, 1e-6).capped);
  CHECK(truncation_levels(Family::HarmonicOscillator, 1.0, 1e-6).n_levels == kMaxLevels);
  CHECK(truncation_levels(Family::TwoLevel, 1.0, 1.0).n_levels == 2);
}

TEST_CASE("shift invariance of thermal quantities") {
  const auto ho = generate_spectrum(Family::HarmonicOscillator, 0.7, 40);
  const auto base = thermal_populations(ho, Bath(1.3));
  for (double delta : {-1.0, 0.37, 5.0}) {
    const auto raw = shift_spectrum(ho, delta);
    const auto p = thermal_populations_raw(raw, 1.0 / 1.3);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(close(p[i], base[i], 1e-15));
    CHECK(close(internal_energy_raw(raw, p), internal_energy(ho, base) - delta, 1e-13));
  }
}

TEST_CASE("closed-form entropies") {
  for (double x : {0.1, 0.5, 1.0, 3.0, 10.0}) {
    CHECK(close(two_level_entropy(x), oracle::binary_entropy(oracle::fermi(x)), 1e-14));
    // the flipped-sign variant disagrees by 2 x tanh(x/2) * x/2
    const double h = x / 2.0;
    CHECK(close(two_level_entropy_printed(x) - two_level_entropy(x), 2.0 * h * std::tanh(h), 1e-13));

    const auto ho = generate_spectrum(Family::HarmonicOscillator, 1.0, truncation_levels(Family::HarmonicOscillator, 1.0, x).n_levels);
    CHECK(close(oscillator_entropy(x), von_neumann_entropy(thermal_populations(ho, Bath(1.0 / x))), 1e-12));
  }
  const double y = 1e-4;
  CHECK(close(square_well_entropy_gaussian(y), 0.5 + std::log(0.5 * std::sqrt(M_PI / y)), 1e-14));
  CHECK(close(square_well_entropy_printed(y), 0.5 * std::pow(y, 0.75) + std::log(0.5 * std::sqrt(M_PI / y)), 1e-14));
}

TEST_CASE("dU/dzeta closed forms against finite differences") {
  const auto fd = [](Family f, double param, double zeta, double t) {
    const double h = 1e-5;
    const auto n = f == Family::TwoLevel ? std::size_t{2} : truncation_levels(f, param, (zeta - h) / t).n_levels;
    const auto base = generate_spectrum(f, param, n);
    const auto u = [&](double z) {
      const auto s = scale_spectrum(base, z);
      return internal_energy(s, thermal_populations(s, Bath(t)));
    };
    return (u(zeta + h) - u(zeta - h)) / (2.0 * h);
  };
  for (double t : {0.5, 1.0, 2.0}) {
    for (double zeta : {0.5, 1.0, 2.0}) {
      CHECK(rel_close(internal_energy_derivative(Family::TwoLevel, zeta, Bath(t), 1.0), fd(Family::TwoLevel, 1.0, zeta, t), 1e-6));
      CHECK(rel_close(internal_energy_derivative(Family::HarmonicOscillator, zeta, Bath(t), 1.0),
                      fd(Family::HarmonicOscillator, 1.0, zeta, t), 1e-6));
    }
  }
  CHECK(internal_energy_derivative(Family::InfiniteSquareWell, 1.0, Bath(1.0), 1.0) == -1.0);
  CHECK(internal_energy_derivative(Family::InfiniteSquareWell, 2.0, Bath(0.5), 1.0) == -0.25);
  CHECK_THROWS_AS(internal_energy_derivative(Family::Custom, 1.0, Bath(1.0), 1.0), UnsupportedError);
}
