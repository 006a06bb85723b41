#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kinkfold/energy.hpp"
#include "kinkfold/errors.hpp"
#include "oracles.hpp"

using namespace kinkfold;

namespace {

EnergyParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return EnergyParams{0.2 + 3.0 * u(rng), 0.5 + u(rng), 2 * u(rng) - 1, 2 * u(rng) - 1,
                      0.2 + 2 * u(rng), 2 * u(rng)};
}

AngleProfile random_angles(std::size_t sites, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> k(-2.5, 2.5), t(-kPi, kPi);
  AngleProfile p;
  for (std::size_t i = 0; i < sites; ++i) p.kappa.push_back(k(rng));
  for (std::size_t i = 0; i + 1 < sites; ++i) p.tau.push_back(t(rng));
  p.bond_lengths = canonical_bond_lengths(sites + 2);
  return p;
}

std::vector<double> site_tau(const AngleProfile& p) {
  std::vector<double> t{0.0};
  t.insert(t.end(), p.tau.begin(), p.tau.end());
  return t;
}

}  // namespace

TEST(Energy, VacuumIsZero) {
  const EnergyParams p{2.0, 1.3, 0.0, 0.4, 1.0, 0.7};
  AngleProfile prof;
  prof.kappa.assign(12, 1.3);
  prof.tau.assign(11, 0.0);
  prof.bond_lengths = canonical_bond_lengths(14);
  EXPECT_DOUBLE_EQ(total_energy(prof, p), 0.0);
}

TEST(Energy, SingleSiteQuartic) {
  const EnergyParams p{1.7, 0.9, 0.3, 0.2, 1.0, 0.5};
  const std::vector<double> k{0.0}, t{0.0};
  EXPECT_DOUBLE_EQ(total_energy(k, t, p), 1.7 * std::pow(0.9, 4));
}

TEST(Energy, MatchesTermByTerm) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const EnergyParams p = random_params(rng);
    const AngleProfile prof = random_angles(8, rng);
    const double want = oracle::energy_terms(prof.kappa, site_tau(prof), p);
    EXPECT_LT(oracle::relative_error(total_energy(prof, p), want, 1e-300), 1e-12);
  }
}

TEST(Energy, VirtualZeroAddsEndTerms) {
  std::mt19937_64 rng(2);
  const EnergyParams p = random_params(rng);
  const AngleProfile prof = random_angles(9, rng);
  const auto t = site_tau(prof);
  const double open = total_energy(prof.kappa, t, p, Boundary::Open);
  const double closed = total_energy(prof.kappa, t, p, Boundary::VirtualZero);
  const double ends = prof.kappa.front() * prof.kappa.front() + prof.kappa.back() * prof.kappa.back();
  EXPECT_NEAR(closed - open, ends, 1e-12);
}

TEST(Energy, EvenInKappa) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const EnergyParams p = random_params(rng);
    AngleProfile prof = random_angles(10, rng);
    const double h = total_energy(prof, p);
    for (auto& k : prof.kappa) k = -k;
    EXPECT_NEAR(total_energy(prof, p), h, 1e-12 * std::abs(h));
  }
}

TEST(Energy, PerSiteParams) {
  std::mt19937_64 rng(4);
  const AngleProfile prof = random_angles(6, rng);
  const auto t = site_tau(prof);
  std::vector<EnergyParams> sites;
  for (int i = 0; i < 6; ++i) sites.push_back(random_params(rng));
  double want = 0.0;
  for (std::size_t i = 0; i + 1 < 6; ++i) want += std::pow(prof.kappa[i + 1] - prof.kappa[i], 2);
  for (std::size_t i = 0; i < 6; ++i) want += site_energy(prof.kappa[i], t[i], sites[i]);
  EXPECT_NEAR(total_energy(prof.kappa, t, ParamMap(sites)), want, 1e-12);
  EXPECT_THROW(total_energy(prof.kappa, t, ParamMap(std::vector<EnergyParams>(4))), InconsistentLengths);
}

TEST(Gradient, VacuumIsStationary) {
  const EnergyParams p{2.0, 1.3, 0.0, 0.0, 1.0, 0.0};
  AngleProfile prof;
  prof.kappa.assign(7, 1.3);
  prof.tau.assign(6, 0.0);
  prof.bond_lengths = canonical_bond_lengths(9);
  const auto g = energy_gradient(prof, p);
  for (double x : g.d_kappa) EXPECT_DOUBLE_EQ(x, 0.0);
  for (double x : g.d_tau) EXPECT_DOUBLE_EQ(x, 0.0);
}

TEST(Gradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(5);
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const EnergyParams p = random_params(rng);
    const AngleProfile prof = random_angles(3 + trial % 10, rng);
    const auto g = energy_gradient(prof, p);
    ASSERT_EQ(g.d_kappa.size(), prof.kappa.size());
    ASSERT_EQ(g.d_tau.size(), prof.tau.size());
    for (std::size_t i = 0; i < prof.kappa.size(); ++i) {
      const double fd = oracle::central_difference(
          [&](double x) {
            AngleProfile q = prof;
            q.kappa[i] = x;
            return total_energy(q, p);
          },
          prof.kappa[i], h);
      EXPECT_LT(oracle::relative_error(g.d_kappa[i], fd, 1e-2), 1e-6) << trial << " kappa " << i;
    }
    for (std::size_t j = 0; j < prof.tau.size(); ++j) {
      const double fd = oracle::central_difference(
          [&](double x) {
            AngleProfile q = prof;
            q.tau[j] = x;
            return total_energy(q, p);
          },
          prof.tau[j], h);
      EXPECT_LT(oracle::relative_error(g.d_tau[j], fd, 1e-2), 1e-6) << trial << " tau " << j;
    }
  }
}

TEST(Gradient, SiteAlignedVirtualZeroMatchesDifferences) {
  std::mt19937_64 rng(6);
  const AngleProfile prof = random_angles(9, rng);
  auto t = site_tau(prof);
  t[0] = 0.4;
  std::vector<EnergyParams> sites;
  for (int i = 0; i < 9; ++i) sites.push_back(random_params(rng));
  const ParamMap map(sites);
  const auto g = energy_gradient(prof.kappa, t, map, Boundary::VirtualZero);
  for (std::size_t i = 0; i < 9; ++i) {
    const double fk = oracle::central_difference(
        [&](double x) {
          auto k = prof.kappa;
          k[i] = x;
          return total_energy(k, t, map, Boundary::VirtualZero);
        },
        prof.kappa[i], 1e-5);
    const double ft = oracle::central_difference(
        [&](double x) {
          auto tt = t;
          tt[i] = x;
          return total_energy(prof.kappa, tt, map, Boundary::VirtualZero);
        },
        t[i], 1e-5);
    EXPECT_LT(oracle::relative_error(g.d_kappa[i], fk, 1e-2), 1e-6);
    EXPECT_LT(oracle::relative_error(g.d_tau[i], ft, 1e-2), 1e-6);
  }
}

TEST(Gradient, TorsionStationaryAtEliminatedValue) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const EnergyParams p = random_params(rng);
    AngleProfile prof = random_angles(10, rng);
    for (std::size_t j = 0; j < prof.tau.size(); ++j) prof.tau[j] = torsion_of_kappa(prof.kappa[j + 1], p);
    for (double x : energy_gradient(prof, p).d_tau) EXPECT_LT(std::abs(x), 1e-10);
  }
}

TEST(Torsion, Examples) {
  EXPECT_DOUBLE_EQ(torsion_of_kappa(0.3, {1, 1, 1, 0, 1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(torsion_of_kappa(2.7, {1, 1, 1, 0, 1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(torsion_of_kappa(1.0, {1, 1, 2, 3, 1, 1}), 2.5);
  EXPECT_NEAR(torsion_of_kappa(1e6, {1, 1, 2, 3, 1, 4}), 0.75, 1e-9);
  EXPECT_THROW(torsion_of_kappa(1.0, {1, 1, 1, 0, 0, 0}), DivisionByZero);
}

TEST(EffectivePotential, DoubleWellWithoutTorsion) {
  const EnergyParams p{1.5, 1.2, 0.0, 0.0, 1.0, 0.3};
  for (double k = -3.0; k <= 3.0; k += 0.1) {
    EXPECT_NEAR(effective_potential(k, p), 1.5 * std::pow(k * k - 1.44, 2), 1e-12);
  }
  // minimum exactly at +-m
  EXPECT_DOUBLE_EQ(effective_potential(1.2, p), 0.0);
  EXPECT_DOUBLE_EQ(effective_potential(-1.2, p), 0.0);
  for (double k = -3.0; k <= 3.0; k += 0.001) EXPECT_GE(effective_potential(k, p), 0.0);
}

TEST(EffectivePotential, LargeKappaAsymptotics) {
  const EnergyParams p{0.8, 1.0, 0.5, 0.7, 1.0, 0.4};
  EXPECT_NEAR(effective_potential(1e3, p) / 1e12, 0.8, 1e-5);
  EXPECT_NEAR(effective_potential(1e4, p) / 1e16, 0.8, 1e-7);
}

TEST(EffectivePotential, IsSiteEnergyAtEliminatedTorsion) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> k(-kPi, kPi);
  for (int trial = 0; trial < 1000; ++trial) {
    const EnergyParams p = random_params(rng);
    const double x = k(rng);
    const double want = site_energy(x, torsion_of_kappa(x, p), p);
    EXPECT_NEAR(effective_potential(x, p), want, 1e-12 * std::max(1.0, std::abs(want)));
  }
}

TEST(EffectivePotential, SlopeIsDerivativeInKappaSquared) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> k(0.2, 2.5);
  for (int trial = 0; trial < 200; ++trial) {
    const EnergyParams p = random_params(rng);
    const double q = std::pow(k(rng), 2);
    const double fd = oracle::central_difference(
        [&](double x) { return effective_potential(std::sqrt(x), p); }, q, 1e-6);
    EXPECT_LT(oracle::relative_error(effective_potential_slope(std::sqrt(q), p), fd, 1e-2), 1e-6);
  }
}

TEST(EffectivePotential, ReferenceVariantIsDistinct) {
  const EnergyParams p{1.0, 1.0, 0.3, 0.5, 1.0, 0.5};
  EXPECT_GT(std::abs(effective_potential_reference(1.0, p) - effective_potential(1.0, p)), 1e-3);
  EXPECT_THROW(effective_potential_reference(1.0, {1, 1, 0.3, 0.0, 1, 0.5}), DivisionByZero);
  EXPECT_THROW(effective_potential_reference(1.0, {1, 1, 0.3, 0.5, 1, 0.0}), DivisionByZero);
}

TEST(Params, Validation) {
  EXPECT_NO_THROW(EnergyParams::checked(1, 1, 0, 0, 0, 0));
  EXPECT_THROW(EnergyParams::checked(0, 1, 0, 0, 1, 0), InvalidArgument);
  EXPECT_THROW(EnergyParams::checked(1, 1, 0, 0, -1, 0), InvalidArgument);
  EXPECT_THROW(EnergyParams::checked(1, 1, 0, 0, 1, -1), InvalidArgument);
  EXPECT_THROW(EnergyParams::checked(1, NAN, 0, 0, 1, 0), InvalidArgument);
  EXPECT_THROW(ParamMap(std::vector<EnergyParams>{}), InvalidArgument);
}
