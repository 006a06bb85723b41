#pragma once

// Discrete kink solitons: the relaxation solver for bond-angle profiles, the
// kink ansatz, the continuum kink and parameter training against backbones.

#include <cstddef>
#include <span>
#include <vector>

#include "kinkfold/energy.hpp"
#include "kinkfold/geometry.hpp"
#include "kinkfold/params_io.hpp"

namespace kinkfold {

struct RelaxOptions {
  double epsilon = 0.01;
  std::size_t max_iters = 1'000'000;
  double tol = 1e-8;             // max-norm of dnls_residual
  std::size_t record_every = 1;  // energy_series stride; 0 keeps only the endpoints
};

struct RelaxationReport {
  std::size_t iterations = 0;
  double final_residual = 0.0;
  // relaxation_energy after every `record_every` iterations, first and last always present.
  std::vector<double> energy_series;
  bool converged = false;
};

struct RelaxResult {
  std::vector<double> kappa;
  RelaxationReport report;
};

// r_i = kappa[i+1] - 2 kappa[i] + kappa[i-1] - kappa[i] dV/d(kappa^2), with
// kappa[-1] = kappa[M] = 0. r = -1/2 grad relaxation_energy.
std::vector<double> dnls_residual(std::span<const double> kappa, const ParamMap& params);

// Torsion-eliminated energy with the virtual zero boundary, the quantity relax descends.
double relaxation_energy(std::span<const double> kappa, const ParamMap& params);

// kappa <- kappa + epsilon * dnls_residual(kappa) until the residual drops below tol.
// Throws Diverged if |kappa| exceeds 1e3 or the energy rises.
RelaxResult relax(std::span<const double> initial_kappa, const ParamMap& params,
                  const RelaxOptions& options = {});

// Torsions eliminated site by site, tau_k = torsion_of_kappa(kappa_k).
std::vector<double> eliminated_torsions(std::span<const double> kappa, const ParamMap& params);

// Bond angles plus eliminated torsions as a profile ready for reconstruct().
AngleProfile profile_from_kappa(std::span<const double> kappa, const ParamMap& params,
                                std::vector<double> bond_lengths, int index_offset = 1);

struct SolitonAnsatz {
  double c1 = 1.0;  // right slope, per site
  double c2 = 1.0;  // left slope, per site
  double m1 = 1.0;  // kappa as i -> +inf
  double m2 = 1.0;  // -kappa as i -> -inf
  double s = 0.0;   // centre, fractional site index
};

// [m1 e^{c1(i-s)} - m2 e^{-c2(i-s)}] / [e^{c1(i-s)} + e^{-c2(i-s)}]
double kink_ansatz(double site, const SolitonAnsatz& ansatz);

// m tanh(m sqrt(lambda) (s - s0)), the double-well kink on the line.
double continuum_kink(double arc_length, double m, double lambda, double s0);

// Least-squares fit of the ansatz to target[begin, end), which must contain one sign change.
SolitonAnsatz fit_ansatz(std::span<const double> target, std::size_t begin, std::size_t end);

struct MultiSolitonOptions {
  // Parameter sets whose relaxation has not converged within relax.max_iters are rejected.
  RelaxOptions relax{0.01, 20'000, 1e-9, 0};
  double initial_step = 0.1;    // relative trial step
  double min_step = 1e-5;       // stop when every step is below this
  std::size_t max_sweeps = 200;
  double rmsd_goal = 0.0;       // stop early once the RMSD is at or below this (Å)
};

struct FitReport {
  double initial_rmsd = 0.0;
  double final_rmsd = 0.0;
  std::vector<double> distances;  // per vertex after superposition, Å
  std::size_t evaluations = 0;
  std::size_t sweeps = 0;
};

struct MultiSolitonFit {
  std::vector<Segment> segments;
  AngleProfile profile;
  CalphaChain chain;
  FitReport report;
};

// The chain a parameter set predicts for a target: relax from the target bond
// angles, eliminate torsions, rebuild with the target bond lengths.
AngleProfile predict_profile(const AngleProfile& target, const ParamMap& params,
                             const RelaxOptions& options, RelaxationReport* report = nullptr);

// Starting couplings for target sites [begin, end): m = mean kappa, a / c = circular
// mean of the paired torsions (site 0 has none), b = d = 0, c = 1.
EnergyParams vacuum_guess(const AngleProfile& target, std::size_t begin, std::size_t end,
                          double lambda = 10.0);

// Coordinate descent over (lambda, m, a, b, c, d) of every segment, minimising
// the RMSD between the predicted chain and reconstruct(target).
MultiSolitonFit fit_multisoliton(const AngleProfile& target, std::vector<Segment> segments,
                                 const MultiSolitonOptions& options = {});

}  // namespace kinkfold
