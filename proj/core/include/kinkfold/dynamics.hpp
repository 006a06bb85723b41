#pragma once

// Glauber Monte Carlo over angle profiles with a hard self-avoidance constraint.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "kinkfold/energy.hpp"
#include "kinkfold/geometry.hpp"

namespace kinkfold {

using Rng = std::mt19937_64;

struct ScheduleStage {
  std::size_t steps = 0;
  double kT = 1.0;

  friend bool operator==(const ScheduleStage&, const ScheduleStage&) = default;
};

// `stages` stages of `steps_per_stage` steps with kT stepping geometrically from kT_first to kT_last.
std::vector<ScheduleStage> geometric_schedule(double kT_first, double kT_last, std::size_t stages,
                                              std::size_t steps_per_stage);

struct MCConfig {
  std::vector<ScheduleStage> schedule;
  double sigma_kappa = 0.05;  // rad
  double sigma_tau = 0.1;     // rad
  std::uint64_t seed = 1;
  std::size_t measure_every = 1000;
  // Move kappa only and keep every torsion at torsion_of_kappa.
  bool kappa_only = false;

  // Throws InvalidArgument on kT <= 0, sigma <= 0 or measure_every == 0.
  void validate() const;
  std::size_t total_steps() const;
};

// Independent stream `index` derived from a base seed (splitmix64).
std::uint64_t stream_seed(std::uint64_t base, std::uint64_t index);

// x / (1 + x) with x = exp(-delta_E / kT); exactly 0 or 1 once |delta_E / kT| > 700.
double glauber_probability(double delta_E, double kT);
bool glauber_accept(double delta_E, double kT, double u);

struct Move {
  std::size_t site = 0;
  double d_kappa = 0.0;
  double d_tau = 0.0;
};

// Uniform site, Gaussian increments. d_tau is 0 when config.kappa_only.
Move draw_move(std::size_t sites, const MCConfig& config, Rng& rng);

// Adds the increments and re-wraps. The torsion of site 0 is not stored, so d_tau is dropped there.
AngleProfile apply_move(const AngleProfile& profile, const Move& move);

struct Proposal {
  AngleProfile profile;
  std::size_t site = 0;
};

Proposal propose_move(const AngleProfile& profile, const MCConfig& config, Rng& rng);

// |r_i - r_k| > min_distance for every |i - k| >= 2, via a uniform grid.
bool self_avoidance_ok(const CalphaChain& chain, double min_distance = kCanonicalBondLength);

// Same test restricted to pairs with one vertex in [0, split) and the other in [split, N).
bool self_avoidance_ok_across(const std::vector<Point3>& vertices, std::size_t split,
                              double min_distance = kCanonicalBondLength);

// Markov-chain state: site-aligned angles with cached frames, chain and energy.
// site_tau[0] is the torsion of the unobservable transport 0; it enters the energy only.
class McState {
 public:
  McState(const AngleProfile& profile, ParamMap params, bool kappa_only = false);

  const std::vector<double>& kappa() const noexcept { return kappa_; }
  const std::vector<double>& site_tau() const noexcept { return site_tau_; }
  const CalphaChain& chain() const noexcept { return chain_; }
  double energy() const noexcept { return energy_; }
  const ParamMap& params() const noexcept { return params_; }
  bool kappa_only() const noexcept { return kappa_only_; }
  std::size_t proposed() const noexcept { return proposed_; }
  std::size_t accepted() const noexcept { return accepted_; }

  AngleProfile profile() const;
  // Recomputes the cached energy from scratch.
  void resync_energy();

  // One proposal; returns whether it was accepted.
  bool step(double kT, const MCConfig& config, Rng& rng);

 private:
  double local_energy(std::size_t site, double kappa, double tau) const;
  FrameMatrix transfer(std::size_t site) const;
  // Frames after transport `site` and the vertices they place, with `moved` as that transport.
  void rebuild_from(std::size_t site, const FrameMatrix& moved, std::vector<FrameMatrix>& frames,
                    std::vector<Point3>& vertices) const;

  std::vector<double> kappa_;
  std::vector<double> site_tau_;
  std::vector<double> bond_lengths_;
  int index_offset_ = 1;
  std::vector<FrameMatrix> transfers_;  // transfer matrix of every transport
  std::vector<FrameMatrix> frames_;  // frames_[k] before transport k; M + 1 of them
  CalphaChain chain_;
  ParamMap params_;
  bool kappa_only_ = false;
  double energy_ = 0.0;
  std::size_t proposed_ = 0;
  std::size_t accepted_ = 0;
  std::vector<FrameMatrix> scratch_frames_;
  std::vector<Point3> scratch_vertices_;
};

inline bool mc_step(McState& state, double kT, const MCConfig& config, Rng& rng) {
  return state.step(kT, config, rng);
}

struct TrajectorySample {
  std::size_t step = 0;
  double kT = 0.0;
  double energy = 0.0;
  double rg = 0.0;    // Å
  double rmsd = 0.0;  // Å to the reference; NaN without one
  double acceptance = 0.0;  // accepted fraction since the previous sample
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  AngleProfile final_profile;
  CalphaChain final_chain;
};

// Runs config.schedule from `initial`, which must be self-avoiding. Samples step 0,
// every measure_every steps and the last step.
Trajectory run_schedule(const AngleProfile& initial, const ParamMap& params, const MCConfig& config,
                        const std::optional<CalphaChain>& reference = std::nullopt);

// sqrt(B / 8 pi^2); throws InvalidArgument for negative B.
double debye_waller(double b_factor);

struct ScalingFit {
  double nu = 0.0;
  double R0 = 0.0;  // Å
  std::size_t points = 0;
};

// Least squares of log Rg = log R0 + nu log N. Needs at least 4 chain lengths.
ScalingFit fit_scaling(const std::vector<std::size_t>& lengths, const std::vector<double>& rg);

struct ThetaScanConfig {
  std::vector<std::size_t> chain_lengths;  // vertices
  std::vector<double> kTs;
  std::size_t steps_per_point = 100'000;
  std::size_t measure_every = 100;
  double burn_in_fraction = 0.2;
  double sigma_kappa = 0.1;
  double sigma_tau = 0.3;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct ThetaScanPoint {
  double kT = 0.0;
  std::vector<double> mean_rg;  // one per chain length
  std::vector<double> acceptance;
};

struct ThetaScanResult {
  std::vector<std::size_t> chain_lengths;
  std::vector<ThetaScanPoint> points;  // kT ascending
  ScalingFit high;  // at the highest kT
  ScalingFit low;   // at the lowest kT
  double theta_kT = 0.0;  // steepest change of the normalised mean Rg
};

// Every (length, kT) point is an independent chain started from the uniform
// vacuum helix kappa = m, tau = torsion_of_kappa(m).
ThetaScanResult theta_scan(const EnergyParams& params, const ThetaScanConfig& config);

}  // namespace kinkfold
