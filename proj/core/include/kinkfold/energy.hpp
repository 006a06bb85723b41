#pragma once

// Gauge-invariant DNLS-type energy of a discrete string and its torsion-free reduction.
//
//   H = sum_i (kappa[i+1] - kappa[i])^2
//     + sum_i { lambda (kappa_i^2 - m^2)^2 + d/2 kappa_i^2 tau_i^2 - b kappa_i^2 tau_i
//               - a tau_i + c/2 tau_i^2 }
//
// Couplings are in model units; the difference term has unit weight.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kinkfold/geometry.hpp"

namespace kinkfold {

struct EnergyParams {
  double lambda = 1.0;  // quartic coupling
  double m = 1.0;       // vacuum bond angle (rad)
  double a = 0.0;       // chirality
  double b = 0.0;       // kappa^2 tau coupling
  double c = 1.0;       // Proca mass
  double d = 0.0;       // kappa^2 tau^2 coupling

  // Throws InvalidArgument unless lambda > 0, c >= 0, d >= 0 and all are finite.
  static EnergyParams checked(double lambda, double m, double a, double b, double c, double d);
  void validate() const;

  friend bool operator==(const EnergyParams&, const EnergyParams&) = default;
};

// Couplings per bond-angle site: either one set for the whole chain or one per site.
class ParamMap {
 public:
  ParamMap(const EnergyParams& uniform);  // NOLINT(google-explicit-constructor)
  explicit ParamMap(std::vector<EnergyParams> per_site);

  const EnergyParams& at(std::size_t site) const {
    return per_site_.size() == 1 ? per_site_.front() : per_site_[site];
  }
  bool is_uniform() const noexcept { return per_site_.size() == 1; }
  // Throws InconsistentLengths unless the map covers `sites` sites.
  void check_covers(std::size_t sites) const;

 private:
  std::vector<EnergyParams> per_site_;
};

// Whether the difference sum also couples the end sites to virtual zero
// neighbours kappa[-1] = kappa[M] = 0 (the relaxation solver's boundary).
enum class Boundary { Open, VirtualZero };

// Energy over site-aligned arrays: site_tau[k] pairs with kappa[k].
double total_energy(std::span<const double> kappa, std::span<const double> site_tau,
                    const ParamMap& params, Boundary boundary = Boundary::Open);

// Energy of a profile; the unstored torsion at site 0 counts as zero.
double total_energy(const AngleProfile& profile, const EnergyParams& params);

struct EnergyGradient {
  std::vector<double> d_kappa;
  std::vector<double> d_tau;
};

// Partials with respect to kappa[k] and site_tau[k].
EnergyGradient energy_gradient(std::span<const double> kappa, std::span<const double> site_tau,
                               const ParamMap& params, Boundary boundary = Boundary::Open);

// Partials of total_energy(profile, params); d_tau is aligned with profile.tau.
EnergyGradient energy_gradient(const AngleProfile& profile, const EnergyParams& params);

// Torsion that makes dH/dtau vanish: (a + b kappa^2) / (c + d kappa^2).
double torsion_of_kappa(double kappa, const EnergyParams& params);

// lambda (kappa^2 - m^2)^2 - (a + b kappa^2)^2 / (2 (c + d kappa^2)): the per-site
// potential with the torsion eliminated.
double effective_potential(double kappa, const EnergyParams& params);

// dV/d(kappa^2) of effective_potential, evaluated at kappa.
double effective_potential_slope(double kappa, const EnergyParams& params);

// Closed form printed alongside the continuum model:
//   -((b c - a d) / d) / (c + d kappa^2) - ((b^2 + 8 lambda m^2) / (2 b)) kappa^2 + lambda kappa^4.
// It does not equal effective_potential; kept for comparison only. Requires b != 0, d != 0.
double effective_potential_reference(double kappa, const EnergyParams& params);

// Per-site terms of H without the difference sum.
double site_energy(double kappa, double tau, const EnergyParams& params);

}  // namespace kinkfold
