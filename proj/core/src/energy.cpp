#include "kinkfold/energy.hpp"

#include <cmath>
#include <string>

#include "kinkfold/errors.hpp"

namespace kinkfold {

EnergyParams EnergyParams::checked(double lambda, double m, double a, double b, double c,
                                   double d) {
  EnergyParams p{lambda, m, a, b, c, d};
  p.validate();
  return p;
}

void EnergyParams::validate() const {
  for (double v : {lambda, m, a, b, c, d}) {
    if (!std::isfinite(v)) throw InvalidArgument("energy couplings must be finite");
  }
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  if (c < 0.0) throw InvalidArgument("c must be non-negative");
  if (d < 0.0) throw InvalidArgument("d must be non-negative");
}

ParamMap::ParamMap(const EnergyParams& uniform) : per_site_{uniform} {}

ParamMap::ParamMap(std::vector<EnergyParams> per_site) : per_site_(std::move(per_site)) {
  if (per_site_.empty()) throw InvalidArgument("parameter map needs at least one entry");
}

void ParamMap::check_covers(std::size_t sites) const {
  if (per_site_.size() != 1 && per_site_.size() != sites) {
    throw InconsistentLengths("parameter map has " + std::to_string(per_site_.size()) +
                              " entries for " + std::to_string(sites) + " sites");
  }
}

namespace {

void check_site_arrays(std::span<const double> kappa, std::span<const double> site_tau,
                       const ParamMap& params) {
  if (kappa.size() != site_tau.size()) {
    throw InconsistentLengths("site-aligned energy needs one torsion per bond angle");
  }
  params.check_covers(kappa.size());
}

std::vector<double> site_aligned_tau(const AngleProfile& profile) {
  check_profile_shape(profile);
  std::vector<double> tau(profile.kappa.size(), 0.0);
  for (std::size_t k = 1; k < tau.size(); ++k) tau[k] = profile.tau[k - 1];
  return tau;
}

double denominator(double kappa, const EnergyParams& p) {
  const double den = p.c + p.d * kappa * kappa;
  if (den == 0.0) {
    throw DivisionByZero("c + d kappa^2 vanishes at kappa = " + std::to_string(kappa));
  }
  return den;
}

}  // namespace

double site_energy(double kappa, double tau, const EnergyParams& p) {
  const double k2 = kappa * kappa;
  const double well = k2 - p.m * p.m;
  return p.lambda * well * well + 0.5 * p.d * k2 * tau * tau - p.b * k2 * tau - p.a * tau +
         0.5 * p.c * tau * tau;
}

double total_energy(std::span<const double> kappa, std::span<const double> site_tau,
                    const ParamMap& params, Boundary boundary) {
  check_site_arrays(kappa, site_tau, params);
  const std::size_t n = kappa.size();
  double h = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double diff = kappa[i + 1] - kappa[i];
    h += diff * diff;
  }
  if (boundary == Boundary::VirtualZero && n > 0) {
    h += kappa.front() * kappa.front() + kappa.back() * kappa.back();
  }
  for (std::size_t i = 0; i < n; ++i) h += site_energy(kappa[i], site_tau[i], params.at(i));
  return h;
}

double total_energy(const AngleProfile& profile, const EnergyParams& params) {
  const std::vector<double> tau = site_aligned_tau(profile);
  return total_energy(profile.kappa, tau, ParamMap(params));
}

EnergyGradient energy_gradient(std::span<const double> kappa, std::span<const double> site_tau,
                               const ParamMap& params, Boundary boundary) {
  check_site_arrays(kappa, site_tau, params);
  const std::size_t n = kappa.size();
  EnergyGradient g{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double diff = kappa[i + 1] - kappa[i];
    g.d_kappa[i] -= 2.0 * diff;
    g.d_kappa[i + 1] += 2.0 * diff;
  }
  if (boundary == Boundary::VirtualZero && n > 0) {
    g.d_kappa.front() += 2.0 * kappa.front();
    g.d_kappa.back() += 2.0 * kappa.back();
  }
  for (std::size_t i = 0; i < n; ++i) {
    const EnergyParams& p = params.at(i);
    const double k = kappa[i];
    const double t = site_tau[i];
    g.d_kappa[i] += 4.0 * p.lambda * k * (k * k - p.m * p.m) + p.d * k * t * t - 2.0 * p.b * k * t;
    g.d_tau[i] = p.d * k * k * t - p.b * k * k - p.a + p.c * t;
  }
  return g;
}

EnergyGradient energy_gradient(const AngleProfile& profile, const EnergyParams& params) {
  const std::vector<double> tau = site_aligned_tau(profile);
  EnergyGradient site = energy_gradient(profile.kappa, tau, ParamMap(params));
  EnergyGradient out;
  out.d_kappa = std::move(site.d_kappa);
  if (!site.d_tau.empty()) out.d_tau.assign(site.d_tau.begin() + 1, site.d_tau.end());
  return out;
}

double torsion_of_kappa(double kappa, const EnergyParams& p) {
  return (p.a + p.b * kappa * kappa) / denominator(kappa, p);
}

double effective_potential(double kappa, const EnergyParams& p) {
  const double k2 = kappa * kappa;
  const double well = k2 - p.m * p.m;
  const double num = p.a + p.b * k2;
  return p.lambda * well * well - num * num / (2.0 * denominator(kappa, p));
}

double effective_potential_slope(double kappa, const EnergyParams& p) {
  const double tau = torsion_of_kappa(kappa, p);
  return 2.0 * p.lambda * (kappa * kappa - p.m * p.m) - p.b * tau + 0.5 * p.d * tau * tau;
}

double effective_potential_reference(double kappa, const EnergyParams& p) {
  if (p.b == 0.0 || p.d == 0.0) {
    throw DivisionByZero("reference potential divides by b and d");
  }
  const double k2 = kappa * kappa;
  return -((p.b * p.c - p.a * p.d) / p.d) / denominator(kappa, p) -
         ((p.b * p.b + 8.0 * p.lambda * p.m * p.m) / (2.0 * p.b)) * k2 + p.lambda * k2 * k2;
}

}  // namespace kinkfold
