#include "kinkfold/soliton.hpp"

#include <unsupported/Eigen/NonLinearOptimization>

#include <algorithm>
#include <cmath>
#include <string>

#include "kinkfold/errors.hpp"

namespace kinkfold {

namespace {

constexpr double kDivergenceBound = 1e3;

// Residual and torsion-eliminated energy in one sweep.
double residual_and_energy(std::span<const double> kappa, const ParamMap& params,
                           std::vector<double>& residual) {
  const std::size_t n = kappa.size();
  residual.resize(n);
  double energy = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double k = kappa[i];
    const double next = i + 1 < n ? kappa[i + 1] : 0.0;
    const EnergyParams& p = params.at(i);
    residual[i] = next - 2.0 * k + prev - k * effective_potential_slope(k, p);
    const double diff = k - prev;
    energy += diff * diff + effective_potential(k, p);
    prev = k;
  }
  if (n > 0) energy += kappa[n - 1] * kappa[n - 1];
  return energy;
}

// V_eff(after) - V_eff(before) in factored form, so tiny steps keep their sign.
double potential_change(double before, double after, const EnergyParams& p) {
  const double dq = (after - before) * (after + before);
  const double q = before * before, q2 = after * after;
  const double well = p.lambda * dq * (q + q2 - 2.0 * p.m * p.m);
  const double u = p.a + p.b * q, u2 = p.a + p.b * q2;
  const double den = p.c + p.d * q, den2 = p.c + p.d * q2;
  if (den == 0.0 || den2 == 0.0) throw DivisionByZero("c + d kappa^2 vanishes");
  return well - dq * (p.b * (u + u2) * den - p.d * u * u) / (2.0 * den * den2);
}

// Energy difference between two profiles that differ by a small step.
double energy_change(const std::vector<double>& before, const std::vector<double>& after,
                     const ParamMap& params) {
  const std::size_t n = before.size();
  double change = 0.0;
  double prev_b = 0.0, prev_a = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double b = i < n ? before[i] : 0.0;
    const double a = i < n ? after[i] : 0.0;
    const double step = (a - b) - (prev_a - prev_b);
    change += step * ((a - prev_a) + (b - prev_b));
    if (i < n) change += potential_change(b, a, params.at(i));
    prev_b = b;
    prev_a = a;
  }
  return change;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

std::vector<double> dnls_residual(std::span<const double> kappa, const ParamMap& params) {
  params.check_covers(kappa.size());
  std::vector<double> r;
  residual_and_energy(kappa, params, r);
  return r;
}

double relaxation_energy(std::span<const double> kappa, const ParamMap& params) {
  params.check_covers(kappa.size());
  std::vector<double> r;
  return residual_and_energy(kappa, params, r);
}

RelaxResult relax(std::span<const double> initial_kappa, const ParamMap& params,
                  const RelaxOptions& options) {
  if (!(options.epsilon > 0.0)) throw InvalidArgument("relaxation step epsilon must be positive");
  params.check_covers(initial_kappa.size());

  RelaxResult out;
  out.kappa.assign(initial_kappa.begin(), initial_kappa.end());
  std::vector<double> residual;
  double energy = residual_and_energy(out.kappa, params, residual);
  double res = max_abs(residual);
  RelaxationReport& report = out.report;
  report.energy_series.push_back(energy);

  std::vector<double> previous;
  while (!(res < options.tol) && report.iterations < options.max_iters) {
    previous = out.kappa;
    for (std::size_t i = 0; i < out.kappa.size(); ++i) {
      out.kappa[i] += options.epsilon * residual[i];
      if (!(std::abs(out.kappa[i]) <= kDivergenceBound)) {
        throw Diverged("relaxation diverged at site " + std::to_string(i) + " after " +
                       std::to_string(report.iterations + 1) + " iterations");
      }
    }
    residual_and_energy(out.kappa, params, residual);
    const double change = energy_change(previous, out.kappa, params);
    if (change > 1e-12 * (1.0 + std::abs(energy))) {
      throw Diverged("relaxation energy increased at iteration " +
                     std::to_string(report.iterations + 1) + "; reduce epsilon");
    }
    energy += change;
    res = max_abs(residual);
    ++report.iterations;
    if (options.record_every > 0 && report.iterations % options.record_every == 0) {
      report.energy_series.push_back(energy);
    }
  }
  if (options.record_every == 0 || report.iterations % options.record_every != 0) {
    report.energy_series.push_back(energy);
  }
  report.final_residual = res;
  report.converged = res < options.tol;
  return out;
}

std::vector<double> eliminated_torsions(std::span<const double> kappa, const ParamMap& params) {
  params.check_covers(kappa.size());
  std::vector<double> tau(kappa.size());
  for (std::size_t k = 0; k < kappa.size(); ++k) tau[k] = torsion_of_kappa(kappa[k], params.at(k));
  return tau;
}

AngleProfile profile_from_kappa(std::span<const double> kappa, const ParamMap& params,
                                std::vector<double> bond_lengths, int index_offset) {
  AngleProfile p;
  p.kappa.assign(kappa.begin(), kappa.end());
  const std::vector<double> tau = eliminated_torsions(kappa, params);
  if (!tau.empty()) p.tau.assign(tau.begin() + 1, tau.end());
  for (double& t : p.tau) t = wrap_angle(t);
  p.bond_lengths = std::move(bond_lengths);
  p.index_offset = index_offset;
  check_profile_shape(p);
  return p;
}

double kink_ansatz(double site, const SolitonAnsatz& a) {
  // Divide through by the larger exponential so neither side overflows.
  const double x = site - a.s;
  const double lhs = a.c1 * x;
  const double rhs = -a.c2 * x;
  if (lhs >= rhs) {
    const double e = std::exp(rhs - lhs);
    return (a.m1 - a.m2 * e) / (1.0 + e);
  }
  const double e = std::exp(lhs - rhs);
  return (a.m1 * e - a.m2) / (e + 1.0);
}

double continuum_kink(double arc_length, double m, double lambda, double s0) {
  if (!(lambda > 0.0)) throw InvalidArgument("continuum kink needs lambda > 0");
  return m * std::tanh(m * std::sqrt(lambda) * (arc_length - s0));
}

namespace {

// The ansatz depends on c1 and c2 only through c1 + c2, so the fit works with
// (slope = c1 + c2, m1, m2, s).
struct AnsatzResiduals {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  std::span<const double> target;
  std::size_t begin;

  int inputs() const { return 4; }
  int values() const { return static_cast<int>(target.size()); }

  static double logistic(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  }

  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& f) const {
    for (std::size_t j = 0; j < target.size(); ++j) {
      const double x = static_cast<double>(begin + j) - p[3];
      const double w = logistic(p[0] * x);
      f[static_cast<Eigen::Index>(j)] = (p[1] + p[2]) * w - p[2] - target[j];
    }
    return 0;
  }

  int df(const Eigen::VectorXd& p, Eigen::MatrixXd& jac) const {
    for (std::size_t j = 0; j < target.size(); ++j) {
      const auto row = static_cast<Eigen::Index>(j);
      const double x = static_cast<double>(begin + j) - p[3];
      const double w = logistic(p[0] * x);
      const double dw = w * (1.0 - w);
      jac(row, 0) = (p[1] + p[2]) * dw * x;
      jac(row, 1) = w;
      jac(row, 2) = w - 1.0;
      jac(row, 3) = -(p[1] + p[2]) * dw * p[0];
    }
    return 0;
  }
};

}  // namespace

SolitonAnsatz fit_ansatz(std::span<const double> target, std::size_t begin, std::size_t end) {
  if (end > target.size() || begin >= end) {
    throw IndexOutOfRange("fit window [" + std::to_string(begin) + ", " + std::to_string(end) +
                          ") outside profile of " + std::to_string(target.size()) + " sites");
  }
  if (end - begin < 4) throw InsufficientData("kink fit needs at least 4 sites");

  std::size_t changes = 0;
  double crossing = 0.0;
  for (std::size_t i = begin; i + 1 < end; ++i) {
    if ((target[i] < 0.0) != (target[i + 1] < 0.0)) {
      ++changes;
      crossing = static_cast<double>(i) + target[i] / (target[i] - target[i + 1]);
    }
  }
  if (changes == 0) throw NoSignChange("fit window has no sign change in kappa");
  if (changes > 1) {
    throw InvalidArgument("fit window has " + std::to_string(changes) +
                          " sign changes; exactly one expected");
  }

  const std::span<const double> window = target.subspan(begin, end - begin);
  AnsatzResiduals functor{window, begin};
  Eigen::VectorXd p(4);
  p << 2.0, window.back(), -window.front(), crossing;

  Eigen::LevenbergMarquardt<AnsatzResiduals> lm(functor);
  lm.parameters.xtol = 1e-15;
  lm.parameters.ftol = 1e-15;
  lm.parameters.maxfev = 10000;
  lm.minimize(p);
  if (!p.allFinite()) throw FitDiverged("kink fit produced non-finite parameters");

  SolitonAnsatz a;
  if (p[0] < 0.0) {
    // A negative slope is the same profile with the plateaus exchanged.
    p[0] = -p[0];
    const double m1 = p[1];
    p[1] = -p[2];
    p[2] = -m1;
  }
  if (!(p[0] > 0.0)) throw FitDiverged("kink fit collapsed to zero slope");
  a.c1 = a.c2 = 0.5 * p[0];
  a.m1 = p[1];
  a.m2 = p[2];
  a.s = p[3];
  return a;
}

}  // namespace kinkfold
