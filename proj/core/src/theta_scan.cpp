#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "kinkfold/dynamics.hpp"
#include "kinkfold/errors.hpp"

namespace kinkfold {

ScalingFit fit_scaling(const std::vector<std::size_t>& lengths, const std::vector<double>& rg) {
  if (lengths.size() != rg.size()) {
    throw LengthMismatch("scaling fit got " + std::to_string(lengths.size()) + " lengths and " +
                         std::to_string(rg.size()) + " radii");
  }
  if (lengths.size() < 4) throw InsufficientData("scaling fit needs at least 4 chain lengths");

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (lengths[i] == 0 || !(rg[i] > 0.0)) {
      throw InvalidArgument("scaling fit needs positive lengths and radii");
    }
    const double x = std::log(static_cast<double>(lengths[i]));
    const double y = std::log(rg[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(lengths.size());
  const double det = n * sxx - sx * sx;
  if (!(det > 0.0)) throw InsufficientData("scaling fit needs distinct chain lengths");
  ScalingFit fit;
  fit.nu = (n * sxy - sx * sy) / det;
  fit.R0 = std::exp((sy - fit.nu * sx) / n);
  fit.points = lengths.size();
  return fit;
}

namespace {

AngleProfile vacuum_helix(std::size_t vertices, const EnergyParams& params) {
  AngleProfile p;
  const std::size_t m = vertices - 2;
  p.kappa.assign(m, params.m);
  p.tau.assign(m - 1, wrap_angle(torsion_of_kappa(params.m, params)));
  p.bond_lengths = canonical_bond_lengths(vertices);
  return p;
}

}  // namespace

ThetaScanResult theta_scan(const EnergyParams& params, const ThetaScanConfig& config) {
  params.validate();
  if (config.chain_lengths.size() < 4) {
    throw InsufficientData("theta scan needs at least 4 chain lengths");
  }
  if (config.kTs.empty()) throw InvalidArgument("theta scan needs at least one kT");
  if (!(config.burn_in_fraction >= 0.0 && config.burn_in_fraction < 1.0)) {
    throw InvalidArgument("burn-in fraction must lie in [0, 1)");
  }
  for (std::size_t n : config.chain_lengths) {
    if (n < 4) throw InvalidArgument("theta scan chains need at least 4 vertices");
    if (!self_avoidance_ok(reconstruct(vacuum_helix(n, params)))) {
      throw InvalidArgument("vacuum helix of " + std::to_string(n) +
                            " vertices is not self-avoiding");
    }
  }

  std::vector<double> kTs = config.kTs;
  std::sort(kTs.begin(), kTs.end());
  const std::size_t lengths = config.chain_lengths.size();
  const std::size_t jobs = lengths * kTs.size();
  std::vector<double> mean_rg(jobs, 0.0);
  std::vector<double> acceptance(jobs, 0.0);
  const auto burn_in = static_cast<std::size_t>(config.burn_in_fraction *
                                                static_cast<double>(config.steps_per_point));

  auto run_job = [&](std::size_t job) {
    const std::size_t li = job / kTs.size();
    const std::size_t ki = job % kTs.size();
    MCConfig mc;
    mc.schedule = {{config.steps_per_point, kTs[ki]}};
    mc.sigma_kappa = config.sigma_kappa;
    mc.sigma_tau = config.sigma_tau;
    mc.seed = stream_seed(config.seed, job);
    mc.measure_every = config.measure_every;
    const Trajectory traj =
        run_schedule(vacuum_helix(config.chain_lengths[li], params), params, mc);
    double sum = 0.0;
    double acc = 0.0;
    std::size_t count = 0;
    for (const TrajectorySample& s : traj.samples) {
      if (s.step == 0 || s.step < burn_in) continue;
      sum += s.rg;
      acc += s.acceptance;
      ++count;
    }
    if (count == 0) {
      sum = traj.samples.back().rg;
      count = 1;
    }
    mean_rg[job] = sum / static_cast<double>(count);
    acceptance[job] = acc / static_cast<double>(count);
  };

  unsigned threads = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(jobs)));
  if (threads == 1) {
    for (std::size_t j = 0; j < jobs; ++j) run_job(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t j = next++; j < jobs; j = next++) run_job(j);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  ThetaScanResult out;
  out.chain_lengths = config.chain_lengths;
  for (std::size_t ki = 0; ki < kTs.size(); ++ki) {
    ThetaScanPoint p;
    p.kT = kTs[ki];
    for (std::size_t li = 0; li < lengths; ++li) {
      p.mean_rg.push_back(mean_rg[li * kTs.size() + ki]);
      p.acceptance.push_back(acceptance[li * kTs.size() + ki]);
    }
    out.points.push_back(std::move(p));
  }
  out.low = fit_scaling(out.chain_lengths, out.points.front().mean_rg);
  out.high = fit_scaling(out.chain_lengths, out.points.back().mean_rg);

  // Mean Rg normalised per length by its largest value, steepest step between neighbouring kTs.
  out.theta_kT = kTs.front();
  if (kTs.size() > 1) {
    std::vector<double> scale(lengths, 0.0);
    for (const ThetaScanPoint& p : out.points) {
      for (std::size_t li = 0; li < lengths; ++li) scale[li] = std::max(scale[li], p.mean_rg[li]);
    }
    double steepest = -1.0;
    for (std::size_t ki = 0; ki + 1 < kTs.size(); ++ki) {
      double change = 0.0;
      for (std::size_t li = 0; li < lengths; ++li) {
        change += std::abs(out.points[ki + 1].mean_rg[li] - out.points[ki].mean_rg[li]) / scale[li];
      }
      if (change > steepest) {
        steepest = change;
        out.theta_kT = std::sqrt(kTs[ki] * kTs[ki + 1]);
      }
    }
  }
  return out;
}

}  // namespace kinkfold
