#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "kinkfold/errors.hpp"
#include "kinkfold/soliton.hpp"

namespace kinkfold {

namespace {

constexpr std::size_t kCouplings = 6;
constexpr double kMinPositive = 1e-6;

// lambda, c, d are kept positive and stepped multiplicatively; m, a, b additively.
constexpr std::array<bool, kCouplings> kPositive{true, false, false, false, true, true};

double& coupling(EnergyParams& p, std::size_t j) {
  switch (j) {
    case 0: return p.lambda;
    case 1: return p.m;
    case 2: return p.a;
    case 3: return p.b;
    case 4: return p.c;
    default: return p.d;
  }
}

class Objective {
 public:
  Objective(const AngleProfile& target, const RelaxOptions& relax)
      : target_(target), target_chain_(reconstruct(target)), relax_(relax) {}

  // RMSD of the predicted chain; +inf when relaxation fails or the couplings are unusable.
  double operator()(const std::vector<Segment>& segments) {
    ++evaluations_;
    try {
      const ParamMap params = param_map_from_segments(segments, target_.sites());
      RelaxationReport report;
      const AngleProfile predicted = predict_profile(target_, params, relax_, &report);
      if (!report.converged) return std::numeric_limits<double>::infinity();
      return rmsd(target_chain_, reconstruct(predicted));
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  }

  const CalphaChain& target_chain() const { return target_chain_; }
  std::size_t evaluations() const { return evaluations_; }

 private:
  const AngleProfile& target_;
  CalphaChain target_chain_;
  RelaxOptions relax_;
  std::size_t evaluations_ = 0;
};

}  // namespace

AngleProfile predict_profile(const AngleProfile& target, const ParamMap& params,
                             const RelaxOptions& options, RelaxationReport* report) {
  RelaxResult fixed = relax(target.kappa, params, options);
  if (report) *report = std::move(fixed.report);
  return profile_from_kappa(fixed.kappa, params, target.bond_lengths, target.index_offset);
}

EnergyParams vacuum_guess(const AngleProfile& target, std::size_t begin, std::size_t end,
                          double lambda) {
  check_profile_shape(target);
  if (begin >= end || end > target.sites()) {
    throw IndexOutOfRange("segment [" + std::to_string(begin) + ", " + std::to_string(end) +
                          ") outside profile of " + std::to_string(target.sites()) + " sites");
  }
  double kappa = 0.0;
  double s = 0.0;
  double c = 0.0;
  for (std::size_t k = begin; k < end; ++k) {
    kappa += target.kappa[k];
    if (k > 0) {
      s += std::sin(target.tau[k - 1]);
      c += std::cos(target.tau[k - 1]);
    }
  }
  EnergyParams p;
  p.lambda = lambda;
  p.m = kappa / static_cast<double>(end - begin);
  p.a = s == 0.0 && c == 0.0 ? 0.0 : std::atan2(s, c);
  p.b = 0.0;
  p.c = 1.0;
  p.d = 0.0;
  p.validate();
  return p;
}

MultiSolitonFit fit_multisoliton(const AngleProfile& target, std::vector<Segment> segments,
                                 const MultiSolitonOptions& options) {
  check_profile_shape(target);
  if (target.has_phases()) throw InvalidArgument("fit target must be in a Frenet gauge");
  if (target.sites() < 2) throw InsufficientData("fit target needs at least two bond angles");
  check_partition(segments, target.sites());

  Objective objective(target, options.relax);
  double best = objective(segments);
  if (!std::isfinite(best)) {
    throw FitDiverged("initial parameters do not relax to a usable profile");
  }

  MultiSolitonFit fit;
  fit.report.initial_rmsd = best;

  // Per-coupling step: relative for positive couplings, absolute otherwise.
  std::vector<std::array<double, kCouplings>> steps(segments.size());
  for (auto& s : steps) s.fill(options.initial_step);

  std::size_t sweep = 0;
  while (sweep < options.max_sweeps && best > options.rmsd_goal) {
    ++sweep;
    bool improved = false;
    for (std::size_t seg = 0; seg < segments.size(); ++seg) {
      for (std::size_t j = 0; j < kCouplings; ++j) {
        double& step = steps[seg][j];
        if (step < options.min_step) continue;
        const double current = coupling(segments[seg].params, j);
        bool accepted = false;
        for (const double sign : {1.0, -1.0}) {
          double trial_value;
          if (kPositive[j]) {
            trial_value = current > kMinPositive ? current * std::exp(sign * step)
                                                 : std::max(kMinPositive, current + sign * step);
          } else {
            trial_value = current + sign * step;
          }
          std::vector<Segment> trial = segments;
          coupling(trial[seg].params, j) = trial_value;
          const double value = objective(trial);
          if (value < best) {
            best = value;
            segments = std::move(trial);
            accepted = true;
            break;
          }
        }
        step = accepted ? std::min(2.0 * step, 1.0) : 0.5 * step;
        improved = improved || accepted;
      }
    }
    const bool all_small = std::all_of(steps.begin(), steps.end(), [&](const auto& s) {
      return std::all_of(s.begin(), s.end(), [&](double x) { return x < options.min_step; });
    });
    if (!improved && all_small) break;
  }

  const ParamMap params = param_map_from_segments(segments, target.sites());
  fit.profile = predict_profile(target, params, options.relax);
  fit.chain = reconstruct(fit.profile);
  fit.report.final_rmsd = rmsd(objective.target_chain(), fit.chain);
  fit.report.distances = superposed_distances(objective.target_chain(), fit.chain);
  fit.report.evaluations = objective.evaluations();
  fit.report.sweeps = sweep;
  fit.segments = std::move(segments);
  return fit;
}

}  // namespace kinkfold
