#include "kinkfold/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kinkfold/errors.hpp"

namespace kinkfold {

namespace {

constexpr double kPhaseFoldTolerance = 1e-12;

// Distance of `phase` to the nearest multiple of pi, and whether that multiple is odd.
std::pair<double, bool> nearest_pi_multiple(double phase) {
  const double w = wrap_angle(phase);
  const double to_zero = std::abs(w);
  const double to_pi = kPi - std::abs(w);
  return to_zero <= to_pi ? std::pair{to_zero, false} : std::pair{to_pi, true};
}

}  // namespace

AngleProfile so2_gauge(const AngleProfile& profile, std::span<const double> deltas) {
  check_profile_shape(profile);
  const std::size_t m = profile.kappa.size();
  if (deltas.size() != m + 1) {
    throw InconsistentLengths("so2_gauge needs one rotation per frame: expected " +
                              std::to_string(m + 1) + ", got " + std::to_string(deltas.size()));
  }

  AngleProfile out = profile;
  out.kappa_phase.assign(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const double phase = profile.has_phases() ? profile.kappa_phase[k] : 0.0;
    out.kappa_phase[k] = wrap_angle(phase + deltas[k + 1]);
  }
  for (std::size_t j = 0; j < out.tau.size(); ++j) {
    // tau[j] belongs to transport j + 1, between frames j + 1 and j + 2.
    out.tau[j] = wrap_angle(profile.tau[j] + deltas[j + 2] - deltas[j + 1]);
  }

  const bool foldable = std::all_of(out.kappa_phase.begin(), out.kappa_phase.end(), [](double p) {
    return nearest_pi_multiple(p).first < kPhaseFoldTolerance;
  });
  if (foldable) {
    for (std::size_t k = 0; k < m; ++k) {
      if (nearest_pi_multiple(out.kappa_phase[k]).second) out.kappa[k] = -out.kappa[k];
      out.kappa[k] = wrap_angle(out.kappa[k]);
    }
    out.kappa_phase.clear();
  }
  return out;
}

AngleProfile z2_gauge(const AngleProfile& profile, std::size_t site) {
  check_profile_shape(profile);
  if (site >= profile.kappa.size()) {
    throw IndexOutOfRange("z2 site " + std::to_string(site) + " outside profile of " +
                          std::to_string(profile.kappa.size()) + " sites");
  }
  AngleProfile out = profile;
  for (std::size_t k = site; k < out.kappa.size(); ++k) out.kappa[k] = wrap_angle(-out.kappa[k]);
  if (site >= 1) out.tau[site - 1] = wrap_angle(out.tau[site - 1] - kPi);
  return out;
}

double total_variation(const AngleProfile& p) {
  double tv = 0.0;
  for (std::size_t k = 0; k + 1 < p.kappa.size(); ++k) tv += std::abs(p.kappa[k + 1] - p.kappa[k]);
  for (std::size_t j = 0; j + 1 < p.tau.size(); ++j) tv += std::abs(wrap_angle(p.tau[j + 1] - p.tau[j]));
  return tv;
}

std::vector<std::size_t> detect_flattening_points(const AngleProfile& profile) {
  const auto& tau = profile.tau;
  std::vector<std::size_t> points;
  for (std::size_t j = 0; j < tau.size(); ++j) {
    if (tau[j] == 0.0) points.push_back(j);
    if (j + 1 < tau.size() && tau[j] * tau[j + 1] < 0.0) points.push_back(j + 1);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

std::vector<std::pair<std::size_t, std::size_t>> merge_runs(std::span<const std::size_t> indices,
                                                            std::size_t max_gap) {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  for (std::size_t idx : indices) {
    if (!runs.empty() && idx >= runs.back().second && idx - runs.back().second <= max_gap) {
      runs.back().second = idx;
    } else {
      runs.emplace_back(idx, idx);
    }
  }
  return runs;
}

GaugeUnfolding unfold_gauge(const AngleProfile& profile, const UnfoldOptions& options) {
  check_profile_shape(profile);
  GaugeUnfolding result{profile, {}};
  const auto& tau = profile.tau;
  if (tau.empty()) return result;

  std::vector<std::size_t> irregular;
  for (std::size_t j = 0; j < tau.size(); ++j) {
    const bool large = std::abs(tau[j]) > options.tau_threshold;
    const bool sign_change_before = j > 0 && tau[j - 1] * tau[j] <= 0.0;
    const bool sign_change_after = j + 1 < tau.size() && tau[j] * tau[j + 1] <= 0.0;
    if (large || sign_change_before || sign_change_after) irregular.push_back(j);
  }
  const auto runs = merge_runs(irregular, options.merge_gap);

  double current_tv = total_variation(result.profile);
  for (const auto& [first, last] : runs) {
    // tau[j] pairs with kappa site j + 1. Try the run centroid first so ties keep it.
    const std::size_t centroid = (first + last) / 2 + 1;
    std::vector<std::size_t> candidates{centroid};
    for (std::size_t j = first; j <= last; ++j) {
      if (j + 1 != centroid) candidates.push_back(j + 1);
    }

    std::size_t best_site = 0;
    double best_tv = current_tv;
    AngleProfile best;
    for (std::size_t site : candidates) {
      AngleProfile trial = z2_gauge(result.profile, site);
      const double tv = total_variation(trial);
      if (tv < best_tv - 1e-12) {
        best_tv = tv;
        best_site = site;
        best = std::move(trial);
      }
    }
    if (best_tv < current_tv - 1e-12) {
      result.profile = std::move(best);
      result.applied_sites.push_back(best_site);
      current_tv = best_tv;
    }
  }
  return result;
}

}  // namespace kinkfold
