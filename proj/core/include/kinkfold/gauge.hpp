#pragma once

// Frame rotations about the tangents. They change (kappa, tau) but never the chain.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "kinkfold/geometry.hpp"

namespace kinkfold {

// `deltas` holds one rotation angle per frame (kappa.size() + 1 of them).
// Frame f turns by deltas[f]; transport k picks up tau += deltas[k+1] - deltas[k]
// and its bond-angle generator rotates by deltas[k+1]. When every resulting phase
// is a multiple of pi the phases fold back into the sign of kappa.
AngleProfile so2_gauge(const AngleProfile& profile, std::span<const double> deltas);

// kappa[k] -> -kappa[k] for k >= site, and the torsion paired with kappa[site]
// shifts by -pi. Equivalent to so2_gauge with deltas[f] = pi for f > site.
AngleProfile z2_gauge(const AngleProfile& profile, std::size_t site);

struct UnfoldOptions {
  double tau_threshold = 2.5;   // rad; |tau| above this marks an irregular site
  std::size_t merge_gap = 1;    // irregular sites this close share a run
};

struct GaugeUnfolding {
  AngleProfile profile;
  std::vector<std::size_t> applied_sites;  // kappa sites passed to z2_gauge, in order
};

// Sum |kappa[k+1]-kappa[k]| + sum |wrap(tau[j+1]-tau[j])|.
double total_variation(const AngleProfile& profile);

// Greedy Z2 unfolding: one flip per irregular-torsion run, kept only if it
// lowers total_variation.
GaugeUnfolding unfold_gauge(const AngleProfile& profile, const UnfoldOptions& options = {});

// Indices into profile.tau of the torsion just after a sign change, plus
// every torsion that is exactly zero. Sorted, unique.
std::vector<std::size_t> detect_flattening_points(const AngleProfile& profile);

// Collapse sorted indices into inclusive [first, last] runs; gaps up to `max_gap` are bridged.
std::vector<std::pair<std::size_t, std::size_t>> merge_runs(std::span<const std::size_t> indices,
                                                            std::size_t max_gap = 1);

}  // namespace kinkfold
