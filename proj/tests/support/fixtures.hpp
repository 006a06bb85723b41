#pragma once

// Shared synthetic structures.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "kinkfold/params_io.hpp"
#include "kinkfold/soliton.hpp"

namespace fixture {

using namespace kinkfold;

// Plateaus +m, -m, +m of `width` sites each, relaxed to a fixed point.
struct TwoKink {
  ParamMap params;
  AngleProfile profile;
  CalphaChain chain;
};

inline TwoKink two_kink(const ParamMap& params, std::size_t width, double m, double epsilon) {
  const std::size_t sites = 3 * width;
  std::vector<double> start(sites);
  for (std::size_t i = 0; i < sites; ++i) start[i] = (i / width == 1) ? -m : m;
  const RelaxResult r = relax(start, params, {epsilon, 1'000'000, 1e-10, 0});
  TwoKink out{params, profile_from_kappa(r.kappa, params, canonical_bond_lengths(sites + 2)), {}};
  out.chain = reconstruct(out.profile);
  return out;
}

// Two segments split at `split` sites.
inline std::vector<Segment> two_segments(std::size_t sites, std::size_t split, const EnergyParams& a,
                                         const EnergyParams& b) {
  return {Segment{0, split, a}, Segment{split, sites, b}};
}

// Cosine similarity of `kappa` with amp * tanh(slope (i - centre)) at the best centre and
// slope found by a grid search followed by pattern refinement. amp is the mean end plateau.
inline double best_tanh_cosine(const std::vector<double>& kappa) {
  const double amp = 0.5 * (std::abs(kappa.front()) + std::abs(kappa.back()));
  const double sign = kappa.back() >= 0 ? 1.0 : -1.0;
  auto cosine = [&](double centre, double slope) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < kappa.size(); ++i) {
      const double t = sign * amp * std::tanh(slope * (static_cast<double>(i) - centre));
      dot += t * kappa[i];
      na += t * t;
      nb += kappa[i] * kappa[i];
    }
    return dot / std::sqrt(na * nb);
  };
  const double n = static_cast<double>(kappa.size());
  double bc = 0.0, bs = 0.1, best = -2.0;
  for (double c = 0.0; c <= n; c += 0.25)
    for (double s = 0.05; s <= 3.0; s += 0.05)
      if (const double v = cosine(c, s); v > best) best = v, bc = c, bs = s;
  for (double h = 0.1; h > 1e-6; h *= 0.5) {
    for (int it = 0; it < 20; ++it) {
      bool moved = false;
      for (auto [dc, ds] : {std::pair{h, 0.0}, {-h, 0.0}, {0.0, h}, {0.0, -h}}) {
        if (bs + ds <= 0) continue;
        if (const double v = cosine(bc + dc, bs + ds); v > best) best = v, bc += dc, bs += ds, moved = true;
      }
      if (!moved) break;
    }
  }
  return best;
}

// max |(k(s+h) - 2k(s) + k(s-h)) / h^2 - 2 lambda k (k^2 - m^2)| over s in [-3, 3] at 0.1 spacing.
inline double kink_equation_residual(double h, double m, double lambda) {
  double worst = 0.0;
  for (int j = -30; j <= 30; ++j) {
    const double s = 0.1 * j;
    const double k = continuum_kink(s, m, lambda, 0.0);
    const double kss =
        (continuum_kink(s + h, m, lambda, 0.0) - 2.0 * k + continuum_kink(s - h, m, lambda, 0.0)) / (h * h);
    worst = std::max(worst, std::abs(kss - 2.0 * lambda * k * (k * k - m * m)));
  }
  return worst;
}

}  // namespace fixture
