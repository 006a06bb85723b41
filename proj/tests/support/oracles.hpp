#pragma once

// Slow, independent reference computations for the tests.

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "kinkfold/energy.hpp"
#include "kinkfold/geometry.hpp"

namespace oracle {

using kinkfold::CalphaChain;
using kinkfold::Point3;

// Random walk built directly in Cartesian space: every bond 3.8 Å, every bond angle
// (between consecutive bonds) in [min_bend, max_bend], uniform dihedral.
inline CalphaChain random_canonical_chain(std::size_t n, std::mt19937_64& rng,
                                          double min_bend = 0.3, double max_bend = 2.4) {
  std::uniform_real_distribution<double> bend(min_bend, max_bend);
  std::uniform_real_distribution<double> phi(-kinkfold::kPi, kinkfold::kPi);
  std::normal_distribution<double> g;
  CalphaChain c;
  c.vertices.push_back(Point3(g(rng), g(rng), g(rng)));
  Point3 dir(g(rng), g(rng), g(rng));
  dir.normalize();
  Point3 ref(g(rng), g(rng), g(rng));
  for (std::size_t i = 1; i < n; ++i) {
    if (i > 1) {
      Point3 u = ref - ref.dot(dir) * dir;
      if (u.norm() < 1e-6) u = dir.unitOrthogonal();
      u.normalize();
      const Point3 w = dir.cross(u);
      const double th = bend(rng), ph = phi(rng);
      const Point3 next = std::cos(th) * dir + std::sin(th) * (std::cos(ph) * u + std::sin(ph) * w);
      ref = dir;
      dir = next.normalized();
    }
    c.vertices.push_back(c.vertices.back() + 3.8 * dir);
  }
  return c;
}

inline double rg_double_sum(const CalphaChain& c) {
  const double n = static_cast<double>(c.size());
  double s = 0.0;
  for (const auto& a : c.vertices)
    for (const auto& b : c.vertices) s += (a - b).squaredNorm();
  return std::sqrt(s / (2.0 * n * n));
}

inline bool self_avoiding_all_pairs(const CalphaChain& c, double d = 3.8) {
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t k = i + 2; k < c.size(); ++k)
      if ((c.vertices[i] - c.vertices[k]).norm() <= d) return false;
  return true;
}

// Plain RMS distance with no superposition.
inline double raw_rmsd(const std::vector<Point3>& a, const std::vector<Point3>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]).squaredNorm();
  return std::sqrt(s / static_cast<double>(a.size()));
}

// Both chains centred, then min over rotations: a coarse grid on the rotation vector
// followed by a shrinking pattern search around the best grid point.
inline double rmsd_by_search(const CalphaChain& a, const CalphaChain& b) {
  auto centred = [](const CalphaChain& c) {
    Point3 m = Point3::Zero();
    for (const auto& v : c.vertices) m += v;
    m /= static_cast<double>(c.size());
    std::vector<Point3> out;
    for (const auto& v : c.vertices) out.push_back(v - m);
    return out;
  };
  const auto pa = centred(a), pb = centred(b);
  auto cost = [&](const Eigen::Vector3d& w) {
    const double angle = w.norm();
    Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
    if (angle > 0) r = Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
    std::vector<Point3> rb;
    for (const auto& v : pb) rb.push_back(r * v);
    return raw_rmsd(pa, rb);
  };
  Eigen::Vector3d best = Eigen::Vector3d::Zero();
  double best_cost = cost(best);
  const int steps = 16;
  for (int i = -steps; i <= steps; ++i)
    for (int j = -steps; j <= steps; ++j)
      for (int k = -steps; k <= steps; ++k) {
        Eigen::Vector3d w(i, j, k);
        w *= kinkfold::kPi / steps;
        if (w.norm() > kinkfold::kPi) continue;
        const double c = cost(w);
        if (c < best_cost) best_cost = c, best = w;
      }
  for (double h = kinkfold::kPi / steps; h > 1e-12; h *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int axis = 0; axis < 3; ++axis)
        for (int sgn : {-1, 1}) {
          Eigen::Vector3d w = best;
          w[axis] += sgn * h;
          const double c = cost(w);
          if (c < best_cost) best_cost = c, best = w, improved = true;
        }
    }
  }
  return best_cost;
}

// Direct term-by-term sum of the energy over site-aligned arrays, open ends.
inline double energy_terms(const std::vector<double>& kappa, const std::vector<double>& tau,
                           const kinkfold::EnergyParams& p) {
  double h = 0.0;
  for (std::size_t i = 0; i + 1 < kappa.size(); ++i) {
    const double diff = kappa[i + 1] - kappa[i];
    h += diff * diff;
  }
  for (std::size_t i = 0; i < kappa.size(); ++i) {
    const double k = kappa[i], t = tau[i];
    const double well = k * k - p.m * p.m;
    h += p.lambda * well * well;
    h += 0.5 * p.d * k * k * t * t;
    h -= p.b * k * k * t;
    h -= p.a * t;
    h += 0.5 * p.c * t * t;
  }
  return h;
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double relative_error(double got, double want, double floor = 1e-8) {
  return std::abs(got - want) / std::max(std::abs(want), floor);
}

// Pearson chi-square statistic of counts against a uniform distribution.
inline double chi_square_uniform(const std::vector<std::size_t>& counts) {
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  const double expect = total / static_cast<double>(counts.size());
  double chi2 = 0.0;
  for (auto c : counts) chi2 += (c - expect) * (c - expect) / expect;
  return chi2;
}

// Upper 1% point of chi-square with k degrees of freedom (Wilson-Hilferty).
inline double chi_square_99(double k) {
  const double z = 2.3263478740408408;
  const double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
  return k * t * t * t;
}

}  // namespace oracle
