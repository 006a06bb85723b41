#include "kinkfold/geometry.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include <cmath>
#include <string>

#include "kinkfold/errors.hpp"

namespace kinkfold {

namespace {

constexpr double kCoincidenceTolerance = 1e-12;
constexpr double kCollinearTolerance = 1e-9;

Point3 unit_tangent(const CalphaChain& chain, std::size_t i) {
  const Point3 d = chain.vertices[i + 1] - chain.vertices[i];
  const double len = d.norm();
  if (!(len > kCoincidenceTolerance)) throw CoincidentVertices(i);
  return d / len;
}

std::vector<Point3> unit_tangents(const CalphaChain& chain) {
  std::vector<Point3> t;
  t.reserve(chain.size() - 1);
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) t.push_back(unit_tangent(chain, i));
  return t;
}

std::vector<FrenetFrame> frames_from_tangents(const std::vector<Point3>& t) {
  std::vector<FrenetFrame> frames;
  frames.reserve(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i) {
    const Point3 cross = t[i - 1].cross(t[i]);
    const double norm = cross.norm();
    if (!(norm > kCollinearTolerance)) throw DegenerateFrame(i);
    FrenetFrame f;
    f.t = t[i];
    f.b = cross / norm;
    f.n = f.b.cross(f.t);
    frames.push_back(f);
  }
  return frames;
}

Eigen::Matrix3Xd as_matrix(const CalphaChain& c) {
  Eigen::Matrix3Xd m(3, static_cast<Eigen::Index>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = c.vertices[i];
  return m;
}

// Rotated and translated copy of `mobile` that best fits `target`.
Eigen::Matrix3Xd superpose(const CalphaChain& target, const CalphaChain& mobile) {
  if (target.size() != mobile.size()) {
    throw LengthMismatch("superposition needs equal vertex counts (" +
                         std::to_string(target.size()) + " vs " + std::to_string(mobile.size()) +
                         ")");
  }
  if (target.empty()) throw InvalidArgument("superposition of empty chains");
  Eigen::Matrix3Xd a = as_matrix(target);
  Eigen::Matrix3Xd b = as_matrix(mobile);
  const Eigen::Vector3d ca = a.rowwise().mean();
  const Eigen::Vector3d cb = b.rowwise().mean();
  a.colwise() -= ca;
  b.colwise() -= cb;

  const Eigen::Matrix3d h = b * a.transpose();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix3d& u = svd.matrixU();
  const Eigen::Matrix3d& v = svd.matrixV();
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((v * u.transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  const Eigen::Matrix3d rot = v * d * u.transpose();

  Eigen::Matrix3Xd fitted = rot * b;
  fitted.colwise() += ca;
  return fitted;
}

}  // namespace

bool is_canonical(const CalphaChain& chain, double tolerance) {
  for (std::size_t i = 1; i < chain.size(); ++i) {
    const double expected = chain.is_cis(i) ? kCisProlineBondLength : kCanonicalBondLength;
    const double len = (chain.vertices[i] - chain.vertices[i - 1]).norm();
    if (std::abs(len - expected) > tolerance) return false;
  }
  return true;
}

void check_profile_shape(const AngleProfile& p) {
  const std::size_t m = p.kappa.size();
  const std::size_t expected_tau = m == 0 ? 0 : m - 1;
  if (p.tau.size() != expected_tau) {
    throw InconsistentLengths("profile has " + std::to_string(m) + " bond angles but " +
                              std::to_string(p.tau.size()) + " torsions (expected " +
                              std::to_string(expected_tau) + ")");
  }
  const bool lengths_ok = p.bond_lengths.size() == m + 1 || (m == 0 && p.bond_lengths.empty());
  if (!lengths_ok) {
    throw InconsistentLengths("profile has " + std::to_string(m) + " bond angles but " +
                              std::to_string(p.bond_lengths.size()) + " bond lengths");
  }
  if (!p.kappa_phase.empty() && p.kappa_phase.size() != m) {
    throw InconsistentLengths("kappa_phase must be empty or match the bond angle count");
  }
}

double wrap_angle(double angle) {
  if (angle >= -kPi && angle < kPi) return angle;
  double w = std::fmod(angle + kPi, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  w -= kPi;
  // fmod can land exactly on +pi after the shift when angle is a hair below -pi.
  if (w >= kPi) w -= 2.0 * kPi;
  return w;
}

std::vector<FrenetFrame> compute_frames(const CalphaChain& chain) {
  if (chain.size() < 3) {
    throw InvalidArgument("frames need at least 3 vertices, got " + std::to_string(chain.size()));
  }
  return frames_from_tangents(unit_tangents(chain));
}

AngleProfile compute_angles(const CalphaChain& chain) {
  if (chain.size() < 3) {
    throw InvalidArgument("angles need at least 3 vertices, got " + std::to_string(chain.size()));
  }
  const std::vector<Point3> t = unit_tangents(chain);
  const std::vector<FrenetFrame> frames = frames_from_tangents(t);

  AngleProfile p;
  const std::size_t n = chain.size();
  p.bond_lengths.reserve(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    p.bond_lengths.push_back((chain.vertices[i + 1] - chain.vertices[i]).norm());
  }

  // atan2 of (|sin|, cos) equals the clamped arccos but keeps full precision near 0 and pi.
  p.kappa.reserve(n - 2);
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    p.kappa.push_back(std::atan2(t[k].cross(t[k + 1]).norm(), t[k].dot(t[k + 1])));
  }

  // frames[j] is the frame at vertex j + 1. An exactly antiparallel pair gives atan2(0, -1) = pi,
  // which wraps onto the canonical boundary -pi.
  p.tau.reserve(n > 3 ? n - 3 : 0);
  for (std::size_t j = 0; j + 1 < frames.size(); ++j) {
    const FrenetFrame& f0 = frames[j];
    const FrenetFrame& f1 = frames[j + 1];
    const double s = f0.b.cross(f1.b).dot(f0.t);
    const double c = f0.b.dot(f1.b);
    p.tau.push_back(wrap_angle(std::atan2(s, c)));
  }

  p.index_offset = chain.residue_numbers.size() == n ? chain.residue_numbers[1] : 1;
  return p;
}

FrameMatrix zweibein_rotation(double delta) {
  const double c = std::cos(delta);
  const double s = std::sin(delta);
  FrameMatrix z;
  z << c, s, 0.0,
      -s, c, 0.0,
      0.0, 0.0, 1.0;
  return z;
}

namespace {

FrameMatrix bend(double kappa) {
  const double c = std::cos(kappa);
  const double s = std::sin(kappa);
  FrameMatrix y;
  y << c, 0.0, -s,
      0.0, 1.0, 0.0,
      s, 0.0, c;
  return y;
}

}  // namespace

FrameMatrix transfer_matrix(double kappa, double tau) { return bend(kappa) * zweibein_rotation(tau); }

FrameMatrix transfer_matrix(double kappa, double tau, double phase) {
  return zweibein_rotation(phase) * bend(kappa) * zweibein_rotation(tau - phase);
}

CalphaChain reconstruct(const AngleProfile& profile) {
  check_profile_shape(profile);
  CalphaChain chain;
  const std::size_t m = profile.kappa.size();
  if (profile.bond_lengths.empty()) {
    chain.vertices.push_back(Point3::Zero());
    return chain;
  }
  chain.vertices.reserve(m + 2);

  FrameMatrix frame;
  frame << 0.0, 1.0, 0.0,   // n0 = +y
      -1.0, 0.0, 0.0,       // b0 = -x
      0.0, 0.0, 1.0;        // t0 = +z

  Point3 r = Point3::Zero();
  chain.vertices.push_back(r);
  r += profile.bond_lengths[0] * frame.row(2).transpose();
  chain.vertices.push_back(r);

  for (std::size_t k = 0; k < m; ++k) {
    const double phase = profile.has_phases() ? profile.kappa_phase[k] : 0.0;
    // Transport 0 carries no stored torsion; tau = phase keeps t1 in the y-z plane.
    const double tau = k == 0 ? phase : profile.tau[k - 1];
    frame = transfer_matrix(profile.kappa[k], tau, phase) * frame;
    r += profile.bond_lengths[k + 1] * frame.row(2).transpose();
    chain.vertices.push_back(r);
  }
  return chain;
}

double rmsd(const CalphaChain& a, const CalphaChain& b) {
  const Eigen::Matrix3Xd fitted = superpose(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += (fitted.col(static_cast<Eigen::Index>(i)) - a.vertices[i]).squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(a.size()));
}

CalphaChain superpose_onto(const CalphaChain& target, const CalphaChain& mobile) {
  const Eigen::Matrix3Xd fitted = superpose(target, mobile);
  CalphaChain out = mobile;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.vertices[i] = fitted.col(static_cast<Eigen::Index>(i));
  }
  return out;
}

std::vector<double> superposed_distances(const CalphaChain& target, const CalphaChain& mobile) {
  const Eigen::Matrix3Xd fitted = superpose(target, mobile);
  std::vector<double> d(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    d[i] = (fitted.col(static_cast<Eigen::Index>(i)) - target.vertices[i]).norm();
  }
  return d;
}

double radius_of_gyration(const CalphaChain& chain) {
  if (chain.empty()) return 0.0;
  Point3 centroid = Point3::Zero();
  for (const auto& v : chain.vertices) centroid += v;
  centroid /= static_cast<double>(chain.size());
  double sum = 0.0;
  for (const auto& v : chain.vertices) sum += (v - centroid).squaredNorm();
  return std::sqrt(sum / static_cast<double>(chain.size()));
}

std::vector<double> canonical_bond_lengths(std::size_t vertex_count,
                                           const std::vector<bool>& cis_flags) {
  std::vector<double> lengths;
  if (vertex_count < 2) return lengths;
  lengths.reserve(vertex_count - 1);
  for (std::size_t i = 1; i < vertex_count; ++i) {
    const bool cis = i < cis_flags.size() && cis_flags[i];
    lengths.push_back(cis ? kCisProlineBondLength : kCanonicalBondLength);
  }
  return lengths;
}

}  // namespace kinkfold
