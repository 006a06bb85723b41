#pragma once

// Discrete Frenet frames on Cα traces: chain <-> (bond angle, torsion) profile.

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <vector>

namespace kinkfold {

using Point3 = Eigen::Vector3d;

// Rows are (n, b, t).
using FrameMatrix = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kCanonicalBondLength = 3.8;   // Å, trans peptide
inline constexpr double kCisProlineBondLength = 2.8;  // Å
inline constexpr double kBondLengthTolerance = 0.1;   // Å

struct CalphaChain {
  std::vector<Point3> vertices;
  // Optional per-vertex metadata; each is either empty or vertices.size() long.
  std::vector<std::string> residue_labels;
  std::vector<int> residue_numbers;
  std::vector<double> b_factors;
  std::vector<bool> cis_flags;

  std::size_t size() const noexcept { return vertices.size(); }
  bool empty() const noexcept { return vertices.empty(); }
  bool is_cis(std::size_t i) const { return i < cis_flags.size() && cis_flags[i]; }
};

// Every bond is 3.8 Å (2.8 Å into a cis vertex) within the tolerance.
bool is_canonical(const CalphaChain& chain, double tolerance = kBondLengthTolerance);

struct FrenetFrame {
  Point3 n;
  Point3 b;
  Point3 t;
};

// Bond angles, torsions and bond lengths of a chain with N vertices.
//
//   bond_lengths[k]  |r(k+1) - r(k)|                         k = 0 .. N-2
//   kappa[k]         bend at vertex k+1, transports frame k -> k+1
//   tau[j]           torsion of the transport j+1 (pairs with kappa[j+1])
//
// The torsion of transport 0 rotates the unobservable first binormal and
// is not stored. kappa_phase is empty in the Frenet gauge; a general SO(2)
// gauge rotates each bond-angle generator by its phase inside the (n, b)
// plane. Residue index of kappa[k] is k + index_offset.
struct AngleProfile {
  std::vector<double> kappa;
  std::vector<double> tau;
  std::vector<double> bond_lengths;
  std::vector<double> kappa_phase;
  int index_offset = 1;

  std::size_t sites() const noexcept { return kappa.size(); }
  // Torsion paired with kappa[k]; the unstored transport-0 torsion reads as 0.
  double tau_at_site(std::size_t k) const { return k == 0 ? 0.0 : tau.at(k - 1); }
  bool has_phases() const noexcept { return !kappa_phase.empty(); }
};

// Throws InconsistentLengths if the array sizes do not describe one chain.
void check_profile_shape(const AngleProfile& profile);

// Wrap into [-pi, pi).
double wrap_angle(double angle);

// Frames at interior vertices 1 .. N-2 (one per vertex with two tangents).
std::vector<FrenetFrame> compute_frames(const CalphaChain& chain);

AngleProfile compute_angles(const CalphaChain& chain);

// Frenet-gauge transfer matrix, frame(k+1) = R * frame(k).
FrameMatrix transfer_matrix(double kappa, double tau);
// Transfer matrix with the bond-angle generator rotated by `phase`.
FrameMatrix transfer_matrix(double kappa, double tau, double phase);
// SO(2) rotation of the (n, b) zweibein by `delta` about t.
FrameMatrix zweibein_rotation(double delta);

// r0 = origin, t0 = +z, t1 in the y-z plane.
CalphaChain reconstruct(const AngleProfile& profile);

// Optimal rigid superposition (Kabsch) followed by the RMS deviation.
double rmsd(const CalphaChain& a, const CalphaChain& b);

// `mobile` moved rigidly onto `target`; metadata is kept.
CalphaChain superpose_onto(const CalphaChain& target, const CalphaChain& mobile);

// Per-vertex distances after superposing `mobile` onto `target`.
std::vector<double> superposed_distances(const CalphaChain& target, const CalphaChain& mobile);

double radius_of_gyration(const CalphaChain& chain);

// Bond lengths for a chain of `vertex_count` vertices at 3.8 Å (2.8 Å into cis vertices).
std::vector<double> canonical_bond_lengths(std::size_t vertex_count,
                                           const std::vector<bool>& cis_flags = {});

}  // namespace kinkfold
