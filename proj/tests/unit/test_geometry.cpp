#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kinkfold/errors.hpp"
#include "kinkfold/geometry.hpp"
#include "oracles.hpp"

using namespace kinkfold;

namespace {

CalphaChain make_chain(std::initializer_list<Point3> pts) {
  CalphaChain c;
  c.vertices.assign(pts.begin(), pts.end());
  return c;
}

CalphaChain zigzag() {
  return make_chain({{0, 0, 0}, {0, 0, 3.8}, {0, 3.8, 3.8}, {0, 3.8, 7.6}});
}

AngleProfile uniform_profile(std::size_t vertices, double kappa, double tau) {
  AngleProfile p;
  p.kappa.assign(vertices - 2, kappa);
  p.tau.assign(vertices - 3, tau);
  p.bond_lengths = canonical_bond_lengths(vertices);
  return p;
}

double max_abs(const Eigen::Matrix3d& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Frames, ZigzagBinormalsAlongX) {
  const auto frames = compute_frames(zigzag());
  ASSERT_EQ(frames.size(), 2u);
  for (const auto& f : frames) {
    EXPECT_NEAR(std::abs(f.b.x()), 1.0, 1e-15);
    EXPECT_NEAR(f.b.y(), 0.0, 1e-15);
    EXPECT_NEAR(f.b.z(), 0.0, 1e-15);
  }
}

TEST(Frames, OrthonormalRightHandedOnHelix) {
  const CalphaChain helix = reconstruct(uniform_profile(30, kPi / 2, 1.0));
  const auto frames = compute_frames(helix);
  ASSERT_EQ(frames.size(), 28u);
  Point3 axis = Point3::Zero();
  for (const auto& f : frames) {
    EXPECT_NEAR(f.n.norm(), 1.0, 1e-12);
    EXPECT_NEAR(f.b.norm(), 1.0, 1e-12);
    EXPECT_NEAR(f.t.norm(), 1.0, 1e-12);
    EXPECT_NEAR(f.n.dot(f.b), 0.0, 1e-12);
    EXPECT_NEAR(f.n.dot(f.t), 0.0, 1e-12);
    EXPECT_NEAR(f.b.dot(f.t), 0.0, 1e-12);
    EXPECT_LT((f.n - f.b.cross(f.t)).norm(), 1e-12);
    axis += f.t;
  }
  // tangents advance along the axis: their mean has a steady non-zero component
  axis.normalize();
  for (const auto& f : frames) EXPECT_GT(f.t.dot(axis), 0.0);
}

TEST(Frames, CollinearIsDegenerate) {
  const auto c = make_chain({{0, 0, 0}, {0, 0, 3.8}, {0, 0, 7.6}});
  try {
    compute_frames(c);
    FAIL();
  } catch (const DegenerateFrame& e) {
    EXPECT_EQ(e.vertex(), 1u);
  }
}

TEST(Frames, CoincidentVertices) {
  const auto c = make_chain({{0, 0, 0}, {0, 0, 3.8}, {0, 0, 3.8}, {1, 2, 3}});
  EXPECT_THROW(compute_frames(c), CoincidentVertices);
}

TEST(Frames, TooShort) {
  EXPECT_THROW(compute_frames(make_chain({{0, 0, 0}, {0, 0, 3.8}})), InvalidArgument);
}

TEST(Angles, Zigzag) {
  const AngleProfile p = compute_angles(zigzag());
  ASSERT_EQ(p.kappa.size(), 2u);
  ASSERT_EQ(p.tau.size(), 1u);
  EXPECT_NEAR(p.kappa[0], kPi / 2, 1e-15);
  EXPECT_NEAR(p.kappa[1], kPi / 2, 1e-15);
  EXPECT_DOUBLE_EQ(p.tau[0], -kPi);
  EXPECT_EQ(p.bond_lengths.size(), 3u);
}

TEST(Angles, AlphaHelixValues) {
  const AngleProfile p = compute_angles(reconstruct(uniform_profile(20, kPi / 2, 1.0)));
  for (double k : p.kappa) EXPECT_NEAR(k, kPi / 2, 1e-12);
  for (double t : p.tau) EXPECT_NEAR(t, 1.0, 1e-12);
}

TEST(Angles, BetaStrandValues) {
  const AngleProfile p = compute_angles(reconstruct(uniform_profile(20, 1.0, kPi - 1e-3)));
  for (double k : p.kappa) EXPECT_NEAR(k, 1.0, 1e-12);
  for (double t : p.tau) EXPECT_NEAR(std::abs(t), kPi, 1e-2);
}

TEST(Angles, CountsAndRanges) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + trial;
    const AngleProfile p = compute_angles(oracle::random_canonical_chain(n, rng, 0.01, 3.1));
    ASSERT_EQ(p.kappa.size(), n - 2);
    ASSERT_EQ(p.tau.size(), n - 3);
    ASSERT_EQ(p.bond_lengths.size(), n - 1);
    for (double k : p.kappa) {
      EXPECT_GE(k, 0.0);
      EXPECT_LE(k, kPi);
    }
    for (double t : p.tau) {
      EXPECT_GE(t, -kPi);
      EXPECT_LT(t, kPi);
    }
  }
}

TEST(Angles, NearlyStraightChainHasNoNan) {
  const auto c = make_chain({{0, 0, 0}, {0, 0, 3.8}, {0, 1e-8, 7.6}, {1e-8, 0, 11.4}});
  const AngleProfile p = compute_angles(c);
  for (double k : p.kappa) EXPECT_TRUE(std::isfinite(k));
  for (double t : p.tau) EXPECT_TRUE(std::isfinite(t));
}

TEST(Angles, ResidueNumbersSetOffset) {
  CalphaChain c = zigzag();
  c.residue_numbers = {10, 11, 12, 13};
  EXPECT_EQ(compute_angles(c).index_offset, 11);
}

TEST(Transfer, KnownValues) {
  EXPECT_TRUE(transfer_matrix(0.0, 0.0) == Eigen::Matrix3d::Identity());
  Eigen::Matrix3d want;
  want << 0, 0, -1, 0, 1, 0, 1, 0, 0;
  EXPECT_LT(max_abs(transfer_matrix(kPi / 2, 0.0) - want), 1e-15);
}

TEST(Transfer, ProperRotation) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const auto r = transfer_matrix(u(rng), u(rng));
    EXPECT_LT(max_abs(r * r.transpose() - Eigen::Matrix3d::Identity()), 1e-12);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
    const auto q = transfer_matrix(u(rng), u(rng), u(rng));
    EXPECT_LT(max_abs(q * q.transpose() - Eigen::Matrix3d::Identity()), 1e-12);
  }
}

TEST(Transfer, ZeroPhaseMatchesFrenet) {
  EXPECT_LT(max_abs(transfer_matrix(0.7, -1.3, 0.0) - transfer_matrix(0.7, -1.3)), 1e-15);
}

TEST(Reconstruct, StraightChain) {
  const CalphaChain c = reconstruct(uniform_profile(6, 0.0, 0.0));
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_NEAR(c.vertices[i].x(), 0.0, 1e-15);
    EXPECT_NEAR(c.vertices[i].y(), 0.0, 1e-15);
    EXPECT_NEAR(c.vertices[i].z(), 3.8 * i, 1e-12);
  }
}

TEST(Reconstruct, InitialFrame) {
  const CalphaChain c = reconstruct(uniform_profile(5, 1.1, 0.4));
  EXPECT_EQ(c.vertices[0], Point3::Zero());
  const Point3 t0 = (c.vertices[1] - c.vertices[0]).normalized();
  EXPECT_LT((t0 - Point3(0, 0, 1)).norm(), 1e-15);
  EXPECT_NEAR(c.vertices[2].x(), 0.0, 1e-15);
}

TEST(Reconstruct, HelixHasConstantGeometry) {
  const CalphaChain c = reconstruct(uniform_profile(40, kPi / 2, 1.0));
  // every vertex sees the same distances to its next three neighbours
  for (int gap = 1; gap <= 4; ++gap) {
    const double d0 = (c.vertices[gap] - c.vertices[0]).norm();
    for (std::size_t i = 1; i + gap < c.size(); ++i)
      EXPECT_NEAR((c.vertices[i + gap] - c.vertices[i]).norm(), d0, 1e-10);
  }
}

TEST(Reconstruct, InconsistentLengths) {
  AngleProfile p = uniform_profile(6, 1.0, 1.0);
  p.tau.pop_back();
  EXPECT_THROW(reconstruct(p), InconsistentLengths);
  p = uniform_profile(6, 1.0, 1.0);
  p.bond_lengths.push_back(3.8);
  EXPECT_THROW(reconstruct(p), InconsistentLengths);
}

TEST(Reconstruct, RoundTripRandomChains) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const CalphaChain c = oracle::random_canonical_chain(10 + trial, rng);
    const CalphaChain back = reconstruct(compute_angles(c));
    EXPECT_LT(rmsd(c, back), 1e-8);
  }
}

TEST(Reconstruct, RoundTripKeepsBondLengths) {
  std::mt19937_64 rng(12);
  CalphaChain c = oracle::random_canonical_chain(25, rng);
  // stretch one bond as a cis step would
  const Point3 shift = (c.vertices[8] - c.vertices[7]).normalized() * -1.0;
  for (std::size_t i = 8; i < c.size(); ++i) c.vertices[i] += shift;
  const CalphaChain back = reconstruct(compute_angles(c));
  EXPECT_LT(rmsd(c, back), 1e-8);
  EXPECT_NEAR((back.vertices[8] - back.vertices[7]).norm(), 2.8, 1e-12);
}

TEST(Rmsd, IdentityAndRigidMotion) {
  std::mt19937_64 rng(3);
  const CalphaChain c = oracle::random_canonical_chain(30, rng);
  EXPECT_NEAR(rmsd(c, c), 0.0, 1e-12);
  const Eigen::Matrix3d r = Eigen::AngleAxisd(1.234, Point3(1, -2, 0.5).normalized()).toRotationMatrix();
  CalphaChain moved = c;
  for (auto& v : moved.vertices) v = r * v + Point3(4, -7, 12);
  EXPECT_LT(rmsd(c, moved), 1e-10);
}

TEST(Rmsd, MatchesRotationSearch) {
  const auto a = make_chain({{0, 0, 0}, {3.8, 0, 0}, {3.8, 3.8, 0}, {3.8, 3.8, 3.8}});
  const auto b = make_chain({{0.3, -0.2, 0.1}, {3.1, 1.9, -0.4}, {5.0, 4.5, 1.2}, {2.0, 6.1, 3.3}});
  EXPECT_NEAR(rmsd(a, b), oracle::rmsd_by_search(a, b), 1e-4);
  const auto c = make_chain({{1, 2, 3}, {-1, 0.5, 2}, {0, 0, 0}, {2, -3, 1}});
  EXPECT_NEAR(rmsd(a, c), oracle::rmsd_by_search(a, c), 1e-4);
}

TEST(Rmsd, MirrorImageIsNotSuperposable) {
  std::mt19937_64 rng(4);
  const CalphaChain c = oracle::random_canonical_chain(20, rng);
  CalphaChain mirror = c;
  for (auto& v : mirror.vertices) v.x() = -v.x();
  EXPECT_GT(rmsd(c, mirror), 0.1);
}

TEST(Rmsd, LengthMismatch) {
  EXPECT_THROW(rmsd(zigzag(), make_chain({{0, 0, 0}})), LengthMismatch);
}

TEST(Rmsd, SuperposeOntoAndDistances) {
  std::mt19937_64 rng(8);
  const CalphaChain c = oracle::random_canonical_chain(15, rng);
  CalphaChain moved = c;
  moved.b_factors.assign(c.size(), 12.5);
  const Eigen::Matrix3d r = Eigen::AngleAxisd(0.7, Point3(0, 1, 1).normalized()).toRotationMatrix();
  for (auto& v : moved.vertices) v = r * v + Point3(1, 2, 3);
  const CalphaChain back = superpose_onto(c, moved);
  EXPECT_LT(oracle::raw_rmsd(back.vertices, c.vertices), 1e-10);
  EXPECT_EQ(back.b_factors, moved.b_factors);
  for (double d : superposed_distances(c, moved)) EXPECT_LT(d, 1e-10);
}

TEST(RadiusOfGyration, SimpleCases) {
  EXPECT_DOUBLE_EQ(radius_of_gyration(make_chain({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}})), 0.0);
  EXPECT_NEAR(radius_of_gyration(make_chain({{0, 0, 0}, {0, 0, 5.0}})), 2.5, 1e-15);
}

TEST(RadiusOfGyration, MatchesDoubleSum) {
  std::mt19937_64 rng(6);
  for (std::size_t n = 1; n <= 20; ++n) {
    const CalphaChain c = oracle::random_canonical_chain(n, rng);
    EXPECT_NEAR(radius_of_gyration(c), oracle::rg_double_sum(c), 1e-12);
  }
}

TEST(RadiusOfGyration, StraightChainClosedForm) {
  for (std::size_t n : {2u, 5u, 16u, 64u}) {
    const CalphaChain c = reconstruct(uniform_profile(std::max<std::size_t>(n, 3), 0.0, 0.0));
    const double nn = static_cast<double>(c.size());
    EXPECT_NEAR(radius_of_gyration(c), std::sqrt((nn * nn - 1.0) / 12.0) * 3.8, 1e-10);
  }
}

TEST(Canonical, BondLengthRules) {
  CalphaChain c = zigzag();
  EXPECT_TRUE(is_canonical(c));
  c.vertices[3].z() += 0.2;
  EXPECT_FALSE(is_canonical(c));
  auto cis = make_chain({{0, 0, 0}, {0, 0, 3.8}, {0, 2.8, 3.8}});
  EXPECT_FALSE(is_canonical(cis));
  cis.cis_flags = {false, false, true};
  EXPECT_TRUE(is_canonical(cis));
  EXPECT_EQ(canonical_bond_lengths(3, {false, false, true}), (std::vector<double>{3.8, 2.8}));
}

TEST(WrapAngle, Range) {
  EXPECT_DOUBLE_EQ(wrap_angle(kPi), -kPi);
  EXPECT_DOUBLE_EQ(wrap_angle(-kPi), -kPi);
  EXPECT_NEAR(wrap_angle(3 * kPi + 0.5), -kPi + 0.5, 1e-12);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int i = 0; i < 10000; ++i) {
    const double x = u(rng);
    const double w = wrap_angle(x);
    EXPECT_GE(w, -kPi);
    EXPECT_LT(w, kPi);
    EXPECT_NEAR(std::remainder(x - w, 2 * kPi), 0.0, 1e-9);
  }
}
