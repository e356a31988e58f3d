#include "pyraquad/decomposition.hpp"
#include "pyraquad/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <array>
#include <random>

using namespace pyraquad;

namespace {

Matrix pts2(std::initializer_list<std::pair<double, double>> list) {
  Matrix m(2, static_cast<Eigen::Index>(list.size()));
  Eigen::Index c = 0;
  for (auto [x, y] : list) m.col(c++) << x, y;
  return m;
}

Matrix pts3(std::initializer_list<std::array<double, 3>> list) {
  Matrix m(3, static_cast<Eigen::Index>(list.size()));
  Eigen::Index c = 0;
  for (auto p : list) m.col(c++) << p[0], p[1], p[2];
  return m;
}

}  // namespace

TEST(AffineFrame, UnitTriangle) {
  const Polytope t = simplex_from_points(pts2({{0, 0}, {1, 0}, {0, 1}}));
  const AffineFrame f = affine_frame(t, t.top());
  EXPECT_NEAR(f.measure_scale, 1.0, 1e-14);
  EXPECT_EQ(f.dim(), 2);
}

TEST(AffineFrame, SegmentScale) {
  const Polytope s = simplex_from_points(pts2({{0, 0}, {2, 0}}));
  EXPECT_NEAR(affine_frame(s, s.top()).measure_scale, 2.0, 1e-14);
}

TEST(AffineFrame, ShearedTriangle) {
  const Polytope t = simplex_from_points(pts2({{0, 0}, {1, 0}, {1, 1}}));
  const AffineFrame f = affine_frame(t, t.top());
  EXPECT_NEAR(f.measure_scale, 1.0, 1e-14);
  EXPECT_NEAR(std::abs(f.basis_q(0, 0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(f.basis_q(1, 1)), 1.0, 1e-14);
  EXPECT_NEAR(f.basis_q(1, 0), 0.0, 1e-14);
}

TEST(AffineFrame, VertexHasEmptyBasis) {
  const Polytope t = simplex(2);
  const Face& v = t.face(*t.find_face({1}));
  const AffineFrame f = affine_frame(t, v);
  EXPECT_EQ(f.dim(), 0);
  EXPECT_EQ(f.measure_scale, 1.0);
}

TEST(AffineFrame, ConsistencyOnRandomFaces) {
  std::mt19937 rng(7);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 20; ++trial) {
    Matrix pts(5, 4);
    for (Eigen::Index i = 0; i < pts.size(); ++i) pts.data()[i] = n01(rng);
    const Polytope s = simplex_from_points(pts);
    for (const Face& f : s.faces()) {
      const AffineFrame fr = affine_frame(s, f);
      const Eigen::Index j = fr.dim();
      EXPECT_LE((fr.basis_q.transpose() * fr.basis_q - Matrix::Identity(j, j)).norm(), 1e-12);
      EXPECT_LE((fr.basis_q * fr.factor_r - fr.basis_t).norm(), 1e-12);
      for (Eigen::Index i = 0; i < j; ++i) EXPECT_GT(fr.factor_r(i, i), 0.0);
    }
  }
}

TEST(AffineFrame, DegenerateFaceRaises) {
  try {
    affine_frame_of_points(pts2({{0, 0}, {1, 1}, {2, 2}}), 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateFace);
  }
}

TEST(Distance, Examples) {
  const Polytope seg = simplex_from_points(pts2({{0, 0}, {1, 0}}));
  EXPECT_NEAR(dist_point_to_aff(Eigen::Vector2d(0, 1), seg, seg.top()), 1.0, 1e-15);
  EXPECT_NEAR(dist_point_to_aff(Eigen::Vector2d(5, 0), seg, seg.top()), 0.0, 1e-15);
  const Polytope c = cube(3);
  EXPECT_NEAR(dist_point_to_aff(Eigen::Vector3d(1, 1, 1), c, c.face(*c.find_face({0}))), std::sqrt(3.0), 1e-15);
}

TEST(Distance, ScalesLinearlyAlongHullSegments) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const Polytope tet = simplex_from_points(pts3({{0, 0, 0}, {1, 0.2, 0}, {0.3, 1, 0.1}, {0.2, 0.4, 1.5}}));
  const Face& a = tet.face(*tet.find_face({0, 1}));
  const Face& b = tet.face(*tet.find_face({2, 3}));
  const AffineFrame fa = affine_frame(tet, a);
  for (int trial = 0; trial < 200; ++trial) {
    const double s = u01(rng);
    const double t = u01(rng);
    const double lam = u01(rng);
    const Vector pa = (1 - s) * tet.vertex(0) + s * tet.vertex(1);
    const Vector pb = (1 - t) * tet.vertex(2) + t * tet.vertex(3);
    const Vector x = (1 - lam) * pa + lam * pb;
    EXPECT_NEAR(dist_point_to_aff(x, fa), lam * dist_point_to_aff(pb, fa), 1e-10);
  }
}

TEST(Product, SquareFromSegments) {
  const Polytope seg = simplex(1);
  const Polytope sq = cartesian_product(seg, seg);
  EXPECT_EQ(sq.num_vertices(), 4);
  int counts[3] = {0, 0, 0};
  for (const Face& f : sq.faces()) ++counts[f.dim];
  EXPECT_EQ(counts[0], 4);
  EXPECT_EQ(counts[1], 4);
  EXPECT_EQ(counts[2], 1);
}

TEST(Product, TopFacetCounts) {
  const Polytope tri = simplex(2);
  const Polytope quad = convex_polygon(pts2({{0, 0}, {2, 0}, {2, 1}, {0, 1}}));
  const Polytope tt = cartesian_product(tri, tri);
  EXPECT_EQ(tt.num_vertices(), 9);
  EXPECT_EQ(tt.dim(), 4);
  EXPECT_EQ(tt.top().facet_ids.size(), 6u);
  EXPECT_EQ(cartesian_product(tri, quad).top().facet_ids.size(), 7u);
}

TEST(Product, FaceCountsMultiply) {
  const Polytope a = simplex(3);
  const Polytope b = cube(2);
  std::vector<int> fa(4, 0), fb(3, 0), fp(6, 0);
  for (const Face& f : a.faces()) ++fa[f.dim];
  for (const Face& f : b.faces()) ++fb[f.dim];
  for (const Face& f : cartesian_product(a, b).faces()) ++fp[f.dim];
  for (int j = 0; j <= 5; ++j) {
    int expect = 0;
    for (int i = 0; i <= 3; ++i)
      if (j - i >= 0 && j - i <= 2) expect += fa[i] * fb[j - i];
    EXPECT_EQ(fp[j], expect) << "dimension " << j;
  }
}

TEST(HullAssumption, Examples) {
  const Polytope sq = cube(2);
  EXPECT_TRUE(check_hull_assumption(sq, sq.face(*sq.find_face({0})), sq.face(*sq.find_face({1, 3}))));
  const Face& e = sq.face(*sq.find_face({1, 3}));
  EXPECT_FALSE(check_hull_assumption(sq, e, e));
  const Polytope da = simplex_from_points(pts3({{0, 0, 0}, {1, 1, 0}}));
  const Polytope db = simplex_from_points(pts3({{0, 0, 1}, {1, 1, 1}}));
  EXPECT_FALSE(check_hull_assumption(da, db));
}

TEST(HullDescriptor, UnitDeltaAndVolumeIdentity) {
  const Polytope a = simplex_from_points(pts2({{0, 0}}));
  for (const Matrix& bp : {pts2({{1, 0}, {1, 1}}), pts2({{0, 1}, {1, 1}})}) {
    const Polytope b = simplex_from_points(bp);
    const HullDescriptor h = hull_descriptor(a, b);
    EXPECT_NEAR(h.delta, 1.0, 1e-14);
    EXPECT_EQ(h.s, 0);
    EXPECT_EQ(h.r, 1);
    EXPECT_NEAR(h.delta * 1.0 * 1.0 * beta_fn(h.s + 1, h.r + 1), 0.5, 1e-15);
  }
}

TEST(HullDescriptor, ViolationRaises) {
  const Polytope a = simplex_from_points(pts3({{0, 0, 0}, {1, 1, 0}}));
  const Polytope b = simplex_from_points(pts3({{0, 0, 1}, {1, 1, 1}}));
  try {
    hull_descriptor(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AssumptionViolated);
  }
}

TEST(HullDescriptor, InvariantUnderReorderingAndScaling) {
  std::mt19937 rng(3);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 20; ++trial) {
    Matrix pa(5, 2), pb(5, 3);
    for (Eigen::Index i = 0; i < pa.size(); ++i) pa.data()[i] = n01(rng);
    for (Eigen::Index i = 0; i < pb.size(); ++i) pb.data()[i] = n01(rng);
    const double ref = hull_descriptor(simplex_from_points(pa), simplex_from_points(pb)).delta;
    // Reverse vertex orders (changes anchors and bases).
    const Matrix ra = pa.rowwise().reverse();
    const Matrix rb = pb.rowwise().reverse();
    const double reordered = hull_descriptor(simplex_from_points(ra), simplex_from_points(rb)).delta;
    EXPECT_NEAR(reordered / ref, 1.0, 1e-10);
    // Non-orthonormal rescaled bases through the frame interface.
    AffineFrame fa = affine_frame_of_points(pa, 1);
    AffineFrame fb = affine_frame_of_points(pb, 2);
    fa.basis_t *= 3.0;
    fa.factor_r *= 3.0;
    fa.measure_scale *= 3.0;
    fb.basis_t.col(1) = fb.basis_t.col(1) * 0.25 + fb.basis_t.col(0);
    const ThinQR q = thin_qr(fb.basis_t);
    fb.basis_q = q.q;
    fb.factor_r = q.r;
    fb.measure_scale = q.r.diagonal().prod();
    EXPECT_NEAR(hull_descriptor(fa, fb).delta / ref, 1.0, 1e-10);
  }
}

TEST(FaceVolume, Examples) {
  const Polytope sq = cube(2);
  EXPECT_NEAR(face_volume(sq, sq.top()), 1.0, 1e-14);
  const Polytope tri = simplex(2);
  EXPECT_NEAR(face_volume(tri, tri.top()), 0.5, 1e-14);
  const Polytope c3 = cube(3);
  EXPECT_EQ(triangulate(c3).size(), 6u);
  EXPECT_NEAR(face_volume(c3, c3.top()), 1.0, 1e-13);
}

TEST(Polytope, ValidationRejectsBadLattice) {
  Matrix pts = pts2({{0, 0}, {1, 0}, {0, 1}});
  std::vector<Face> faces(2);
  faces[0] = {0, {0}, 0, {}};
  faces[1] = {1, {0, 1, 2}, 2, {0}};
  EXPECT_THROW(Polytope(pts, faces, 1), Error);
  // Collinear "triangle".
  EXPECT_THROW(simplex_from_points(pts2({{0, 0}, {1, 1}, {2, 2}})), Error);
}

TEST(Polytope, DoublePyramidLattice) {
  const Polytope p = double_pyramid();
  EXPECT_EQ(p.dim(), 3);
  EXPECT_EQ(p.top().facet_ids.size(), 8u);
  EXPECT_NEAR(volume(p), 4.0 / 3.0, 1e-13);
}
