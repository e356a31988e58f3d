#include "pyraquad/decomposition.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

using namespace pyraquad;

namespace {

double total_measure(const std::vector<HullPiece>& pieces) {
  double sum = 0.0;
  for (const auto& p : pieces) sum += p.measure();
  return sum;
}

}  // namespace

TEST(PyraDecomp, DoublePyramidLattice) {
  const Polytope p = double_pyramid();
  const PyramidalLattice lat = pyra_decomp(p, {0, 1, 2, 3});
  ASSERT_EQ(lat.leaves.size(), 2u);
  std::set<std::vector<int>> leaf_sets;
  for (int l : lat.leaves) leaf_sets.insert(p.face(lat.nodes[l].face_id).vertex_ids);
  EXPECT_TRUE(leaf_sets.count({4}));
  EXPECT_TRUE(leaf_sets.count({5}));
  EXPECT_EQ(lat.nodes[lat.root].apex, 0);
  EXPECT_EQ(enumerate_pieces(lat).size(), 4u);
  EXPECT_LE(lat.num_levels(), 2 + 2);
}

TEST(PyraDecomp, DoublePyramidMergesToTwoHulls) {
  const Polytope p = double_pyramid();
  const auto pieces = merge_paths(pyra_decomp(p, {0, 1, 2, 3}));
  ASSERT_EQ(pieces.size(), 2u);
  for (const auto& piece : pieces) {
    EXPECT_EQ(piece.s(), 2);
    EXPECT_EQ(piece.r(), 0);
    EXPECT_EQ(piece.multiplicity, 2);
    EXPECT_EQ(piece.apex.num_vertices(), 4);
  }
  EXPECT_NEAR(total_measure(pieces), volume(p), 1e-12);
}

TEST(PyraDecomp, SingleSingularVertex) {
  const Polytope c = cube(3);
  const PyramidalLattice lat = pyra_decomp(c, {0});
  EXPECT_EQ(lat.num_levels(), 2);
  // Faces not containing vertex 0: the three opposite squares.
  EXPECT_EQ(lat.leaves.size(), 3u);
  for (int l : lat.leaves) EXPECT_EQ(lat.nodes[l].level, 1);
}

TEST(PyraDecomp, ApexAndLevelInvariants) {
  const auto [sx, sy] = simplex_pair(3, 3, 2);
  std::vector<std::pair<int, int>> shared{{0, 0}, {1, 1}, {2, 2}};
  const PyramidalLattice lat = product_lattice(sx, sy, shared);
  const Polytope& p = lat.poly;
  for (const auto& node : lat.nodes) {
    for (int c : node.children) EXPECT_EQ(p.face(lat.nodes[c].face_id).dim, p.face(node.face_id).dim - 1);
    if (!node.leaf && !node.children.empty()) {
      EXPECT_TRUE(std::binary_search(lat.singular.begin(), lat.singular.end(), node.apex));
      const auto& ids = p.face(node.face_id).vertex_ids;
      EXPECT_TRUE(std::binary_search(ids.begin(), ids.end(), node.apex));
    }
  }
  EXPECT_LE(lat.num_levels(), 2 + 2);
  for (const auto& [path, leaf] : enumerate_pieces(lat)) {
    Matrix apices(p.ambient_dim(), static_cast<Eigen::Index>(path.apex_ids.size()));
    for (std::size_t i = 0; i < path.apex_ids.size(); ++i)
      apices.col(static_cast<Eigen::Index>(i)) = p.vertex(path.apex_ids[i]);
    EXPECT_EQ(Polytope::affine_rank(p.vertices(), path.apex_ids), static_cast<int>(path.apex_ids.size()) - 1);
    for (int v : leaf.vertex_ids) EXPECT_FALSE(std::binary_search(lat.singular.begin(), lat.singular.end(), v));
  }
}

TEST(PyraDecomp, RejectsFaceTouchingSingularPlane) {
  Matrix pts(2, 4);
  pts << 0, 1, 1, 0,
         0, 0, 1, 1;
  const Polytope sq = convex_polygon(pts);
  EXPECT_NO_THROW(pyra_decomp(sq, {0, 2}));
  EXPECT_NO_THROW(pyra_decomp(sq, {0}));
  // Segment [0,2] with a lattice edge [0,1]: the leaf {2} lies on the
  // singular line through 0 and 1.
  Matrix seg(1, 3);
  seg << 0, 1, 2;
  std::vector<Face> faces(5);
  faces[0] = {0, {0}, 0, {}};
  faces[1] = {1, {1}, 0, {}};
  faces[2] = {2, {2}, 0, {}};
  faces[3] = {3, {0, 1}, 1, {0, 1}};
  faces[4] = {4, {0, 1, 2}, 1, {0, 2}};
  const Polytope line(seg, faces, 4);
  try {
    pyra_decomp(line, {0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AssumptionPSViolated);
  }
}

TEST(PyraDecomp, RejectsEmptySingularSet) {
  EXPECT_THROW(pyra_decomp(cube(2), {}), Error);
}

TEST(EnumeratePieces, SegmentPairSharingVertex) {
  const auto [sx, sy] = simplex_pair(1, 1, 0);
  EXPECT_EQ(product_decomp(sx, sy, {{0, 0}}).size(), 2u);
  EXPECT_EQ(two_simplices_decomp(1, 1, 0, sx, sy).size(), 2u);
}

TEST(EnumeratePieces, IdenticalSegments) {
  const auto [sx, sy] = simplex_pair(1, 1, 1);
  const auto pieces = product_decomp(sx, sy, {{0, 0}, {1, 1}});
  EXPECT_EQ(pieces.size(), 2u);
  EXPECT_NEAR(total_measure(pieces), 1.0, 1e-14);
}

TEST(Triangulate, CubeHasFactorialSimplices) {
  int fact = 1;
  for (int d = 1; d <= 5; ++d) {
    fact *= d;
    const Polytope c = cube(d);
    const auto simplices = triangulate(c);
    EXPECT_EQ(static_cast<int>(simplices.size()), fact);
    double vol = 0.0;
    for (const auto& s : simplices) {
      Matrix pts(d, d + 1);
      for (int i = 0; i <= d; ++i) pts.col(i) = c.vertex(s[i]);
      vol += simplex_volume(pts);
    }
    EXPECT_NEAR(vol, 1.0, 1e-12);
  }
}

TEST(Triangulate, SimplexIsItself) {
  EXPECT_EQ(triangulate(simplex(3)).size(), 1u);
}

TEST(ClosedForm, SimplexCountsMatchTable) {
  for (int d = 1; d <= 4; ++d)
    for (int k = 0; k <= d; ++k) {
      const auto [sx, sy] = simplex_pair(d, d, k);
      const auto pieces = two_simplices_decomp(d, d, k, sx, sy);
      EXPECT_EQ(static_cast<int>(pieces.size()), two_simplices_count(d, d, k)) << d << "," << k;
    }
  EXPECT_EQ(two_simplices_count(3, 3, 0), 2);
  EXPECT_EQ(two_simplices_count(3, 3, 1), 4);
  EXPECT_EQ(two_simplices_count(3, 3, 2), 8);
  EXPECT_EQ(two_simplices_count(3, 3, 3), 14);
  EXPECT_EQ(two_simplices_count(4, 4, 2), 8);
  EXPECT_EQ(two_simplices_count(4, 4, 4), 30);
}

TEST(ClosedForm, CubeCounts) {
  EXPECT_EQ(two_cubes_decomp(3, 2).size(), 30u);
  EXPECT_EQ(two_cubes_decomp(1, 0).size(), 2u);
  EXPECT_EQ(two_cubes_decomp(2, 2).size(), 12u);
  for (int d = 1; d <= 3; ++d)
    for (int k = 0; k <= d; ++k)
      EXPECT_EQ(static_cast<int>(two_cubes_decomp(d, k).size()), two_cubes_count(d, k));
}

TEST(ClosedForm, TwoCubeApexIsDiagonalCube) {
  for (const auto& piece : two_cubes_decomp(2, 2)) {
    EXPECT_EQ(piece.apex.num_vertices(), 1 << piece.s());
    EXPECT_LE(piece.s(), 2);
  }
}

TEST(Generic, MatchesClosedFormCountsAndVolume) {
  for (int d = 1; d <= 3; ++d)
    for (int k = 0; k <= d; ++k) {
      const auto [sx, sy] = simplex_pair(d, d, k);
      std::vector<std::pair<int, int>> shared;
      for (int i = 0; i <= k; ++i) shared.emplace_back(i, i);
      const auto generic = product_decomp(sx, sy, shared);
      EXPECT_EQ(static_cast<int>(generic.size()), two_simplices_count(d, d, k)) << d << "," << k;
      const double vol = std::pow(1.0 / std::tgamma(d + 1.0), 2);
      EXPECT_NEAR(total_measure(generic) / vol, 1.0, 1e-9);
      EXPECT_NEAR(total_measure(two_simplices_decomp(d, d, k, sx, sy)) / vol, 1.0, 1e-9);
    }
  for (int d = 1; d <= 3; ++d)
    for (int k = 0; k <= d; ++k) {
      const auto generic = product_decomp(cube_pair_x(d), cube_pair_y(d, k), cube_pair_shared(d, k));
      EXPECT_EQ(static_cast<int>(generic.size()), two_cubes_count(d, k)) << d << "," << k;
      EXPECT_NEAR(total_measure(generic), 1.0, 1e-9);
      EXPECT_NEAR(total_measure(two_cubes_decomp(d, k)), 1.0, 1e-9);
    }
}

TEST(Generic, TriangleAndRectangleSharingEdge) {
  Matrix tri(2, 3);
  tri << 0, 1, 0.3,
         0, 0, 1;
  Matrix rect(2, 4);
  rect << 0, 1, 1, 0,
          0, 0, -1, -1;
  const auto lat = product_lattice(simplex_from_points(tri), convex_polygon(rect), {{0, 0}, {1, 1}});
  EXPECT_EQ(lat.leaves.size(), 6u);
}

TEST(Generic, BasesAreDisjointProducts) {
  const auto [sx, sy] = simplex_pair(2, 2, 1);
  for (const auto& piece : product_decomp(sx, sy, {{0, 0}, {1, 1}})) {
    ASSERT_TRUE(piece.base_x && piece.base_y);
    std::vector<int> common;
    std::set_intersection(piece.base_x_ids.begin(), piece.base_x_ids.end(), piece.base_y_ids.begin(),
                          piece.base_y_ids.end(), std::back_inserter(common));
    // Only ids 0 and 1 name the same point in both simplices.
    for (int v : common) EXPECT_GT(v, 1);
  }
}

TEST(Generic, BadConformity) {
  const auto [sx, sy] = simplex_pair(2, 2, 1);
  try {
    product_decomp(sx, sy, {{0, 0}, {2, 2}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BadConformity);
  }
  EXPECT_THROW(two_simplices_decomp(2, 2, 2, sx, sy), Error);
}

TEST(Dot, ListsEveryNode) {
  const auto lat = pyra_decomp(double_pyramid(), {0, 1, 2, 3});
  const std::string dot = to_dot(lat);
  EXPECT_NE(dot.find("digraph"), std::string::npos);
  EXPECT_NE(dot.find("[0 1 2 3 4 5]"), std::string::npos);
}

TEST(Membership, SampledPointsLandInExactlyOnePiece) {
  std::mt19937 rng(5);
  std::exponential_distribution<double> expo(1.0);
  for (int k = 0; k <= 2; ++k) {
    const auto [sx, sy] = simplex_pair(2, 2, k);
    std::vector<std::pair<int, int>> shared;
    for (int i = 0; i <= k; ++i) shared.emplace_back(i, i);
    const auto pieces = product_decomp(sx, sy, shared);
    auto sample = [&](const Polytope& s) {
      Vector bary(3);
      for (int i = 0; i < 3; ++i) bary(i) = expo(rng);
      bary /= bary.sum();
      return Vector(s.vertices() * bary);
    };
    for (int trial = 0; trial < 500; ++trial) {
      Vector z(4);
      z << sample(sx), sample(sy);
      int hits = 0;
      for (const auto& p : pieces) hits += contains(p, z) ? 1 : 0;
      ASSERT_EQ(hits, 1) << "k=" << k;
    }
  }
}

TEST(Membership, CentroidCoordinatesAreInterior) {
  const auto pieces = two_simplices_decomp(1, 1, 1, simplex(1), simplex(1));
  ASSERT_EQ(pieces.size(), 2u);
  Vector z(2);
  z << 0.75, 0.25;  // x > y lies in exactly one of the two triangles
  EXPECT_NE(contains(pieces[0], z), contains(pieces[1], z));
}
