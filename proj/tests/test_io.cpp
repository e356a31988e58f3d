#include "pyraquad/io.hpp"

#include <gtest/gtest.h>

using namespace pyraquad;

namespace {
const std::string kData = PYRAQUAD_DATA_DIR;
}

TEST(PolytopeJson, BuildersMatchLibrary) {
  EXPECT_EQ(polytope_from_json(Json{{"simplex", 3}}).num_vertices(), 4);
  EXPECT_EQ(polytope_from_json(Json{{"cube", 2}}).num_vertices(), 4);
  EXPECT_EQ(polytope_from_json(Json{{"double_pyramid", true}}).num_vertices(), 6);
  const Json prod = {{"product", {Json{{"simplex", 1}}, Json{{"simplex", 2}}}}};
  const Polytope p = polytope_from_json(prod);
  EXPECT_EQ(p.num_vertices(), 6);
  EXPECT_EQ(p.ambient_dim(), 3);
}

TEST(PolytopeJson, ExplicitFacetsWithSparseIds) {
  const Polytope t = load_polytope(kData + "/polytopes/right_triangle.json");
  EXPECT_EQ(t.num_vertices(), 3);
  EXPECT_EQ(t.faces().size(), 7u);
  EXPECT_TRUE(t.is_simplex_face(t.face(t.top_id())));
  EXPECT_NEAR(volume(t), 0.5, 1e-15);
}

TEST(PolytopeJson, FacetsInferredFromVertexSets) {
  const Polytope sq = load_polytope(kData + "/polytopes/unit_square.json");
  EXPECT_EQ(sq.faces().size(), 9u);
  EXPECT_NEAR(volume(sq), 1.0, 1e-15);
}

TEST(PolytopeJson, RoundTrip) {
  const Polytope a = double_pyramid();
  const Polytope b = polytope_from_json(polytope_to_json(a));
  EXPECT_EQ(b.faces().size(), a.faces().size());
  EXPECT_TRUE(b.vertices().isApprox(a.vertices()));
  EXPECT_NEAR(volume(b), volume(a), 1e-14);
}

TEST(PolytopeJson, MalformedInputRaisesParseError) {
  const Json missing = {{"vertices", {{0, 0}, {1, 0}}}};
  try {
    polytope_from_json(missing);
    FAIL() << "expected ParseError";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParseError);
  }
  const Json ragged = {{"vertices", {{0, 0}, {1}}}, {"faces", Json::array()}};
  EXPECT_THROW(polytope_from_json(ragged), Error);
  EXPECT_THROW(load_polytope(kData + "/polytopes/no_such_file.json"), Error);
}

TEST(SharedPairs, Parses) {
  const auto s = parse_shared_pairs("0:1,2:3");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0], std::make_pair(0, 1));
  EXPECT_EQ(s[1], std::make_pair(2, 3));
  EXPECT_TRUE(parse_shared_pairs("").empty());
  EXPECT_THROW(parse_shared_pairs("0-1"), Error);
  EXPECT_THROW(parse_shared_pairs("a:1"), Error);
}

TEST(PiecesJson, CountsAndMeasure) {
  const auto [sx, sy] = simplex_pair(2, 2, 2);
  const Json j = pieces_to_json(two_simplices_decomp(2, 2, 2, sx, sy));
  EXPECT_EQ(j["count"].get<int>(), 6);
  EXPECT_NEAR(j["total_measure"].get<double>(), 0.25, 1e-14);
  for (const Json& p : j["pieces"]) {
    EXPECT_TRUE(p.contains("apex"));
    EXPECT_TRUE(p.contains("base"));
    EXPECT_GT(p["delta"].get<double>(), 0.0);
  }
}
