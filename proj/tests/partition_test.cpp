#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "yaoyao/error.hpp"
#include "yaoyao/partition.hpp"
#include "yaoyao/random.hpp"

using namespace yaoyao;
using namespace yaoyao::testing;
using nlohmann::json;

TEST(Regions, FourRegionsInThePlane) {
  const auto all = regions(square_tree());
  EXPECT_EQ(all.size(), 4u);
  for (const auto& [eps, region] : all) {
    EXPECT_TRUE(region.is_full());
    EXPECT_EQ(region.apex(), (Point{0.5, 0.5}));
  }
}

TEST(Regions, SquarePositiveQuadrant) {
  const auto all = regions(square_tree());
  const ConeRegion& r = all.at(SignSequence{1, 1});
  EXPECT_EQ(r.apex(), (Point{0.5, 0.5}));
  EXPECT_EQ(r.signed_generator(0), (Point{1, 0}));
  EXPECT_EQ(r.signed_generator(1), (Point{0, 1}));
}

TEST(Regions, AsymmetricFirstGenerator) {
  const auto all = regions(asymmetric_tree());
  for (int s : {-1, 1}) {
    const Point& u = all.at(SignSequence{1, s}).basis()[0];
    EXPECT_EQ(u[0], 1.0);
    EXPECT_NEAR(u[1], 0.5, 1e-9);
  }
}

TEST(PrefixRegion, EmptyPrefixIsWholeSpace) {
  const ConeRegion r = prefix_region(square_tree(), SignSequence{});
  EXPECT_EQ(r.lineality_rank(), 2u);
  EXPECT_TRUE(cone_contains(r, Point{-100, 55}, 0.0));
}

TEST(PrefixRegion, SquarePositiveHalfPlane) {
  const ConeRegion r = prefix_region(square_tree(), SignSequence{1});
  EXPECT_EQ(r.rank(), 1u);
  EXPECT_TRUE(cone_contains(r, Point{0.5, -40}, 0.0));
  EXPECT_TRUE(cone_contains(r, Point{3, 7}, 0.0));
  EXPECT_FALSE(cone_contains(r, Point{0.4, 0.5}, 0.0));
}

TEST(WitnessRegion, CenterOnBoundary) {
  EXPECT_EQ(witness_region(square_tree(), HalfSpace({1, 1}, 1)), (SignSequence{1, 1}));
}

TEST(WitnessRegion, NegativeRootSide) {
  EXPECT_EQ(witness_region(square_tree(), HalfSpace({-1, 0}, -0.5))[0], -1);
}

TEST(WitnessRegion, RejectsHalfSpaceMissingTheCenter) {
  EXPECT_THROW(witness_region(square_tree(), HalfSpace({1, 0}, 2)), InputError);
}

TEST(RegionOfPoint, SquareFixture) {
  EXPECT_EQ(region_of_point(square_tree(), Point{2, 3}), (SignSequence{1, 1}));
}

TEST(RegionOfPoint, CenterGoesToAllNegative) {
  EXPECT_EQ(region_of_point(square_tree(), Point{0.5, 0.5}), (SignSequence{-1, -1}));
  const PartitionTree tree = compute_center_partition(sample(gaussian_spec(3), 64, 2), SolverConfig{});
  EXPECT_EQ(region_of_point(tree, tree.center()), (SignSequence{-1, -1, -1}));
}

TEST(RegionOfPoint, AsymmetricFixture) {
  const PartitionTree tree = asymmetric_tree();
  EXPECT_EQ(region_of_point(tree, Point{2.5, 3}), (SignSequence{1, 1}));
  EXPECT_EQ(region_of_point(tree, Point{0, 0}), (SignSequence{-1, -1}));
  EXPECT_EQ(region_of_point(tree, Point{1, 2}), (SignSequence{-1, 1}));
  EXPECT_EQ(region_of_point(tree, Point{2, 1}), (SignSequence{1, -1}));
  EXPECT_EQ(region_of_point(tree, Point{3, 3}), (SignSequence{1, 1}));
}

TEST(Serialization, RoundTrip) {
  const PartitionTree tree = square_tree();
  const std::string doc = serialize(tree);
  EXPECT_EQ(deserialize(doc), tree);
  EXPECT_EQ(serialize(deserialize(doc)), doc);
  EXPECT_EQ(doc.back(), '\n');
}

TEST(Serialization, RoundTripThreeDimensions) {
  const PartitionTree tree = compute_center_partition(sample(gaussian_spec(3), 100, 4), SolverConfig{});
  EXPECT_EQ(deserialize(serialize(tree)), tree);
}

TEST(Serialization, RejectsNonUnitAxis) {
  json doc = to_json(square_tree());
  doc["root"]["axis"][0] = 2.0;
  EXPECT_THROW(partition_from_json(doc), InputError);
}

TEST(Serialization, RejectsMissingChild) {
  json doc = to_json(square_tree());
  doc["root"].erase("pos");
  EXPECT_THROW(partition_from_json(doc), InputError);
  json null_child = to_json(square_tree());
  null_child["root"]["neg"] = nullptr;
  EXPECT_THROW(partition_from_json(null_child), InputError);
}

TEST(Serialization, RejectsWrongSchemaAndGarbage) {
  json doc = to_json(square_tree());
  doc["schema"] = "something-else/v9";
  EXPECT_THROW(partition_from_json(doc), InputError);
  EXPECT_THROW(deserialize("{not json"), InputError);
  json bad_sub = to_json(square_tree());
  bad_sub["root"]["neg"]["axis"] = {0.25, 1.0};
  EXPECT_THROW(partition_from_json(bad_sub), InputError);
}

TEST(Serialization, KeepsCoordinateSystem) {
  const CoordinateSystem sys({2.0, 1.0, 0.0, 1.0}, {1.0, -1.0});
  const auto ambient = asymmetric_cloud();
  const PartitionTree tree = compute_center_partition(to_coordinates(ambient, sys), sys, SolverConfig{});
  const PartitionTree back = deserialize(serialize(tree));
  EXPECT_EQ(back.system(), sys);
  EXPECT_EQ(back.ambient_center(), tree.ambient_center());
}

TEST(PartitionProperty, WitnessRegionIsCertified) {
  const PartitionTree tree = compute_center_partition(sample(gaussian_spec(3), 128, 9), SolverConfig{});
  for (std::uint64_t t = 0; t < 300; ++t) {
    CounterRng rng(21, t);
    Point a(3);
    for (double& x : a) x = rng.next_normal();
    HalfSpace h(a, dot(a, tree.center()) - std::abs(rng.next_normal()));
    const SignSequence eps = witness_region(tree, h);
    EXPECT_TRUE(halfspace_contains_region(h, prefix_region(tree, eps)));
  }
}

TEST(PartitionProperty, PointLocationAgreesWithMembership) {
  const PartitionTree tree = compute_center_partition(sample(gaussian_spec(3), 128, 10), SolverConfig{});
  const auto all = regions(tree);
  for (std::uint64_t t = 0; t < 300; ++t) {
    CounterRng rng(22, t);
    Point p(3);
    for (double& x : p) x = 2 * rng.next_normal();
    EXPECT_TRUE(cone_contains(all.at(region_of_point(tree, p)), p));
  }
}
