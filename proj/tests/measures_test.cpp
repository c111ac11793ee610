#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "fixtures.hpp"
#include "yaoyao/error.hpp"
#include "yaoyao/measures.hpp"
#include "yaoyao/random.hpp"

using namespace yaoyao;
using yaoyao::testing::box_spec;
using yaoyao::testing::gaussian_spec;
using yaoyao::testing::square_cloud;

namespace {

WeightedPointCloud line_cloud(std::vector<double> xs, std::vector<double> ws = {}) {
  std::vector<Point> pts;
  for (double x : xs) pts.push_back({x});
  if (ws.empty()) ws.assign(xs.size(), 1.0);
  return WeightedPointCloud::from_points(pts, ws);
}

}  // namespace

// ----------------------------------------------------------------- quantile

TEST(WeightedQuantile, MidpointConvention) {
  EXPECT_EQ(weighted_quantile(std::vector<double>{0, 1}, std::vector<double>{1, 1}, 0.5), 0.5);
}

TEST(WeightedQuantile, OddCount) {
  EXPECT_EQ(weighted_quantile(std::vector<double>{1, 2, 3}, std::vector<double>{1, 1, 1}, 0.5), 2.0);
}

TEST(WeightedQuantile, CollapsedInterval) {
  EXPECT_EQ(weighted_quantile(std::vector<double>{0, 0, 0, 1}, std::vector<double>{1, 1, 1, 1}, 0.5), 0.0);
}

TEST(WeightedQuantile, OrderIndependent) {
  EXPECT_EQ(weighted_quantile(std::vector<double>{3, 1, 2, 0}, std::vector<double>{1, 1, 1, 1}, 0.5), 1.5);
  EXPECT_EQ(weighted_quantile(std::vector<double>{0, 10}, std::vector<double>{3, 1}, 0.5), 0.0);
}

// -------------------------------------------------------------------- split

TEST(SplitAtMedian, DistinctValues) {
  const MedianSplit s = split_at_median(line_cloud({0, 1, 2, 3}), 0);
  EXPECT_EQ(s.alpha, 1.5);
  EXPECT_EQ(s.low.total_mass(), 2.0);
  EXPECT_EQ(s.high.total_mass(), 2.0);
  EXPECT_EQ(s.low.size() + s.high.size(), 4u);
}

TEST(SplitAtMedian, TiesFillLowByAscendingId) {
  const MedianSplit s = split_at_median(line_cloud({0, 0, 0, 1}), 0);
  EXPECT_EQ(s.alpha, 0.0);
  ASSERT_EQ(s.low.size(), 2u);
  EXPECT_EQ(s.low.id(0), 0u);
  EXPECT_EQ(s.low.id(1), 1u);
  EXPECT_EQ(s.low.total_mass(), 2.0);
  ASSERT_EQ(s.high.size(), 2u);
  EXPECT_EQ(s.high.id(0), 2u);
  EXPECT_EQ(s.high.id(1), 3u);
  EXPECT_EQ(s.high.total_mass(), 2.0);
}

TEST(SplitAtMedian, SinglePointIsHalved) {
  const MedianSplit s = split_at_median(line_cloud({4}, {2}), 0);
  EXPECT_EQ(s.alpha, 4.0);
  ASSERT_EQ(s.low.size(), 1u);
  ASSERT_EQ(s.high.size(), 1u);
  EXPECT_EQ(s.low.weight(0), 1.0);
  EXPECT_EQ(s.high.weight(0), 1.0);
  EXPECT_EQ(s.low.id(0), s.high.id(0));
}

// --------------------------------------------------------------- projection

TEST(ProjectMeasure, VerticalDrop) {
  const auto out = project_measure(WeightedPointCloud::from_points({{3, 3}}), 1.5, Point{1, 0});
  ASSERT_EQ(out.dimension(), 1u);
  EXPECT_EQ(out.coordinate(0, 0), 3.0);
}

TEST(ProjectMeasure, SlantedAxisRightHalf) {
  const auto out = project_measure(WeightedPointCloud::from_points({{3, 3}}), 1.5, Point{1, 0.5});
  EXPECT_EQ(out.coordinate(0, 0), 2.25);
}

TEST(ProjectMeasure, SlantedAxisLeftHalf) {
  const auto out = project_measure(WeightedPointCloud::from_points({{0, 0}}), 1.5, Point{1, 0.5});
  EXPECT_EQ(out.coordinate(0, 0), 0.75);
}

TEST(ProjectMeasure, KeepsWeightsAndIds) {
  const auto cloud = WeightedPointCloud::from_points({{0, 0, 1}, {2, 1, 1}}, {0.5, 3.0});
  const auto out = project_measure(cloud, 1.0, Point{1, -1, 2});
  ASSERT_EQ(out.dimension(), 2u);
  EXPECT_EQ(out.weight(1), 3.0);
  EXPECT_EQ(out.id(1), cloud.id(1));
  EXPECT_EQ(out.point(0), (Point{-1, 3}));
}

// ------------------------------------------------------------ half-space mass

TEST(HalfspaceMass, SquareCorners) { EXPECT_EQ(halfspace_mass(square_cloud(), HalfSpace({1, 0}, 0.5)), 2.0); }

TEST(HalfspaceMass, BelowAllData) {
  EXPECT_EQ(halfspace_mass(square_cloud(), HalfSpace({1, 0}, -std::numeric_limits<double>::infinity())), 4.0);
  EXPECT_EQ(halfspace_mass(square_cloud(), HalfSpace({1, 1}, -10)), 4.0);
}

TEST(HalfspaceMass, AboveAllData) { EXPECT_EQ(halfspace_mass(square_cloud(), HalfSpace({1, 1}, 10)), 0.0); }

// ------------------------------------------------------------------ sample

TEST(Sample, BoxSupportAndMass) {
  const auto cloud = sample(box_spec({0, 0}, {1, 1}), 4, 7);
  ASSERT_EQ(cloud.size(), 4u);
  EXPECT_EQ(cloud.total_mass(), 4.0);
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_GE(cloud.coordinate(r, j), 0.0);
      EXPECT_LE(cloud.coordinate(r, j), 1.0);
    }
  }
}

TEST(Sample, GaussianMean) {
  const auto cloud = sample(gaussian_spec(2), 10000, 1);
  for (std::size_t j = 0; j < 2; ++j) {
    double mean = 0.0;
    for (std::size_t r = 0; r < cloud.size(); ++r) mean += cloud.coordinate(r, j);
    EXPECT_LT(std::abs(mean / 10000.0), 0.05);
  }
}

TEST(Sample, FiniteAtomsReturnsAtoms) {
  MeasureSpec spec;
  spec.dimension = 2;
  spec.kind = FiniteAtoms{{{0, 0}, {1, 1}}, {1, 1}};
  const auto cloud = sample(spec, 2, 5);
  ASSERT_EQ(cloud.size(), 2u);
  std::vector<Point> pts{cloud.point(0), cloud.point(1)};
  std::sort(pts.begin(), pts.end());
  EXPECT_EQ(pts[0], (Point{0, 0}));
  EXPECT_EQ(pts[1], (Point{1, 1}));
}

TEST(Sample, DeterministicPerSeed) {
  const auto spec = gaussian_spec(3);
  EXPECT_EQ(sample(spec, 100, 9), sample(spec, 100, 9));
  EXPECT_NE(sample(spec, 100, 9), sample(spec, 100, 10));
  // Point i depends only on (seed, i).
  EXPECT_EQ(sample(spec, 50, 9).point(17), sample(spec, 100, 9).point(17));
}

TEST(Sample, SimplexSupport) {
  MeasureSpec spec;
  spec.dimension = 2;
  spec.kind = UniformSimplex{{{0, 0}, {1, 0}, {0, 1}}};
  const auto cloud = sample(spec, 500, 2);
  for (std::size_t r = 0; r < cloud.size(); ++r) {
    EXPECT_GE(cloud.coordinate(r, 0), 0.0);
    EXPECT_GE(cloud.coordinate(r, 1), 0.0);
    EXPECT_LE(cloud.coordinate(r, 0) + cloud.coordinate(r, 1), 1.0 + 1e-12);
  }
}

TEST(Validate, RejectsDegenerateSpecs) {
  EXPECT_THROW(validate(box_spec({0, 0}, {1, 0})), InputError);
  MeasureSpec simplex;
  simplex.dimension = 2;
  simplex.kind = UniformSimplex{{{0, 0}, {1, 1}, {2, 2}}};
  EXPECT_THROW(validate(simplex), InputError);
}

// --------------------------------------------------------------- regularize

TEST(Regularize, UnitPDoublesMass) {
  const auto cloud = sample(gaussian_spec(2), 64, 3);
  const auto reg = regularize(cloud, gaussian_spec(2), 1.0, 32, 4);
  EXPECT_NEAR(reg.total_mass(), 2.0 * cloud.total_mass(), 1e-12);
  EXPECT_EQ(reg.size(), 96u);
  EXPECT_GT(reg.id(64), cloud.max_id());
}

TEST(Regularize, SymmetricInputsGiveSymmetricMixture) {
  const Point z{1, 2};
  const auto cloud = symmetrize(sample(box_spec({0, 0}, {3, 3}), 20, 1), z);
  MeasureSpec gamma = gaussian_spec(2);
  std::get<GaussianMixture>(gamma.kind).components[0].mean = z;
  gamma.symmetry_center = z;
  const auto reg = regularize(cloud, gamma, 2.0, 31, 6);
  std::multimap<std::pair<double, double>, double> pts;
  for (std::size_t r = 0; r < reg.size(); ++r) pts.emplace(std::pair{reg.coordinate(r, 0), reg.coordinate(r, 1)}, reg.weight(r));
  for (std::size_t r = 0; r < reg.size(); ++r) {
    const double rx = 2 * z[0] - reg.coordinate(r, 0), ry = 2 * z[1] - reg.coordinate(r, 1);
    bool found = false;
    for (const auto& [p, w] : pts) {
      if (std::abs(p.first - rx) < 1e-12 && std::abs(p.second - ry) < 1e-12 && w == reg.weight(r)) found = true;
    }
    EXPECT_TRUE(found) << "row " << r;
  }
}

// --------------------------------------------------------------- symmetrize

TEST(Symmetrize, SinglePoint) {
  const auto s = symmetrize(WeightedPointCloud::from_points({{0, 0}}), Point{1, 1});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.point(0), (Point{0, 0}));
  EXPECT_EQ(s.point(1), (Point{2, 2}));
  EXPECT_EQ(s.weight(0), 0.5);
  EXPECT_EQ(s.weight(1), 0.5);
  EXPECT_EQ(s.id(0), 0u);
  EXPECT_EQ(s.id(1), 1u);
}

TEST(Symmetrize, PreservesMass) {
  const auto s = symmetrize(square_cloud(), Point{0.5, 0.5});
  EXPECT_EQ(s.total_mass(), 4.0);
  EXPECT_EQ(s.size(), 8u);
}

// -------------------------------------------------------------- cloud basics

TEST(WeightedPointCloud, RejectsBadInput) {
  EXPECT_THROW(WeightedPointCloud::from_points({{0, 0}, {1}}), InputError);
  EXPECT_THROW(WeightedPointCloud::from_points({{0, 0}}, {-1.0}), InputError);
  EXPECT_THROW(WeightedPointCloud::from_points({{0, std::nan("")}}), InputError);
}

TEST(WeightedPointCloud, TruncatedKeepsLeadingColumns) {
  const auto c = WeightedPointCloud::from_points({{1, 2, 3}, {4, 5, 6}});
  const auto t = c.truncated(2);
  EXPECT_EQ(t.dimension(), 2u);
  EXPECT_EQ(t.point(1), (Point{4, 5}));
}

// --------------------------------------------------------------------- CSV

TEST(Csv, ReadsHeaderAndWeights) {
  std::istringstream in("\xEF\xBB\xBFx1, x2 ,w\r\n0,1,2\r\n 3 , 4 , 0.5\n");
  const auto c = read_csv(in);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.point(1), (Point{3, 4}));
  EXPECT_EQ(c.weight(0), 2.0);
  EXPECT_EQ(c.weight(1), 0.5);
}

TEST(Csv, EmptyIsRejected) {
  std::istringstream in("x1,x2\n");
  EXPECT_THROW(read_csv(in), InputError);
  std::istringstream bad("x1,x2\n1,abc\n");
  EXPECT_THROW(read_csv(bad), InputError);
}

TEST(Csv, RoundTripIsExact) {
  const auto c = sample(gaussian_spec(3), 50, 2);
  std::ostringstream out;
  write_csv(out, c);
  std::istringstream in(out.str());
  const auto back = read_csv(in);
  for (std::size_t r = 0; r < c.size(); ++r) EXPECT_EQ(back.point(r), c.point(r));
  EXPECT_EQ(out.str().substr(0, 9), "x1,x2,x3\n");
}

TEST(Csv, FormatDoubleIsShortest) {
  EXPECT_EQ(format_double(1.5), "1.5");
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-0.0), "0");
}

// ----------------------------------------------------------- spec documents

TEST(MeasureSpecJson, RoundTrip) {
  const auto doc = nlohmann::json::parse(R"({"type":"mixture","dim":2,"components":[
      {"weight":1,"spec":{"type":"gaussian","mean":[0,1]}},
      {"weight":2,"spec":{"type":"uniform-box","lo":[0,0],"hi":[1,1]}}]})");
  const MeasureSpec spec = measure_spec_from_json(doc);
  EXPECT_EQ(spec.dimension, 2u);
  const MeasureSpec again = measure_spec_from_json(measure_spec_to_json(spec));
  EXPECT_EQ(sample(spec, 20, 1), sample(again, 20, 1));
}

TEST(MeasureSpecJson, DimensionImpliedByCoordinates) {
  const auto spec = measure_spec_from_json(nlohmann::json::parse(R"({"type":"uniform-box","lo":[0,0,0],"hi":[1,1,1]})"));
  EXPECT_EQ(spec.dimension, 3u);
}

TEST(MeasureSpecJson, RejectsMalformed) {
  EXPECT_THROW(measure_spec_from_json(nlohmann::json::parse(R"({"type":"nope","dim":2})")), InputError);
  EXPECT_THROW(measure_spec_from_json(nlohmann::json::parse(R"({"dim":2})")), InputError);
  EXPECT_THROW(measure_spec_from_json(nlohmann::json::parse(R"({"type":"uniform-box","lo":[0],"hi":[1,1]})")),
               InputError);
}

// --------------------------------------------------------------- properties

TEST(MeasuresProperty, SplitHalvesCarryHalfTheMass) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    CounterRng rng(seed, 99);
    std::vector<Point> pts;
    std::vector<double> ws;
    const std::size_t N = 1 + seed * 3;
    for (std::size_t i = 0; i < N; ++i) {
      pts.push_back({std::floor(4 * rng.next_uniform()), rng.next_normal()});
      ws.push_back(0.25 + rng.next_uniform());
    }
    const auto cloud = WeightedPointCloud::from_points(pts, ws);
    const MedianSplit s = split_at_median(cloud, 0);
    const double total = cloud.total_mass();
    EXPECT_NEAR(s.low.total_mass(), 0.5 * total, 1e-12 * total);
    EXPECT_NEAR(s.high.total_mass(), 0.5 * total, 1e-12 * total);
    for (std::size_t r = 0; r < s.low.size(); ++r) EXPECT_LE(s.low.coordinate(r, 0), s.alpha);
    for (std::size_t r = 0; r < s.high.size(); ++r) EXPECT_GE(s.high.coordinate(r, 0), s.alpha);
  }
}

TEST(MeasuresProperty, QuantileIsReflectionEquivariant) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    CounterRng rng(seed, 7);
    std::vector<double> v, w, neg;
    for (int i = 0; i < 1 + static_cast<int>(seed); ++i) {
      v.push_back(std::round(5 * rng.next_normal()));
      w.push_back(1 + std::floor(3 * rng.next_uniform()));
      neg.push_back(-v.back());
    }
    EXPECT_EQ(weighted_quantile(v, w, 0.5), -weighted_quantile(neg, w, 0.5));
  }
}
