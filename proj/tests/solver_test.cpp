#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "yaoyao/error.hpp"
#include "yaoyao/random.hpp"
#include "yaoyao/solver.hpp"

using namespace yaoyao;
using namespace yaoyao::testing;

// ------------------------------------------------------------ root search

TEST(BracketAndBisect, Linear) {
  const auto r = bracket_and_bisect([](double t) { return 2 * t - 1; }, 0.0, SolverConfig{});
  EXPECT_EQ(r.root, 0.5);
  EXPECT_EQ(r.residual, 0.0);
}

TEST(BracketAndBisect, FlatCubic) {
  const SolverConfig cfg;
  const auto r = bracket_and_bisect([](double t) { return t * t * t; }, 3.0, cfg);
  EXPECT_LE(std::abs(r.root), cfg.root_tolerance);
}

TEST(BracketAndBisect, DecreasingFunction) {
  const auto r = bracket_and_bisect([](double t) { return 7.0 - 2.0 * t; }, 0.0, SolverConfig{});
  EXPECT_NEAR(r.root, 3.5, 1e-10);
}

TEST(BracketAndBisect, FarRoot) {
  const auto r = bracket_and_bisect([](double t) { return t - 1e6; }, 0.0, SolverConfig{});
  EXPECT_NEAR(r.root, 1e6, 1e-9 * 1e6);
}

TEST(BracketAndBisect, NoSignChange) {
  try {
    bracket_and_bisect([](double) { return 1.0; }, 0.0, SolverConfig{});
    FAIL() << "expected a solver error";
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), SolverError::Kind::BracketNotFound);
    EXPECT_FALSE(e.trace().empty());
  }
}

TEST(BracketAndBisect, JumpWithoutRootIsNonConvergence) {
  SolverConfig cfg;
  try {
    bracket_and_bisect([](double t) { return t < 0.3 ? -1.0 : 1.0; }, 0.0, cfg);
    FAIL() << "expected a solver error";
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), SolverError::Kind::NonConvergence);
  }
}

// ---------------------------------------------------------------- fixtures

TEST(ComputeCenter, OneDimensionalMedian) {
  const auto cloud = WeightedPointCloud::from_points({{0}, {1}, {2}, {3}});
  const PartitionTree tree = compute_center_partition(cloud, SolverConfig{});
  EXPECT_EQ(tree.center(), (Point{1.5}));
}

TEST(ComputeCenter, SquareFixture) {
  const PartitionTree tree = square_tree();
  EXPECT_EQ(tree.center(), (Point{0.5, 0.5}));
  EXPECT_EQ(tree.axis(SignSequence{}), (Point{1, 0}));
}

TEST(ComputeCenter, AsymmetricFixture) {
  const PartitionTree tree = asymmetric_tree();
  EXPECT_NEAR(tree.center()[0], 1.5, 1e-9);
  EXPECT_NEAR(tree.center()[1], 1.5, 1e-9);
  EXPECT_EQ(tree.axis(SignSequence{})[0], 1.0);
  EXPECT_NEAR(tree.axis(SignSequence{})[1], 0.5, 1e-9);
  EXPECT_EQ(tree.axis(SignSequence{-1}), (Point{0, 1}));
  EXPECT_EQ(tree.axis(SignSequence{1}), (Point{0, 1}));
}

TEST(ComputeCenter, RejectsOversizedDimension) {
  const auto cloud = sample(gaussian_spec(9), 8, 1);
  EXPECT_THROW(compute_center_partition(cloud, SolverConfig{}), InputError);
}

TEST(EvaluateAxisResidual, AsymmetricFixture) {
  const MedianSplit s = split_at_median(asymmetric_cloud(), 0);
  ASSERT_EQ(s.alpha, 1.5);
  const SolverConfig cfg;
  EXPECT_EQ(evaluate_axis_residual(s.low, s.high, s.alpha, Point{1, 0}, cfg).residual, (Point{-1}));
  EXPECT_EQ(evaluate_axis_residual(s.low, s.high, s.alpha, Point{1, 0.5}, cfg).residual, (Point{0}));
  EXPECT_EQ(evaluate_axis_residual(s.low, s.high, s.alpha, Point{1, 1}, cfg).residual, (Point{1}));
}

TEST(TriangularAxisSolve, SquareFixture) {
  const MedianSplit s = split_at_median(square_cloud(), 0);
  const AxisSolve a = triangular_axis_solve(s.low, s.high, s.alpha, SolverConfig{});
  EXPECT_EQ(a.axis, (Point{1, 0}));
  ASSERT_EQ(a.trace.coordinates.size(), 1u);
  EXPECT_EQ(a.trace.coordinates[0].residual, 0.0);
}

TEST(TriangularAxisSolve, AsymmetricFixture) {
  SolverConfig cfg;
  cfg.residual_tolerance = 1e-10;
  const MedianSplit s = split_at_median(asymmetric_cloud(), 0);
  const AxisSolve a = triangular_axis_solve(s.low, s.high, s.alpha, cfg);
  EXPECT_NEAR(a.axis[1], 0.5, 1e-10);
  EXPECT_LE(std::abs(a.trace.coordinates[0].residual), 1e-10);
}

TEST(TriangularAxisSolve, ReflectionSymmetricCloud) {
  // Invariant under (x1, x2, x3) -> (x1, -x2, -x3).
  const auto base = sample(box_spec({0, -1, -1}, {1, 1, 1}), 32, 4);
  std::vector<Point> pts;
  for (std::size_t r = 0; r < base.size(); ++r) {
    Point p = base.point(r);
    pts.push_back(p);
    pts.push_back({p[0], -p[1], -p[2]});
  }
  const auto cloud = WeightedPointCloud::from_points(pts);
  const MedianSplit s = split_at_median(cloud, 0);
  const AxisSolve a = triangular_axis_solve(s.low, s.high, s.alpha, SolverConfig{});
  EXPECT_EQ(a.axis[0], 1.0);
  EXPECT_NEAR(a.axis[1], 0.0, 1e-8);
  EXPECT_NEAR(a.axis[2], 0.0, 1e-8);
}

// ---------------------------------------------------------------- config

TEST(SolverConfig, JsonRoundTrip) {
  SolverConfig cfg;
  cfg.root_tolerance = 1e-11;
  cfg.memoize = true;
  const SolverConfig back = solver_config_from_json(solver_config_to_json(cfg));
  EXPECT_EQ(back.root_tolerance, 1e-11);
  EXPECT_TRUE(back.memoize);
  EXPECT_EQ(back.max_dimension, 8u);
}

TEST(SolverConfig, RejectsUnknownAndInvalid) {
  EXPECT_THROW(solver_config_from_json(nlohmann::json{{"tolerance", 1}}), InputError);
  EXPECT_THROW(solver_config_from_json(nlohmann::json{{"growth", 1.0}}), InputError);
  EXPECT_THROW(solver_config_from_json(nlohmann::json{{"root_tolerance", -1}}), InputError);
  EXPECT_THROW(solver_config_from_json(nlohmann::json{{"max_dimension", 13}}), InputError);
}

// ------------------------------------------------------------- properties

TEST(SolverProperty, PrefixSolveMatchesFullSolveBitwise) {
  const auto cloud = sample(gaussian_spec(3), 256, 5);
  const SolverConfig cfg;
  const Point full = center_prefix(cloud, 3, cfg);
  const Point two = center_prefix(cloud, 2, cfg);
  const Point one = center_prefix(cloud, 1, cfg);
  EXPECT_EQ(two[0], full[0]);
  EXPECT_EQ(two[1], full[1]);
  EXPECT_EQ(one[0], full[0]);
  EXPECT_EQ(compute_center_partition(cloud, cfg).center(), full);
}

TEST(SolverProperty, DebugPrefixChecksHold) {
  SolverConfig cfg;
  cfg.debug_checks = true;
  EXPECT_NO_THROW(compute_center_partition(sample(gaussian_spec(3), 128, 6), cfg));
  EXPECT_NO_THROW(compute_center_partition(sample(box_spec({0, 0, 0, 0}, {1, 2, 3, 4}), 64, 6), cfg));
}

TEST(SolverProperty, ChildCentersAgree) {
  const SolverConfig cfg;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const PartitionTree tree = compute_center_partition(sample(gaussian_spec(3), 200, seed), cfg);
    EXPECT_LE(tree.meta().at("max_center_gap").get<double>(), cfg.residual_tolerance);
  }
}

TEST(SolverProperty, DeterministicAcrossThreadsAndMemo) {
  const auto cloud = sample(gaussian_spec(3), 300, 8);
  SolverConfig base;
  const PartitionTree reference = compute_center_partition(cloud, base);
  for (unsigned threads : {2u, 4u, 7u}) {
    SolverConfig cfg = base;
    cfg.threads = threads;
    EXPECT_EQ(serialize(compute_center_partition(cloud, cfg)), serialize(reference)) << threads << " threads";
  }
  SolverConfig memo = base;
  memo.memoize = true;
  const PartitionTree memoized = compute_center_partition(cloud, memo);
  EXPECT_EQ(memoized.center(), reference.center());
  EXPECT_EQ(memoized.axes(), reference.axes());
}

TEST(SolverProperty, BracketParametersDoNotMoveTheCenter) {
  for (std::size_t n : {2u, 3u}) {
    const auto cloud = sample(gaussian_spec(n), 256, 10 + n);
    const SolverConfig a;
    SolverConfig b;
    b.initial_half_width = 0.37;
    b.growth = 3.0;
    const double tol = 10 * std::max(a.root_tolerance, a.residual_tolerance);
    EXPECT_LE(inf_distance(center_prefix(cloud, n, a), center_prefix(cloud, n, b)), tol) << "n = " << n;
  }
}

TEST(SolverProperty, RelabelingIdsKeepsTheCenter) {
  const SolverConfig cfg;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto cloud = regularize(sample(gaussian_spec(2), 128, seed), gaussian_spec(2), 4.0, 64, seed);
    std::vector<PointId> ids(cloud.size());
    std::iota(ids.begin(), ids.end(), PointId{0});
    CounterRng rng(seed, 1234);
    for (std::size_t i = ids.size(); i > 1; --i) {
      std::swap(ids[i - 1], ids[static_cast<std::size_t>(rng.next_uniform() * static_cast<double>(i))]);
    }
    std::vector<Point> pts;
    for (std::size_t r = 0; r < cloud.size(); ++r) pts.push_back(cloud.point(r));
    const WeightedPointCloud relabeled(2, pts, std::vector<double>(cloud.weights().begin(), cloud.weights().end()),
                                       ids);
    EXPECT_LE(inf_distance(center_prefix(cloud, 2, cfg), center_prefix(relabeled, 2, cfg)),
              10 * cfg.residual_tolerance);
  }
}

TEST(SolverProperty, TranslationEquivariance) {
  const auto cloud = sample(gaussian_spec(2), 128, 3);
  std::vector<Point> shifted;
  for (std::size_t r = 0; r < cloud.size(); ++r) {
    Point p = cloud.point(r);
    p[0] += 4.0;
    p[1] -= 2.0;
    shifted.push_back(p);
  }
  const SolverConfig cfg;
  const Point a = center_prefix(cloud, 2, cfg);
  const Point b = center_prefix(WeightedPointCloud::from_points(shifted), 2, cfg);
  EXPECT_NEAR(b[0], a[0] + 4.0, 1e-9);
  EXPECT_NEAR(b[1], a[1] - 2.0, 1e-8);
}
