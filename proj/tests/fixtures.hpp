#pragma once

#include <cmath>
#include <vector>

#include "yaoyao/measures.hpp"
#include "yaoyao/partition.hpp"
#include "yaoyao/solver.hpp"

namespace yaoyao::testing {

inline WeightedPointCloud square_cloud() {
  return WeightedPointCloud::from_points({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
}

inline WeightedPointCloud asymmetric_cloud() {
  return WeightedPointCloud::from_points({{0, 0}, {1, 2}, {2, 1}, {3, 3}});
}

inline PartitionTree square_tree() { return compute_center_partition(square_cloud(), SolverConfig{}); }
inline PartitionTree asymmetric_tree() { return compute_center_partition(asymmetric_cloud(), SolverConfig{}); }

inline MeasureSpec gaussian_spec(std::size_t n) {
  MeasureSpec spec;
  spec.dimension = n;
  GaussianComponent c;
  c.mean = Point(n, 0.0);
  c.cov_factor.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) c.cov_factor[i * n + i] = 1.0;
  spec.kind = GaussianMixture{{c}};
  return spec;
}

inline MeasureSpec box_spec(Point lo, Point hi) {
  MeasureSpec spec;
  spec.dimension = lo.size();
  spec.kind = UniformBox{std::move(lo), std::move(hi)};
  return spec;
}

inline double inf_distance(const Point& a, const Point& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace yaoyao::testing
