#pragma once

// Center computation by median split plus a sequential bracketed root search
// on the axis residual T(v) = x(-1)(v) - x(+1)(v), the difference between the
// centers of the two halves projected onto the split hyperplane along +-v.
//
// The k-th residual component only depends on v_2..v_{k+1}, so the search
// fixes one axis component at a time. Child centers are only ever computed
// to the prefix length the current component needs; a prefix solve performs
// exactly the same floating-point operations as the corresponding part of a
// full solve, which keeps earlier residual components bit-for-bit fixed.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "yaoyao/geometry.hpp"
#include "yaoyao/measures.hpp"
#include "yaoyao/partition.hpp"

namespace yaoyao {

struct SolverConfig {
  double root_tolerance = 1e-10;      // bracket width on an axis component
  double residual_tolerance = 1e-9;   // |T_k| at an accepted root
  double initial_half_width = 1.0;
  double growth = 2.0;
  int max_expansions = 60;
  int max_iterations = 200;
  std::size_t max_dimension = 8;
  bool memoize = false;
  /// Worker threads for child-center evaluations; results do not depend on it.
  unsigned threads = 1;
  /// Re-evaluates earlier residual components after each coordinate solve.
  bool debug_checks = false;

  static constexpr std::size_t kDimensionLimit = 12;

  /// Throws InputError on non-positive tolerances, growth <= 1 and the like.
  void validate() const;
};

SolverConfig solver_config_from_json(const nlohmann::json& doc);
/// Every field except `threads`, which never affects results.
nlohmann::json solver_config_to_json(const SolverConfig& cfg);

struct BisectionResult {
  double root = 0.0;
  double residual = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int expansions = 0;
  int iterations = 0;
};

/// Expands [t0 - h, t0 + h] geometrically until g changes sign against g(t0),
/// taking the left half first, then bisects until the bracket is narrower than
/// the root tolerance and returns its midpoint. If |g| at that point still
/// exceeds the residual tolerance, bisection continues until it does or the
/// bracket can no longer be split. An exact zero of g ends the search early.
BisectionResult bracket_and_bisect(const std::function<double(double)>& g, double t0,
                                   const SolverConfig& cfg);

struct CoordinateSolve {
  std::size_t coordinate = 0;  // 1-based index into the node's axis
  double value = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int expansions = 0;
  int iterations = 0;
  double residual = 0.0;
};

struct AxisSolveTrace {
  std::vector<CoordinateSolve> coordinates;
  double center_gap = 0.0;  // max-norm of x(-1) - x(+1) at the returned axis
};

nlohmann::json to_json(const AxisSolveTrace& trace);

struct AxisResidual {
  Point residual;     // low_center - high_center
  Point low_center;   // center of the low half projected along -v
  Point high_center;  // center of the high half projected along +v
};

/// `axis` has the node's dimension and first component exactly 1.
AxisResidual evaluate_axis_residual(const WeightedPointCloud& low, const WeightedPointCloud& high,
                                    double alpha, std::span<const double> axis,
                                    const SolverConfig& cfg);

struct AxisSolve {
  Point axis;
  AxisSolveTrace trace;
};

AxisSolve triangular_axis_solve(const WeightedPointCloud& low, const WeightedPointCloud& high,
                                double alpha, const SolverConfig& cfg);

/// First `depth` coordinates of the center; depends only on those coordinates
/// of the points.
Point center_prefix(const WeightedPointCloud& cloud, std::size_t depth, const SolverConfig& cfg);

/// The full partition for a cloud given in coordinates of `system`.
PartitionTree compute_center_partition(const WeightedPointCloud& cloud, const CoordinateSystem& system,
                                       const SolverConfig& cfg);
PartitionTree compute_center_partition(const WeightedPointCloud& cloud, const SolverConfig& cfg);

}  // namespace yaoyao
