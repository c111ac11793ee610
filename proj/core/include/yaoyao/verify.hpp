#pragma once

// Property checks and independent oracles for computed partitions. Every
// check is a pure function of its inputs and seed.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "yaoyao/geometry.hpp"
#include "yaoyao/measures.hpp"
#include "yaoyao/partition.hpp"
#include "yaoyao/solver.hpp"

namespace yaoyao {

struct CheckReport {
  std::string name;
  bool pass = false;
  nlohmann::json statistics = nlohmann::json::object();
  nlohmann::json tolerances = nlohmann::json::object();
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const CheckReport& report);

/// Region masses by independent point location; passes iff every region's
/// mass is within `tol` (relative) of 2^-n of the total.
CheckReport check_equipartition(const PartitionTree& tree, const WeightedPointCloud& cloud, double tol);

/// Masses of every prefix region of length 1..n-1 (closed-cone membership)
/// against 2^-k of the total.
CheckReport check_prefix_masses(const PartitionTree& tree, const WeightedPointCloud& cloud, double tol);

/// Orients {normal.y = offset} so that the closed side contains the center,
/// finds a witness region and validates its containment certificate.
/// Throws InputError for a zero normal.
bool avoidance_certificate(const PartitionTree& tree, const Point& normal, double offset);

/// `count` hyperplanes with uniformly random unit normals, each through a
/// random data point of `cloud` (or a Gaussian perturbation of the center
/// when no cloud is given). All must be certified.
CheckReport check_avoidance(const PartitionTree& tree, const WeightedPointCloud* cloud, std::size_t count,
                            std::uint64_t seed);

/// `count` random closed half-spaces containing the center; each must carry
/// at least 2^-n of the total mass (relative slack 1e-6).
CheckReport check_depth(const PartitionTree& tree, const WeightedPointCloud& cloud, std::size_t count,
                        std::uint64_t seed);

/// Computes the center of `cloud` (first symmetrized about z when requested)
/// and passes iff it lies within `tol` of z in the max norm.
CheckReport check_symmetry(const WeightedPointCloud& cloud, std::span<const double> z,
                           const SolverConfig& cfg, bool symmetrize_first, double tol);

/// Same, with the default tolerance 50 * residual_tolerance.
CheckReport check_symmetry(const WeightedPointCloud& cloud, std::span<const double> z,
                           const SolverConfig& cfg);

/// A map applied in place to each point's coordinates; it must leave the
/// first k coordinates untouched.
using Shear = std::function<void(std::span<double>)>;

/// The first k center coordinates before and after the shear must agree to
/// within 10 * max(root_tolerance, residual_tolerance). k must lie in [1, n].
CheckReport check_prefix_dependence(const WeightedPointCloud& cloud, std::size_t k, const Shear& shear,
                                    const SolverConfig& cfg);

struct ContinuityOptions {
  double rate_constant = 0.5;  // C in d(eps) <= C sqrt(eps) scale
  std::size_t gamma_samples = 4096;
  std::uint64_t seed = 0;
};

/// Centers of cloud + eps * gamma (gamma scaled to eps times the cloud's
/// mass) for each eps. Passes iff distances to the eps = 0 center never grow
/// as eps decreases (slack 10 * residual_tolerance) and each stays below
/// C sqrt(eps) times the data scale (largest per-coordinate standard
/// deviation).
CheckReport check_continuity(const WeightedPointCloud& cloud, const MeasureSpec& gamma,
                             std::vector<double> epsilons, const SolverConfig& cfg,
                             const ContinuityOptions& options = {});

/// Brute-force center for n = 2 that shares no code with the solver: the
/// weighted median of x1, then a dense grid scan (with adaptive refinement)
/// of the second axis component for the sign change of the difference of
/// the projected halves' medians.
Point oracle_center_2d(const WeightedPointCloud& cloud);

/// Lifted half-space A = {y in F : normal.y >= offset} within F = {x1 = alpha}
/// (normal and direction in F's coordinates x2..xn), lifted along
/// w(t) = (1, t * direction) for each slope t.
struct LiftSetup {
  double alpha = 0.0;
  Point normal;
  double offset = 0.0;
  Point direction;
  std::vector<double> slopes;  // ascending
};

/// Mass of the points with x1 >= alpha whose projection along w(t) lands in A.
double lifted_mass(const WeightedPointCloud& cloud, const LiftSetup& setup, double slope);

/// Smallest slope beyond which no point with x1 > alpha stays lifted into A
/// (requires normal.direction > 0).
double vanishing_slope(const WeightedPointCloud& cloud, const LiftSetup& setup);

/// Masses along the slopes must be constant when normal.direction = 0 and
/// non-increasing when it is positive; past vanishing_slope they must equal
/// the mass sitting on F inside A (zero for clouds without atoms on F).
CheckReport check_monotone_lift(const WeightedPointCloud& cloud, const LiftSetup& setup);

/// H-representation and cone-coefficient membership agree on `samples`
/// Gaussian points per region (points within 1e-9 of a facet are skipped),
/// and every stored basis is exactly sub-diagonal.
CheckReport check_representation(const PartitionTree& tree, std::size_t samples, std::uint64_t seed,
                                 double spread = 1.0);

/// Center of the tree against oracle_center_2d (n = 2 only).
CheckReport check_oracle_2d(const PartitionTree& tree, const WeightedPointCloud& cloud, double tol);

}  // namespace yaoyao
