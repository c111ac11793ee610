#pragma once

// Finite weighted point clouds standing in for measures: sampling from
// generative descriptions, weighted quantiles, median splits, projection
// along an axis onto the split hyperplane, and regularization.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "yaoyao/geometry.hpp"

namespace yaoyao {

using PointId = std::uint64_t;

/// N points of dimension n with positive weights and unique ids. Storage is
/// column-major and always sorted by ascending id; every mass summation walks
/// that order, so results do not depend on how the cloud was assembled.
class WeightedPointCloud {
 public:
  WeightedPointCloud() = default;
  /// Unit weights, ids 0..N-1.
  static WeightedPointCloud from_points(const std::vector<Point>& points);
  static WeightedPointCloud from_points(const std::vector<Point>& points,
                                        std::vector<double> weights);
  WeightedPointCloud(std::size_t dimension, std::vector<Point> points, std::vector<double> weights,
                     std::vector<PointId> ids);

  std::size_t dimension() const noexcept { return columns_.size(); }
  std::size_t size() const noexcept { return weights_.size(); }
  bool empty() const noexcept { return weights_.empty(); }

  double coordinate(std::size_t row, std::size_t axis) const { return columns_[axis][row]; }
  std::span<const double> column(std::size_t axis) const { return columns_[axis]; }
  Point point(std::size_t row) const;
  double weight(std::size_t row) const { return weights_[row]; }
  PointId id(std::size_t row) const { return ids_[row]; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const PointId> ids() const noexcept { return ids_; }

  double total_mass() const;
  PointId max_id() const;

  /// Keeps only the first `count` coordinates.
  WeightedPointCloud truncated(std::size_t count) const;

  friend bool operator==(const WeightedPointCloud&, const WeightedPointCloud&) = default;

 private:
  friend class CloudBuilder;

  std::vector<std::vector<double>> columns_;
  std::vector<double> weights_;
  std::vector<PointId> ids_;
};

/// Appends rows in ascending id order without re-validating; used by the
/// split and projection routines that already preserve the invariants.
class CloudBuilder {
 public:
  CloudBuilder(std::size_t dimension, std::size_t reserve);
  void add(const WeightedPointCloud& from, std::size_t row, double weight);
  void add_row(std::span<const double> coords, double weight, PointId id);
  WeightedPointCloud build() &&;

  /// Takes ownership of prepared columns; ids must already be ascending.
  static WeightedPointCloud assemble(std::vector<std::vector<double>> columns,
                                     std::vector<double> weights, std::vector<PointId> ids);

 private:
  WeightedPointCloud cloud_;
};

// ------------------------------------------------------------ MeasureSpec

struct MeasureSpec;

struct GaussianComponent {
  double weight = 1.0;
  Point mean;
  /// Row-major n x n factor L; samples are mean + L z with z standard normal.
  std::vector<double> cov_factor;
};

struct GaussianMixture {
  std::vector<GaussianComponent> components;
};

struct UniformBox {
  Point lo;
  Point hi;
};

struct UniformSimplex {
  std::vector<Point> vertices;
};

struct FiniteAtoms {
  std::vector<Point> points;
  std::vector<double> weights;
};

struct Mixture {
  std::vector<double> weights;
  std::vector<MeasureSpec> parts;
};

/// Generative description of a measure. `symmetry_center`, when present,
/// declares that the described measure is invariant under x -> 2z - x.
struct MeasureSpec {
  std::size_t dimension = 0;
  std::variant<GaussianMixture, UniformBox, UniformSimplex, FiniteAtoms, Mixture> kind;
  std::optional<Point> symmetry_center;
};

/// Throws InputError for degenerate specs (rank-deficient covariance factor,
/// empty box, affinely dependent simplex, non-positive mixture weights).
void validate(const MeasureSpec& spec);

MeasureSpec measure_spec_from_json(const nlohmann::json& doc);
nlohmann::json measure_spec_to_json(const MeasureSpec& spec);

// ------------------------------------------------------------- operations

/// N unit-weight points, ids 0..N-1. Point i is generated from CounterRng
/// stream i only. Finite atoms at top level use systematic resampling with a
/// single offset drawn from stream N, so N equal to the atom count with equal
/// weights reproduces the atoms exactly.
WeightedPointCloud sample(const MeasureSpec& spec, std::size_t count, std::uint64_t seed);

/// Midpoint of the median interval generalised to level q: with W the
/// cumulative weight of the sorted values, returns the midpoint of
/// [inf{t : W(t) >= q T}, sup{t : W(t-) <= q T}], comparing masses up to
/// 1e-12 T. Ties sort by input index.
double weighted_quantile(std::span<const double> values, std::span<const double> weights, double q);

struct MedianSplit {
  double alpha = 0.0;
  WeightedPointCloud low;
  WeightedPointCloud high;
};

/// Splits at the weighted median alpha of coordinate `axis`. Points below go
/// low, above go high; points at alpha fill the low side by ascending id up
/// to exactly half the mass, splitting the weight of at most one point.
MedianSplit split_at_median(const WeightedPointCloud& cloud, std::size_t axis);

/// Projects every point along w onto {x_1 = alpha} and drops the first
/// coordinate: x -> (x - (x_1 - alpha) w)[2..n]. Requires w_1 = 1.
WeightedPointCloud project_measure(const WeightedPointCloud& side, double alpha,
                                   std::span<const double> axis);

/// Same projection, but only the first `columns` coordinates of the result.
WeightedPointCloud project_measure(const WeightedPointCloud& side, double alpha,
                                   std::span<const double> axis, std::size_t columns);

double halfspace_mass(const WeightedPointCloud& cloud, const HalfSpace& h);

/// cloud + (1/p) gamma, with gamma represented by M samples carrying total
/// mass total/p. New ids continue after the largest existing id. A gamma that
/// declares a symmetry center is sampled in reflected pairs (ceil(M/2) draws).
WeightedPointCloud regularize(const WeightedPointCloud& cloud, const MeasureSpec& gamma, double p,
                              std::size_t samples, std::uint64_t seed);

/// cloud union its reflection about z, all weights halved. The point with id
/// i becomes ids 2i (original) and 2i+1 (reflection).
WeightedPointCloud symmetrize(const WeightedPointCloud& cloud, std::span<const double> z);

/// Maps every point through a coordinate system.
WeightedPointCloud to_coordinates(const WeightedPointCloud& ambient, const CoordinateSystem& system);
WeightedPointCloud to_ambient(const WeightedPointCloud& coordinates, const CoordinateSystem& system);

// -------------------------------------------------------------------- I/O

/// CSV with header x1,...,xn[,w]; one point per row, '.' decimal separator.
/// Missing w means unit weight. Ids are assigned by row order.
WeightedPointCloud read_csv(std::istream& in);
void write_csv(std::ostream& out, const WeightedPointCloud& cloud);

/// Shortest decimal string that round-trips the binary64 value (-0 prints as 0).
std::string format_double(double v);

/// FNV-1a over coordinates, weights and ids; hex string.
std::string cloud_digest(const WeightedPointCloud& cloud);

}  // namespace yaoyao
