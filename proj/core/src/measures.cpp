#include "yaoyao/measures.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "yaoyao/error.hpp"
#include "yaoyao/random.hpp"

namespace yaoyao {

// ------------------------------------------------------- WeightedPointCloud

WeightedPointCloud WeightedPointCloud::from_points(const std::vector<Point>& points) {
  return from_points(points, std::vector<double>(points.size(), 1.0));
}

WeightedPointCloud WeightedPointCloud::from_points(const std::vector<Point>& points,
                                                   std::vector<double> weights) {
  if (points.empty()) throw InputError("point cloud: no points");
  std::vector<PointId> ids(points.size());
  std::iota(ids.begin(), ids.end(), PointId{0});
  return WeightedPointCloud(points.front().size(), points, std::move(weights), std::move(ids));
}

WeightedPointCloud::WeightedPointCloud(std::size_t dimension, std::vector<Point> points,
                                       std::vector<double> weights, std::vector<PointId> ids) {
  if (dimension == 0) throw InputError("point cloud: dimension must be at least 1");
  if (points.size() != weights.size() || points.size() != ids.size()) {
    throw InputError("point cloud: points, weights and ids differ in length");
  }
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (ids[order[i]] == ids[order[i - 1]]) {
      throw InputError("point cloud: duplicate id " + std::to_string(ids[order[i]]));
    }
  }
  columns_.assign(dimension, std::vector<double>(points.size()));
  weights_.resize(points.size());
  ids_.resize(points.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    const std::size_t src = order[r];
    const Point& p = points[src];
    if (p.size() != dimension) throw InputError("point cloud: point dimension mismatch");
    for (std::size_t j = 0; j < dimension; ++j) {
      if (!std::isfinite(p[j])) throw InputError("point cloud: non-finite coordinate");
      columns_[j][r] = p[j];
    }
    const double w = weights[src];
    if (!(w > 0.0) || !std::isfinite(w)) throw InputError("point cloud: weights must be positive and finite");
    weights_[r] = w;
    ids_[r] = ids[src];
  }
}

Point WeightedPointCloud::point(std::size_t row) const {
  Point p(dimension());
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = columns_[j][row];
  return p;
}

double WeightedPointCloud::total_mass() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

PointId WeightedPointCloud::max_id() const { return ids_.empty() ? 0 : ids_.back(); }

WeightedPointCloud WeightedPointCloud::truncated(std::size_t count) const {
  if (count == 0 || count > dimension()) throw InputError("point cloud: invalid truncation");
  WeightedPointCloud out = *this;
  out.columns_.resize(count);
  return out;
}

CloudBuilder::CloudBuilder(std::size_t dimension, std::size_t reserve) {
  cloud_.columns_.assign(dimension, {});
  for (auto& c : cloud_.columns_) c.reserve(reserve);
  cloud_.weights_.reserve(reserve);
  cloud_.ids_.reserve(reserve);
}

void CloudBuilder::add(const WeightedPointCloud& from, std::size_t row, double weight) {
  for (std::size_t j = 0; j < cloud_.columns_.size(); ++j) {
    cloud_.columns_[j].push_back(from.columns_[j][row]);
  }
  cloud_.weights_.push_back(weight);
  cloud_.ids_.push_back(from.ids_[row]);
}

void CloudBuilder::add_row(std::span<const double> coords, double weight, PointId id) {
  for (std::size_t j = 0; j < cloud_.columns_.size(); ++j) cloud_.columns_[j].push_back(coords[j]);
  cloud_.weights_.push_back(weight);
  cloud_.ids_.push_back(id);
}

WeightedPointCloud CloudBuilder::build() && { return std::move(cloud_); }

WeightedPointCloud CloudBuilder::assemble(std::vector<std::vector<double>> columns,
                                          std::vector<double> weights, std::vector<PointId> ids) {
  WeightedPointCloud cloud;
  cloud.columns_ = std::move(columns);
  cloud.weights_ = std::move(weights);
  cloud.ids_ = std::move(ids);
  return cloud;
}

// ---------------------------------------------------------------- validate

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_point(const Point& p, std::size_t n, const char* what) {
  if (p.size() != n) throw InputError(std::string("measure spec: ") + what + " has wrong dimension");
  for (double v : p) {
    if (!std::isfinite(v)) throw InputError(std::string("measure spec: ") + what + " is not finite");
  }
}

void check_weights(const std::vector<double>& w, const char* what) {
  if (w.empty()) throw InputError(std::string("measure spec: ") + what + " is empty");
  for (double v : w) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InputError(std::string("measure spec: ") + what + " must be positive");
    }
  }
}

bool full_rank(const RowMatrix& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return false;
  const double smin = sv(sv.size() - 1);
  return smin > 0.0 && sv(0) / smin <= 1e12;
}

}  // namespace

void validate(const MeasureSpec& spec) {
  const std::size_t n = spec.dimension;
  if (n == 0) throw InputError("measure spec: dimension must be at least 1");
  if (spec.symmetry_center) check_point(*spec.symmetry_center, n, "symmetry center");

  std::visit(
      [n](const auto& kind) {
        using T = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<T, GaussianMixture>) {
          if (kind.components.empty()) throw InputError("measure spec: gaussian mixture has no components");
          for (const auto& c : kind.components) {
            if (!(c.weight > 0.0)) throw InputError("measure spec: mixture weights must be positive");
            check_point(c.mean, n, "gaussian mean");
            if (c.cov_factor.size() != n * n) {
              throw InputError("measure spec: covariance factor must be n x n");
            }
            const Eigen::Map<const RowMatrix> l(c.cov_factor.data(), static_cast<Eigen::Index>(n),
                                                static_cast<Eigen::Index>(n));
            if (!l.allFinite() || !full_rank(l)) {
              throw InputError("measure spec: covariance factor is rank deficient");
            }
          }
        } else if constexpr (std::is_same_v<T, UniformBox>) {
          check_point(kind.lo, n, "box corner");
          check_point(kind.hi, n, "box corner");
          for (std::size_t j = 0; j < n; ++j) {
            if (!(kind.lo[j] < kind.hi[j])) throw InputError("measure spec: box has empty interior");
          }
        } else if constexpr (std::is_same_v<T, UniformSimplex>) {
          if (kind.vertices.size() != n + 1) throw InputError("measure spec: simplex needs n+1 vertices");
          for (const auto& v : kind.vertices) check_point(v, n, "simplex vertex");
          RowMatrix edges(n, n);
          for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) edges(i, j) = kind.vertices[i + 1][j] - kind.vertices[0][j];
          }
          if (!full_rank(edges)) throw InputError("measure spec: simplex is degenerate");
        } else if constexpr (std::is_same_v<T, FiniteAtoms>) {
          if (kind.points.empty()) throw InputError("measure spec: no atoms");
          for (const auto& p : kind.points) check_point(p, n, "atom");
          if (kind.weights.size() != kind.points.size()) {
            throw InputError("measure spec: atom weights and points differ in length");
          }
          check_weights(kind.weights, "atom weights");
        } else {
          if (kind.parts.empty() || kind.parts.size() != kind.weights.size()) {
            throw InputError("measure spec: mixture parts and weights differ in length");
          }
          check_weights(kind.weights, "mixture weights");
          for (const auto& part : kind.parts) {
            if (part.dimension != n) throw InputError("measure spec: mixture part has wrong dimension");
            validate(part);
          }
        }
      },
      spec.kind);
}

// ------------------------------------------------------------------ sample

namespace {

std::size_t pick(std::span<const double> weights, double u) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double target = u * total;
  double cum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cum += weights[i];
    if (target < cum) return i;
  }
  return weights.size() - 1;
}

Point draw(const MeasureSpec& spec, CounterRng& rng) {
  const std::size_t n = spec.dimension;
  return std::visit(
      [&](const auto& kind) -> Point {
        using T = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<T, GaussianMixture>) {
          std::size_t c = 0;
          if (kind.components.size() > 1) {
            std::vector<double> w;
            for (const auto& comp : kind.components) w.push_back(comp.weight);
            c = pick(w, rng.next_uniform());
          }
          const auto& comp = kind.components[c];
          Point z(n);
          for (double& v : z) v = rng.next_normal();
          Point x = comp.mean;
          for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) x[i] += comp.cov_factor[i * n + j] * z[j];
          }
          return x;
        } else if constexpr (std::is_same_v<T, UniformBox>) {
          Point x(n);
          for (std::size_t j = 0; j < n; ++j) {
            x[j] = kind.lo[j] + rng.next_uniform() * (kind.hi[j] - kind.lo[j]);
          }
          return x;
        } else if constexpr (std::is_same_v<T, UniformSimplex>) {
          std::vector<double> lambda(n + 1);
          double s = 0.0;
          for (double& l : lambda) {
            l = -std::log(rng.next_uniform());
            s += l;
          }
          Point x(n, 0.0);
          for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t j = 0; j < n; ++j) x[j] += lambda[i] / s * kind.vertices[i][j];
          }
          return x;
        } else if constexpr (std::is_same_v<T, FiniteAtoms>) {
          return kind.points[pick(kind.weights, rng.next_uniform())];
        } else {
          return draw(kind.parts[pick(kind.weights, rng.next_uniform())], rng);
        }
      },
      spec.kind);
}

}  // namespace

WeightedPointCloud sample(const MeasureSpec& spec, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw InputError("sample: N must be at least 1");
  validate(spec);
  std::vector<Point> points(count);
  if (const auto* atoms = std::get_if<FiniteAtoms>(&spec.kind)) {
    CounterRng rng(seed, count);
    const double u = rng.next_uniform();
    double total = 0.0;
    for (double w : atoms->weights) total += w;
    std::size_t a = 0;
    double cum = atoms->weights[0];
    for (std::size_t i = 0; i < count; ++i) {
      const double position = (static_cast<double>(i) + u) / static_cast<double>(count) * total;
      while (position >= cum && a + 1 < atoms->points.size()) cum += atoms->weights[++a];
      points[i] = atoms->points[a];
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      CounterRng rng(seed, i);
      points[i] = draw(spec, rng);
    }
  }
  return WeightedPointCloud::from_points(points);
}

// ---------------------------------------------------------------- quantile

namespace {

/// `order` lists indices sorted by (value, index). Cumulative masses within
/// 1e-12 of the total of the target count as equal to it, so that summation
/// roundoff cannot break the tie between mirror-image halves.
double quantile_sorted(std::span<const double> values, std::span<const double> weights,
                       std::span<const std::uint32_t> order, double q) {
  double total = 0.0;
  for (std::uint32_t i : order) total += weights[i];
  const double target = q * total;
  const double slack = 1e-12 * total;
  double cum = 0.0;
  double lower = 0.0;
  bool have_lower = false;
  double upper = values[order[0]];
  for (std::size_t i = 0; i < order.size();) {
    const double v = values[order[i]];
    const double before = cum;
    if (before > target + slack) break;
    upper = v;
    std::size_t j = i;
    while (j < order.size() && values[order[j]] == v) cum += weights[order[j++]];
    if (!have_lower && cum >= target - slack) {
      lower = v;
      have_lower = true;
    }
    i = j;
  }
  if (!have_lower) lower = values[order.back()];
  return 0.5 * (lower + upper);
}

std::vector<std::uint32_t> sorted_order(std::span<const double> values) {
  std::vector<std::uint32_t> order(values.size());
  std::iota(order.begin(), order.end(), 0U);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return values[a] < values[b] || (values[a] == values[b] && a < b);
  });
  return order;
}

}  // namespace

double weighted_quantile(std::span<const double> values, std::span<const double> weights, double q) {
  if (values.empty()) throw InputError("weighted_quantile: empty input");
  if (values.size() != weights.size()) throw InputError("weighted_quantile: length mismatch");
  if (!(q > 0.0 && q < 1.0)) throw InputError("weighted_quantile: q must lie in (0, 1)");
  for (double w : weights) {
    if (!(w > 0.0)) throw InputError("weighted_quantile: weights must be positive");
  }
  const auto order = sorted_order(values);
  return quantile_sorted(values, weights, order, q);
}

MedianSplit split_at_median(const WeightedPointCloud& cloud, std::size_t axis) {
  if (cloud.empty()) throw InputError("split_at_median: empty cloud");
  if (axis >= cloud.dimension()) throw InputError("split_at_median: axis out of range");
  const auto values = cloud.column(axis);
  const auto weights = cloud.weights();
  const auto order = sorted_order(values);
  const double alpha = quantile_sorted(values, weights, order, 0.5);

  const double total = cloud.total_mass();
  const double half = 0.5 * total;
  const double negligible = 1e-15 * total;
  double below = 0.0;
  for (std::size_t r = 0; r < cloud.size(); ++r) {
    if (values[r] < alpha) below += weights[r];
  }
  double need = half - below;

  CloudBuilder low(cloud.dimension(), cloud.size() / 2 + 1);
  CloudBuilder high(cloud.dimension(), cloud.size() / 2 + 1);
  for (std::size_t r = 0; r < cloud.size(); ++r) {
    const double v = values[r];
    const double w = weights[r];
    if (v < alpha) {
      low.add(cloud, r, w);
    } else if (v > alpha) {
      high.add(cloud, r, w);
    } else if (need <= negligible) {
      high.add(cloud, r, w);
    } else if (w <= need + negligible) {
      low.add(cloud, r, w);
      need -= w;
    } else {
      low.add(cloud, r, need);
      high.add(cloud, r, w - need);
      need = 0.0;
    }
  }
  return MedianSplit{alpha, std::move(low).build(), std::move(high).build()};
}

WeightedPointCloud project_measure(const WeightedPointCloud& side, double alpha,
                                   std::span<const double> axis) {
  return project_measure(side, alpha, axis, side.dimension() - 1);
}

WeightedPointCloud project_measure(const WeightedPointCloud& side, double alpha,
                                   std::span<const double> axis, std::size_t columns) {
  const std::size_t n = side.dimension();
  if (n < 2) throw InputError("project_measure: dimension must be at least 2");
  if (axis.size() != n) throw InputError("project_measure: axis dimension mismatch");
  if (axis[0] != 1.0) throw InputError("project_measure: axis must be normalized (first component 1)");
  if (columns == 0 || columns > n - 1) throw InputError("project_measure: invalid column count");

  const auto x1 = side.column(0);
  std::vector<double> lift(side.size());
  for (std::size_t r = 0; r < side.size(); ++r) lift[r] = x1[r] - alpha;

  std::vector<std::vector<double>> cols(columns, std::vector<double>(side.size()));
  for (std::size_t j = 0; j < columns; ++j) {
    const auto src = side.column(j + 1);
    const double wj = axis[j + 1];
    for (std::size_t r = 0; r < side.size(); ++r) cols[j][r] = src[r] - lift[r] * wj;
  }
  return CloudBuilder::assemble(std::move(cols), {side.weights().begin(), side.weights().end()},
                                {side.ids().begin(), side.ids().end()});
}

double halfspace_mass(const WeightedPointCloud& cloud, const HalfSpace& h) {
  if (h.dimension() != cloud.dimension()) throw InputError("halfspace_mass: dimension mismatch");
  double mass = 0.0;
  Point p(cloud.dimension());
  for (std::size_t r = 0; r < cloud.size(); ++r) {
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = cloud.coordinate(r, j);
    if (h.contains(p)) mass += cloud.weight(r);
  }
  return mass;
}

WeightedPointCloud symmetrize(const WeightedPointCloud& cloud, std::span<const double> z) {
  const std::size_t n = cloud.dimension();
  if (z.size() != n) throw InputError("symmetrize: center dimension mismatch");
  CloudBuilder out(n, 2 * cloud.size());
  Point p(n);
  Point q(n);
  for (std::size_t r = 0; r < cloud.size(); ++r) {
    for (std::size_t j = 0; j < n; ++j) {
      p[j] = cloud.coordinate(r, j);
      q[j] = 2.0 * z[j] - p[j];
    }
    const double w = 0.5 * cloud.weight(r);
    out.add_row(p, w, 2 * cloud.id(r));
    out.add_row(q, w, 2 * cloud.id(r) + 1);
  }
  return std::move(out).build();
}

WeightedPointCloud regularize(const WeightedPointCloud& cloud, const MeasureSpec& gamma, double p,
                              std::size_t samples, std::uint64_t seed) {
  if (!(p > 0.0) || !std::isfinite(p)) throw InputError("regularize: p must be positive");
  if (samples == 0) throw InputError("regularize: need at least one sample");
  if (gamma.dimension != cloud.dimension()) throw InputError("regularize: dimension mismatch");

  WeightedPointCloud extra;
  if (gamma.symmetry_center) {
    extra = symmetrize(sample(gamma, (samples + 1) / 2, seed), *gamma.symmetry_center);
  } else {
    extra = sample(gamma, samples, seed);
  }
  const double weight = cloud.total_mass() / p / static_cast<double>(extra.size());

  const std::size_t n = cloud.dimension();
  CloudBuilder out(n, cloud.size() + extra.size());
  for (std::size_t r = 0; r < cloud.size(); ++r) out.add(cloud, r, cloud.weight(r));
  const PointId base = cloud.max_id() + 1;
  Point row(n);
  for (std::size_t r = 0; r < extra.size(); ++r) {
    for (std::size_t j = 0; j < n; ++j) row[j] = extra.coordinate(r, j);
    out.add_row(row, weight, base + extra.id(r));
  }
  return std::move(out).build();
}

WeightedPointCloud to_coordinates(const WeightedPointCloud& ambient, const CoordinateSystem& system) {
  if (system.dimension() != ambient.dimension()) throw InputError("to_coordinates: dimension mismatch");
  CloudBuilder out(ambient.dimension(), ambient.size());
  for (std::size_t r = 0; r < ambient.size(); ++r) {
    out.add_row(system.to_coordinates(ambient.point(r)), ambient.weight(r), ambient.id(r));
  }
  return std::move(out).build();
}

WeightedPointCloud to_ambient(const WeightedPointCloud& coordinates, const CoordinateSystem& system) {
  if (system.dimension() != coordinates.dimension()) throw InputError("to_ambient: dimension mismatch");
  CloudBuilder out(coordinates.dimension(), coordinates.size());
  for (std::size_t r = 0; r < coordinates.size(); ++r) {
    out.add_row(system.to_ambient(coordinates.point(r)), coordinates.weight(r), coordinates.id(r));
  }
  return std::move(out).build();
}

}  // namespace yaoyao
