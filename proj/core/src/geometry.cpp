#include "yaoyao/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "yaoyao/error.hpp"

namespace yaoyao {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void require_dimension(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw InputError(std::string(what) + ": dimension mismatch (expected " +
                     std::to_string(expected) + ", got " + std::to_string(got) + ")");
  }
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  require_dimension(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// ---------------------------------------------------------------- HalfSpace

HalfSpace::HalfSpace(Point normal, double offset) : normal_(std::move(normal)), offset_(offset) {
  if (normal_.empty()) throw InputError("half-space: empty normal");
  bool nonzero = false;
  for (double a : normal_) {
    if (!std::isfinite(a)) throw InputError("half-space: non-finite normal");
    if (a != 0.0) nonzero = true;
  }
  if (!nonzero) throw InputError("half-space: zero normal");
  if (std::isnan(offset_)) throw InputError("half-space: NaN offset");
}

double HalfSpace::evaluate(std::span<const double> y) const {
  return dot(normal_, y) - offset_;
}

double HalfSpace::evaluate_linear(std::span<const double> v) const { return dot(normal_, v); }

Point HalfSpace::negated(const Point& v) {
  Point out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return -x; });
  return out;
}

// --------------------------------------------------------- CoordinateSystem

CoordinateSystem CoordinateSystem::standard(std::size_t n) {
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 1.0;
  return CoordinateSystem(std::move(m), Point(n, 0.0));
}

CoordinateSystem::CoordinateSystem(std::vector<double> matrix, Point offset, double max_condition)
    : n_(offset.size()), matrix_(std::move(matrix)), offset_(std::move(offset)) {
  if (n_ == 0) throw InputError("coordinate system: dimension must be at least 1");
  if (matrix_.size() != n_ * n_) {
    throw InputError("coordinate system: matrix must be " + std::to_string(n_) + "x" +
                     std::to_string(n_));
  }
  for (double v : matrix_) {
    if (!std::isfinite(v)) throw InputError("coordinate system: non-finite matrix entry");
  }
  for (double v : offset_) {
    if (!std::isfinite(v)) throw InputError("coordinate system: non-finite offset");
  }

  const Eigen::Map<const RowMatrix> a(matrix_.data(), static_cast<Eigen::Index>(n_),
                                      static_cast<Eigen::Index>(n_));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  condition_ = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  if (!(condition_ <= max_condition)) {
    throw InputError("coordinate system: linear part is singular or ill-conditioned (condition " +
                     std::to_string(condition_) + ")");
  }
  RowMatrix inv = a.fullPivLu().inverse();
  inverse_.assign(inv.data(), inv.data() + n_ * n_);
}

bool CoordinateSystem::is_standard() const {
  for (std::size_t i = 0; i < n_; ++i) {
    if (offset_[i] != 0.0) return false;
    for (std::size_t j = 0; j < n_; ++j) {
      if (matrix_[i * n_ + j] != (i == j ? 1.0 : 0.0)) return false;
    }
  }
  return true;
}

Point CoordinateSystem::to_coordinates(std::span<const double> ambient) const {
  require_dimension(n_, ambient.size(), "to_coordinates");
  Point x(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    x[i] = dot(std::span(matrix_).subspan(i * n_, n_), ambient) + offset_[i];
  }
  return x;
}

Point CoordinateSystem::to_ambient(std::span<const double> coordinates) const {
  require_dimension(n_, coordinates.size(), "to_ambient");
  Point shifted(n_);
  for (std::size_t i = 0; i < n_; ++i) shifted[i] = coordinates[i] - offset_[i];
  return vector_to_ambient(shifted);
}

Point CoordinateSystem::vector_to_ambient(std::span<const double> coordinates) const {
  require_dimension(n_, coordinates.size(), "vector_to_ambient");
  Point y(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    y[i] = dot(std::span(inverse_).subspan(i * n_, n_), coordinates);
  }
  return y;
}

HalfSpace CoordinateSystem::halfspace_to_coordinates(const HalfSpace& ambient) const {
  require_dimension(n_, ambient.dimension(), "halfspace_to_coordinates");
  // a.y >= c with y = A^{-1}(x - b)  <=>  (A^{-T} a).x >= c + (A^{-T} a).b
  Point a(n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t i = 0; i < n_; ++i) a[j] += inverse_[i * n_ + j] * ambient.normal()[i];
  }
  const double c = ambient.offset() + dot(a, offset_);
  return HalfSpace(std::move(a), c);
}

HalfSpace CoordinateSystem::halfspace_to_ambient(const HalfSpace& coordinates) const {
  require_dimension(n_, coordinates.dimension(), "halfspace_to_ambient");
  Point a(n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t i = 0; i < n_; ++i) a[j] += matrix_[i * n_ + j] * coordinates.normal()[i];
  }
  const double c = coordinates.offset() - dot(coordinates.normal(), offset_);
  return HalfSpace(std::move(a), c);
}

// ------------------------------------------------------------- SignSequence

SignSequence::SignSequence(std::vector<int> signs) : signs_(std::move(signs)) {
  for (int s : signs_) {
    if (s != 1 && s != -1) throw InputError("sign sequence: entries must be +1 or -1");
  }
}

SignSequence SignSequence::from_index(std::uint64_t index, std::size_t length) {
  std::vector<int> s(length);
  for (std::size_t k = 0; k < length; ++k) {
    s[k] = ((index >> (length - 1 - k)) & 1U) ? 1 : -1;
  }
  return SignSequence(std::move(s));
}

SignSequence SignSequence::prefix(std::size_t k) const {
  if (k > signs_.size()) throw InputError("sign sequence: prefix longer than sequence");
  return SignSequence(std::vector<int>(signs_.begin(), signs_.begin() + static_cast<long>(k)));
}

SignSequence SignSequence::appended(int sign) const {
  auto s = signs_;
  s.push_back(sign);
  return SignSequence(std::move(s));
}

SignSequence SignSequence::concatenated(const SignSequence& tail) const {
  auto s = signs_;
  s.insert(s.end(), tail.signs_.begin(), tail.signs_.end());
  return SignSequence(std::move(s));
}

std::uint64_t SignSequence::index() const {
  std::uint64_t idx = 0;
  for (int s : signs_) idx = (idx << 1) | (s > 0 ? 1U : 0U);
  return idx;
}

std::string SignSequence::to_string() const {
  std::string out;
  out.reserve(signs_.size());
  for (int s : signs_) out.push_back(s > 0 ? '+' : '-');
  return out;
}

// --------------------------------------------------------- SubDiagonalBasis

SubDiagonalBasis::SubDiagonalBasis(std::size_t dimension, std::vector<Point> generators)
    : n_(dimension), generators_(std::move(generators)) {
  if (generators_.size() > n_) throw InputError("sub-diagonal basis: more generators than dimension");
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    const Point& u = generators_[i];
    require_dimension(n_, u.size(), "sub-diagonal basis");
    for (std::size_t j = 0; j < i; ++j) {
      if (u[j] != 0.0) {
        throw InputError("sub-diagonal basis: generator " + std::to_string(i + 1) +
                         " has non-zero entry above the diagonal");
      }
    }
    if (u[i] != 1.0) {
      throw InputError("sub-diagonal basis: generator " + std::to_string(i + 1) +
                       " is not normalized");
    }
    for (double v : u) {
      if (!std::isfinite(v)) throw InputError("sub-diagonal basis: non-finite entry");
    }
  }
}

// --------------------------------------------------------------- ConeRegion

ConeRegion::ConeRegion(Point apex, SubDiagonalBasis basis, SignSequence signs)
    : apex_(std::move(apex)), basis_(std::move(basis)), signs_(std::move(signs)) {
  require_dimension(basis_.dimension(), apex_.size(), "cone region apex");
  if (signs_.size() != basis_.size()) {
    throw InputError("cone region: sign count differs from generator count");
  }
}

Point ConeRegion::signed_generator(std::size_t i) const {
  Point u = basis_[i];
  if (signs_[i] < 0) {
    for (double& v : u) v = -v;
  }
  return u;
}

double default_tolerance(const ConeRegion& region, std::span<const double> p) {
  return 1e-9 * (1.0 + max_abs(region.apex()) + max_abs(p));
}

std::vector<double> cone_coefficients(const ConeRegion& region, std::span<const double> p) {
  require_dimension(region.dimension(), p.size(), "cone_coefficients");
  const std::size_t k = region.rank();
  const auto& apex = region.apex();
  std::vector<double> unsigned_c(k);
  for (std::size_t j = 0; j < k; ++j) {
    double d = p[j] - apex[j];
    for (std::size_t i = 0; i < j; ++i) d -= unsigned_c[i] * region.basis()[i][j];
    unsigned_c[j] = d;  // unit diagonal
  }
  for (std::size_t j = 0; j < k; ++j) unsigned_c[j] *= region.signs()[j];
  return unsigned_c;
}

Point cone_synthesize(const ConeRegion& region, std::span<const double> coefficients) {
  require_dimension(region.rank(), coefficients.size(), "cone_synthesize");
  Point p = region.apex();
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    const double c = coefficients[i] * region.signs()[i];
    const Point& u = region.basis()[i];
    for (std::size_t j = i; j < p.size(); ++j) p[j] += c * u[j];
  }
  return p;
}

bool cone_contains(const ConeRegion& region, std::span<const double> p, double tol) {
  if (tol < 0.0) throw InputError("cone_contains: negative tolerance");
  for (double c : cone_coefficients(region, p)) {
    if (c < -tol) return false;
  }
  return true;
}

bool cone_contains(const ConeRegion& region, std::span<const double> p) {
  return cone_contains(region, p, default_tolerance(region, p));
}

bool halfspace_contains_region(const HalfSpace& h, const ConeRegion& region) {
  require_dimension(region.dimension(), h.dimension(), "halfspace_contains_region");
  if (!region.is_full()) throw InputError("halfspace_contains_region: region is not full");
  if (!(h.evaluate(region.apex()) >= 0.0)) return false;
  for (std::size_t i = 0; i < region.rank(); ++i) {
    const double slope = h.evaluate_linear(region.basis()[i]) * region.signs()[i];
    if (!(slope >= 0.0)) return false;
  }
  return true;
}

std::vector<HalfSpace> region_halfspace_rep(const ConeRegion& region) {
  if (!region.is_full()) throw InputError("region_halfspace_rep: region is not full");
  const std::size_t n = region.dimension();
  // Rows of the inverse of the unit lower-triangular matrix G whose columns
  // are the generators: R G = I, solved row by row.
  std::vector<Point> rows(n, Point(n, 0.0));
  for (std::size_t r = 0; r < n; ++r) {
    rows[r][r] = 1.0;
    for (std::size_t j = r; j-- > 0;) {
      // (R G)_{r j} = sum_{i >= j} R_{r i} G_{i j} = 0 with G_{i j} = u^j_i.
      double s = 0.0;
      for (std::size_t i = j + 1; i <= r; ++i) s += rows[r][i] * region.basis()[j][i];
      rows[r][j] = -s;
    }
  }
  std::vector<HalfSpace> out;
  out.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    Point a = rows[r];
    for (double& v : a) {
      if (!std::isfinite(v)) throw InputError("region_halfspace_rep: singular generator matrix");
      v *= region.signs()[r];
    }
    const double c = dot(a, region.apex());
    out.emplace_back(std::move(a), c);
  }
  return out;
}

}  // namespace yaoyao
