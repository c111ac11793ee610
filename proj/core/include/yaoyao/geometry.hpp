#pragma once

// Affine coordinate systems, half-spaces and the simplicial cones that make
// up a Yao-Yao partition. Everything except CoordinateSystem lives in the
// coordinates of an adapted system; ambient conversion happens at I/O.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace yaoyao {

using Point = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double max_abs(std::span<const double> v);

/// {y : normal·y >= offset}. The normal must be non-zero; the offset may be
/// -inf to denote the whole space.
class HalfSpace {
 public:
  HalfSpace(Point normal, double offset);

  const Point& normal() const noexcept { return normal_; }
  double offset() const noexcept { return offset_; }
  std::size_t dimension() const noexcept { return normal_.size(); }

  /// Affine form value normal·y - offset; non-negative inside.
  double evaluate(std::span<const double> y) const;
  /// Linear part applied to a vector.
  double evaluate_linear(std::span<const double> v) const;
  bool contains(std::span<const double> y) const { return evaluate(y) >= 0.0; }

  /// The opposite closed half-space sharing the same boundary.
  HalfSpace flipped() const { return HalfSpace(negated(normal_), -offset_); }

 private:
  static Point negated(const Point& v);

  Point normal_;
  double offset_;
};

/// n affine forms l_i(y) = matrix_row_i · y + offset_i whose linear parts form
/// an invertible matrix. Coordinates of y are (l_1(y), ..., l_n(y)).
class CoordinateSystem {
 public:
  static constexpr double kDefaultMaxCondition = 1e12;

  static CoordinateSystem standard(std::size_t n);

  /// `matrix` is row-major n x n.
  CoordinateSystem(std::vector<double> matrix, Point offset,
                   double max_condition = kDefaultMaxCondition);

  std::size_t dimension() const noexcept { return n_; }
  const std::vector<double>& matrix() const noexcept { return matrix_; }
  const Point& offset() const noexcept { return offset_; }
  double condition_number() const noexcept { return condition_; }
  bool is_standard() const;

  Point to_coordinates(std::span<const double> ambient) const;
  Point to_ambient(std::span<const double> coordinates) const;
  /// Maps a vector given in coordinates (v_i = l_i-linear(v)) back to the
  /// ambient space; the image of the unit vector e_i is the dual basis e^i.
  Point vector_to_ambient(std::span<const double> coordinates) const;

  HalfSpace halfspace_to_coordinates(const HalfSpace& ambient) const;
  HalfSpace halfspace_to_ambient(const HalfSpace& coordinates) const;

  friend bool operator==(const CoordinateSystem& a, const CoordinateSystem& b) {
    return a.matrix_ == b.matrix_ && a.offset_ == b.offset_;
  }

 private:
  std::size_t n_;
  std::vector<double> matrix_;
  Point offset_;
  std::vector<double> inverse_;  // row-major
  double condition_;
};

/// A sequence of +1/-1 labels indexing regions and region prefixes.
/// Ordered lexicographically with -1 < +1.
class SignSequence {
 public:
  SignSequence() = default;
  explicit SignSequence(std::vector<int> signs);
  SignSequence(std::initializer_list<int> signs) : SignSequence(std::vector<int>(signs)) {}

  /// Index i in [0, 2^length): bit (length-1-k) set means sign k is +1.
  static SignSequence from_index(std::uint64_t index, std::size_t length);

  std::size_t size() const noexcept { return signs_.size(); }
  bool empty() const noexcept { return signs_.empty(); }
  int operator[](std::size_t i) const { return signs_[i]; }
  const std::vector<int>& values() const noexcept { return signs_; }

  SignSequence prefix(std::size_t k) const;
  SignSequence appended(int sign) const;
  SignSequence concatenated(const SignSequence& tail) const;
  std::uint64_t index() const;
  std::string to_string() const;

  friend auto operator<=>(const SignSequence&, const SignSequence&) = default;

 private:
  std::vector<int> signs_;
};

/// Generators u^1..u^k in coordinates with u^i_j = 0 for j < i and
/// u^i_i = 1 exactly. Construction rejects anything else.
class SubDiagonalBasis {
 public:
  SubDiagonalBasis(std::size_t dimension, std::vector<Point> generators);

  std::size_t dimension() const noexcept { return n_; }
  std::size_t size() const noexcept { return generators_.size(); }
  const Point& operator[](std::size_t i) const { return generators_[i]; }
  const std::vector<Point>& generators() const noexcept { return generators_; }

 private:
  std::size_t n_;
  std::vector<Point> generators_;
};

/// apex + pos(eps_1 u^1, ..., eps_k u^k) + lin(e^{k+1}, ..., e^n).
class ConeRegion {
 public:
  ConeRegion(Point apex, SubDiagonalBasis basis, SignSequence signs);

  std::size_t dimension() const noexcept { return apex_.size(); }
  std::size_t rank() const noexcept { return basis_.size(); }
  std::size_t lineality_rank() const noexcept { return dimension() - rank(); }
  bool is_full() const noexcept { return rank() == dimension(); }

  const Point& apex() const noexcept { return apex_; }
  const SubDiagonalBasis& basis() const noexcept { return basis_; }
  const SignSequence& signs() const noexcept { return signs_; }
  /// eps_i u^i.
  Point signed_generator(std::size_t i) const;

 private:
  Point apex_;
  SubDiagonalBasis basis_;
  SignSequence signs_;
};

/// Scale-aware facet fuzz 1e-9 * (1 + |apex| + |p|) in the max norm.
double default_tolerance(const ConeRegion& region, std::span<const double> p);

/// Coefficients c with p - apex = sum c_i eps_i u^i + (lineality part), by
/// forward substitution on the unit lower-triangular generator matrix.
std::vector<double> cone_coefficients(const ConeRegion& region, std::span<const double> p);

/// apex + sum c_i eps_i u^i.
Point cone_synthesize(const ConeRegion& region, std::span<const double> coefficients);

bool cone_contains(const ConeRegion& region, std::span<const double> p, double tol);
bool cone_contains(const ConeRegion& region, std::span<const double> p);

/// Exact certificate that a full region lies in the closed half-space: the
/// apex is inside and every signed generator points inward.
bool halfspace_contains_region(const HalfSpace& h, const ConeRegion& region);

/// n half-spaces whose intersection is the full region. Half-space k is
/// row k of the inverse generator matrix, so its linear part only involves
/// coordinates 1..k and its k-th coefficient is eps_k.
std::vector<HalfSpace> region_halfspace_rep(const ConeRegion& region);

}  // namespace yaoyao
