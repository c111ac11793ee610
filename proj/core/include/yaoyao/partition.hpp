#pragma once

// The recursive Yao-Yao partition adapted to a coordinate system: a single
// center plus one normalized axis per internal node. The split value at
// depth k is the center's k-th coordinate, so it is never stored.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "yaoyao/geometry.hpp"

namespace yaoyao {

inline constexpr const char* kPartitionSchema = "yaoyao-partition/v1";

/// Complete binary tree of depth n stored in heap order: the node reached by
/// prefix (eps_1..eps_{k-1}) sits at index 2^{k-1} - 1 + bits, where bits
/// reads the prefix as binary with -1 -> 0 and +1 -> 1. Its axis, in
/// coordinates, is zero before position k-1 and exactly one at k-1.
class PartitionTree {
 public:
  PartitionTree(CoordinateSystem system, Point center, std::vector<Point> axes,
                nlohmann::json meta = nlohmann::json::object());

  std::size_t dimension() const noexcept { return center_.size(); }
  const CoordinateSystem& system() const noexcept { return system_; }
  /// Center in coordinates of `system()`.
  const Point& center() const noexcept { return center_; }
  Point ambient_center() const { return system_.to_ambient(center_); }
  const std::vector<Point>& axes() const noexcept { return axes_; }
  const nlohmann::json& meta() const noexcept { return meta_; }

  /// Axis of the node reached by `prefix` (length < n).
  const Point& axis(const SignSequence& prefix) const;
  static std::size_t node_index(const SignSequence& prefix);

  friend bool operator==(const PartitionTree& a, const PartitionTree& b) {
    return a.system_ == b.system_ && a.center_ == b.center_ && a.axes_ == b.axes_ && a.meta_ == b.meta_;
  }

 private:
  CoordinateSystem system_;
  Point center_;
  std::vector<Point> axes_;
  nlohmann::json meta_;
};

/// The region for a prefix of any length k <= n; rank k, lineality n - k.
ConeRegion prefix_region(const PartitionTree& tree, const SignSequence& prefix);

/// All 2^n full regions keyed by their sign sequence.
std::map<SignSequence, ConeRegion> regions(const PartitionTree& tree);

/// Walks the tree choosing +1 at a node iff the half-space's linear part is
/// non-negative on that node's axis. Requires the center inside h (in
/// coordinates); the returned region is then certified to lie in h.
SignSequence witness_region(const PartitionTree& tree, const HalfSpace& h);

/// Lexicographically smallest sign sequence (-1 before +1) whose region
/// contains p within `tol`; by default the scale-aware facet tolerance.
SignSequence region_of_point(const PartitionTree& tree, std::span<const double> p,
                             std::optional<double> tol = std::nullopt);

/// {"matrix": [[row]...], "offset": [...]}; offset defaults to zero on read.
nlohmann::json system_to_json(const CoordinateSystem& system);
CoordinateSystem system_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const PartitionTree& tree);
PartitionTree partition_from_json(const nlohmann::json& doc);

/// Pretty-printed document with a trailing newline; byte-stable.
std::string serialize(const PartitionTree& tree);
PartitionTree deserialize(const std::string& document);

}  // namespace yaoyao
