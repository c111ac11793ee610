#include "yaoyao/partition.hpp"

#include <cmath>
#include <string>

#include "yaoyao/error.hpp"

namespace yaoyao {

using nlohmann::json;

PartitionTree::PartitionTree(CoordinateSystem system, Point center, std::vector<Point> axes,
                             json meta)
    : system_(std::move(system)), center_(std::move(center)), axes_(std::move(axes)), meta_(std::move(meta)) {
  const std::size_t n = center_.size();
  if (n == 0) throw InputError("partition: empty center");
  if (n > 30) throw InputError("partition: dimension too large");
  if (system_.dimension() != n) throw InputError("partition: system and center differ in dimension");
  for (double v : center_) {
    if (!std::isfinite(v)) throw InputError("partition: non-finite center");
  }
  const std::size_t expected = (std::size_t{1} << n) - 1;
  if (axes_.size() != expected) {
    throw InputError("partition: expected " + std::to_string(expected) + " axes, got " +
                     std::to_string(axes_.size()));
  }
  for (std::size_t depth = 0, index = 0; depth < n; ++depth) {
    for (std::size_t i = 0; i < (std::size_t{1} << depth); ++i, ++index) {
      const Point& a = axes_[index];
      if (a.size() != n) throw InputError("partition: axis dimension mismatch");
      for (std::size_t j = 0; j < depth; ++j) {
        if (a[j] != 0.0) {
          throw InputError("partition: axis at depth " + std::to_string(depth + 1) +
                           " has non-zero component " + std::to_string(j + 1));
        }
      }
      if (a[depth] != 1.0) {
        throw InputError("partition: axis at depth " + std::to_string(depth + 1) + " is not normalized");
      }
      for (double v : a) {
        if (!std::isfinite(v)) throw InputError("partition: non-finite axis component");
      }
    }
  }
}

std::size_t PartitionTree::node_index(const SignSequence& prefix) {
  return (std::size_t{1} << prefix.size()) - 1 + static_cast<std::size_t>(prefix.index());
}

const Point& PartitionTree::axis(const SignSequence& prefix) const {
  if (prefix.size() >= dimension()) throw InputError("partition: prefix too long for an axis");
  return axes_[node_index(prefix)];
}

ConeRegion prefix_region(const PartitionTree& tree, const SignSequence& prefix) {
  if (prefix.size() > tree.dimension()) throw InputError("prefix_region: prefix longer than dimension");
  std::vector<Point> generators;
  generators.reserve(prefix.size());
  for (std::size_t k = 0; k < prefix.size(); ++k) generators.push_back(tree.axis(prefix.prefix(k)));
  return ConeRegion(tree.center(), SubDiagonalBasis(tree.dimension(), std::move(generators)), prefix);
}

std::map<SignSequence, ConeRegion> regions(const PartitionTree& tree) {
  const std::size_t n = tree.dimension();
  std::map<SignSequence, ConeRegion> out;
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << n); ++i) {
    const auto eps = SignSequence::from_index(i, n);
    out.emplace(eps, prefix_region(tree, eps));
  }
  return out;
}

SignSequence witness_region(const PartitionTree& tree, const HalfSpace& h) {
  if (h.dimension() != tree.dimension()) throw InputError("witness_region: dimension mismatch");
  if (!(h.evaluate(tree.center()) >= 0.0)) {
    throw InputError("witness_region: the center is not in the half-space");
  }
  SignSequence eps;
  for (std::size_t k = 0; k < tree.dimension(); ++k) {
    eps = eps.appended(h.evaluate_linear(tree.axis(eps)) >= 0.0 ? 1 : -1);
  }
  return eps;
}

SignSequence region_of_point(const PartitionTree& tree, std::span<const double> p,
                             std::optional<double> tol) {
  const std::size_t n = tree.dimension();
  if (p.size() != n) throw InputError("region_of_point: dimension mismatch");
  const Point& x = tree.center();
  const double t = tol ? *tol : 1e-9 * (1.0 + max_abs(x) + max_abs(p));
  if (!(t >= 0.0)) throw InputError("region_of_point: invalid tolerance");

  SignSequence eps;
  std::vector<double> coef;
  std::vector<const Point*> gens;
  for (std::size_t k = 0; k < n; ++k) {
    double d = p[k] - x[k];
    for (std::size_t i = 0; i < k; ++i) d -= coef[i] * (*gens[i])[k];
    if (!std::isfinite(d)) throw InputError("region_of_point: no region contains the point");
    gens.push_back(&tree.axis(eps));
    coef.push_back(d);
    eps = eps.appended(d <= t ? -1 : 1);
  }
  return eps;
}

// ---------------------------------------------------------- serialization

namespace {

json node_json(const PartitionTree& tree, const SignSequence& prefix) {
  if (prefix.size() == tree.dimension()) return nullptr;
  return json{{"axis", tree.axis(prefix)},
              {"neg", node_json(tree, prefix.appended(-1))},
              {"pos", node_json(tree, prefix.appended(1))}};
}

Point read_numbers(const json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string("partition: '") + what + "' must be an array");
  Point out;
  for (const auto& v : j) {
    if (!v.is_number()) throw InputError(std::string("partition: '") + what + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

void read_node(const json& j, std::size_t depth, std::size_t n, const SignSequence& prefix,
               std::vector<Point>& axes) {
  if (depth == n) {
    if (!j.is_null()) throw InputError("partition: node below the leaf depth");
    return;
  }
  if (!j.is_object()) throw InputError("partition: missing node at depth " + std::to_string(depth + 1));
  axes[PartitionTree::node_index(prefix)] = read_numbers(j.at("axis"), "axis");
  if (!j.contains("neg") || !j.contains("pos")) {
    throw InputError("partition: node at depth " + std::to_string(depth + 1) + " lacks a child");
  }
  read_node(j.at("neg"), depth + 1, n, prefix.appended(-1), axes);
  read_node(j.at("pos"), depth + 1, n, prefix.appended(1), axes);
}

}  // namespace

json system_to_json(const CoordinateSystem& system) {
  const std::size_t n = system.dimension();
  const auto& m = system.matrix();
  json matrix = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    matrix.push_back(std::vector<double>(m.begin() + static_cast<long>(i * n),
                                         m.begin() + static_cast<long>((i + 1) * n)));
  }
  return json{{"matrix", matrix}, {"offset", system.offset()}};
}

CoordinateSystem system_from_json(const json& sys) {
  try {
    if (!sys.is_object() || !sys.contains("matrix") || !sys.at("matrix").is_array()) {
      throw InputError("system: expected an object with 'matrix' rows and 'offset'");
    }
    const std::size_t n = sys.at("matrix").size();
    if (n == 0) throw InputError("system: empty matrix");
    std::vector<double> matrix;
    for (const auto& row : sys.at("matrix")) {
      const Point r = read_numbers(row, "matrix");
      if (r.size() != n) throw InputError("system: matrix must be square");
      matrix.insert(matrix.end(), r.begin(), r.end());
    }
    Point offset = sys.contains("offset") ? read_numbers(sys.at("offset"), "offset") : Point(n, 0.0);
    return CoordinateSystem(std::move(matrix), std::move(offset));
  } catch (const json::exception& e) {
    throw InputError(std::string("system: ") + e.what());
  }
}

json to_json(const PartitionTree& tree) {
  return json{{"schema", kPartitionSchema},
              {"dim", tree.dimension()},
              {"system", system_to_json(tree.system())},
              {"center", tree.center()},
              {"root", node_json(tree, SignSequence{})},
              {"meta", tree.meta()}};
}

PartitionTree partition_from_json(const json& doc) {
  try {
    if (!doc.is_object()) throw InputError("partition: document must be an object");
    const std::string schema = doc.at("schema").get<std::string>();
    if (schema != kPartitionSchema) {
      throw InputError("partition: unsupported schema '" + schema + "' (expected " + kPartitionSchema + ")");
    }
    const std::size_t n = doc.at("dim").get<std::size_t>();
    if (n == 0 || n > 30) throw InputError("partition: invalid dimension");
    CoordinateSystem system = system_from_json(doc.at("system"));
    if (system.dimension() != n) throw InputError("partition: system matrix must be n x n");
    Point center = read_numbers(doc.at("center"), "center");
    if (center.size() != n) throw InputError("partition: center dimension mismatch");
    std::vector<Point> axes((std::size_t{1} << n) - 1);
    read_node(doc.at("root"), 0, n, SignSequence{}, axes);
    json meta = doc.contains("meta") ? doc.at("meta") : json::object();
    return PartitionTree(std::move(system), std::move(center), std::move(axes), std::move(meta));
  } catch (const json::exception& e) {
    throw InputError(std::string("partition: ") + e.what());
  }
}

std::string serialize(const PartitionTree& tree) { return to_json(tree).dump(2) + "\n"; }

PartitionTree deserialize(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::exception& e) {
    throw InputError(std::string("partition: ") + e.what());
  }
  return partition_from_json(doc);
}

}  // namespace yaoyao
