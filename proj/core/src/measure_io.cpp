#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <string_view>

#include "yaoyao/error.hpp"
#include "yaoyao/measures.hpp"

namespace yaoyao {

using nlohmann::json;

// ------------------------------------------------------------ spec JSON

namespace {

Point read_vector(const json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string("measure spec: '") + what + "' must be an array");
  Point out;
  for (const auto& v : j) {
    if (!v.is_number()) throw InputError(std::string("measure spec: '") + what + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<double> read_matrix(const json& j, std::size_t n, const char* what) {
  if (!j.is_array() || j.size() != n) {
    throw InputError(std::string("measure spec: '") + what + "' must be an n x n array");
  }
  std::vector<double> out;
  for (const auto& row : j) {
    const Point r = read_vector(row, what);
    if (r.size() != n) throw InputError(std::string("measure spec: '") + what + "' must be n x n");
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

std::vector<double> identity(std::size_t n) {
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 1.0;
  return m;
}

GaussianComponent read_gaussian(const json& j, std::size_t n) {
  GaussianComponent c;
  c.weight = j.value("weight", 1.0);
  c.mean = j.contains("mean") ? read_vector(j.at("mean"), "mean") : Point(n, 0.0);
  c.cov_factor = j.contains("cov_factor") ? read_matrix(j.at("cov_factor"), n, "cov_factor") : identity(n);
  return c;
}

// Dimension implied by the first coordinate list found in the document.
std::size_t implied_dim(const json& doc) {
  for (const char* key : {"lo", "mean"}) {
    if (doc.contains(key) && doc.at(key).is_array()) return doc.at(key).size();
  }
  for (const char* key : {"vertices", "points"}) {
    if (doc.contains(key) && doc.at(key).is_array() && !doc.at(key).empty() && doc.at(key)[0].is_array()) {
      return doc.at(key)[0].size();
    }
  }
  if (doc.contains("components") && doc.at("components").is_array() && !doc.at("components").empty()) {
    const json& c = doc.at("components")[0];
    if (!c.is_object()) return 0;
    if (c.contains("dim") && c.at("dim").is_number_unsigned()) return c.at("dim").get<std::size_t>();
    return implied_dim(c.contains("spec") ? c.at("spec") : c);
  }
  return 0;
}

MeasureSpec parse_spec(const json& doc, std::size_t inherited_dim) {
  if (!doc.is_object()) throw InputError("measure spec: document must be an object");
  MeasureSpec spec;
  spec.dimension = doc.contains("dim") ? doc.at("dim").get<std::size_t>() : inherited_dim;
  if (spec.dimension == 0) spec.dimension = implied_dim(doc);
  if (spec.dimension == 0) throw InputError("measure spec: missing 'dim'");
  const std::size_t n = spec.dimension;
  const std::string type = doc.at("type").get<std::string>();

  if (type == "gaussian") {
    spec.kind = GaussianMixture{{read_gaussian(doc, n)}};
  } else if (type == "gaussian-mixture") {
    GaussianMixture g;
    for (const auto& c : doc.at("components")) g.components.push_back(read_gaussian(c, n));
    spec.kind = std::move(g);
  } else if (type == "uniform-box") {
    spec.kind = UniformBox{read_vector(doc.at("lo"), "lo"), read_vector(doc.at("hi"), "hi")};
  } else if (type == "uniform-simplex") {
    UniformSimplex s;
    for (const auto& v : doc.at("vertices")) s.vertices.push_back(read_vector(v, "vertices"));
    spec.kind = std::move(s);
  } else if (type == "finite-atoms") {
    FiniteAtoms a;
    for (const auto& p : doc.at("points")) a.points.push_back(read_vector(p, "points"));
    a.weights = doc.contains("weights") ? read_vector(doc.at("weights"), "weights")
                                        : std::vector<double>(a.points.size(), 1.0);
    spec.kind = std::move(a);
  } else if (type == "mixture") {
    Mixture m;
    for (const auto& c : doc.at("components")) {
      m.weights.push_back(c.value("weight", 1.0));
      m.parts.push_back(parse_spec(c.at("spec"), n));
    }
    spec.kind = std::move(m);
  } else {
    throw InputError("measure spec: unknown type '" + type + "'");
  }
  if (doc.contains("symmetry_center")) {
    spec.symmetry_center = read_vector(doc.at("symmetry_center"), "symmetry_center");
  }
  return spec;
}

json matrix_json(const std::vector<double>& m, std::size_t n) {
  json out = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(std::vector<double>(m.begin() + static_cast<long>(i * n),
                                      m.begin() + static_cast<long>((i + 1) * n)));
  }
  return out;
}

}  // namespace

MeasureSpec measure_spec_from_json(const json& doc) {
  MeasureSpec spec;
  try {
    spec = parse_spec(doc, 0);
  } catch (const json::exception& e) {
    throw InputError(std::string("measure spec: ") + e.what());
  }
  validate(spec);
  return spec;
}

json measure_spec_to_json(const MeasureSpec& spec) {
  json doc;
  doc["dim"] = spec.dimension;
  const std::size_t n = spec.dimension;
  std::visit(
      [&](const auto& kind) {
        using T = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<T, GaussianMixture>) {
          doc["type"] = "gaussian-mixture";
          json comps = json::array();
          for (const auto& c : kind.components) {
            comps.push_back({{"weight", c.weight}, {"mean", c.mean}, {"cov_factor", matrix_json(c.cov_factor, n)}});
          }
          doc["components"] = comps;
        } else if constexpr (std::is_same_v<T, UniformBox>) {
          doc["type"] = "uniform-box";
          doc["lo"] = kind.lo;
          doc["hi"] = kind.hi;
        } else if constexpr (std::is_same_v<T, UniformSimplex>) {
          doc["type"] = "uniform-simplex";
          doc["vertices"] = kind.vertices;
        } else if constexpr (std::is_same_v<T, FiniteAtoms>) {
          doc["type"] = "finite-atoms";
          doc["points"] = kind.points;
          doc["weights"] = kind.weights;
        } else {
          doc["type"] = "mixture";
          json comps = json::array();
          for (std::size_t i = 0; i < kind.parts.size(); ++i) {
            comps.push_back({{"weight", kind.weights[i]}, {"spec", measure_spec_to_json(kind.parts[i])}});
          }
          doc["components"] = comps;
        }
      },
      spec.kind);
  if (spec.symmetry_center) doc["symmetry_center"] = *spec.symmetry_center;
  return doc;
}

// --------------------------------------------------------------------- CSV

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || field.empty() || !std::isfinite(v)) {
    throw InputError("csv line " + std::to_string(line_no) + ": cannot parse '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace

WeightedPointCloud read_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw InputError("csv: missing header");

  const auto header = split_fields(line);
  std::size_t n = 0;
  bool weighted = false;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "x" + std::to_string(i + 1)) {
      if (weighted) throw InputError("csv: weight column must come last");
      ++n;
    } else if (header[i] == "w" && i + 1 == header.size()) {
      weighted = true;
    } else {
      throw InputError("csv: unexpected header field '" + std::string(header[i]) + "'");
    }
  }
  if (n == 0) throw InputError("csv: header declares no coordinates");

  std::vector<Point> points;
  std::vector<double> weights;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw InputError("csv line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields");
    }
    Point p(n);
    for (std::size_t j = 0; j < n; ++j) p[j] = parse_number(fields[j], line_no);
    const double w = weighted ? parse_number(fields[n], line_no) : 1.0;
    if (!(w > 0.0)) throw InputError("csv line " + std::to_string(line_no) + ": weight must be positive");
    points.push_back(std::move(p));
    weights.push_back(w);
  }
  if (points.empty()) throw InputError("csv: no points");
  return WeightedPointCloud::from_points(points, std::move(weights));
}

void write_csv(std::ostream& out, const WeightedPointCloud& cloud) {
  bool weighted = false;
  for (double w : cloud.weights()) weighted = weighted || w != 1.0;
  for (std::size_t j = 0; j < cloud.dimension(); ++j) out << (j ? "," : "") << 'x' << j + 1;
  if (weighted) out << ",w";
  out << '\n';
  for (std::size_t r = 0; r < cloud.size(); ++r) {
    for (std::size_t j = 0; j < cloud.dimension(); ++j) {
      out << (j ? "," : "") << format_double(cloud.coordinate(r, j));
    }
    if (weighted) out << ',' << format_double(cloud.weight(r));
    out << '\n';
  }
}

std::string format_double(double v) {
  if (v == 0.0) return "0";  // no "-0" in text output
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string cloud_digest(const WeightedPointCloud& cloud) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::uint64_t dims[2] = {cloud.dimension(), cloud.size()};
  feed(dims, sizeof dims);
  for (std::size_t r = 0; r < cloud.size(); ++r) {
    const PointId id = cloud.id(r);
    feed(&id, sizeof id);
    for (std::size_t j = 0; j < cloud.dimension(); ++j) {
      const double v = cloud.coordinate(r, j);
      feed(&v, sizeof v);
    }
    const double w = cloud.weight(r);
    feed(&w, sizeof w);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace yaoyao
