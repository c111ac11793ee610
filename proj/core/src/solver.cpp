#include "yaoyao/solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <future>
#include <mutex>
#include <string>
#include <unordered_map>

#include "yaoyao/error.hpp"

namespace yaoyao {

using nlohmann::json;

// ------------------------------------------------------------ SolverConfig

void SolverConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError(std::string("solver config: ") + name + " must be positive");
  };
  positive(root_tolerance, "root_tolerance");
  positive(residual_tolerance, "residual_tolerance");
  positive(initial_half_width, "initial_half_width");
  if (!(growth > 1.0) || !std::isfinite(growth)) throw InputError("solver config: growth must exceed 1");
  if (max_expansions < 1) throw InputError("solver config: max_expansions must be at least 1");
  if (max_iterations < 1) throw InputError("solver config: max_iterations must be at least 1");
  if (max_dimension < 1 || max_dimension > kDimensionLimit) {
    throw InputError("solver config: max_dimension must lie in [1, 12]");
  }
  if (threads < 1) throw InputError("solver config: threads must be at least 1");
}

SolverConfig solver_config_from_json(const json& doc) {
  SolverConfig cfg;
  try {
    if (!doc.is_object()) throw InputError("solver config: document must be an object");
    for (const auto& [key, value] : doc.items()) {
      if (key == "root_tolerance") cfg.root_tolerance = value.get<double>();
      else if (key == "residual_tolerance") cfg.residual_tolerance = value.get<double>();
      else if (key == "initial_half_width") cfg.initial_half_width = value.get<double>();
      else if (key == "growth") cfg.growth = value.get<double>();
      else if (key == "max_expansions") cfg.max_expansions = value.get<int>();
      else if (key == "max_iterations") cfg.max_iterations = value.get<int>();
      else if (key == "max_dimension") cfg.max_dimension = value.get<std::size_t>();
      else if (key == "memoize") cfg.memoize = value.get<bool>();
      else if (key == "threads") cfg.threads = value.get<unsigned>();
      else if (key == "debug_checks") cfg.debug_checks = value.get<bool>();
      else throw InputError("solver config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("solver config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

json solver_config_to_json(const SolverConfig& cfg) {
  return json{{"root_tolerance", cfg.root_tolerance},
              {"residual_tolerance", cfg.residual_tolerance},
              {"initial_half_width", cfg.initial_half_width},
              {"growth", cfg.growth},
              {"max_expansions", cfg.max_expansions},
              {"max_iterations", cfg.max_iterations},
              {"max_dimension", cfg.max_dimension},
              {"memoize", cfg.memoize},
              {"debug_checks", cfg.debug_checks}};
}

json to_json(const AxisSolveTrace& trace) {
  json coords = json::array();
  for (const auto& c : trace.coordinates) {
    coords.push_back({{"coordinate", c.coordinate},
                      {"value", c.value},
                      {"bracket", {c.bracket_lo, c.bracket_hi}},
                      {"expansions", c.expansions},
                      {"iterations", c.iterations},
                      {"residual", c.residual}});
  }
  return json{{"coordinates", coords}, {"center_gap", trace.center_gap}};
}

// ------------------------------------------------------- bracket_and_bisect

BisectionResult bracket_and_bisect(const std::function<double(double)>& g, double t0,
                                   const SolverConfig& cfg) {
  auto negative = [](double v) { return v < 0.0; };
  auto checked = [&g](double t) {
    const double v = g(t);
    if (std::isnan(v)) {
      throw SolverError(SolverError::Kind::NonConvergence, "bracket_and_bisect: function returned NaN",
                        json{{"t", t}}.dump());
    }
    return v;
  };

  BisectionResult r;
  const double g0 = checked(t0);
  if (g0 == 0.0) {
    r.root = r.bracket_lo = r.bracket_hi = t0;
    return r;
  }

  double lo = 0.0, hi = 0.0, glo = 0.0;
  bool found = false;
  double best_t = t0, best_g = g0;
  double h = cfg.initial_half_width;
  for (int e = 1; e <= cfg.max_expansions && !found; ++e, h *= cfg.growth) {
    r.expansions = e;
    const double a = t0 - h;
    const double b = t0 + h;
    const double ga = checked(a);
    const double gb = checked(b);
    for (auto [t, v] : {std::pair{a, ga}, std::pair{b, gb}}) {
      if (std::abs(v) < std::abs(best_g)) {
        best_t = t;
        best_g = v;
      }
    }
    if (ga == 0.0 || gb == 0.0) {
      r.root = r.bracket_lo = r.bracket_hi = ga == 0.0 ? a : b;
      return r;
    }
    if (negative(ga) != negative(g0)) {
      lo = a, hi = t0, glo = ga;
      found = true;
    } else if (negative(gb) != negative(g0)) {
      lo = t0, hi = b, glo = g0;
      found = true;
    }
  }
  if (!found) {
    if (std::abs(best_g) <= cfg.residual_tolerance) {
      r.root = r.bracket_lo = r.bracket_hi = best_t;
      r.residual = std::abs(best_g);
      return r;
    }
    throw SolverError(SolverError::Kind::BracketNotFound,
                      "no sign change found after " + std::to_string(cfg.max_expansions) + " expansions",
                      json{{"t0", t0}, {"g_t0", g0}, {"last_half_width", h / cfg.growth},
                           {"best_t", best_t}, {"best_g", best_g}}.dump());
  }

  auto fail = [&](const std::string& why) {
    return SolverError(SolverError::Kind::NonConvergence, why,
                       json{{"bracket", {lo, hi}}, {"iterations", r.iterations}}.dump());
  };

  // Invariant: g(lo) and g(hi) have opposite signs.
  while (hi - lo > cfg.root_tolerance) {
    if (++r.iterations > cfg.max_iterations) throw fail("bisection exceeded max_iterations");
    const double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) break;
    const double gm = checked(mid);
    if (gm == 0.0) {
      r.root = mid;
      r.bracket_lo = lo;
      r.bracket_hi = hi;
      return r;
    }
    if (negative(gm) == negative(glo)) {
      lo = mid, glo = gm;
    } else {
      hi = mid;
    }
  }

  double root = lo + 0.5 * (hi - lo);
  double groot = checked(root);
  while (std::abs(groot) > cfg.residual_tolerance) {
    if (++r.iterations > cfg.max_iterations) throw fail("residual above tolerance at max_iterations");
    if (negative(groot) == negative(glo)) {
      lo = root, glo = groot;
    } else {
      hi = root;
    }
    const double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) {
      throw fail("residual " + std::to_string(std::abs(groot)) +
                 " above tolerance and the bracket cannot be split further");
    }
    root = mid;
    groot = checked(root);
  }
  r.root = root;
  r.residual = std::abs(groot);
  r.bracket_lo = lo;
  r.bracket_hi = hi;
  return r;
}

// ------------------------------------------------------------------ engine

namespace {

struct Solved {
  Point center;
  std::vector<Point> axes;  // heap order, local coordinates; empty unless built
  AxisSolveTrace trace;
  double max_gap = 0.0;
};

std::string cloud_key(const WeightedPointCloud& cloud) {
  std::string key;
  const std::size_t n = cloud.dimension();
  key.reserve(cloud.size() * (n + 2) * 8 + 8);
  auto put = [&key](const void* p, std::size_t len) { key.append(static_cast<const char*>(p), len); };
  put(&n, sizeof n);
  for (std::size_t j = 0; j < n; ++j) put(cloud.column(j).data(), cloud.size() * sizeof(double));
  put(cloud.weights().data(), cloud.size() * sizeof(double));
  put(cloud.ids().data(), cloud.size() * sizeof(PointId));
  return key;
}

class Engine {
 public:
  explicit Engine(const SolverConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    parallel_levels_ = std::bit_width(cfg_.threads) - 1;
  }

  Solved solve(const WeightedPointCloud& cloud, bool build, int par) {
    if (!build && cfg_.memoize) {
      const std::string key = cloud_key(cloud);
      {
        std::lock_guard lock(memo_mutex_);
        if (auto it = memo_.find(key); it != memo_.end()) return Solved{it->second, {}, {}, 0.0};
      }
      Solved s = solve_uncached(cloud, false, par);
      std::lock_guard lock(memo_mutex_);
      memo_.emplace(key, s.center);
      return s;
    }
    return solve_uncached(cloud, build, par);
  }

  int parallel_levels() const { return parallel_levels_; }

  /// Child centers for the two halves projected along `axis`, using the
  /// first `columns` projected coordinates.
  std::pair<Solved, Solved> children(const WeightedPointCloud& low, const WeightedPointCloud& high,
                                     double alpha, std::span<const double> axis, std::size_t columns,
                                     bool build, int par) {
    auto run = [&, this](const WeightedPointCloud& side) {
      return solve(project_measure(side, alpha, axis, columns), build, par - 1);
    };
    if (par > 0) {
      auto low_future = std::async(std::launch::async, run, std::cref(low));
      Solved h = run(high);
      return {low_future.get(), std::move(h)};
    }
    Solved l = run(low);
    Solved h = run(high);
    return {std::move(l), std::move(h)};
  }

  /// Fixes axis components 2..m in order so that each residual vanishes.
  AxisSolveTrace solve_axis(const WeightedPointCloud& low, const WeightedPointCloud& high, double alpha,
                            Point& axis, int par) {
    const std::size_t m = axis.size();
    AxisSolveTrace trace;
    for (std::size_t k = 1; k < m; ++k) {
      auto g = [&](double t) {
        axis[k] = t;
        auto [l, h] = children(low, high, alpha, axis, k, false, par);
        return l.center[k - 1] - h.center[k - 1];
      };
      BisectionResult b;
      try {
        b = bracket_and_bisect(g, 0.0, cfg_);
      } catch (const SolverError& e) {
        throw SolverError(e.kind(),
                          std::string(e.what()) + " (axis component " + std::to_string(k + 1) +
                              " of a " + std::to_string(m) + "-dimensional node)",
                          e.trace());
      }
      axis[k] = b.root;
      trace.coordinates.push_back(
          {k + 1, b.root, b.bracket_lo, b.bracket_hi, b.expansions, b.iterations, b.residual});

      if (cfg_.debug_checks) {
        auto [l, h] = children(low, high, alpha, axis, k, false, par);
        for (std::size_t j = 0; j < k; ++j) {
          if (std::abs(l.center[j] - h.center[j]) > cfg_.residual_tolerance + 1e-12) {
            throw std::logic_error("prefix stability violated at residual component " + std::to_string(j + 1));
          }
        }
      }
    }
    return trace;
  }

 private:
  Solved solve_uncached(const WeightedPointCloud& cloud, bool build, int par) {
    const std::size_t m = cloud.dimension();
    if (m == 1) {
      Solved s;
      s.center = {weighted_quantile(cloud.column(0), cloud.weights(), 0.5)};
      if (build) s.axes = {Point{1.0}};
      return s;
    }
    MedianSplit split = split_at_median(cloud, 0);
    Point axis(m, 0.0);
    axis[0] = 1.0;
    AxisSolveTrace trace = solve_axis(split.low, split.high, split.alpha, axis, par);

    auto [l, h] = children(split.low, split.high, split.alpha, axis, m - 1, build, par);
    Solved s;
    s.center.resize(m);
    s.center[0] = split.alpha;
    double gap = 0.0;
    for (std::size_t j = 1; j < m; ++j) {
      s.center[j] = 0.5 * (l.center[j - 1] + h.center[j - 1]);
      gap = std::max(gap, std::abs(l.center[j - 1] - h.center[j - 1]));
    }
    if (gap > cfg_.residual_tolerance) {
      throw SolverError(SolverError::Kind::NonConvergence,
                        "child centers disagree by " + std::to_string(gap), to_json(trace).dump());
    }
    trace.center_gap = gap;
    s.trace = std::move(trace);
    s.max_gap = std::max({gap, l.max_gap, h.max_gap});
    if (build) s.axes = assemble_axes(axis, l.axes, h.axes);
    return s;
  }

  static std::vector<Point> assemble_axes(const Point& root, const std::vector<Point>& neg,
                                          const std::vector<Point>& pos) {
    const std::size_t m = root.size();
    std::vector<Point> out;
    out.reserve(2 * neg.size() + 1);
    out.push_back(root);
    auto embed = [m](const Point& a) {
      Point e(m, 0.0);
      std::copy(a.begin(), a.end(), e.begin() + 1);
      return e;
    };
    for (std::size_t level = 0, start = 0; start < neg.size(); ++level) {
      const std::size_t width = std::size_t{1} << level;
      for (std::size_t i = 0; i < width; ++i) out.push_back(embed(neg[start + i]));
      for (std::size_t i = 0; i < width; ++i) out.push_back(embed(pos[start + i]));
      start += width;
    }
    return out;
  }

  SolverConfig cfg_;
  int parallel_levels_ = 0;
  std::mutex memo_mutex_;
  std::unordered_map<std::string, Point> memo_;
};

void require_node_inputs(const WeightedPointCloud& low, const WeightedPointCloud& high) {
  if (low.empty() || high.empty()) throw InputError("axis solve: empty half");
  if (low.dimension() != high.dimension()) throw InputError("axis solve: halves differ in dimension");
  if (low.dimension() < 2) throw InputError("axis solve: dimension must be at least 2");
}

}  // namespace

AxisResidual evaluate_axis_residual(const WeightedPointCloud& low, const WeightedPointCloud& high,
                                    double alpha, std::span<const double> axis,
                                    const SolverConfig& cfg) {
  require_node_inputs(low, high);
  Engine engine(cfg);
  auto [l, h] = engine.children(low, high, alpha, axis, low.dimension() - 1, false,
                                engine.parallel_levels());
  AxisResidual out;
  out.low_center = std::move(l.center);
  out.high_center = std::move(h.center);
  out.residual.resize(out.low_center.size());
  for (std::size_t j = 0; j < out.residual.size(); ++j) {
    out.residual[j] = out.low_center[j] - out.high_center[j];
  }
  return out;
}

AxisSolve triangular_axis_solve(const WeightedPointCloud& low, const WeightedPointCloud& high,
                                double alpha, const SolverConfig& cfg) {
  require_node_inputs(low, high);
  Engine engine(cfg);
  AxisSolve out;
  out.axis.assign(low.dimension(), 0.0);
  out.axis[0] = 1.0;
  out.trace = engine.solve_axis(low, high, alpha, out.axis, engine.parallel_levels());
  auto [l, h] = engine.children(low, high, alpha, out.axis, low.dimension() - 1, false,
                                engine.parallel_levels());
  for (std::size_t j = 0; j < l.center.size(); ++j) {
    out.trace.center_gap = std::max(out.trace.center_gap, std::abs(l.center[j] - h.center[j]));
  }
  return out;
}

Point center_prefix(const WeightedPointCloud& cloud, std::size_t depth, const SolverConfig& cfg) {
  if (cloud.empty()) throw InputError("center_prefix: empty cloud");
  if (depth == 0 || depth > cloud.dimension()) throw InputError("center_prefix: invalid depth");
  if (depth > cfg.max_dimension) throw InputError("center_prefix: depth exceeds max_dimension");
  Engine engine(cfg);
  return engine.solve(cloud.truncated(depth), false, engine.parallel_levels()).center;
}

PartitionTree compute_center_partition(const WeightedPointCloud& cloud, const CoordinateSystem& system,
                                       const SolverConfig& cfg) {
  if (cloud.empty()) throw InputError("compute_center_partition: empty cloud");
  if (cloud.dimension() != system.dimension()) {
    throw InputError("compute_center_partition: cloud and coordinate system differ in dimension");
  }
  if (cloud.dimension() > cfg.max_dimension) {
    throw InputError("compute_center_partition: dimension " + std::to_string(cloud.dimension()) +
                     " exceeds max_dimension " + std::to_string(cfg.max_dimension));
  }
  Engine engine(cfg);
  Solved s = engine.solve(cloud, true, engine.parallel_levels());
  json meta{{"solver", solver_config_to_json(cfg)},
            {"input_digest", cloud_digest(cloud)},
            {"points", cloud.size()},
            {"total_mass", cloud.total_mass()},
            {"root_trace", to_json(s.trace)},
            {"max_center_gap", s.max_gap}};
  return PartitionTree(system, std::move(s.center), std::move(s.axes), std::move(meta));
}

PartitionTree compute_center_partition(const WeightedPointCloud& cloud, const SolverConfig& cfg) {
  return compute_center_partition(cloud, CoordinateSystem::standard(cloud.dimension()), cfg);
}

}  // namespace yaoyao
