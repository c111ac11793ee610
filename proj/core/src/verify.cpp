#include "yaoyao/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "yaoyao/error.hpp"
#include "yaoyao/random.hpp"

namespace yaoyao {

using nlohmann::json;

namespace {

// Stream tags keep the per-check random draws disjoint.
constexpr std::uint64_t kAvoidanceStream = 0x1000000000ULL;
constexpr std::uint64_t kDepthStream = 0x2000000000ULL;
constexpr std::uint64_t kRepresentationStream = 0x3000000000ULL;

double inf_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

Point random_unit(CounterRng& rng, std::size_t n) {
  while (true) {
    Point v(n);
    double norm = 0.0;
    for (double& x : v) {
      x = rng.next_normal();
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm > 1e-12) {
      for (double& x : v) x /= norm;
      return v;
    }
  }
}

Point random_anchor(CounterRng& rng, const PartitionTree& tree, const WeightedPointCloud* cloud) {
  if (cloud != nullptr && !cloud->empty()) {
    const auto row = static_cast<std::size_t>(rng.next_uniform() * static_cast<double>(cloud->size()));
    return cloud->point(std::min(row, cloud->size() - 1));
  }
  Point p = tree.center();
  for (double& x : p) x += rng.next_normal();
  return p;
}

void require_dimension(const PartitionTree& tree, const WeightedPointCloud& cloud, const char* what) {
  if (tree.dimension() != cloud.dimension()) {
    throw InputError(std::string(what) + ": tree and cloud differ in dimension");
  }
}

std::string key_of(const SignSequence& eps) { return eps.empty() ? std::string("()") : eps.to_string(); }

}  // namespace

json to_json(const CheckReport& report) {
  return json{{"name", report.name},
              {"pass", report.pass},
              {"statistics", report.statistics},
              {"tolerances", report.tolerances},
              {"seed", report.seed}};
}

// ------------------------------------------------------------ equipartition

CheckReport check_equipartition(const PartitionTree& tree, const WeightedPointCloud& cloud, double tol) {
  require_dimension(tree, cloud, "check_equipartition");
  const std::size_t n = tree.dimension();
  std::vector<double> masses(std::size_t{1} << n, 0.0);
  for (std::size_t r = 0; r < cloud.size(); ++r) {
    masses[region_of_point(tree, cloud.point(r)).index()] += cloud.weight(r);
  }
  const double total = cloud.total_mass();
  const double target = std::ldexp(total, -static_cast<int>(n));
  double worst = 0.0;
  json per_region = json::object();
  for (std::size_t i = 0; i < masses.size(); ++i) {
    worst = std::max(worst, std::abs(masses[i] - target) / target);
    per_region[SignSequence::from_index(i, n).to_string()] = masses[i];
  }
  CheckReport report;
  report.name = "equipartition";
  report.pass = worst <= tol;
  report.statistics = {{"region_masses", per_region},
                       {"target", target},
                       {"total", total},
                       {"max_relative_deviation", worst}};
  report.tolerances = {{"relative", tol}};
  return report;
}

CheckReport check_prefix_masses(const PartitionTree& tree, const WeightedPointCloud& cloud, double tol) {
  require_dimension(tree, cloud, "check_prefix_masses");
  const std::size_t n = tree.dimension();
  const double total = cloud.total_mass();
  double worst = 0.0;
  json per_prefix = json::object();
  for (std::size_t k = 1; k < n; ++k) {
    const double target = std::ldexp(total, -static_cast<int>(k));
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << k); ++i) {
      const auto eps = SignSequence::from_index(i, k);
      const ConeRegion region = prefix_region(tree, eps);
      double mass = 0.0;
      for (std::size_t r = 0; r < cloud.size(); ++r) {
        if (cone_contains(region, cloud.point(r))) mass += cloud.weight(r);
      }
      worst = std::max(worst, std::abs(mass - target) / target);
      per_prefix[key_of(eps)] = mass;
    }
  }
  CheckReport report;
  report.name = "prefix_masses";
  report.pass = worst <= tol;
  report.statistics = {{"prefix_masses", per_prefix}, {"total", total}, {"max_relative_deviation", worst}};
  report.tolerances = {{"relative", tol}};
  return report;
}

// ---------------------------------------------------------------- avoidance

bool avoidance_certificate(const PartitionTree& tree, const Point& normal, double offset) {
  HalfSpace h(normal, offset);
  if (h.dimension() != tree.dimension()) throw InputError("avoidance_certificate: dimension mismatch");
  if (!(h.evaluate(tree.center()) >= 0.0)) h = h.flipped();
  const SignSequence eps = witness_region(tree, h);
  return halfspace_contains_region(h, prefix_region(tree, eps));
}

CheckReport check_avoidance(const PartitionTree& tree, const WeightedPointCloud* cloud, std::size_t count,
                            std::uint64_t seed) {
  if (cloud != nullptr) require_dimension(tree, *cloud, "check_avoidance");
  std::size_t certified = 0;
  for (std::size_t t = 0; t < count; ++t) {
    CounterRng rng(seed, kAvoidanceStream + t);
    const Point normal = random_unit(rng, tree.dimension());
    const Point anchor = random_anchor(rng, tree, cloud);
    if (avoidance_certificate(tree, normal, dot(normal, anchor))) ++certified;
  }
  CheckReport report;
  report.name = "avoidance";
  report.seed = seed;
  report.pass = certified == count;
  report.statistics = {{"hyperplanes", count}, {"certified", certified}};
  report.tolerances = {{"required_success_rate", 1.0}};
  return report;
}

// -------------------------------------------------------------------- depth

CheckReport check_depth(const PartitionTree& tree, const WeightedPointCloud& cloud, std::size_t count,
                        std::uint64_t seed) {
  require_dimension(tree, cloud, "check_depth");
  const std::size_t n = tree.dimension();
  const double total = cloud.total_mass();
  const double required = std::ldexp(total, -static_cast<int>(n)) * (1.0 - 1e-6);
  std::size_t passed = 0;
  double min_mass = total;
  for (std::size_t t = 0; t < count; ++t) {
    CounterRng rng(seed, kDepthStream + t);
    const Point normal = random_unit(rng, n);
    const Point anchor = random_anchor(rng, tree, &cloud);
    HalfSpace h(normal, dot(normal, anchor));
    if (!(h.evaluate(tree.center()) >= 0.0)) h = h.flipped();
    const double mass = halfspace_mass(cloud, h);
    min_mass = std::min(min_mass, mass);
    if (mass >= required) ++passed;
  }
  CheckReport report;
  report.name = "depth";
  report.seed = seed;
  report.pass = passed == count;
  report.statistics = {{"halfspaces", count}, {"passed", passed}, {"min_mass", min_mass},
                       {"required_mass", required}, {"total", total}};
  report.tolerances = {{"relative_slack", 1e-6}};
  return report;
}

// ----------------------------------------------------------------- symmetry

CheckReport check_symmetry(const WeightedPointCloud& cloud, std::span<const double> z,
                           const SolverConfig& cfg, bool symmetrize_first, double tol) {
  if (z.size() != cloud.dimension()) throw InputError("check_symmetry: center dimension mismatch");
  const WeightedPointCloud input = symmetrize_first ? symmetrize(cloud, z) : cloud;
  const Point center = center_prefix(input, input.dimension(), cfg);
  const double distance = inf_distance(center, z);
  CheckReport report;
  report.name = "symmetry";
  report.pass = distance <= tol;
  report.statistics = {{"center", center},
                       {"symmetry_center", Point(z.begin(), z.end())},
                       {"distance", distance},
                       {"symmetrized", symmetrize_first}};
  report.tolerances = {{"max_norm", tol}};
  return report;
}

CheckReport check_symmetry(const WeightedPointCloud& cloud, std::span<const double> z,
                           const SolverConfig& cfg) {
  return check_symmetry(cloud, z, cfg, true, 50.0 * cfg.residual_tolerance);
}

// -------------------------------------------------------- prefix dependence

CheckReport check_prefix_dependence(const WeightedPointCloud& cloud, std::size_t k, const Shear& shear,
                                    const SolverConfig& cfg) {
  const std::size_t n = cloud.dimension();
  if (k < 1 || k > n) throw InputError("check_prefix_dependence: k must lie in [1, n]");
  std::vector<Point> sheared(cloud.size());
  std::vector<double> weights(cloud.weights().begin(), cloud.weights().end());
  std::vector<PointId> ids(cloud.ids().begin(), cloud.ids().end());
  for (std::size_t r = 0; r < cloud.size(); ++r) {
    Point p = cloud.point(r);
    const Point before = p;
    shear(p);
    for (std::size_t j = 0; j < k; ++j) {
      if (p[j] != before[j]) {
        throw InputError("check_prefix_dependence: shear modifies coordinate " + std::to_string(j + 1));
      }
    }
    sheared[r] = std::move(p);
  }
  const WeightedPointCloud moved(n, std::move(sheared), std::move(weights), std::move(ids));

  const Point original = center_prefix(cloud, n, cfg);
  const Point after = center_prefix(moved, n, cfg);
  const double tol = 10.0 * std::max(cfg.root_tolerance, cfg.residual_tolerance);
  const double distance = inf_distance(std::span(original).first(k), std::span(after).first(k));

  CheckReport report;
  report.name = "prefix_dependence";
  report.pass = distance <= tol;
  report.statistics = {{"k", k}, {"center_before", original}, {"center_after", after},
                       {"prefix_distance", distance}};
  report.tolerances = {{"max_norm", tol}};
  return report;
}

// --------------------------------------------------------------- continuity

CheckReport check_continuity(const WeightedPointCloud& cloud, const MeasureSpec& gamma,
                             std::vector<double> epsilons, const SolverConfig& cfg,
                             const ContinuityOptions& options) {
  const std::size_t n = cloud.dimension();
  for (double e : epsilons) {
    if (!(e >= 0.0) || !std::isfinite(e)) throw InputError("check_continuity: epsilons must be non-negative");
  }
  std::sort(epsilons.begin(), epsilons.end(), std::greater<>());

  const double total = cloud.total_mass();
  double scale = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double mean = 0.0;
    for (std::size_t r = 0; r < cloud.size(); ++r) mean += cloud.weight(r) * cloud.coordinate(r, j);
    mean /= total;
    double var = 0.0;
    for (std::size_t r = 0; r < cloud.size(); ++r) {
      const double d = cloud.coordinate(r, j) - mean;
      var += cloud.weight(r) * d * d;
    }
    scale = std::max(scale, std::sqrt(var / total));
  }

  const Point base = center_prefix(cloud, n, cfg);
  const double slack = 10.0 * cfg.residual_tolerance;
  std::vector<double> distances;
  json rows = json::array();
  bool pass = true;
  for (double eps : epsilons) {
    Point c = base;
    if (eps > 0.0) {
      c = center_prefix(regularize(cloud, gamma, 1.0 / eps, options.gamma_samples, options.seed), n, cfg);
    }
    const double d = inf_distance(c, base);
    const double bound = options.rate_constant * std::sqrt(eps) * scale + slack;
    const bool monotone = distances.empty() || d <= distances.back() + slack;
    pass = pass && monotone && d <= bound;
    distances.push_back(d);
    rows.push_back({{"epsilon", eps}, {"center", c}, {"distance", d}, {"bound", bound}, {"monotone", monotone}});
  }
  CheckReport report;
  report.name = "continuity";
  report.seed = options.seed;
  report.pass = pass;
  report.statistics = {{"base_center", base}, {"data_scale", scale}, {"steps", rows}};
  report.tolerances = {{"rate_constant", options.rate_constant}, {"monotone_slack", slack}};
  return report;
}

// ------------------------------------------------------------ 2-D oracle

namespace {

// Midpoint of [first v with W(v) >= T/2, first v with W(v) > T/2].
double oracle_median(std::vector<std::pair<double, double>> values_weights) {
  std::stable_sort(values_weights.begin(), values_weights.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  double total = 0.0;
  for (const auto& [v, w] : values_weights) total += w;
  const double half = 0.5 * total;
  double cum = 0.0;
  std::optional<double> lower;
  std::optional<double> upper;
  for (std::size_t i = 0; i < values_weights.size(); ++i) {
    cum += values_weights[i].second;
    const bool group_end = i + 1 == values_weights.size() || values_weights[i + 1].first != values_weights[i].first;
    if (!group_end) continue;
    if (!lower && cum >= half) lower = values_weights[i].first;
    if (!upper && cum > half) {
      upper = values_weights[i].first;
      break;
    }
  }
  if (!lower) lower = values_weights.back().first;
  if (!upper) upper = values_weights.back().first;
  return 0.5 * (*lower + *upper);
}

struct OracleHalf {
  std::vector<double> x1, x2, w;
};

}  // namespace

Point oracle_center_2d(const WeightedPointCloud& cloud) {
  if (cloud.dimension() != 2) throw InputError("oracle_center_2d: cloud must be two-dimensional");
  if (cloud.empty()) throw InputError("oracle_center_2d: empty cloud");

  std::vector<std::pair<double, double>> first;
  for (std::size_t r = 0; r < cloud.size(); ++r) first.emplace_back(cloud.coordinate(r, 0), cloud.weight(r));
  const double alpha = oracle_median(first);

  // Fill the low half in (x1, row) order with exactly half the mass.
  std::vector<std::size_t> order(cloud.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cloud.coordinate(a, 0) < cloud.coordinate(b, 0); });
  double remaining = 0.5 * cloud.total_mass();
  OracleHalf low, high;
  for (std::size_t r : order) {
    const double w = cloud.weight(r);
    const double take = std::clamp(remaining, 0.0, w);
    if (take > 1e-15 * w) {
      low.x1.push_back(cloud.coordinate(r, 0));
      low.x2.push_back(cloud.coordinate(r, 1));
      low.w.push_back(take);
    }
    if (w - take > 1e-15 * w) {
      high.x1.push_back(cloud.coordinate(r, 0));
      high.x2.push_back(cloud.coordinate(r, 1));
      high.w.push_back(w - take);
    }
    remaining -= take;
  }

  auto projected_median = [alpha](const OracleHalf& half, double slope) {
    std::vector<std::pair<double, double>> vw;
    for (std::size_t i = 0; i < half.w.size(); ++i) {
      vw.emplace_back(half.x2[i] - (half.x1[i] - alpha) * slope, half.w[i]);
    }
    return oracle_median(std::move(vw));
  };
  auto residual = [&](double slope) { return projected_median(low, slope) - projected_median(high, slope); };
  auto center_at = [&](double slope) {
    return Point{alpha, 0.5 * (projected_median(low, slope) + projected_median(high, slope))};
  };

  if (residual(0.0) == 0.0) return center_at(0.0);
  double bound = 1.0;
  while (!(residual(-bound) <= 0.0 && residual(bound) >= 0.0) &&
         !(residual(-bound) >= 0.0 && residual(bound) <= 0.0)) {
    bound *= 2.0;
    if (bound > 0x1p60) throw SolverError(SolverError::Kind::BracketNotFound, "oracle_center_2d: no sign change");
  }

  constexpr int kGrid = 1000;
  double a = -bound, b = bound;
  for (int round = 0; round < 8 && b - a > 1e-14 * std::max(1.0, std::abs(a)); ++round) {
    const double ga = residual(a);
    double prev = a;
    for (int i = 1; i <= kGrid; ++i) {
      const double t = i == kGrid ? b : a + (b - a) * i / kGrid;
      const double gt = residual(t);
      if (gt == 0.0) return center_at(t);
      if ((gt < 0.0) != (ga < 0.0)) {
        a = prev;
        b = t;
        break;
      }
      prev = t;
    }
  }
  return center_at(0.5 * (a + b));
}

CheckReport check_oracle_2d(const PartitionTree& tree, const WeightedPointCloud& cloud, double tol) {
  require_dimension(tree, cloud, "check_oracle_2d");
  const Point oracle = oracle_center_2d(cloud);
  const double distance = inf_distance(oracle, tree.center());
  CheckReport report;
  report.name = "oracle_2d";
  report.pass = distance <= tol;
  report.statistics = {{"oracle_center", oracle}, {"tree_center", tree.center()}, {"distance", distance}};
  report.tolerances = {{"max_norm", tol}};
  return report;
}

// ------------------------------------------------------------ monotone lift

namespace {

void require_lift(const WeightedPointCloud& cloud, const LiftSetup& setup) {
  const std::size_t n = cloud.dimension();
  if (n < 2) throw InputError("monotone lift: dimension must be at least 2");
  if (setup.normal.size() != n - 1 || setup.direction.size() != n - 1) {
    throw InputError("monotone lift: normal and direction live in the split hyperplane (n - 1 coordinates)");
  }
}

double lift_value(const WeightedPointCloud& cloud, const LiftSetup& setup, std::size_t r) {
  double v = 0.0;
  for (std::size_t j = 0; j + 1 < cloud.dimension(); ++j) v += setup.normal[j] * cloud.coordinate(r, j + 1);
  return v - setup.offset;
}

}  // namespace

double lifted_mass(const WeightedPointCloud& cloud, const LiftSetup& setup, double slope) {
  require_lift(cloud, setup);
  Point w(cloud.dimension());
  w[0] = 1.0;
  for (std::size_t j = 0; j + 1 < w.size(); ++j) w[j + 1] = slope * setup.direction[j];
  CloudBuilder side(cloud.dimension(), cloud.size());
  for (std::size_t r = 0; r < cloud.size(); ++r) {
    if (cloud.coordinate(r, 0) >= setup.alpha) side.add(cloud, r, cloud.weight(r));
  }
  const WeightedPointCloud upper = std::move(side).build();
  if (upper.empty()) return 0.0;
  const WeightedPointCloud projected = project_measure(upper, setup.alpha, w);
  double mass = 0.0;
  for (std::size_t r = 0; r < projected.size(); ++r) {
    if (dot(setup.normal, projected.point(r)) >= setup.offset) mass += projected.weight(r);
  }
  return mass;
}

double vanishing_slope(const WeightedPointCloud& cloud, const LiftSetup& setup) {
  require_lift(cloud, setup);
  const double s = dot(setup.normal, setup.direction);
  if (!(s > 0.0)) throw InputError("vanishing_slope: normal.direction must be positive");
  double threshold = 0.0;
  for (std::size_t r = 0; r < cloud.size(); ++r) {
    const double height = cloud.coordinate(r, 0) - setup.alpha;
    if (height > 0.0) threshold = std::max(threshold, lift_value(cloud, setup, r) / (height * s));
  }
  return threshold;
}

CheckReport check_monotone_lift(const WeightedPointCloud& cloud, const LiftSetup& setup) {
  require_lift(cloud, setup);
  if (!std::is_sorted(setup.slopes.begin(), setup.slopes.end())) {
    throw InputError("check_monotone_lift: slopes must be ascending");
  }
  const double s = dot(setup.normal, setup.direction);
  std::vector<double> masses;
  for (double t : setup.slopes) masses.push_back(lifted_mass(cloud, setup, t));

  bool ordered = true;
  for (std::size_t i = 1; i < masses.size(); ++i) {
    if (s == 0.0) ordered = ordered && masses[i] == masses[i - 1];
    else if (s > 0.0) ordered = ordered && masses[i] <= masses[i - 1];
    else ordered = ordered && masses[i] >= masses[i - 1];
  }

  bool vanished = true;
  double on_hyperplane = 0.0;
  bool vanishing_checked = false;
  if (s > 0.0 && !masses.empty()) {
    for (std::size_t r = 0; r < cloud.size(); ++r) {
      if (cloud.coordinate(r, 0) == setup.alpha && lift_value(cloud, setup, r) >= 0.0) {
        on_hyperplane += cloud.weight(r);
      }
    }
    if (setup.slopes.back() > vanishing_slope(cloud, setup)) {
      vanishing_checked = true;
      vanished = masses.back() == on_hyperplane;
    }
  }

  CheckReport report;
  report.name = "monotone_lift";
  report.pass = ordered && vanished;
  report.statistics = {{"slopes", setup.slopes},
                       {"masses", masses},
                       {"direction_slope", s},
                       {"ordered", ordered},
                       {"vanishing_checked", vanishing_checked},
                       {"mass_on_hyperplane", on_hyperplane}};
  report.tolerances = {{"exact", true}};
  return report;
}

// ----------------------------------------------------------- representation

CheckReport check_representation(const PartitionTree& tree, std::size_t samples, std::uint64_t seed,
                                 double spread) {
  const std::size_t n = tree.dimension();
  bool subdiagonal = true;
  std::size_t agree = 0, disagree = 0, skipped = 0, inside = 0;
  std::uint64_t stream = kRepresentationStream;
  for (const auto& [eps, region] : regions(tree)) {
    for (std::size_t i = 0; i < n; ++i) {
      const Point& u = region.basis()[i];
      for (std::size_t j = 0; j < i; ++j) subdiagonal = subdiagonal && u[j] == 0.0;
      subdiagonal = subdiagonal && u[i] == 1.0;
    }
    const auto facets = region_halfspace_rep(region);
    CounterRng rng(seed, stream++);
    for (std::size_t s = 0; s < samples; ++s) {
      Point p;
      if (s % 2 == 0) {
        std::vector<double> c(n);
        for (double& v : c) v = -spread * std::log(rng.next_uniform());
        p = cone_synthesize(region, c);
      } else {
        p = tree.center();
        for (double& v : p) v += spread * rng.next_normal();
      }
      const double fuzz = 1e-9 * (1.0 + max_abs(p) + max_abs(tree.center()));
      const auto coef = cone_coefficients(region, p);
      bool near_facet = false;
      bool v_member = true;
      bool h_member = true;
      for (std::size_t k = 0; k < n; ++k) {
        const double hv = facets[k].evaluate(p);
        near_facet = near_facet || std::abs(coef[k]) <= fuzz || std::abs(hv) <= fuzz;
        v_member = v_member && coef[k] >= 0.0;
        h_member = h_member && hv >= 0.0;
      }
      if (near_facet) {
        ++skipped;
      } else if (v_member == h_member) {
        ++agree;
        inside += v_member ? 1 : 0;
      } else {
        ++disagree;
      }
    }
  }
  CheckReport report;
  report.name = "representation";
  report.seed = seed;
  report.pass = subdiagonal && disagree == 0;
  report.statistics = {{"regions", std::size_t{1} << n}, {"samples_per_region", samples},
                       {"agree", agree}, {"disagree", disagree}, {"skipped_near_facet", skipped},
                       {"inside", inside}, {"exact_subdiagonal", subdiagonal}};
  report.tolerances = {{"facet_fuzz", 1e-9}};
  return report;
}

}  // namespace yaoyao
