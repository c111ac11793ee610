#include "plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <vector>

#include "yaoyao/error.hpp"

namespace yaoyao::cli {

namespace {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Box {
  double xmin, xmax, ymin, ymax;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

// Sutherland-Hodgman against the four box edges.
std::vector<Vec2> clip(std::vector<Vec2> poly, const Box& box) {
  auto pass = [&poly](auto inside, auto cross) {
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2 cur = poly[i];
      const Vec2 prev = poly[(i + poly.size() - 1) % poly.size()];
      const bool ci = inside(cur), pi = inside(prev);
      if (ci) {
        if (!pi) out.push_back(cross(prev, cur));
        out.push_back(cur);
      } else if (pi) {
        out.push_back(cross(prev, cur));
      }
    }
    poly = std::move(out);
  };
  auto at_x = [](double x) {
    return [x](Vec2 a, Vec2 b) { return Vec2{x, a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x)}; };
  };
  auto at_y = [](double y) {
    return [y](Vec2 a, Vec2 b) { return Vec2{a.x + (b.x - a.x) * (y - a.y) / (b.y - a.y), y}; };
  };
  pass([&](Vec2 p) { return p.x >= box.xmin; }, at_x(box.xmin));
  pass([&](Vec2 p) { return p.x <= box.xmax; }, at_x(box.xmax));
  pass([&](Vec2 p) { return p.y >= box.ymin; }, at_y(box.ymin));
  pass([&](Vec2 p) { return p.y <= box.ymax; }, at_y(box.ymax));
  return poly;
}

// Exit point of the ray c + t d (t >= 0) from the box containing c.
Vec2 ray_exit(Vec2 c, Vec2 d, const Box& box) {
  double t = std::numeric_limits<double>::infinity();
  if (d.x > 0) t = std::min(t, (box.xmax - c.x) / d.x);
  if (d.x < 0) t = std::min(t, (box.xmin - c.x) / d.x);
  if (d.y > 0) t = std::min(t, (box.ymax - c.y) / d.y);
  if (d.y < 0) t = std::min(t, (box.ymin - c.y) / d.y);
  if (!std::isfinite(t)) t = 0.0;
  return {c.x + t * d.x, c.y + t * d.y};
}

}  // namespace

std::string render_svg(const PartitionTree& tree, const WeightedPointCloud& points) {
  if (tree.dimension() != 2) throw InputError("plot: only two-dimensional partitions can be drawn");
  if (points.dimension() != 2) throw InputError("plot: points must be two-dimensional");

  const Point center_p = tree.ambient_center();
  const Vec2 center{center_p[0], center_p[1]};
  Box box{center.x, center.x, center.y, center.y};
  for (std::size_t r = 0; r < points.size(); ++r) {
    box.xmin = std::min(box.xmin, points.coordinate(r, 0));
    box.xmax = std::max(box.xmax, points.coordinate(r, 0));
    box.ymin = std::min(box.ymin, points.coordinate(r, 1));
    box.ymax = std::max(box.ymax, points.coordinate(r, 1));
  }
  double wx = box.xmax - box.xmin, wy = box.ymax - box.ymin;
  const double extent = std::max({wx, wy, 1e-12});
  if (wx < 1e-3 * extent) wx = extent;
  if (wy < 1e-3 * extent) wy = extent;
  const double mx = 0.5 * (box.xmin + box.xmax), my = 0.5 * (box.ymin + box.ymax);
  box = {mx - 0.6 * wx, mx + 0.6 * wx, my - 0.6 * wy, my + 0.6 * wy};

  const double scale = 600.0 / std::max(box.xmax - box.xmin, box.ymax - box.ymin);
  const double width = (box.xmax - box.xmin) * scale, height = (box.ymax - box.ymin) * scale;
  auto px = [&](Vec2 p) { return fmt((p.x - box.xmin) * scale) + "," + fmt((box.ymax - p.y) * scale); };
  auto ambient_dir = [&](const Point& v) {
    const Point a = tree.system().vector_to_ambient(v);
    return Vec2{a[0], a[1]};
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(width) << "\" height=\""
      << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << " " << fmt(height) << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << fmt(width) << "\" height=\"" << fmt(height)
      << "\" fill=\"white\"/>\n";

  static constexpr std::array<const char*, 4> kFill = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759"};
  const double reach = 1e6 * std::hypot(box.xmax - box.xmin, box.ymax - box.ymin);
  svg << "<g id=\"regions\" fill-opacity=\"0.25\" stroke=\"none\">\n";
  for (const auto& [eps, region] : regions(tree)) {
    const Vec2 g1 = ambient_dir(region.signed_generator(0));
    const Vec2 g2 = ambient_dir(region.signed_generator(1));
    const double n1 = reach / std::hypot(g1.x, g1.y), n2 = reach / std::hypot(g2.x, g2.y);
    const auto poly = clip({center, {center.x + n1 * g1.x, center.y + n1 * g1.y},
                            {center.x + n2 * g2.x, center.y + n2 * g2.y}},
                           box);
    svg << "<polygon data-region=\"" << eps.to_string() << "\" fill=\"" << kFill[eps.index()] << "\" points=\"";
    for (std::size_t i = 0; i < poly.size(); ++i) svg << (i ? " " : "") << px(poly[i]);
    svg << "\"/>\n";
  }
  svg << "</g>\n";

  auto line = [&](const char* label, Vec2 d) {
    const Vec2 a = center, b = ray_exit(center, d, box);
    svg << "<line data-axis=\"" << label << "\" data-direction=\"" << format_double(d.x) << " "
        << format_double(d.y) << "\" x1=\"" << fmt((a.x - box.xmin) * scale) << "\" y1=\""
        << fmt((box.ymax - a.y) * scale) << "\" x2=\"" << fmt((b.x - box.xmin) * scale) << "\" y2=\""
        << fmt((box.ymax - b.y) * scale) << "\"/>\n";
  };
  svg << "<g id=\"rays\" stroke=\"black\" stroke-width=\"1.5\">\n";
  const SignSequence root;
  const Vec2 u = ambient_dir(tree.axis(root));
  line("root", u);
  line("root", {-u.x, -u.y});
  const Point& neg_axis = tree.axis(root.appended(-1));
  const Point& pos_axis = tree.axis(root.appended(1));
  const Vec2 un = ambient_dir(neg_axis), up = ambient_dir(pos_axis);
  line("neg", {-un.x, -un.y});
  line("neg", un);
  if (pos_axis != neg_axis) {
    line("pos", {-up.x, -up.y});
    line("pos", up);
  }
  svg << "</g>\n";

  svg << "<g id=\"points\" fill=\"black\">\n";
  for (std::size_t r = 0; r < points.size(); ++r) {
    const Vec2 p{points.coordinate(r, 0), points.coordinate(r, 1)};
    svg << "<circle cx=\"" << fmt((p.x - box.xmin) * scale) << "\" cy=\"" << fmt((box.ymax - p.y) * scale)
        << "\" r=\"2.000\"/>\n";
  }
  svg << "</g>\n";
  svg << "<circle id=\"center\" cx=\"" << fmt((center.x - box.xmin) * scale) << "\" cy=\""
      << fmt((box.ymax - center.y) * scale) << "\" r=\"5.000\" fill=\"red\" stroke=\"black\"/>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace yaoyao::cli
