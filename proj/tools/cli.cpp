#include "cli.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif
#include <nlohmann/json.hpp>

#include "plot.hpp"
#include "yaoyao/error.hpp"
#include "yaoyao/measures.hpp"
#include "yaoyao/partition.hpp"
#include "yaoyao/solver.hpp"
#include "yaoyao/verify.hpp"

namespace yaoyao::cli {

using nlohmann::json;

namespace {

constexpr const char* kReportSchema = "yaoyao-report/v1";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

WeightedPointCloud read_points(const std::string& path) {
  std::istringstream in(read_file(path));
  return read_csv(in);
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw InputError("cannot write '" + path + "'");
  file << content;
  if (!file.flush()) throw InputError("failed writing '" + path + "'");
}

// ------------------------------------------------------------------ sample

struct SampleArgs {
  std::string spec;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::string output;
};

int cmd_sample(const SampleArgs& a, std::ostream& out) {
  const MeasureSpec spec = measure_spec_from_json(read_json(a.spec));
  std::ostringstream csv;
  write_csv(csv, sample(spec, a.count, a.seed));
  write_output(a.output, csv.str(), out);
  return kPass;
}

// ------------------------------------------------------------------ center

struct CenterArgs {
  std::string points;
  std::string system;
  std::string config;
  std::string output;
  unsigned threads = 1;
};

int cmd_center(const CenterArgs& a, std::ostream& out) {
  const WeightedPointCloud ambient = read_points(a.points);
  SolverConfig cfg = a.config.empty() ? SolverConfig{} : solver_config_from_json(read_json(a.config));
  cfg.threads = a.threads;
  const CoordinateSystem system =
      a.system.empty() ? CoordinateSystem::standard(ambient.dimension()) : system_from_json(read_json(a.system));
  if (system.dimension() != ambient.dimension()) throw InputError("system and points differ in dimension");

  const PartitionTree tree = compute_center_partition(to_coordinates(ambient, system), system, cfg);
  if (!a.output.empty()) write_output(a.output, serialize(tree), out);

  const Point c = tree.ambient_center();
  for (std::size_t i = 0; i < c.size(); ++i) out << (i ? " " : "") << format_double(c[i]);
  out << "\n";
  return kPass;
}

// ------------------------------------------------------------------ verify

struct VerifyArgs {
  std::string partition;
  std::string points;
  std::vector<std::string> checks{"all"};
  std::size_t count = 1000;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  double tol = 1e-6;
  double oracle_tol = 1e-4;
  std::string output;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  const PartitionTree tree = deserialize(read_file(a.partition));
  const WeightedPointCloud ambient = read_points(a.points);
  if (ambient.dimension() != tree.dimension()) throw InputError("partition and points differ in dimension");
  const WeightedPointCloud cloud = to_coordinates(ambient, tree.system());

  std::vector<std::string> selected;
  for (const auto& name : a.checks) {
    if (name == "all") {
      selected.insert(selected.end(), {"equipartition", "prefix", "avoidance", "depth", "representation"});
      if (tree.dimension() == 2) selected.push_back("oracle");
    } else {
      selected.push_back(name);
    }
  }

  json reports = json::array();
  bool pass = true;
  for (const auto& name : selected) {
    CheckReport r;
    if (name == "equipartition") r = check_equipartition(tree, cloud, a.tol);
    else if (name == "prefix") r = check_prefix_masses(tree, cloud, a.tol);
    else if (name == "avoidance") r = check_avoidance(tree, &cloud, a.count, a.seed);
    else if (name == "depth") r = check_depth(tree, cloud, a.count, a.seed);
    else if (name == "representation") r = check_representation(tree, a.samples, a.seed);
    else if (name == "oracle") r = check_oracle_2d(tree, cloud, a.oracle_tol);
    else throw InputError("unknown check '" + name + "'");
    pass = pass && r.pass;
    reports.push_back(to_json(r));
  }
  const json report{{"schema", kReportSchema},
                    {"pass", pass},
                    {"partition", a.partition},
                    {"points", a.points},
                    {"checks", reports}};
  write_output(a.output, report.dump(2) + "\n", out);
  return pass ? kPass : kCheckFailure;
}

// -------------------------------------------------------------------- plot

struct PlotArgs {
  std::string partition;
  std::string points;
  std::string output;
};

int cmd_plot(const PlotArgs& a, std::ostream& out) {
  const PartitionTree tree = deserialize(read_file(a.partition));
  const WeightedPointCloud points = read_points(a.points);
  write_output(a.output, render_svg(tree, points), out);
  return kPass;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Yao-Yao equipartitions of weighted point clouds", "yaoyao"};
  app.require_subcommand(1);

  SampleArgs sample_args;
  auto* sample_cmd = app.add_subcommand("sample", "Draw a seeded sample from a measure spec as CSV");
  sample_cmd->add_option("--spec", sample_args.spec, "Measure spec (JSON)")->required();
  sample_cmd->add_option("-n,--count", sample_args.count, "Number of points")->required();
  sample_cmd->add_option("--seed", sample_args.seed, "Random seed");
  sample_cmd->add_option("-o,--output", sample_args.output, "Output CSV (stdout if omitted)");

  CenterArgs center_args;
  auto* center_cmd = app.add_subcommand("center", "Compute the center and partition of a point cloud");
  center_cmd->add_option("points", center_args.points, "Points (CSV)")->required();
  center_cmd->add_option("--system", center_args.system, "Coordinate system (JSON matrix + offset)");
  center_cmd->add_option("--config", center_args.config, "Solver configuration (JSON)");
  center_cmd->add_option("-o,--output", center_args.output, "Partition document to write");
  center_cmd->add_option("--threads", center_args.threads, "Worker threads")->check(CLI::Range(1u, 256u));

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "Check a partition against a point cloud");
  verify_cmd->add_option("partition", verify_args.partition, "Partition document (JSON)")->required();
  verify_cmd->add_option("points", verify_args.points, "Points (CSV)")->required();
  verify_cmd
      ->add_option("--checks", verify_args.checks,
                   "Comma-separated: equipartition, prefix, avoidance, depth, representation, oracle, all")
      ->delimiter(',');
  verify_cmd->add_option("--count", verify_args.count, "Hyperplanes / half-spaces per random check");
  verify_cmd->add_option("--samples", verify_args.samples, "Samples per region for the representation check");
  verify_cmd->add_option("--seed", verify_args.seed, "Random seed");
  verify_cmd->add_option("--tol", verify_args.tol, "Relative mass tolerance");
  verify_cmd->add_option("--oracle-tol", verify_args.oracle_tol, "Center tolerance against the 2-D oracle");
  verify_cmd->add_option("-o,--output", verify_args.output, "Report (JSON, stdout if omitted)");

  PlotArgs plot_args;
  auto* plot_cmd = app.add_subcommand("plot", "Draw a planar partition as SVG");
  plot_cmd->add_option("partition", plot_args.partition, "Partition document (JSON)")->required();
  plot_cmd->add_option("points", plot_args.points, "Points (CSV)")->required();
  plot_cmd->add_option("-o,--output", plot_args.output, "Output SVG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success&) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "yaoyao: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (*sample_cmd) return cmd_sample(sample_args, out);
    if (*center_cmd) return cmd_center(center_args, out);
    if (*verify_cmd) return cmd_verify(verify_args, out);
    return cmd_plot(plot_args, out);
  } catch (const SolverError& e) {
    err << "yaoyao: solver failure: " << e.what() << "\n";
    if (!e.trace().empty()) err << e.trace() << "\n";
    return kSolverFailure;
  } catch (const Error& e) {
    err << "yaoyao: " << e.what() << "\n";
    return kInputError;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"yaoyao"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace yaoyao::cli
