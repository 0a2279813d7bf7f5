// Command-line front end: `run` executes a visibility sweep of the eraser
// setup and compares it against the reference curves, `oracle` prints the
// reference curves alone, `mzi` runs the bare-interferometer regression and
// `compare` re-checks a saved curve file.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qeraser/harness.h"

namespace {

using namespace qeraser;

constexpr int kExitPass = 0;
constexpr int kExitCompareFailure = 1;
constexpr int kExitConfigError = 2;

std::string preset_help() {
  std::string help = "configuration preset (";
  bool first = true;
  for (const auto name : preset_names()) {
    if (!first) help += ", ";
    help += name;
    first = false;
  }
  return help + ")";
}

struct RunFlags {
  std::string preset = "custom";
  std::uint64_t events = 1'000'000;
  double gamma = 0.99;
  std::uint64_t seed = 1;
  double theta0 = 45.0;
  std::vector<double> two_theta1_grid;
  int phi_points = 32;
  double qwp = 0.0;
  double xi = 90.0;
  double psi0 = 0.0;
  bool mixed = false;
  double pv = 0.5;
  std::uint32_t group_nv = 200;
  std::uint32_t group_nh = 200;
  int analyzed_port = 1;
  std::string policy = "random";
  std::uint64_t warmup = 0;
  double tolerance = 0.03;
  std::string out_dir = ".";
  std::string record_events;  // "", "csv", "bin", "both"
  int threads = 1;
};

SweepSpec build_spec(const RunFlags& f, const CLI::App& cmd) {
  SweepSpec spec = SweepSpec::for_preset(preset_from_name(f.preset));
  const auto given = [&](const std::string& name) { return cmd.count(name) > 0; };

  if (given("--events")) spec.events_per_point = f.events;
  if (given("--gamma")) spec.gamma = f.gamma;
  if (given("--seed")) spec.seed = f.seed;
  if (given("--theta0")) spec.theta0_deg = f.theta0;
  if (given("--two-theta1-grid")) spec.two_theta1_grid_deg = f.two_theta1_grid;
  if (given("--phi-points")) spec.phi_grid_deg = uniform_phi_grid(f.phi_points);
  if (given("--qwp")) spec.qwp_deg = f.qwp;
  if (given("--no-qwp")) spec.qwp_deg.reset();
  if (given("--analyzed-port")) spec.analyzed_port = f.analyzed_port;
  if (given("--policy")) {
    spec.policy = (f.policy == "round-robin") ? OutputPolicy::kRoundRobin
                                              : OutputPolicy::kRandom;
  }
  if (given("--warmup")) spec.warmup_events = f.warmup;
  if (given("--tolerance")) spec.tolerance = f.tolerance;
  if (given("--threads")) spec.threads = f.threads;

  if (given("--mixed") || given("--pv") || given("--group-nv") || given("--group-nh")) {
    MixedVH mix;
    if (spec.source.mixed()) mix = std::get<MixedVH>(spec.source.kind);
    if (given("--pv")) {
      mix.p_v = f.pv;
      mix.p_h = 1.0 - f.pv;
    }
    if (given("--group-nv")) mix.n_v = f.group_nv;
    if (given("--group-nh")) mix.n_h = f.group_nh;
    spec.source.kind = mix;
  } else if (given("--xi")) {
    spec.source.kind = PureLinear{f.xi};
  }
  if (given("--psi0")) spec.source.psi0_deg = f.psi0;
  if (!f.record_events.empty()) spec.record_events = true;
  return spec;
}

OutputPaths output_paths(const RunFlags& f) {
  const std::filesystem::path dir(f.out_dir);
  std::filesystem::create_directories(dir);
  OutputPaths paths;
  paths.curve = dir / "curve.csv";
  paths.manifest = dir / "manifest.json";
  if (f.record_events == "csv" || f.record_events == "both") {
    paths.events_csv = dir / "events.csv";
  }
  if (f.record_events == "bin" || f.record_events == "both") {
    paths.events_bin = dir / "events.bin";
  }
  return paths;
}

int cmd_run(const RunFlags& f, const CLI::App& cmd) {
  const SweepSpec spec = build_spec(f, cmd);
  spec.validate();
  const std::vector<CurvePoint> points = run_sweep(spec);
  const OutputPaths paths = output_paths(f);
  write_outputs(points, spec, paths);
  const CompareReport report = compare_report(points, spec.tolerance);
  std::cout << "preset " << preset_name(spec.preset) << ", " << spec.events_per_point
            << " events/point, gamma " << spec.gamma << ", seed " << spec.seed << "\n";
  print_report(std::cout, report, points, spec.tolerance);
  std::cout << "wrote " << paths.curve.string() << "\n";
  return report.pass ? kExitPass : kExitCompareFailure;
}

int cmd_oracle(const RunFlags& f, const CLI::App& cmd) {
  SweepSpec spec = build_spec(f, cmd);
  spec.events_per_point = std::max<std::uint64_t>(spec.events_per_point,
                                                  spec.phi_grid_deg.size());
  spec.validate();
  verify_wiring(spec);
  std::cout << "two_theta1_deg,v_oracle\n";
  for (const double tt1 : spec.two_theta1_grid_deg) {
    char line[64];
    std::snprintf(line, sizeof line, "%.12g,%.12g", tt1, oracle_visibility(spec, tt1));
    std::cout << line << "\n";
  }
  return kExitPass;
}

int cmd_mzi(std::uint64_t events, int phi_points, double gamma, std::uint64_t seed,
            const std::string& policy, double tolerance) {
  const OutputPolicy pol =
      (policy == "round-robin") ? OutputPolicy::kRoundRobin : OutputPolicy::kRandom;
  const std::vector<MziPoint> points = run_mzi(events, phi_points, gamma, seed, pol);
  double max_dev = 0.0;
  std::cout << "phi_deg,n0,n1,f0_sim,p0_oracle,abs_dev\n";
  for (const auto& p : points) {
    char line[160];
    std::snprintf(line, sizeof line, "%.12g,%llu,%llu,%.9f,%.9f,%.9f", p.phi_deg,
                  static_cast<unsigned long long>(p.n0),
                  static_cast<unsigned long long>(p.n1), p.f0, p.p0_oracle, p.abs_dev);
    std::cout << line << "\n";
    max_dev = std::max(max_dev, p.abs_dev);
  }
  std::cout << "max |f0 - p0| = " << max_dev << " (tolerance " << tolerance << ") -> "
            << (max_dev <= tolerance ? "PASS" : "FAIL") << "\n";
  return max_dev <= tolerance ? kExitPass : kExitCompareFailure;
}

int cmd_compare(const std::string& curve_path, double tolerance) {
  const std::vector<CurveRow> rows = read_curve_file(curve_path);
  std::vector<CurvePoint> points;
  points.reserve(rows.size());
  for (const auto& r : rows) {
    CurvePoint p;
    p.two_theta1_deg = r.two_theta1_deg;
    p.v_sim = r.v_sim;
    p.v_oracle = r.v_oracle;
    p.abs_dev = std::abs(r.v_sim - r.v_oracle);
    points.push_back(p);
  }
  const CompareReport report = compare_report(points, tolerance);
  print_report(std::cout, report, points, tolerance);
  return report.pass ? kExitPass : kExitCompareFailure;
}

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--preset", f.preset, preset_help());
  cmd->add_option("--events", f.events, "events per curve point, split over the phase grid");
  cmd->add_option("--gamma", f.gamma, "learning parameter of the adaptive units");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--theta0", f.theta0, "HWP0 axis (degrees)");
  cmd->add_option("--two-theta1-grid", f.two_theta1_grid,
                  "grid of 2*theta_HWP1 values in degrees")
      ->delimiter(',');
  cmd->add_option("--phi-points", f.phi_points, "uniform phase grid size");
  cmd->add_option("--qwp", f.qwp, "insert the QWP at this axis (degrees)");
  cmd->add_flag("--no-qwp", "remove the QWP");
  cmd->add_option("--xi", f.xi, "pure source polarization (degrees)");
  cmd->add_option("--psi0", f.psi0, "initial clock phase (degrees)");
  cmd->add_flag("--mixed", f.mixed, "use a V/H mixed source");
  cmd->add_option("--pv", f.pv, "mixture weight of V (H gets 1 - pv)");
  cmd->add_option("--group-nv", f.group_nv, "events per V group");
  cmd->add_option("--group-nh", f.group_nh, "events per H group");
  cmd->add_option("--analyzed-port", f.analyzed_port,
                  "interferometer output feeding the analysis chain");
  cmd->add_option("--policy", f.policy, "output stage policy")
      ->check(CLI::IsMember({"random", "round-robin"}));
  cmd->add_option("--warmup", f.warmup, "events per cell excluded from the dataset");
  cmd->add_option("--tolerance", f.tolerance, "pass threshold on |v_sim - v_oracle|");
  cmd->add_option("--threads", f.threads, "worker threads for sweep points");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-by-event simulator of a single-photon quantum eraser"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "simulate a visibility sweep and compare");
  add_run_flags(run, run_flags);
  run->add_option("--out", run_flags.out_dir, "output directory");
  run->add_option("--record-events", run_flags.record_events,
                  "also write the per-event dataset")
      ->check(CLI::IsMember({"csv", "bin", "both"}));
  run->set_config("--config", "", "flat key=value configuration file");

  RunFlags oracle_flags;
  auto* oracle = app.add_subcommand("oracle", "print the reference visibility curve");
  add_run_flags(oracle, oracle_flags);

  std::uint64_t mzi_events = 1'000'000;
  int mzi_phi_points = 32;
  double mzi_gamma = 0.99;
  std::uint64_t mzi_seed = 1;
  std::string mzi_policy = "random";
  double mzi_tolerance = 0.01;
  auto* mzi = app.add_subcommand("mzi", "bare-interferometer frequency regression");
  mzi->add_option("--events", mzi_events, "events per phase point");
  mzi->add_option("--phi-points", mzi_phi_points, "uniform phase grid size");
  mzi->add_option("--gamma", mzi_gamma, "learning parameter");
  mzi->add_option("--seed", mzi_seed, "master seed");
  mzi->add_option("--policy", mzi_policy, "output stage policy")
      ->check(CLI::IsMember({"random", "round-robin"}));
  mzi->add_option("--tolerance", mzi_tolerance, "pass threshold on |N0/N - p0|");

  std::string compare_curve;
  double compare_tolerance = 0.03;
  auto* compare = app.add_subcommand("compare", "re-verify a saved curve file");
  compare->add_option("curve", compare_curve, "curve.csv produced by `run`")->required();
  compare->add_option("--tolerance", compare_tolerance, "pass threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(run_flags, *run);
    if (oracle->parsed()) return cmd_oracle(oracle_flags, *oracle);
    if (mzi->parsed()) {
      return cmd_mzi(mzi_events, mzi_phi_points, mzi_gamma, mzi_seed, mzi_policy,
                     mzi_tolerance);
    }
    if (compare->parsed()) return cmd_compare(compare_curve, compare_tolerance);
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}
