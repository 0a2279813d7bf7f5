#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qeraser/network.h"
#include "qeraser/oracle.h"

namespace qeraser {

inline constexpr std::string_view kVersion = "1.0.0";

enum class Preset : std::uint8_t {
  kFig3aPureV45,   // pure V, theta0 = 45, no QWP
  kFig3aPureV10,   // pure V, theta0 = 10, no QWP
  kFig3bMixed,     // completely mixed, theta0 = 45, no QWP
  kFig3cPartial,   // p_v = 2/3, theta0 = 22.5, no QWP
  kFig4aQwp,       // pure V, theta0 = 45, QWP at 0
  kFig4bQwpXi45,   // pure xi = 45, theta0 = 22.5, QWP at 0
  kBareMzi,
  kCustom,
};

std::string_view preset_name(Preset p);
Preset preset_from_name(std::string_view name);  // throws on unknown names
std::vector<std::string_view> preset_names();

std::vector<double> uniform_phi_grid(int points);       // [0, 360) degrees
std::vector<double> default_two_theta1_grid();          // 0, 5, ..., 90 degrees

struct SweepSpec {
  Preset preset = Preset::kCustom;
  std::vector<double> two_theta1_grid_deg = default_two_theta1_grid();
  std::vector<double> phi_grid_deg = uniform_phi_grid(32);
  std::uint64_t events_per_point = 1'000'000;  // split over the phase grid
  double gamma = 0.99;
  std::uint64_t seed = 1;
  SourceSpec source;
  double theta0_deg = 45.0;
  std::optional<double> qwp_deg;
  int analyzed_port = 1;
  OutputPolicy policy = OutputPolicy::kRandom;
  std::uint64_t warmup_events = 0;
  double tolerance = 0.03;
  bool record_events = false;
  int threads = 1;

  static SweepSpec for_preset(Preset p);

  // Grid/range checks plus preset consistency (QWP presence, source kind).
  void validate() const;
};

struct PhiCounts {
  double phi_deg = 0.0;
  std::uint64_t n0 = 0;
  std::uint64_t n1 = 0;
  std::uint64_t n_discarded = 0;
  std::vector<EventOutcome> outcomes;  // filled only when recording events
};

struct CurvePoint {
  double two_theta1_deg = 0.0;
  double v_sim = 0.0;
  double v_oracle = 0.0;
  double abs_dev = 0.0;
  bool degenerate = false;
  std::vector<PhiCounts> counts_per_phi;
};

// Raw-extreme fringe contrast of the D0 counts over the phase grid.
Visibility estimate_visibility(std::span<const PhiCounts> counts);

// Reference visibility for the spec's settings: the matching closed form when
// one applies, otherwise the matrix-pipeline sweep.
double oracle_visibility(const SweepSpec& spec, double two_theta1_deg);

// Startup check that the simulated wiring matches the closed forms: the
// pipeline sweep must agree with the applicable formula to 1e-9.
void verify_wiring(const SweepSpec& spec);

std::vector<CurvePoint> run_sweep(const SweepSpec& spec);

struct MziPoint {
  double phi_deg = 0.0;
  std::uint64_t n0 = 0;
  std::uint64_t n1 = 0;
  double f0 = 0.0;        // N0 / N
  double p0_oracle = 0.0;
  double abs_dev = 0.0;
};

// Bare-interferometer regression: events_per_phi events at each grid phase
// (applied to Path0), detector-0 frequency against the closed form.
std::vector<MziPoint> run_mzi(std::uint64_t events_per_phi, int phi_points, double gamma,
                              std::uint64_t seed, OutputPolicy policy = OutputPolicy::kRandom);

struct OutputPaths {
  std::filesystem::path curve;
  std::filesystem::path manifest;
  std::optional<std::filesystem::path> events_csv;
  std::optional<std::filesystem::path> events_bin;
};

// Writes the curve table, the run manifest (JSON) and, when requested, the
// per-event dataset in text and/or binary form.
void write_outputs(const std::vector<CurvePoint>& points, const SweepSpec& spec,
                   const OutputPaths& paths);

struct CompareReport {
  double max_abs_dev = 0.0;
  double mean_abs_dev = 0.0;
  bool pass = true;
  std::vector<std::size_t> offenders;  // indices with abs_dev > tolerance
};

CompareReport compare_report(const std::vector<CurvePoint>& points, double tolerance);

void print_report(std::ostream& os, const CompareReport& report,
                  const std::vector<CurvePoint>& points, double tolerance);

struct CurveRow {
  double two_theta1_deg = 0.0;
  double v_sim = 0.0;
  double v_oracle = 0.0;
  double abs_dev = 0.0;
};

std::vector<CurveRow> read_curve_file(const std::filesystem::path& path);

}  // namespace qeraser
