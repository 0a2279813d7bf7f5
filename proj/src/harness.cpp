#include "qeraser/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace qeraser {

namespace {

constexpr std::uint64_t kCellStream = 2;

const char* kPresetNames[] = {
    "fig3a-pureV-45", "fig3a-pureV-10", "fig3b-mixed", "fig3c-partial",
    "fig4a-qwp",      "fig4b-qwp-xi45", "bare-mzi",    "custom",
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

MixedInput mixed_input(const SourceSpec& source) {
  if (const auto* pure = std::get_if<PureLinear>(&source.kind)) {
    return MixedInput::pure(pure->xi_deg);
  }
  const auto& mix = std::get<MixedVH>(source.kind);
  return MixedInput::linear_vh(mix.p_v, mix.p_h);
}

double beta_deg_of(const MixedVH& mix) {
  return rad_to_deg(std::atan2(std::sqrt(mix.p_v), std::sqrt(mix.p_h)));
}

// Closed form matching the configuration, when one exists.
std::optional<double> closed_form_visibility(const SweepSpec& spec, double two_theta1_deg) {
  const double theta1 = 0.5 * two_theta1_deg;
  const bool no_qwp = !spec.qwp_deg.has_value();
  const bool qwp_at_zero = spec.qwp_deg.has_value() && *spec.qwp_deg == 0.0;
  auto pure_form = [&](double xi) -> std::optional<double> {
    if (no_qwp) return visibility_pure_no_qwp(xi, spec.theta0_deg, theta1);
    if (qwp_at_zero) return visibility_pure_qwp0(xi, spec.theta0_deg, theta1);
    return std::nullopt;
  };
  if (const auto* pure = std::get_if<PureLinear>(&spec.source.kind)) {
    return pure_form(pure->xi_deg);
  }
  const auto& mix = std::get<MixedVH>(spec.source.kind);
  if (mix.p_h == 0.0) return pure_form(90.0);
  if (mix.p_v == 0.0) return pure_form(0.0);
  if (no_qwp) return visibility_mixed(beta_deg_of(mix), spec.theta0_deg, theta1);
  return std::nullopt;
}

EraserSettings cell_settings(const SweepSpec& spec, double two_theta1_deg, double phi_deg) {
  EraserSettings s;
  s.phi_deg = phi_deg;
  s.theta_hwp0_deg = spec.theta0_deg;
  s.theta_hwp1_deg = 0.5 * two_theta1_deg;
  s.theta_qwp_deg = spec.qwp_deg;
  s.analyzed_port = spec.analyzed_port;
  return s;
}

std::uint64_t cell_events(std::uint64_t total, std::size_t cells, std::size_t index) {
  const std::uint64_t base = total / cells;
  const std::uint64_t rem = total % cells;
  return base + (index < rem ? 1 : 0);
}

}  // namespace

std::string_view preset_name(Preset p) { return kPresetNames[static_cast<int>(p)]; }

Preset preset_from_name(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kPresetNames); ++i) {
    if (name == kPresetNames[i]) return static_cast<Preset>(i);
  }
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string_view> preset_names() {
  return {std::begin(kPresetNames), std::end(kPresetNames)};
}

std::vector<double> uniform_phi_grid(int points) {
  if (points < 1) throw std::invalid_argument("phase grid needs at least 1 point");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) grid[static_cast<std::size_t>(k)] = 360.0 * k / points;
  return grid;
}

std::vector<double> default_two_theta1_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 18; ++k) grid.push_back(5.0 * k);
  return grid;
}

SweepSpec SweepSpec::for_preset(Preset p) {
  SweepSpec s;
  s.preset = p;
  switch (p) {
    case Preset::kFig3aPureV45:
      s.source.kind = PureLinear{90.0};
      s.theta0_deg = 45.0;
      break;
    case Preset::kFig3aPureV10:
      s.source.kind = PureLinear{90.0};
      s.theta0_deg = 10.0;
      break;
    case Preset::kFig3bMixed:
      s.source.kind = MixedVH{0.5, 0.5, 200, 200};
      s.theta0_deg = 45.0;
      break;
    case Preset::kFig3cPartial:
      s.source.kind = MixedVH{2.0 / 3.0, 1.0 - 2.0 / 3.0, 200, 200};
      s.theta0_deg = 22.5;
      break;
    case Preset::kFig4aQwp:
      s.source.kind = PureLinear{90.0};
      s.theta0_deg = 45.0;
      s.qwp_deg = 0.0;
      break;
    case Preset::kFig4bQwpXi45:
      s.source.kind = PureLinear{45.0};
      s.theta0_deg = 22.5;
      s.qwp_deg = 0.0;
      break;
    case Preset::kBareMzi:
      s.two_theta1_grid_deg = {0.0};
      break;
    case Preset::kCustom:
      break;
  }
  return s;
}

void SweepSpec::validate() const {
  if (two_theta1_grid_deg.empty() || phi_grid_deg.empty()) {
    throw std::invalid_argument("sweep: grids must be non-empty");
  }
  if (phi_grid_deg.size() < 2) {
    throw std::invalid_argument("sweep: phase grid needs at least 2 points");
  }
  for (double v : two_theta1_grid_deg) {
    if (!std::isfinite(v)) throw std::invalid_argument("sweep: non-finite waveplate angle");
  }
  for (double v : phi_grid_deg) {
    if (!std::isfinite(v)) throw std::invalid_argument("sweep: non-finite phase");
  }
  if (events_per_point < phi_grid_deg.size()) {
    throw std::invalid_argument("sweep: need at least one event per phase point");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("sweep: gamma must lie in (0, 1)");
  }
  if (analyzed_port != 0 && analyzed_port != 1) {
    throw std::invalid_argument("sweep: analyzed port must be 0 or 1");
  }
  if (!(tolerance > 0.0)) {
    throw std::invalid_argument("sweep: tolerance must be positive");
  }
  if (threads < 1) {
    throw std::invalid_argument("sweep: thread count must be at least 1");
  }
  if (warmup_events >= events_per_point / phi_grid_deg.size()) {
    throw std::invalid_argument("sweep: warm-up exceeds the per-cell event budget");
  }
  source.validate();

  const bool pure = !source.mixed();
  switch (preset) {
    case Preset::kFig3aPureV45:
    case Preset::kFig3aPureV10:
      if (!pure || qwp_deg) {
        throw std::invalid_argument("sweep: this preset takes a pure source and no QWP");
      }
      break;
    case Preset::kFig3bMixed:
    case Preset::kFig3cPartial:
      if (pure || qwp_deg) {
        throw std::invalid_argument("sweep: this preset takes a mixed source and no QWP");
      }
      break;
    case Preset::kFig4aQwp:
    case Preset::kFig4bQwpXi45:
      if (!pure || !qwp_deg || *qwp_deg != 0.0) {
        throw std::invalid_argument("sweep: this preset takes a pure source and the QWP at 0");
      }
      break;
    case Preset::kBareMzi:
      if (qwp_deg) {
        throw std::invalid_argument("sweep: the bare interferometer has no QWP");
      }
      break;
    case Preset::kCustom:
      break;
  }
}

Visibility estimate_visibility(std::span<const PhiCounts> counts) {
  if (counts.size() < 2) {
    throw std::invalid_argument("estimate_visibility: need at least two phase points");
  }
  std::uint64_t nmax = 0;
  std::uint64_t nmin = counts[0].n0;
  for (const auto& c : counts) {
    nmax = std::max(nmax, c.n0);
    nmin = std::min(nmin, c.n0);
  }
  if (nmax == 0) {
    return {0.0, true};
  }
  return {static_cast<double>(nmax - nmin) / static_cast<double>(nmax + nmin), false};
}

double oracle_visibility(const SweepSpec& spec, double two_theta1_deg) {
  if (spec.preset == Preset::kBareMzi) {
    std::vector<double> p0(spec.phi_grid_deg.size());
    for (std::size_t j = 0; j < p0.size(); ++j) {
      p0[j] = mzi_probs(spec.phi_grid_deg[j], 0.0).p0;
    }
    const FringeFit fit = fit_fringe(spec.phi_grid_deg, p0);
    if (fit.mean <= 1e-15) return 0.0;
    return std::clamp((fit.maximum() - fit.minimum()) / (fit.maximum() + fit.minimum()),
                      0.0, 1.0);
  }
  if (const auto cf = closed_form_visibility(spec, two_theta1_deg)) {
    return *cf;
  }
  const EraserSettings s = cell_settings(spec, two_theta1_deg, 0.0);
  return sweep_visibility(mixed_input(spec.source), s, spec.phi_grid_deg).value;
}

void verify_wiring(const SweepSpec& spec) {
  if (spec.preset == Preset::kBareMzi) return;
  const std::vector<double> grid = uniform_phi_grid(32);
  const MixedInput input = mixed_input(spec.source);
  const auto& tt = spec.two_theta1_grid_deg;
  const std::size_t samples[] = {0, tt.size() / 2, tt.size() - 1};
  for (std::size_t i : samples) {
    const auto cf = closed_form_visibility(spec, tt[i]);
    if (!cf) continue;
    const EraserSettings s = cell_settings(spec, tt[i], 0.0);
    const double swept = sweep_visibility(input, s, grid).value;
    if (std::abs(swept - *cf) > 1e-9) {
      throw std::logic_error("wiring check failed at 2theta1=" + fmt(tt[i]) +
                             " deg: pipeline " + fmt(swept) + " vs closed form " + fmt(*cf));
    }
  }
}

namespace {

CurvePoint run_curve_point(const SweepSpec& spec, std::size_t i) {
  const double tt1 = spec.two_theta1_grid_deg[i];
  CurvePoint pt;
  pt.two_theta1_deg = tt1;
  const std::size_t cells = spec.phi_grid_deg.size();
  pt.counts_per_phi.reserve(cells);
  for (std::size_t j = 0; j < cells; ++j) {
    const double phi = spec.phi_grid_deg[j];
    RunConfig rc;
    rc.total_events = cell_events(spec.events_per_point, cells, j);
    rc.gamma = spec.gamma;
    rc.seed = derive_seed(spec.seed, kCellStream, i, j);
    rc.source = spec.source;
    rc.policy = spec.policy;
    rc.warmup_events = spec.warmup_events;
    Topology topo;
    if (spec.preset == Preset::kBareMzi) {
      rc.mzi = BareMziSettings{phi, 0.0};
      topo = build_bare_mzi(rc);
    } else {
      rc.eraser = cell_settings(spec, tt1, phi);
      topo = build_eraser(rc);
    }
    EventDataset ds = run_events(topo, rc);
    PhiCounts pc;
    pc.phi_deg = phi;
    pc.n0 = ds.n0;
    pc.n1 = ds.n1;
    pc.n_discarded = ds.n_discarded;
    if (spec.record_events) pc.outcomes = std::move(ds.outcomes);
    pt.counts_per_phi.push_back(std::move(pc));
  }
  const Visibility est = estimate_visibility(pt.counts_per_phi);
  pt.v_sim = est.value;
  pt.degenerate = est.degenerate;
  pt.v_oracle = oracle_visibility(spec, tt1);
  pt.abs_dev = std::abs(pt.v_sim - pt.v_oracle);
  return pt;
}

}  // namespace

std::vector<CurvePoint> run_sweep(const SweepSpec& spec) {
  spec.validate();
  verify_wiring(spec);
  const std::size_t n = spec.two_theta1_grid_deg.size();
  std::vector<CurvePoint> points(n);
  if (spec.threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) points[i] = run_curve_point(spec, i);
    return points;
  }
  // cells are independent; results land in fixed slots so the schedule does
  // not affect the output
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min<int>(spec.threads, static_cast<int>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          points[i] = run_curve_point(spec, i);
        }
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return points;
}

std::vector<MziPoint> run_mzi(std::uint64_t events_per_phi, int phi_points, double gamma,
                              std::uint64_t seed, OutputPolicy policy) {
  if (events_per_phi < 1) throw std::invalid_argument("mzi: need at least one event per phase");
  if (phi_points < 2) throw std::invalid_argument("mzi: need at least two phase points");
  const std::vector<double> grid = uniform_phi_grid(phi_points);
  std::vector<MziPoint> points;
  points.reserve(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    RunConfig rc;
    rc.total_events = events_per_phi;
    rc.gamma = gamma;
    rc.seed = derive_seed(seed, kCellStream, 0, j);
    rc.source.kind = PureLinear{90.0};
    rc.mzi = BareMziSettings{grid[j], 0.0};
    rc.policy = policy;
    const EventDataset ds = run_events(build_bare_mzi(rc), rc);
    MziPoint p;
    p.phi_deg = grid[j];
    p.n0 = ds.n0;
    p.n1 = ds.n1;
    p.f0 = static_cast<double>(ds.n0) / static_cast<double>(ds.n0 + ds.n1);
    p.p0_oracle = mzi_probs(grid[j], 0.0).p0;
    p.abs_dev = std::abs(p.f0 - p.p0_oracle);
    points.push_back(p);
  }
  return points;
}

namespace {

void require_stream(const std::ofstream& os, const std::filesystem::path& path) {
  if (!os) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
}

void write_curve_file(const std::vector<CurvePoint>& points,
                      const std::filesystem::path& path) {
  std::ofstream os(path);
  require_stream(os, path);
  os << "two_theta1_deg,v_sim,v_oracle,abs_dev\n";
  for (const auto& p : points) {
    os << fmt(p.two_theta1_deg) << ',' << fmt(p.v_sim) << ',' << fmt(p.v_oracle) << ','
       << fmt(p.abs_dev) << '\n';
  }
  os.flush();
  require_stream(os, path);
}

void write_manifest(const std::vector<CurvePoint>& points, const SweepSpec& spec,
                    const OutputPaths& paths) {
  nlohmann::json j;
  j["format"] = "qeraser-run";
  j["code_version"] = std::string(kVersion);
  j["preset"] = std::string(preset_name(spec.preset));
  j["seed"] = spec.seed;
  j["gamma"] = spec.gamma;
  j["events_per_point"] = spec.events_per_point;
  j["two_theta1_grid_deg"] = spec.two_theta1_grid_deg;
  j["phi_grid_deg"] = spec.phi_grid_deg;
  if (const auto* pure = std::get_if<PureLinear>(&spec.source.kind)) {
    j["source"] = {{"kind", "pure"}, {"xi_deg", pure->xi_deg}, {"psi0_deg", spec.source.psi0_deg}};
  } else {
    const auto& mix = std::get<MixedVH>(spec.source.kind);
    j["source"] = {{"kind", "mixed"}, {"p_v", mix.p_v},       {"p_h", mix.p_h},
                   {"n_v", mix.n_v},  {"n_h", mix.n_h},       {"psi0_deg", spec.source.psi0_deg}};
  }
  j["theta0_deg"] = spec.theta0_deg;
  if (spec.qwp_deg) {
    j["theta_qwp_deg"] = *spec.qwp_deg;
  } else {
    j["theta_qwp_deg"] = nullptr;
  }
  j["analyzed_port"] = spec.analyzed_port;
  j["policy"] = spec.policy == OutputPolicy::kRandom ? "random" : "round-robin";
  j["warmup_events"] = spec.warmup_events;
  j["tolerance"] = spec.tolerance;
  j["points"] = points.size();
  nlohmann::json outputs;
  outputs["curve"] = paths.curve.filename().string();
  if (paths.events_csv) outputs["events_csv"] = paths.events_csv->filename().string();
  if (paths.events_bin) outputs["events_bin"] = paths.events_bin->filename().string();
  j["outputs"] = outputs;

  std::ofstream os(paths.manifest);
  require_stream(os, paths.manifest);
  os << j.dump(2) << '\n';
  os.flush();
  require_stream(os, paths.manifest);
}

struct EventSettingsRow {
  bool eraser = false;
  double theta0 = 0.0;
  double theta1 = 0.0;
  bool has_qwp = false;
  double qwp = 0.0;
};

EventSettingsRow settings_row(const SweepSpec& spec, const CurvePoint& pt) {
  EventSettingsRow row;
  row.eraser = spec.preset != Preset::kBareMzi;
  row.theta0 = spec.theta0_deg;
  row.theta1 = 0.5 * pt.two_theta1_deg;
  row.has_qwp = spec.qwp_deg.has_value();
  row.qwp = spec.qwp_deg.value_or(0.0);
  return row;
}

void write_events_csv(const std::vector<CurvePoint>& points, const SweepSpec& spec,
                      const std::filesystem::path& path) {
  std::ofstream os(path);
  require_stream(os, path);
  os << "l,outcome,phi_deg,theta_hwp0_deg,theta_hwp1_deg,theta_qwp_deg\n";
  for (const auto& pt : points) {
    const EventSettingsRow row = settings_row(spec, pt);
    for (const auto& pc : pt.counts_per_phi) {
      std::uint64_t l = 0;
      for (const EventOutcome o : pc.outcomes) {
        os << ++l << ',' << static_cast<int>(o) << ',' << fmt(pc.phi_deg) << ',';
        if (row.eraser) {
          os << fmt(row.theta0) << ',' << fmt(row.theta1) << ',';
        } else {
          os << "-,-,";
        }
        if (row.has_qwp) {
          os << fmt(row.qwp);
        } else {
          os << '-';
        }
        os << '\n';
      }
    }
  }
  os.flush();
  require_stream(os, path);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}

void put_f64(std::ostream& os, double d) {
  std::uint64_t v = 0;
  std::memcpy(&v, &d, sizeof v);
  put_u64(os, v);
}

// 16-byte magic, little-endian record count, then fixed 42-byte records:
// u64 event index, u8 outcome, u8 qwp flag, f64 phi, theta0, theta1, qwp.
constexpr char kEventsMagic[16] = {'Q', 'E', 'R', 'A', 'S', 'E', 'R', '-',
                                   'E', 'V', 'E', 'N', 'T', 'S', '1', '\0'};

void write_events_bin(const std::vector<CurvePoint>& points, const SweepSpec& spec,
                      const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  require_stream(os, path);
  os.write(kEventsMagic, sizeof kEventsMagic);
  std::uint64_t total = 0;
  for (const auto& pt : points) {
    for (const auto& pc : pt.counts_per_phi) total += pc.outcomes.size();
  }
  put_u64(os, total);
  for (const auto& pt : points) {
    const EventSettingsRow row = settings_row(spec, pt);
    for (const auto& pc : pt.counts_per_phi) {
      std::uint64_t l = 0;
      for (const EventOutcome o : pc.outcomes) {
        put_u64(os, ++l);
        const char tail[2] = {static_cast<char>(o), static_cast<char>(row.has_qwp ? 1 : 0)};
        os.write(tail, 2);
        put_f64(os, pc.phi_deg);
        put_f64(os, row.eraser ? row.theta0 : 0.0);
        put_f64(os, row.eraser ? row.theta1 : 0.0);
        put_f64(os, row.has_qwp ? row.qwp : 0.0);
      }
    }
  }
  os.flush();
  require_stream(os, path);
}

}  // namespace

void write_outputs(const std::vector<CurvePoint>& points, const SweepSpec& spec,
                   const OutputPaths& paths) {
  if ((paths.events_csv || paths.events_bin) && !spec.record_events) {
    throw std::invalid_argument("write_outputs: events were not recorded for this sweep");
  }
  write_curve_file(points, paths.curve);
  write_manifest(points, spec, paths);
  if (paths.events_csv) write_events_csv(points, spec, *paths.events_csv);
  if (paths.events_bin) write_events_bin(points, spec, *paths.events_bin);
}

CompareReport compare_report(const std::vector<CurvePoint>& points, double tolerance) {
  if (!(tolerance > 0.0)) {
    throw std::invalid_argument("compare: tolerance must be positive");
  }
  CompareReport r;
  double sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double dev = points[i].abs_dev;
    sum += dev;
    r.max_abs_dev = std::max(r.max_abs_dev, dev);
    if (dev > tolerance) r.offenders.push_back(i);
  }
  r.mean_abs_dev = points.empty() ? 0.0 : sum / static_cast<double>(points.size());
  r.pass = r.offenders.empty();
  return r;
}

void print_report(std::ostream& os, const CompareReport& report,
                  const std::vector<CurvePoint>& points, double tolerance) {
  for (const auto& p : points) {
    char line[160];
    std::snprintf(line, sizeof line,
                  "  2theta1 = %6.2f deg   v_sim = %.6f   v_oracle = %.6f   |dev| = %.6f%s",
                  p.two_theta1_deg, p.v_sim, p.v_oracle, p.abs_dev,
                  p.abs_dev > tolerance ? "  <-- exceeds tolerance" : "");
    os << line << '\n';
  }
  char summary[160];
  std::snprintf(summary, sizeof summary,
                "max |dev| = %.6f   mean |dev| = %.6f   tolerance = %g   -> %s",
                report.max_abs_dev, report.mean_abs_dev, tolerance,
                report.pass ? "PASS" : "FAIL");
  os << summary << '\n';
}

std::vector<CurveRow> read_curve_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) {
    throw std::runtime_error("cannot read '" + path.string() + "'");
  }
  std::string line;
  if (!std::getline(is, line) || line != "two_theta1_deg,v_sim,v_oracle,abs_dev") {
    throw std::runtime_error("'" + path.string() + "' is not a curve file");
  }
  std::vector<CurveRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    CurveRow row;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &row.two_theta1_deg, &row.v_sim,
                    &row.v_oracle, &row.abs_dev) != 4) {
      throw std::runtime_error("malformed row in '" + path.string() + "': " + line);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qeraser
