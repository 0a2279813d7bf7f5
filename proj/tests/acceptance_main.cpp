// Acceptance suite: end-to-end checks of the event simulation against the
// wave-theory reference, one pass/fail line per criterion. Runs single
// threaded in well under ten minutes.

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qeraser/harness.h"

using namespace qeraser;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion,
              what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

// One curve at 1e6 events per phase setting (32e6 per curve point), the
// protocol behind the published reference curves.
double sweep_max_dev(Preset preset, std::uint64_t seed, double theta0_override = -1.0) {
  SweepSpec spec = SweepSpec::for_preset(preset);
  if (theta0_override >= 0.0) spec.theta0_deg = theta0_override;
  spec.events_per_point = 1'000'000 * spec.phi_grid_deg.size();
  spec.seed = seed;
  const auto points = run_sweep(spec);
  return compare_report(points, spec.tolerance).max_abs_dev;
}

void criterion1_bare_mzi() {
  const auto points = run_mzi(1'000'000, 32, 0.99, 11);
  double max_dev = 0.0;
  double dev_at_zero = 1.0;
  for (const auto& p : points) {
    max_dev = std::max(max_dev, p.abs_dev);
    if (p.phi_deg == 0.0) dev_at_zero = p.f0;  // p0 = 0 there: f0 is the miss rate
  }
  report(1, max_dev <= 0.01 && dev_at_zero <= 0.01,
         "bare interferometer frequencies vs closed form",
         fmt("max |N0/N - sin^2(phi/2)| = %.5f over 32 phases at 1e6 events, "
             "N0/N at phi=0 = %.5f",
             max_dev, dev_at_zero));
}

void criterion2_pure_no_qwp() {
  const double dev45 = sweep_max_dev(Preset::kFig3aPureV45, 21);
  const double dev10 = sweep_max_dev(Preset::kFig3aPureV10, 22);
  const bool spots = std::abs(visibility_pure_no_qwp(90, 45, 22.5) - 1.0) <= 1e-12 &&
                     std::abs(visibility_pure_no_qwp(90, 45, 0)) <= 1e-12 &&
                     std::abs(visibility_pure_no_qwp(90, 10, 0) - 0.9981) <= 1e-4;
  report(2, dev45 <= 0.03 && dev10 <= 0.03 && spots,
         "pure V curves without QWP (theta0 = 45 and 10 deg), 1e6 events per phase",
         fmt("max dev %.4f and %.4f vs 0.03; reference spot values ok", dev45, dev10));
}

void criterion3_mixed_no_qwp() {
  const double dev_full = sweep_max_dev(Preset::kFig3bMixed, 23);
  const double dev_part = sweep_max_dev(Preset::kFig3cPartial, 24);
  const double beta = rad_to_deg(std::atan(std::sqrt(2.0)));
  const bool spot = std::abs(visibility_mixed(beta, 22.5, 0) - 0.8081) <= 1e-4;
  report(3, dev_full <= 0.03 && dev_part <= 0.03 && spot,
         "mixed-state curves without QWP (complete and partial mixtures)",
         fmt("max dev %.4f and %.4f vs 0.03; reference spot value ok", dev_full, dev_part));
}

void criterion4_qwp() {
  const double dev45 = sweep_max_dev(Preset::kFig4aQwp, 25);
  const double dev10 = sweep_max_dev(Preset::kFig4aQwp, 26, 10.0);
  const double dev_xi45 = sweep_max_dev(Preset::kFig4bQwpXi45, 27);
  const bool spots = std::abs(visibility_pure_qwp0(90, 45, 22.5) - 1.0) <= 1e-12 &&
                     std::abs(visibility_pure_qwp0(90, 45, 0)) <= 1e-12 &&
                     std::abs(visibility_pure_qwp0(45, 22.5, 0)) <= 1e-12;
  report(4, dev45 <= 0.03 && dev10 <= 0.03 && dev_xi45 <= 0.03 && spots,
         "pure-state curves with the QWP at 0 deg",
         fmt("max dev %.4f, %.4f, %.4f vs 0.03; reference spot values ok", dev45, dev10,
             dev_xi45));
}

void criterion5_oracle_consistency() {
  Prng rng(5501);
  const std::vector<double> grid = uniform_phi_grid(32);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double xi = 90.0 * rng.uniform01();
    const double t0 = 90.0 * rng.uniform01();
    const double t1 = 90.0 * rng.uniform01();
    EraserSettings s;
    s.theta_hwp0_deg = t0;
    s.theta_hwp1_deg = t1;
    worst = std::max(worst, std::abs(sweep_visibility(MixedInput::pure(xi), s, grid).value -
                                     visibility_pure_no_qwp(xi, t0, t1)));
    s.theta_qwp_deg = 0.0;
    worst = std::max(worst, std::abs(sweep_visibility(MixedInput::pure(xi), s, grid).value -
                                     visibility_pure_qwp0(xi, t0, t1)));
    s.theta_qwp_deg.reset();
    const double beta = 89.0 * rng.uniform01();
    const double pv = std::pow(std::sin(deg_to_rad(beta)), 2);
    worst = std::max(worst,
                     std::abs(sweep_visibility(MixedInput::linear_vh(pv, 1.0 - pv), s, grid)
                                  .value -
                              visibility_mixed(beta, t0, t1)));
  }

  // unitarity of every component, probed through orthonormal images
  double defect = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const double theta = 360.0 * rng.uniform01() - 180.0;
    auto probe = [&](auto&& apply) {
      std::complex<double> dots[4][4];
      OracleState img[4];
      for (int k = 0; k < 4; ++k) {
        OracleState e;
        e.a[static_cast<std::size_t>(k)] = 1.0;
        img[k] = apply(e);
      }
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          dots[i][j] = 0.0;
          for (int k = 0; k < 4; ++k) {
            dots[i][j] += std::conj(img[i].a[static_cast<std::size_t>(k)]) *
                          img[j].a[static_cast<std::size_t>(k)];
          }
          const std::complex<double> want = (i == j) ? 1.0 : 0.0;
          defect = std::max(defect, std::abs(dots[i][j] - want));
        }
      }
    };
    probe([](const OracleState& s) { return apply_bs(s); });
    probe([](const OracleState& s) { return apply_pbs(s); });
    probe([&](const OracleState& s) { return apply_hwp(s, theta, 0); });
    probe([&](const OracleState& s) { return apply_hwp(s, theta, 1); });
    probe([&](const OracleState& s) { return apply_qwp(s, theta, 1); });
    probe([&](const OracleState& s) { return apply_phase(s, 2.0 * theta, 1); });
  }

  report(5, worst <= 1e-9 && defect <= 1e-12,
         "pipeline sweep equals each closed form; components unitary",
         fmt("max formula gap %.2e over 300 random cases; max unitarity defect %.2e",
             worst, defect));
}

void criterion6_unit_properties() {
  Prng rng(6601);
  double bs_gap = 0.0;
  double pbs_gap = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    DlmState s = dlm_init(0.99);
    const double x0 = rng.uniform01();
    s.x = {x0, 1.0 - x0};
    for (int k = 0; k < 2; ++k) {
      s.reg_h[k] = UnitVec2::from_radians(2.0 * kPi * rng.uniform01());
      s.reg_v[k] = UnitVec2::from_radians(2.0 * kPi * rng.uniform01());
      s.reg_p[k] = UnitVec2::from_radians(0.5 * kPi * rng.uniform01());
    }
    const SplitterOutputs bs = bs_transform(s);
    bs_gap = std::max(bs_gap, std::abs(bs.weight0 + bs.weight1 - 2.0));
    const SplitterOutputs pbs = pbs_transform(s);
    pbs_gap = std::max(pbs_gap, std::abs(pbs.weight0 + pbs.weight1 - 1.0));
  }

  double geom_gap = 0.0;
  {
    DlmState s = dlm_init(0.99);
    const Message m = emit_pure(45.0, 0.0);
    for (int l = 1; l <= 2000; ++l) {
      dlm_update(s, 0, m);
      geom_gap = std::max(geom_gap, std::abs(s.x[0] - (1.0 - 0.5 * std::pow(0.99, l))));
    }
  }

  double periodic_gap = 0.0;
  {
    const int pattern[5] = {0, 1, 1, 0, 1};
    DlmState s = dlm_init(0.99);
    const Message m = emit_pure(45.0, 0.0);
    for (int cycle = 0; cycle < 4000; ++cycle) {
      for (const int ch : pattern) dlm_update(s, ch, m);
    }
    periodic_gap = std::abs(s.x[0] - 2.0 / 5.0);
  }

  double hwp_gap = 0.0;
  double norm_gap = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    Message m;
    m.pol = UnitVec2::from_radians(0.5 * kPi * rng.uniform01());
    m.phase_h = UnitVec2::from_radians(2.0 * kPi * rng.uniform01());
    m.phase_v = UnitVec2::from_radians(2.0 * kPi * rng.uniform01());
    const double theta = 360.0 * rng.uniform01();
    const Message twice = hwp_apply(hwp_apply(m, {theta}), {theta});
    hwp_gap = std::max({hwp_gap, std::abs(twice.phase_h.c + m.phase_h.c),
                        std::abs(twice.phase_h.s + m.phase_h.s),
                        std::abs(twice.phase_v.c + m.phase_v.c),
                        std::abs(twice.phase_v.s + m.phase_v.s),
                        std::abs(twice.pol.c - m.pol.c), std::abs(twice.pol.s - m.pol.s)});
    const double before = std::norm(amp_h(m)) + std::norm(amp_v(m));
    for (const Message& out : {hwp_apply(m, {theta}), qwp_apply(m, {theta})}) {
      norm_gap = std::max(norm_gap,
                          std::abs(std::norm(amp_h(out)) + std::norm(amp_v(out)) - before));
    }
  }

  const bool pass = bs_gap <= 1e-9 && pbs_gap <= 1e-9 && geom_gap <= 1e-12 &&
                    periodic_gap <= 2.0 * (1.0 - 0.99) && hwp_gap <= 1e-12 &&
                    norm_gap <= 1e-12;
  std::ostringstream detail;
  detail << "splitter weight sums off by " << fmt("%.2e/%.2e", bs_gap, pbs_gap)
         << "; geometric gap " << fmt("%.2e", geom_gap) << "; periodic gap "
         << fmt("%.4f vs 0.02", periodic_gap) << "; double-HWP gap " << fmt("%.2e", hwp_gap)
         << "; waveplate norm gap " << fmt("%.2e", norm_gap);
  report(6, pass, "unit-level invariants", detail.str());
}

void criterion7_determinism() {
  namespace fs = std::filesystem;
  SweepSpec spec = SweepSpec::for_preset(Preset::kFig3bMixed);
  spec.two_theta1_grid_deg = {0.0, 25.0, 50.0};
  spec.phi_grid_deg = uniform_phi_grid(16);
  spec.events_per_point = 160'000;
  spec.seed = 707;
  spec.record_events = true;

  auto slurp = [](const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
  };
  const fs::path base = fs::temp_directory_path() / "qeraser_acceptance";
  fs::remove_all(base);
  std::vector<std::string> curves;
  std::vector<std::string> events_csv;
  std::vector<std::string> events_bin;
  std::vector<std::string> manifests;
  for (int run = 0; run < 2; ++run) {
    const fs::path dir = base / ("run" + std::to_string(run));
    fs::create_directories(dir);
    OutputPaths paths;
    paths.curve = dir / "curve.csv";
    paths.manifest = dir / "manifest.json";
    paths.events_csv = dir / "events.csv";
    paths.events_bin = dir / "events.bin";
    write_outputs(run_sweep(spec), spec, paths);
    curves.push_back(slurp(paths.curve));
    events_csv.push_back(slurp(*paths.events_csv));
    events_bin.push_back(slurp(*paths.events_bin));
    manifests.push_back(slurp(paths.manifest));
  }
  const bool same = curves[0] == curves[1] && events_csv[0] == events_csv[1] &&
                    events_bin[0] == events_bin[1] && manifests[0] == manifests[1];
  const bool nonempty = !curves[0].empty() && !events_bin[0].empty();
  report(7, same && nonempty, "identical manifests give byte-identical outputs",
         fmt("curve %.0f bytes, binary events %.0f bytes, reruns ",
             static_cast<double>(curves[0].size()),
             static_cast<double>(events_bin[0].size())) +
             (same ? "identical" : "DIFFER"));
}

}  // namespace

int main() {
  std::printf("acceptance suite, %s\n", std::string(kVersion).c_str());
  criterion1_bare_mzi();
  criterion2_pure_no_qwp();
  criterion3_mixed_no_qwp();
  criterion4_qwp();
  criterion5_oracle_consistency();
  criterion6_unit_properties();
  criterion7_determinism();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
