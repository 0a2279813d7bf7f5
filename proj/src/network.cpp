#include "qeraser/network.h"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace qeraser {

namespace {

// substream tags under a run's master seed
constexpr std::uint64_t kSourceStream = 1;
constexpr std::uint64_t kUnitStreamBase = 16;

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string("network: ") + what + " must be finite");
  }
}

}  // namespace

bool is_terminal(UnitKind kind) {
  return kind == UnitKind::kDetector || kind == UnitKind::kDiscard;
}

int in_port_count(UnitKind kind) {
  switch (kind) {
    case UnitKind::kBeamSplitter:
    case UnitKind::kPolarizingBeamSplitter:
      return 2;
    default:
      return 1;
  }
}

int out_port_count(UnitKind kind) {
  switch (kind) {
    case UnitKind::kBeamSplitter:
    case UnitKind::kPolarizingBeamSplitter:
      return 2;
    case UnitKind::kDetector:
    case UnitKind::kDiscard:
      return 0;
    default:
      return 1;
  }
}

int Topology::processing_unit_count() const {
  int n = 0;
  for (const auto& u : units) {
    if (!is_terminal(u.kind)) ++n;
  }
  return n;
}

void Topology::validate() const {
  if (units.empty()) {
    throw std::invalid_argument("topology: no units");
  }
  auto check_port = [&](const PortRef& p, bool is_out, const char* role) {
    if (p.unit < 0 || p.unit >= static_cast<int>(units.size())) {
      throw std::invalid_argument(std::string("topology: ") + role + " references unknown unit");
    }
    const int limit = is_out ? out_port_count(units[p.unit].kind)
                             : in_port_count(units[p.unit].kind);
    if (p.port < 0 || p.port >= limit) {
      throw std::invalid_argument(std::string("topology: ") + role + " port out of range on '" +
                                  units[p.unit].id + "'");
    }
  };
  check_port(entry, false, "entry");
  for (const auto& [from, to] : edges) {
    check_port(from, true, "edge source");
    check_port(to, false, "edge target");
  }
  for (std::size_t i = 0; i < units.size(); ++i) {
    const auto& u = units[i];
    if (u.kind == UnitKind::kDetector && u.detector_index != 0 && u.detector_index != 1) {
      throw std::invalid_argument("topology: detector '" + u.id + "' needs index 0 or 1");
    }
    check_finite(u.setting_deg, "unit setting");
  }

  // walk unit-level reachability; every out-port of a reachable processing
  // unit must be wired, and no cycle may be reachable from the entry
  std::vector<int> color(units.size(), 0);  // 0 new, 1 on stack, 2 done
  bool found_detector = false;
  auto dfs = [&](auto&& self, int unit) -> void {
    color[unit] = 1;
    const auto& u = units[static_cast<std::size_t>(unit)];
    if (u.kind == UnitKind::kDetector) found_detector = true;
    for (int port = 0; port < out_port_count(u.kind); ++port) {
      const auto it = edges.find(PortRef{unit, port});
      if (it == edges.end()) {
        throw std::invalid_argument("topology: unwired output port " + std::to_string(port) +
                                    " on '" + u.id + "'");
      }
      const int next = it->second.unit;
      if (color[next] == 1) {
        throw std::invalid_argument("topology: cycle through '" + units[next].id + "'");
      }
      if (color[next] == 0) self(self, next);
    }
    color[unit] = 2;
  };
  dfs(dfs, entry.unit);
  if (!found_detector) {
    throw std::invalid_argument("topology: no detector reachable from the source");
  }
}

void RunConfig::validate() const {
  if (total_events < 1) {
    throw std::invalid_argument("run: total_events must be at least 1");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("run: gamma must lie in (0, 1)");
  }
  if (warmup_events >= total_events) {
    throw std::invalid_argument("run: warm-up must leave at least one recorded event");
  }
  source.validate();
}

namespace {

int add_unit(Topology& t, std::string id, UnitKind kind, double setting = 0.0,
             int detector_index = -1) {
  t.units.push_back({std::move(id), kind, setting, detector_index});
  return static_cast<int>(t.units.size()) - 1;
}

void add_edge(Topology& t, int from_unit, int from_port, int to_unit, int to_port) {
  t.edges[PortRef{from_unit, from_port}] = PortRef{to_unit, to_port};
}

}  // namespace

Topology build_eraser(const RunConfig& cfg) {
  const EraserSettings& s = cfg.eraser;
  if (s.analyzed_port != 0 && s.analyzed_port != 1) {
    throw std::invalid_argument("eraser: analyzed port must be 0 or 1");
  }
  check_finite(s.phi_deg, "phi");
  check_finite(s.theta_hwp0_deg, "theta_hwp0");
  check_finite(s.theta_hwp1_deg, "theta_hwp1");
  if (s.theta_qwp_deg) check_finite(*s.theta_qwp_deg, "theta_qwp");

  Topology t;
  const int bs1 = add_unit(t, "BS1", UnitKind::kBeamSplitter);
  const int hwp0 = add_unit(t, "HWP0", UnitKind::kHalfWavePlate, s.theta_hwp0_deg);
  const int phase = add_unit(t, "phase", UnitKind::kPhaseShifter, s.phi_deg);
  const int bs2 = add_unit(t, "BS2", UnitKind::kBeamSplitter);
  const int qwp = s.theta_qwp_deg
                      ? add_unit(t, "QWP", UnitKind::kQuarterWavePlate, *s.theta_qwp_deg)
                      : -1;
  const int hwp1 = add_unit(t, "HWP1", UnitKind::kHalfWavePlate, s.theta_hwp1_deg);
  const int pbs = add_unit(t, "PBS", UnitKind::kPolarizingBeamSplitter);
  const int d0 = add_unit(t, "D0", UnitKind::kDetector, 0.0, 0);
  const int d1 = add_unit(t, "D1", UnitKind::kDetector, 0.0, 1);
  const int discard = add_unit(t, "discard", UnitKind::kDiscard);

  t.entry = PortRef{bs1, 0};
  add_edge(t, bs1, 0, hwp0, 0);
  add_edge(t, hwp0, 0, bs2, 0);
  add_edge(t, bs1, 1, phase, 0);
  add_edge(t, phase, 0, bs2, 1);

  const int head = (qwp >= 0) ? qwp : hwp1;
  add_edge(t, bs2, s.analyzed_port, head, 0);
  add_edge(t, bs2, 1 - s.analyzed_port, discard, 0);
  if (qwp >= 0) add_edge(t, qwp, 0, hwp1, 0);
  // the analysis beam enters the PBS on channel 1: V reflects to D0, H
  // passes straight through to D1
  add_edge(t, hwp1, 0, pbs, 1);
  add_edge(t, pbs, 0, d0, 0);
  add_edge(t, pbs, 1, d1, 0);
  t.validate();
  return t;
}

Topology build_bare_mzi(const RunConfig& cfg) {
  check_finite(cfg.mzi.phi0_deg, "phi0");
  check_finite(cfg.mzi.phi1_deg, "phi1");
  Topology t;
  const int bs1 = add_unit(t, "BS1", UnitKind::kBeamSplitter);
  const int p0 = add_unit(t, "phase0", UnitKind::kPhaseShifter, cfg.mzi.phi0_deg);
  const int p1 = add_unit(t, "phase1", UnitKind::kPhaseShifter, cfg.mzi.phi1_deg);
  const int bs2 = add_unit(t, "BS2", UnitKind::kBeamSplitter);
  const int d0 = add_unit(t, "D0", UnitKind::kDetector, 0.0, 0);
  const int d1 = add_unit(t, "D1", UnitKind::kDetector, 0.0, 1);
  t.entry = PortRef{bs1, 0};
  add_edge(t, bs1, 0, p0, 0);
  add_edge(t, p0, 0, bs2, 0);
  add_edge(t, bs1, 1, p1, 0);
  add_edge(t, p1, 0, bs2, 1);
  add_edge(t, bs2, 0, d0, 0);
  add_edge(t, bs2, 1, d1, 0);
  t.validate();
  return t;
}

Topology build_preset(std::string_view name, const RunConfig& cfg) {
  if (name == "eraser") return build_eraser(cfg);
  if (name == "bare-mzi") return build_bare_mzi(cfg);
  throw std::invalid_argument("unknown topology preset '" + std::string(name) + "'");
}

namespace {

// Mutable per-unit state of one run: adaptive units own a DLM, an RNG stream
// and the residual of the deterministic output policy.
struct AdaptiveUnit {
  DlmState dlm;
  Prng rng;
  double residual = 0.5;
};

int select_channel(const SplitterComponents& t, bool paper_bs_rule, OutputPolicy policy,
                   AdaptiveUnit& unit) {
  if (policy == OutputPolicy::kRandom) {
    const double threshold = paper_bs_rule ? 2.0 : t.weight0 + t.weight1;
    return (t.weight0 > threshold * unit.rng.uniform01()) ? 0 : 1;
  }
  // weight accumulator: channel-0 frequency converges to its weight share
  const double total = t.weight0 + t.weight1;
  const double p0 = (total > 0.0) ? t.weight0 / total : 0.0;
  unit.residual += p0;
  if (unit.residual >= 1.0) {
    unit.residual -= 1.0;
    return 0;
  }
  return 1;
}

}  // namespace

EventDataset run_events(const Topology& topology, const RunConfig& cfg) {
  cfg.validate();
  topology.validate();

  const std::size_t n_units = topology.units.size();
  std::vector<std::optional<AdaptiveUnit>> adaptive(n_units);
  std::vector<UnitVec2> trig(n_units);  // waveplate axis doubled / shifter rotation
  for (std::size_t i = 0; i < n_units; ++i) {
    const UnitSpec& u = topology.units[i];
    switch (u.kind) {
      case UnitKind::kBeamSplitter:
      case UnitKind::kPolarizingBeamSplitter:
        adaptive[i].emplace(AdaptiveUnit{
            dlm_init(cfg.gamma), Prng(derive_seed(cfg.seed, kUnitStreamBase + i)), 0.5});
        break;
      case UnitKind::kHalfWavePlate:
      case UnitKind::kQuarterWavePlate:
        trig[i] = UnitVec2::from_radians(deg_to_rad(2.0 * u.setting_deg));
        break;
      case UnitKind::kPhaseShifter:
        trig[i] = UnitVec2::from_radians(deg_to_rad(u.setting_deg));
        break;
      default:
        break;
    }
  }
  // flat routing table; targets are validated, so misses cannot occur mid-run
  std::vector<std::array<PortRef, 2>> route(n_units, {PortRef{-1, 0}, PortRef{-1, 0}});
  for (const auto& [from, to] : topology.edges) {
    route[static_cast<std::size_t>(from.unit)][static_cast<std::size_t>(from.port)] = to;
  }

  Prng source_rng(derive_seed(cfg.seed, kSourceStream));
  PhotonSource source(cfg.source);

  EventDataset ds;
  ds.config = cfg;
  ds.outcomes.reserve(cfg.total_events - cfg.warmup_events);

  for (std::uint64_t l = 1; l <= cfg.total_events; ++l) {
    Message msg = source.next(source_rng);
    PortRef at = topology.entry;
    EventOutcome outcome{};
    for (;;) {
      const std::size_t unit = static_cast<std::size_t>(at.unit);
      const UnitSpec& u = topology.units[unit];
      int out_port = 0;
      bool done = false;
      switch (u.kind) {
        case UnitKind::kDetector:
          outcome = (u.detector_index == 0) ? EventOutcome::kDetector0
                                            : EventOutcome::kDetector1;
          done = true;
          break;
        case UnitKind::kDiscard:
          outcome = EventOutcome::kDiscarded;
          done = true;
          break;
        case UnitKind::kBeamSplitter:
        case UnitKind::kPolarizingBeamSplitter: {
          AdaptiveUnit& a = *adaptive[unit];
          dlm_update(a.dlm, at.port, msg);
          const bool is_bs = (u.kind == UnitKind::kBeamSplitter);
          const SplitterComponents t = is_bs ? bs_components(a.dlm) : pbs_components(a.dlm);
          out_port = select_channel(t, is_bs, cfg.policy, a);
          msg = assemble_output(out_port == 0 ? t.out0 : t.out1);
          break;
        }
        case UnitKind::kHalfWavePlate:
          msg = hwp_apply_axis(msg, trig[unit]);
          break;
        case UnitKind::kQuarterWavePlate:
          msg = qwp_apply_axis(msg, trig[unit]);
          break;
        case UnitKind::kPhaseShifter:
          msg = phase_apply_rotation(msg, trig[unit]);
          break;
      }
      if (done) break;
      at = route[unit][static_cast<std::size_t>(out_port)];
    }
    if (l <= cfg.warmup_events) continue;
    ds.outcomes.push_back(outcome);
    switch (outcome) {
      case EventOutcome::kDetector0: ++ds.n0; break;
      case EventOutcome::kDetector1: ++ds.n1; break;
      case EventOutcome::kDiscarded: ++ds.n_discarded; break;
    }
  }
  ds.source_schedule = source.schedule();
  return ds;
}

}  // namespace qeraser
