#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qeraser/message.h"
#include "qeraser/optics.h"
#include "qeraser/settings.h"

namespace qeraser {

enum class UnitKind : std::uint8_t {
  kBeamSplitter,
  kPolarizingBeamSplitter,
  kHalfWavePlate,
  kQuarterWavePlate,
  kPhaseShifter,
  kDetector,
  kDiscard,
};

// Detectors and the discard port terminate routing; everything else processes.
bool is_terminal(UnitKind kind);
int in_port_count(UnitKind kind);
int out_port_count(UnitKind kind);

struct UnitSpec {
  std::string id;
  UnitKind kind = UnitKind::kBeamSplitter;
  double setting_deg = 0.0;  // waveplate axis or phase shift
  int detector_index = -1;   // 0 or 1 for kDetector
};

struct PortRef {
  int unit = -1;
  int port = 0;

  auto operator<=>(const PortRef&) const = default;
};

// Directed wiring of processing units. Exactly one messenger is in flight at
// any time; units only ever see their own state and the arriving message.
struct Topology {
  std::vector<UnitSpec> units;
  std::map<PortRef, PortRef> edges;  // (unit, out port) -> (unit, in port)
  PortRef entry;                     // input port fed by the source

  int processing_unit_count() const;

  // Checks port ranges, single use of out-ports, termination of every path in
  // a detector or discard port, acyclicity, and detector reachability.
  void validate() const;
};

enum class OutputPolicy : std::uint8_t {
  kRandom,      // uniform pseudo-random channel selection
  kRoundRobin,  // deterministic weight accumulator
};

struct RunConfig {
  std::uint64_t total_events = 1;
  double gamma = 0.99;
  std::uint64_t seed = 1;
  SourceSpec source;
  EraserSettings eraser;
  BareMziSettings mzi;
  OutputPolicy policy = OutputPolicy::kRandom;
  std::uint64_t warmup_events = 0;  // processed but excluded from the dataset

  void validate() const;
};

// Source -> BS1; Path0 through HWP0, Path1 through the phase shifter; BS2's
// analyzed output through [QWP ->] HWP1 into the PBS, whose outputs feed D0
// (V side) and D1 (H side); the other interferometer output is discarded.
Topology build_eraser(const RunConfig& cfg);

// Source -> BS1 -> per-path phase shifters -> BS2 -> D0/D1.
Topology build_bare_mzi(const RunConfig& cfg);

// Presets addressable by name: "eraser", "bare-mzi".
Topology build_preset(std::string_view name, const RunConfig& cfg);

enum class EventOutcome : std::uint8_t {
  kDetector0 = 0,
  kDetector1 = 1,
  kDiscarded = 2,
};

struct EventDataset {
  RunConfig config;
  std::vector<EventOutcome> outcomes;  // emission order, after warm-up
  std::uint64_t n0 = 0;
  std::uint64_t n1 = 0;
  std::uint64_t n_discarded = 0;
  GroupSchedule source_schedule;
};

// Emits cfg.total_events messengers one at a time and routes each through the
// network until it reaches a detector or the discard port. Deterministic for
// a fixed (topology, cfg, seed).
EventDataset run_events(const Topology& topology, const RunConfig& cfg);

}  // namespace qeraser
