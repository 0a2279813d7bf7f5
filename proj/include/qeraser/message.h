#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "qeraser/angles.h"
#include "qeraser/rng.h"

namespace qeraser {

// State carried by one messenger: a phase clock per polarization component
// plus the polarization pair (cos xi, sin xi). All three are unit vectors.
struct Message {
  UnitVec2 phase_h;
  UnitVec2 phase_v;
  UnitVec2 pol;
};

// Largest deviation of the three pairs from unit norm.
double max_norm_error(const Message& m);
bool is_unit_message(const Message& m, double tol = 1e-12);

enum class StateLabel : std::uint8_t { kV = 0, kH = 1 };

struct PureLinear {
  double xi_deg = 90.0;
};

// V/H mixture emitted in runs of n_v or n_h identical messengers.
struct MixedVH {
  double p_v = 0.5;
  double p_h = 0.5;
  std::uint32_t n_v = 200;
  std::uint32_t n_h = 200;
};

struct SourceSpec {
  std::variant<PureLinear, MixedVH> kind = PureLinear{};
  double psi0_deg = 0.0;

  bool mixed() const { return std::holds_alternative<MixedVH>(kind); }
  void validate() const;  // throws std::invalid_argument
};

// A linearly polarized messenger with both clocks set to psi0. A clock whose
// polarization weight is exactly zero is stored as (1, 0).
Message emit_pure(double xi_deg, double psi0_deg);

// Picks the label of the next group: V with probability p_v.
StateLabel next_group_label(const MixedVH& spec, Prng& rng);

struct Group {
  StateLabel label = StateLabel::kV;
  std::uint64_t length = 0;
};
using GroupSchedule = std::vector<Group>;

// Emits messengers one at a time. A pure source repeats one message; a mixed
// source emits groups of n_v or n_h identical pure messengers, drawing a new
// label per group. The final group is truncated when the caller stops early.
class PhotonSource {
 public:
  explicit PhotonSource(SourceSpec spec);

  Message next(Prng& rng);

  // Groups emitted so far, in order, with actual emitted lengths.
  const GroupSchedule& schedule() const { return schedule_; }

 private:
  SourceSpec spec_;
  Message pure_v_;
  Message pure_h_;
  GroupSchedule schedule_;
  std::uint64_t remaining_ = 0;
  StateLabel current_ = StateLabel::kV;
};

}  // namespace qeraser
