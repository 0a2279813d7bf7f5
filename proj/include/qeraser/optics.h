#pragma once

#include <complex>
#include <cstdint>

#include "qeraser/dlm.h"
#include "qeraser/message.h"
#include "qeraser/rng.h"

namespace qeraser {

struct UnitOutcome {
  int channel = 0;
  Message message;
};

struct WaveplateSetting {
  double theta_deg = 0.0;  // optical axis vs laboratory frame, mod 180
};

struct PhaseSetting {
  double phi_deg = 0.0;  // relative path phase, mod 360
};

// Raw transformed components per output channel, H cos/sin then V cos/sin,
// with the squared channel weights. For unit inputs weight0 + weight1 is 2
// for the BS and 1 for the PBS.
struct SplitterComponents {
  std::array<double, 4> out0{};
  std::array<double, 4> out1{};
  double weight0 = 0.0;
  double weight1 = 0.0;
};

SplitterComponents bs_components(const DlmState& state);
SplitterComponents pbs_components(const DlmState& state);

// Normalizes one channel's components into the outgoing message.
Message assemble_output(const std::array<double, 4>& c);

// Candidate outputs of a splitter's transformation stage: the normalized
// message for each output channel plus the squared channel weights.
struct SplitterOutputs {
  Message out0;
  Message out1;
  double weight0 = 0.0;
  double weight1 = 0.0;
};

SplitterOutputs bs_transform(const DlmState& state);
SplitterOutputs pbs_transform(const DlmState& state);

// Full three-stage units: DLM update, transformation, stochastic output.
// The BS emits on channel 0 iff weight0 > 2r; the PBS normalizes the weights,
// emitting on channel 0 iff weight0 > (weight0 + weight1) r.
UnitOutcome bs_process(DlmState& state, int channel, const Message& msg, Prng& rng);
UnitOutcome pbs_process(DlmState& state, int channel, const Message& msg, Prng& rng);

// Complex view of a message: (aH, aV) = (cos xi e^{i psiH}, sin xi e^{i psiV}).
std::complex<double> amp_h(const Message& m);
std::complex<double> amp_v(const Message& m);

// Re-encodes complex amplitudes as a message; zero-modulus components get a
// (1, 0) clock and the polarization pair is normalized.
Message message_from_amplitudes(std::complex<double> ah, std::complex<double> av);

// Waveplates act on the complex pair and re-encode. On factorable inputs this
// reduces to plane rotations of the clock and polarization pairs.
Message hwp_apply(const Message& m, WaveplateSetting w);
Message qwp_apply(const Message& m, WaveplateSetting w);

// Rotates both phase clocks by phi; polarization unchanged.
Message phase_apply(const Message& m, PhaseSetting p);

// Precomputed-angle variants used by the event loop: axis = (cos 2theta,
// sin 2theta) for waveplates, rotation = (cos phi, sin phi) for the shifter.
Message hwp_apply_axis(const Message& m, const UnitVec2& axis);
Message qwp_apply_axis(const Message& m, const UnitVec2& axis);
Message phase_apply_rotation(const Message& m, const UnitVec2& rotation);

struct DetectorCounter {
  std::uint64_t count = 0;
};

// Ideal detector: every arriving messenger is registered.
inline void detect(DetectorCounter& d, const Message&) { ++d.count; }

}  // namespace qeraser
