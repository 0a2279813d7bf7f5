#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "qeraser/settings.h"

namespace qeraser {

// Four path/polarization amplitudes (a0H, a0V, a1H, a1V): the exact
// wave-theory description the event simulation is checked against.
struct OracleState {
  std::array<std::complex<double>, 4> a{};

  double norm2() const;
};

// (cos xi, sin xi, 0, 0): linear polarization entering on Path0.
OracleState pure_linear_input(double xi_deg);

OracleState apply_bs(const OracleState& s);
OracleState apply_pbs(const OracleState& s);
OracleState apply_hwp(const OracleState& s, double theta_deg, int path);
OracleState apply_qwp(const OracleState& s, double theta_deg, int path);
OracleState apply_phase(const OracleState& s, double phi_deg, int path = 1);

// Component tags of the standard eraser pipeline: HWP0 acts on Path0, HWP1
// and the QWP on Path1, the phase shifter on Path1.
enum class ComponentKind : std::uint8_t { kBs, kPbs, kHwp0, kHwp1, kQwp, kPhase1 };

struct Component {
  ComponentKind kind = ComponentKind::kBs;
  double angle_deg = 0.0;
};

OracleState apply_component(const OracleState& s, const Component& c);

// BS -> HWP0 -> phase -> BS -> [QWP] -> HWP1 -> PBS, with the analysis chain
// acting on the configured interferometer output.
OracleState eraser_pipeline(const OracleState& input, const EraserSettings& s);

struct DetectorProbs {
  double p_d0 = 0.0;
  double p_d1 = 0.0;
  double p_discard = 0.0;
};

// D0 reads the V output of the analysis PBS, D1 the H output; the remaining
// weight leaves through the unanalyzed interferometer output.
DetectorProbs detector_probs(const OracleState& after_pbs, int analyzed_port);
DetectorProbs eraser_probs(const OracleState& input, const EraserSettings& s);

struct MziProbs {
  double p0 = 0.0;
  double p1 = 0.0;
};

// Detector probabilities of the bare interferometer, evaluated through the
// 2x2 matrix product; equals (sin^2, cos^2) of half the phase difference.
MziProbs mzi_probs(double phi0_deg, double phi1_deg);

// Closed-form D0 fringe visibilities. All angles in degrees; 0/0 cases
// (no light reaching D0 for any phase) evaluate to 0.
double visibility_pure_no_qwp(double xi_deg, double theta0_deg, double theta1_deg);
// Mixture with p_v/p_h = tan^2(beta). Throws for beta outside [0, 90).
double visibility_mixed(double beta_deg, double theta0_deg, double theta1_deg);
// QWP present at 0 degrees, pure input of polarization xi.
double visibility_pure_qwp0(double xi_deg, double theta0_deg, double theta1_deg);

// Convex mixture of pure input states.
struct MixedComponent {
  OracleState state;
  double weight = 1.0;
};

struct MixedInput {
  std::vector<MixedComponent> components;

  static MixedInput pure(double xi_deg);
  static MixedInput linear_vh(double p_v, double p_h);
  void validate() const;  // weights nonnegative, sum to 1
};

struct Visibility {
  double value = 0.0;
  bool degenerate = false;  // no flux reached D0 at any phase
};

// P(phi) = mean + a sin(phi) + b cos(phi). The pipeline produces exactly one
// harmonic in phi, so a least-squares fit through the grid samples recovers
// the continuum extremes.
struct FringeFit {
  double mean = 0.0;
  double sin_coeff = 0.0;
  double cos_coeff = 0.0;

  double amplitude() const;
  double maximum() const { return mean + amplitude(); }
  double minimum() const { return mean - amplitude(); }
};

FringeFit fit_fringe(std::span<const double> phi_deg, std::span<const double> values);

// Mixture-weighted P_D0 at each grid phase.
std::vector<double> detector0_curve(const MixedInput& input, const EraserSettings& s,
                                    std::span<const double> phi_grid_deg);

// Visibility of the D0 fringe over the grid (at least 8 points covering a
// full period); extremes are taken from the fitted harmonic.
Visibility sweep_visibility(const MixedInput& input, const EraserSettings& s,
                            std::span<const double> phi_grid_deg);

}  // namespace qeraser
