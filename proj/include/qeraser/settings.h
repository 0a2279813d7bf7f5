#pragma once

#include <optional>

namespace qeraser {

// Apparatus settings of the eraser setup. The analysis chain (optional QWP,
// then HWP1, then the PBS with detectors D0/D1) sits on one interferometer
// output; the other output is discarded.
struct EraserSettings {
  double phi_deg = 0.0;             // phase shift in Path1
  double theta_hwp0_deg = 45.0;     // HWP in Path0
  double theta_hwp1_deg = 0.0;      // analysis HWP
  std::optional<double> theta_qwp_deg;  // absent = QWP removed from the beam
  int analyzed_port = 1;            // interferometer output feeding the analysis
};

struct BareMziSettings {
  double phi0_deg = 0.0;  // phase in Path0
  double phi1_deg = 0.0;  // phase in Path1
};

}  // namespace qeraser
