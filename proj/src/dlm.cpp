#include "qeraser/dlm.h"

#include <stdexcept>

namespace qeraser {

DlmState dlm_init(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("dlm: gamma must lie in (0, 1)");
  }
  DlmState s;
  s.gamma = gamma;
  return s;
}

void dlm_update(DlmState& state, int channel, const Message& msg) {
  if (channel != 0 && channel != 1) {
    throw std::invalid_argument("dlm: channel must be 0 or 1");
  }
  state.reg_h[channel] = msg.phase_h;
  state.reg_v[channel] = msg.phase_v;
  state.reg_p[channel] = msg.pol;
  const double g = state.gamma;
  state.x[0] = g * state.x[0] + (channel == 0 ? 1.0 - g : 0.0);
  state.x[1] = g * state.x[1] + (channel == 1 ? 1.0 - g : 0.0);
}

}  // namespace qeraser
