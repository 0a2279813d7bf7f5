#pragma once

#include <array>

#include "qeraser/message.h"

namespace qeraser {

// Adaptive input stage shared by the splitter units. Holds the last message
// seen on each input channel (six registers) and a channel-frequency vector x
// on the unit simplex -- fourteen numbers in total.
struct DlmState {
  std::array<UnitVec2, 2> reg_h{};
  std::array<UnitVec2, 2> reg_v{};
  std::array<UnitVec2, 2> reg_p{};
  std::array<double, 2> x{0.5, 0.5};
  double gamma = 0.99;
};

// Registers start at (1, 0) and x at (1/2, 1/2). Throws unless 0 < gamma < 1.
DlmState dlm_init(double gamma);

// Overwrites the channel's registers with the message and relaxes x toward
// the channel indicator: x <- gamma*x + (1-gamma)*e_channel.
void dlm_update(DlmState& state, int channel, const Message& msg);

}  // namespace qeraser
