#include "qeraser/message.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qeraser {

UnitVec2 UnitVec2::from_degrees(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r == 0.0) return {1.0, 0.0};
  if (r == 90.0) return {0.0, 1.0};
  if (r == 180.0) return {-1.0, 0.0};
  if (r == 270.0) return {0.0, -1.0};
  return from_radians(deg_to_rad(r));
}

double max_norm_error(const Message& m) {
  const double eh = std::abs(m.phase_h.norm() - 1.0);
  const double ev = std::abs(m.phase_v.norm() - 1.0);
  const double ep = std::abs(m.pol.norm() - 1.0);
  return std::max({eh, ev, ep});
}

bool is_unit_message(const Message& m, double tol) {
  return max_norm_error(m) <= tol;
}

void SourceSpec::validate() const {
  if (!std::isfinite(psi0_deg)) {
    throw std::invalid_argument("source: psi0 must be finite");
  }
  if (const auto* pure = std::get_if<PureLinear>(&kind)) {
    if (!std::isfinite(pure->xi_deg)) {
      throw std::invalid_argument("source: xi must be finite");
    }
    return;
  }
  const auto& mix = std::get<MixedVH>(kind);
  if (!(mix.p_v >= 0.0) || !(mix.p_h >= 0.0)) {
    throw std::invalid_argument("source: mixture probabilities must be nonnegative");
  }
  if (std::abs(mix.p_v + mix.p_h - 1.0) > 1e-12) {
    throw std::invalid_argument("source: mixture probabilities must sum to 1");
  }
  if (mix.n_v < 1 || mix.n_h < 1) {
    throw std::invalid_argument("source: group sizes must be at least 1");
  }
}

Message emit_pure(double xi_deg, double psi0_deg) {
  const UnitVec2 pol = UnitVec2::from_degrees(xi_deg);
  const UnitVec2 clock = UnitVec2::from_degrees(psi0_deg);
  Message m;
  m.pol = pol;
  m.phase_h = (pol.c == 0.0) ? UnitVec2{1.0, 0.0} : clock;
  m.phase_v = (pol.s == 0.0) ? UnitVec2{1.0, 0.0} : clock;
  return m;
}

StateLabel next_group_label(const MixedVH& spec, Prng& rng) {
  return rng.uniform01() < spec.p_v ? StateLabel::kV : StateLabel::kH;
}

PhotonSource::PhotonSource(SourceSpec spec) : spec_(spec) {
  spec_.validate();
  if (const auto* pure = std::get_if<PureLinear>(&spec_.kind)) {
    pure_v_ = emit_pure(pure->xi_deg, spec_.psi0_deg);
  } else {
    pure_v_ = emit_pure(90.0, spec_.psi0_deg);
    pure_h_ = emit_pure(0.0, spec_.psi0_deg);
  }
}

Message PhotonSource::next(Prng& rng) {
  if (!spec_.mixed()) {
    return pure_v_;
  }
  const auto& mix = std::get<MixedVH>(spec_.kind);
  if (remaining_ == 0) {
    current_ = next_group_label(mix, rng);
    remaining_ = (current_ == StateLabel::kV) ? mix.n_v : mix.n_h;
    schedule_.push_back({current_, 0});
  }
  --remaining_;
  ++schedule_.back().length;
  return current_ == StateLabel::kV ? pure_v_ : pure_h_;
}

}  // namespace qeraser
