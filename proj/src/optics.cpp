#include "qeraser/optics.h"

#include <cmath>

namespace qeraser {

namespace {

double channel_weight(const std::array<double, 4>& c) {
  return (c[0] * c[0] + c[1] * c[1]) + (c[2] * c[2] + c[3] * c[3]);
}

// Normalizes (a, b) into a clock pair; a zero-length pair becomes (1, 0) and
// carries zero weight downstream.
UnitVec2 normalized_pair(double a, double b, double len) {
  if (len == 0.0) return {1.0, 0.0};
  return {a / len, b / len};
}

struct WeightedRegisters {
  double hc0, hs0, hc1, hs1;  // cos/sin of the H clocks times cos(xi) sqrt(x)
  double vc0, vs0, vc1, vs1;  // cos/sin of the V clocks times sin(xi) sqrt(x)
};

WeightedRegisters weighted(const DlmState& d) {
  const double r0 = std::sqrt(d.x[0]);
  const double r1 = std::sqrt(d.x[1]);
  WeightedRegisters w{};
  w.hc0 = d.reg_h[0].c * d.reg_p[0].c * r0;
  w.hs0 = d.reg_h[0].s * d.reg_p[0].c * r0;
  w.hc1 = d.reg_h[1].c * d.reg_p[1].c * r1;
  w.hs1 = d.reg_h[1].s * d.reg_p[1].c * r1;
  w.vc0 = d.reg_v[0].c * d.reg_p[0].s * r0;
  w.vs0 = d.reg_v[0].s * d.reg_p[0].s * r0;
  w.vc1 = d.reg_v[1].c * d.reg_p[1].s * r1;
  w.vs1 = d.reg_v[1].s * d.reg_p[1].s * r1;
  return w;
}

}  // namespace

Message assemble_output(const std::array<double, 4>& c) {
  const double nh = c[0] * c[0] + c[1] * c[1];
  const double nv = c[2] * c[2] + c[3] * c[3];
  const double sh = std::sqrt(nh);
  const double sv = std::sqrt(nv);
  const double st = std::sqrt(nh + nv);
  Message m;
  m.phase_h = normalized_pair(c[0], c[1], sh);
  m.phase_v = normalized_pair(c[2], c[3], sv);
  m.pol = normalized_pair(sh, sv, st);
  return m;
}

SplitterComponents bs_components(const DlmState& state) {
  const WeightedRegisters w = weighted(state);
  SplitterComponents t;
  t.out0 = {w.hc0 - w.hs1, w.hc1 + w.hs0, w.vc0 - w.vs1, w.vc1 + w.vs0};
  t.out1 = {w.hc1 - w.hs0, w.hc0 + w.hs1, w.vc1 - w.vs0, w.vc0 + w.vs1};
  t.weight0 = channel_weight(t.out0);
  t.weight1 = channel_weight(t.out1);
  return t;
}

SplitterComponents pbs_components(const DlmState& state) {
  const WeightedRegisters w = weighted(state);
  SplitterComponents t;
  t.out0 = {w.hc0, w.hs0, -w.vs1, w.vc1};
  t.out1 = {w.hc1, w.hs1, -w.vs0, w.vc0};
  t.weight0 = channel_weight(t.out0);
  t.weight1 = channel_weight(t.out1);
  return t;
}

SplitterOutputs bs_transform(const DlmState& state) {
  const SplitterComponents t = bs_components(state);
  return {assemble_output(t.out0), assemble_output(t.out1), t.weight0, t.weight1};
}

SplitterOutputs pbs_transform(const DlmState& state) {
  const SplitterComponents t = pbs_components(state);
  return {assemble_output(t.out0), assemble_output(t.out1), t.weight0, t.weight1};
}

UnitOutcome bs_process(DlmState& state, int channel, const Message& msg, Prng& rng) {
  dlm_update(state, channel, msg);
  const SplitterComponents t = bs_components(state);
  if (t.weight0 > 2.0 * rng.uniform01()) {
    return {0, assemble_output(t.out0)};
  }
  return {1, assemble_output(t.out1)};
}

UnitOutcome pbs_process(DlmState& state, int channel, const Message& msg, Prng& rng) {
  dlm_update(state, channel, msg);
  const SplitterComponents t = pbs_components(state);
  if (t.weight0 > (t.weight0 + t.weight1) * rng.uniform01()) {
    return {0, assemble_output(t.out0)};
  }
  return {1, assemble_output(t.out1)};
}

std::complex<double> amp_h(const Message& m) {
  return {m.pol.c * m.phase_h.c, m.pol.c * m.phase_h.s};
}

std::complex<double> amp_v(const Message& m) {
  return {m.pol.s * m.phase_v.c, m.pol.s * m.phase_v.s};
}

Message message_from_amplitudes(std::complex<double> ah, std::complex<double> av) {
  const double mh = std::sqrt(std::norm(ah));
  const double mv = std::sqrt(std::norm(av));
  const double total = std::sqrt(mh * mh + mv * mv);
  Message m;
  m.phase_h = (mh == 0.0) ? UnitVec2{1.0, 0.0} : UnitVec2{ah.real() / mh, ah.imag() / mh};
  m.phase_v = (mv == 0.0) ? UnitVec2{1.0, 0.0} : UnitVec2{av.real() / mv, av.imag() / mv};
  m.pol = (total == 0.0) ? UnitVec2{1.0, 0.0} : UnitVec2{mh / total, mv / total};
  return m;
}

Message hwp_apply_axis(const Message& m, const UnitVec2& axis) {
  const std::complex<double> mi{0.0, -1.0};
  const std::complex<double> ah = amp_h(m);
  const std::complex<double> av = amp_v(m);
  return message_from_amplitudes(mi * (axis.c * ah + axis.s * av),
                                 mi * (axis.s * ah - axis.c * av));
}

Message qwp_apply_axis(const Message& m, const UnitVec2& axis) {
  const std::complex<double> ic{0.0, axis.c};
  const std::complex<double> is{0.0, axis.s};
  const double r = 1.0 / std::numbers::sqrt2;
  const std::complex<double> ah = amp_h(m);
  const std::complex<double> av = amp_v(m);
  return message_from_amplitudes(r * ((1.0 - ic) * ah - is * av),
                                 r * (-is * ah + (1.0 + ic) * av));
}

Message phase_apply_rotation(const Message& m, const UnitVec2& rotation) {
  Message out = m;
  out.phase_h = m.phase_h.rotated(rotation);
  out.phase_v = m.phase_v.rotated(rotation);
  return out;
}

Message hwp_apply(const Message& m, WaveplateSetting w) {
  return hwp_apply_axis(m, UnitVec2::from_radians(deg_to_rad(2.0 * w.theta_deg)));
}

Message qwp_apply(const Message& m, WaveplateSetting w) {
  return qwp_apply_axis(m, UnitVec2::from_radians(deg_to_rad(2.0 * w.theta_deg)));
}

Message phase_apply(const Message& m, PhaseSetting p) {
  return phase_apply_rotation(m, UnitVec2::from_radians(deg_to_rad(p.phi_deg)));
}

}  // namespace qeraser
