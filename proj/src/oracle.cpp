#include "qeraser/oracle.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qeraser/angles.h"

namespace qeraser {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

void check_path(int path) {
  if (path != 0 && path != 1) {
    throw std::invalid_argument("oracle: path must be 0 or 1");
  }
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

double OracleState::norm2() const {
  double n = 0.0;
  for (const auto& amp : a) n += std::norm(amp);
  return n;
}

OracleState pure_linear_input(double xi_deg) {
  const UnitVec2 p = UnitVec2::from_degrees(xi_deg);
  return {{std::complex<double>{p.c, 0.0}, std::complex<double>{p.s, 0.0}, {}, {}}};
}

OracleState apply_bs(const OracleState& s) {
  const double r = 1.0 / std::numbers::sqrt2;
  OracleState o;
  o.a[0] = (s.a[0] + kI * s.a[2]) * r;
  o.a[1] = (s.a[1] + kI * s.a[3]) * r;
  o.a[2] = (kI * s.a[0] + s.a[2]) * r;
  o.a[3] = (kI * s.a[1] + s.a[3]) * r;
  return o;
}

OracleState apply_pbs(const OracleState& s) {
  OracleState o;
  o.a[0] = s.a[0];
  o.a[1] = kI * s.a[3];
  o.a[2] = s.a[2];
  o.a[3] = kI * s.a[1];
  return o;
}

OracleState apply_hwp(const OracleState& s, double theta_deg, int path) {
  check_path(path);
  const double a = deg_to_rad(2.0 * theta_deg);
  const double c = std::cos(a);
  const double sn = std::sin(a);
  const int k = 2 * path;
  const int u = 2 * (1 - path);
  OracleState o;
  // the global -i factor multiplies the identity block as well
  o.a[k] = -kI * (c * s.a[k] + sn * s.a[k + 1]);
  o.a[k + 1] = -kI * (sn * s.a[k] - c * s.a[k + 1]);
  o.a[u] = -kI * s.a[u];
  o.a[u + 1] = -kI * s.a[u + 1];
  return o;
}

OracleState apply_qwp(const OracleState& s, double theta_deg, int path) {
  check_path(path);
  const double a = deg_to_rad(2.0 * theta_deg);
  const std::complex<double> ic{0.0, std::cos(a)};
  const std::complex<double> is{0.0, std::sin(a)};
  const double r = 1.0 / std::numbers::sqrt2;
  const int k = 2 * path;
  // 1/sqrt(2) normalizes only the waveplate block; the untouched path passes
  // through unchanged, keeping the transformation unitary
  OracleState o = s;
  o.a[k] = r * ((1.0 - ic) * s.a[k] - is * s.a[k + 1]);
  o.a[k + 1] = r * (-is * s.a[k] + (1.0 + ic) * s.a[k + 1]);
  return o;
}

OracleState apply_phase(const OracleState& s, double phi_deg, int path) {
  check_path(path);
  const std::complex<double> e = std::polar(1.0, deg_to_rad(phi_deg));
  const int k = 2 * path;
  OracleState o = s;
  o.a[k] *= e;
  o.a[k + 1] *= e;
  return o;
}

OracleState apply_component(const OracleState& s, const Component& c) {
  switch (c.kind) {
    case ComponentKind::kBs:
      return apply_bs(s);
    case ComponentKind::kPbs:
      return apply_pbs(s);
    case ComponentKind::kHwp0:
      return apply_hwp(s, c.angle_deg, 0);
    case ComponentKind::kHwp1:
      return apply_hwp(s, c.angle_deg, 1);
    case ComponentKind::kQwp:
      return apply_qwp(s, c.angle_deg, 1);
    case ComponentKind::kPhase1:
      return apply_phase(s, c.angle_deg, 1);
  }
  throw std::invalid_argument("oracle: unknown component");
}

OracleState eraser_pipeline(const OracleState& input, const EraserSettings& s) {
  if (s.analyzed_port != 0 && s.analyzed_port != 1) {
    throw std::invalid_argument("oracle: analyzed port must be 0 or 1");
  }
  OracleState st = apply_bs(input);
  st = apply_hwp(st, s.theta_hwp0_deg, 0);
  st = apply_phase(st, s.phi_deg, 1);
  st = apply_bs(st);
  if (s.theta_qwp_deg) {
    st = apply_qwp(st, *s.theta_qwp_deg, s.analyzed_port);
  }
  st = apply_hwp(st, s.theta_hwp1_deg, s.analyzed_port);
  return apply_pbs(st);
}

DetectorProbs detector_probs(const OracleState& after_pbs, int analyzed_port) {
  check_path(analyzed_port);
  DetectorProbs p;
  if (analyzed_port == 1) {
    p.p_d0 = std::norm(after_pbs.a[1]);  // V of the analyzed beam, reflected
    p.p_d1 = std::norm(after_pbs.a[2]);  // H of the analyzed beam, transmitted
  } else {
    p.p_d0 = std::norm(after_pbs.a[3]);
    p.p_d1 = std::norm(after_pbs.a[0]);
  }
  p.p_discard = std::max(0.0, after_pbs.norm2() - p.p_d0 - p.p_d1);
  return p;
}

DetectorProbs eraser_probs(const OracleState& input, const EraserSettings& s) {
  return detector_probs(eraser_pipeline(input, s), s.analyzed_port);
}

MziProbs mzi_probs(double phi0_deg, double phi1_deg) {
  using C = std::complex<double>;
  const double r = 1.0 / std::numbers::sqrt2;
  const C e0 = std::polar(1.0, deg_to_rad(phi0_deg));
  const C e1 = std::polar(1.0, deg_to_rad(phi1_deg));
  // input on Path0, pushed through splitter * phases * splitter
  C b0 = r * C{1.0, 0.0};
  C b1 = r * kI;
  b0 *= e0;
  b1 *= e1;
  const C c0 = r * (b0 + kI * b1);
  const C c1 = r * (kI * b0 + b1);
  return {std::norm(c0), std::norm(c1)};
}

double visibility_pure_no_qwp(double xi_deg, double theta0_deg, double theta1_deg) {
  const double xi = deg_to_rad(xi_deg);
  const double t0 = deg_to_rad(theta0_deg);
  const double t1 = deg_to_rad(theta1_deg);
  const double a = std::sin(xi - 2.0 * t0 + 2.0 * t1);
  const double b = std::sin(xi - 2.0 * t1);
  const double den = a * a + b * b;
  if (den == 0.0) return 0.0;
  return clamp01(std::abs(2.0 * a * b / den));
}

double visibility_mixed(double beta_deg, double theta0_deg, double theta1_deg) {
  if (!(beta_deg >= 0.0 && beta_deg < 90.0)) {
    throw std::invalid_argument(
        "visibility_mixed: beta must lie in [0, 90) degrees; use the pure-V "
        "formula at 90");
  }
  const double tb = std::tan(deg_to_rad(beta_deg));
  const double w = tb * tb;  // p_v / p_h
  const double t0 = deg_to_rad(theta0_deg);
  const double t1 = deg_to_rad(theta1_deg);
  const double sd = std::sin(2.0 * t0 - 2.0 * t1);
  const double s1 = std::sin(2.0 * t1);
  const double cd = std::cos(2.0 * t0 - 2.0 * t1);
  const double c1 = std::cos(2.0 * t1);
  const double num = 2.0 * sd * s1 + 2.0 * w * cd * c1;
  const double den = sd * sd + s1 * s1 + w * (cd * cd + c1 * c1);
  if (den == 0.0) return 0.0;
  return clamp01(std::abs(num / den));
}

double visibility_pure_qwp0(double xi_deg, double theta0_deg, double theta1_deg) {
  const double xi = deg_to_rad(xi_deg);
  const double t0 = deg_to_rad(theta0_deg);
  const double t1 = deg_to_rad(theta1_deg);
  const double c1sq = std::pow(std::cos(2.0 * t1), 2);
  const double s1sq = std::pow(std::sin(2.0 * t1), 2);
  const double cross = c1sq * std::sin(xi - 2.0 * t0) * std::sin(xi) -
                       s1sq * std::cos(xi - 2.0 * t0) * std::cos(xi);
  const double under = std::pow(std::sin(4.0 * t1) * std::sin(2.0 * xi - 2.0 * t0), 2) +
                       4.0 * cross * cross;
  const double num = std::sqrt(std::max(0.0, under));
  const double den = c1sq * std::pow(std::sin(xi - 2.0 * t0), 2) +
                     s1sq * std::pow(std::cos(xi - 2.0 * t0), 2) +
                     s1sq * std::pow(std::cos(xi), 2) + c1sq * std::pow(std::sin(xi), 2);
  if (den == 0.0) return 0.0;
  return clamp01(std::abs(num / den));
}

MixedInput MixedInput::pure(double xi_deg) {
  return {{{pure_linear_input(xi_deg), 1.0}}};
}

MixedInput MixedInput::linear_vh(double p_v, double p_h) {
  return {{{pure_linear_input(90.0), p_v}, {pure_linear_input(0.0), p_h}}};
}

void MixedInput::validate() const {
  if (components.empty()) {
    throw std::invalid_argument("mixed input: no components");
  }
  double sum = 0.0;
  for (const auto& c : components) {
    if (!(c.weight >= 0.0)) {
      throw std::invalid_argument("mixed input: weights must be nonnegative");
    }
    sum += c.weight;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("mixed input: weights must sum to 1");
  }
}

double FringeFit::amplitude() const { return std::hypot(sin_coeff, cos_coeff); }

FringeFit fit_fringe(std::span<const double> phi_deg, std::span<const double> values) {
  const std::size_t n = phi_deg.size();
  if (n != values.size() || n < 3) {
    throw std::invalid_argument("fit_fringe: need at least 3 matching samples");
  }
  // normal equations for least squares on (1, sin, cos)
  double m[3][3] = {};
  double rhs[3] = {};
  for (std::size_t k = 0; k < n; ++k) {
    const double p = deg_to_rad(phi_deg[k]);
    const double basis[3] = {1.0, std::sin(p), std::cos(p)};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) m[i][j] += basis[i] * basis[j];
      rhs[i] += basis[i] * values[k];
    }
  }
  // Gaussian elimination with partial pivoting
  int idx[3] = {0, 1, 2};
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::abs(m[idx[r]][col]) > std::abs(m[idx[piv]][col])) piv = r;
    }
    std::swap(idx[col], idx[piv]);
    const double d = m[idx[col]][col];
    if (std::abs(d) < 1e-9) {
      throw std::invalid_argument("fit_fringe: degenerate phase grid");
    }
    for (int r = col + 1; r < 3; ++r) {
      const double f = m[idx[r]][col] / d;
      for (int c = col; c < 3; ++c) m[idx[r]][c] -= f * m[idx[col]][c];
      rhs[idx[r]] -= f * rhs[idx[col]];
    }
  }
  double sol[3];
  for (int col = 2; col >= 0; --col) {
    double v = rhs[idx[col]];
    for (int c = col + 1; c < 3; ++c) v -= m[idx[col]][c] * sol[c];
    sol[col] = v / m[idx[col]][col];
  }
  return {sol[0], sol[1], sol[2]};
}

std::vector<double> detector0_curve(const MixedInput& input, const EraserSettings& s,
                                    std::span<const double> phi_grid_deg) {
  input.validate();
  std::vector<double> curve(phi_grid_deg.size(), 0.0);
  for (std::size_t k = 0; k < phi_grid_deg.size(); ++k) {
    EraserSettings cell = s;
    cell.phi_deg = phi_grid_deg[k];
    for (const auto& comp : input.components) {
      curve[k] += comp.weight * eraser_probs(comp.state, cell).p_d0;
    }
  }
  return curve;
}

Visibility sweep_visibility(const MixedInput& input, const EraserSettings& s,
                            std::span<const double> phi_grid_deg) {
  if (phi_grid_deg.size() < 8) {
    throw std::invalid_argument("sweep_visibility: phase grid needs at least 8 points");
  }
  const std::vector<double> curve = detector0_curve(input, s, phi_grid_deg);
  const FringeFit fit = fit_fringe(phi_grid_deg, curve);
  if (fit.mean <= 1e-15) {
    return {0.0, true};
  }
  const double vmax = fit.maximum();
  const double vmin = fit.minimum();
  return {clamp01((vmax - vmin) / (vmax + vmin)), false};
}

}  // namespace qeraser
