#include "catena/fields.hpp"

#include <algorithm>
#include <cmath>

namespace catena {

namespace {

State advance_or_throw(const FlowSystem& sys, const State& x, double t) {
  const FlowResult r = sys.advance(x, t);
  if (r.status != FlowStatus::interior)
    throw TruncationError("flow left its domain during evaluation",
                          r.exit_time);
  return r.point;
}

}  // namespace

double flow_derivative(const std::function<double(const State&)>& value,
                       const FlowSystem& sys, const State& x, double h) {
  const double fwd = value(advance_or_throw(sys, x, h));
  const double bwd = value(advance_or_throw(sys, x, -h));
  return (fwd - bwd) / (2.0 * h);
}

double flow_second_difference(const std::function<double(const State&)>& value,
                              const FlowSystem& sys, const State& x, double h) {
  const double fwd = value(advance_or_throw(sys, x, h));
  const double bwd = value(advance_or_throw(sys, x, -h));
  return (fwd - 2.0 * value(x) + bwd) / (h * h);
}

double attractor_lyapunov(const FlowSystem& sys, const DistanceFn<State>& dist,
                          const State& attractor_point,
                          const SizeFunctionSpec<State>& spec, double horizon,
                          const State& x, const AttractorLyapunovOptions& opts) {
  if (opts.samples < 2) throw SpecError("attractor_lyapunov: samples >= 2");
  if (horizon <= 0.0) throw SpecError("attractor_lyapunov: horizon must be > 0");

  PointSet<State> orbit;
  orbit.dist = dist;
  const double dt = horizon / static_cast<double>(opts.samples - 1);
  State cur = x;
  bool converged = dist(cur, attractor_point) <= opts.ball;
  orbit.points.push_back(cur);
  for (int k = 1; k < opts.samples && !converged; ++k) {
    cur = advance_or_throw(sys, cur, dt);
    orbit.points.push_back(cur);
    converged = dist(cur, attractor_point) <= opts.ball;
  }
  if (!converged)
    throw BasinError(
        "attractor_lyapunov: forward orbit did not reach the attractor before "
        "the horizon");
  orbit.points.push_back(attractor_point);
  return whitney_size(orbit, spec);
}

SmoothedValue smooth_lyapunov(const std::function<double(const State&)>& L,
                              const FlowSystem& sys, double tau, const State& x,
                              int panels) {
  if (tau <= 0.0) throw SpecError("smooth_lyapunov: tau must be > 0");
  if (panels < 2 || panels % 2 != 0)
    throw SpecError("smooth_lyapunov: panel count must be even and >= 2");
  const double h = tau / panels;
  double sum = 0.0;
  double l_end = 0.0;
  const double l0 = L(x);
  for (int i = 0; i <= panels; ++i) {
    double li;
    if (i == 0) {
      li = l0;
    } else {
      li = L(advance_or_throw(sys, x, h * i));
    }
    if (i == panels) l_end = li;
    const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * li;
  }
  SmoothedValue out;
  out.value = sum * h / 3.0;
  out.derivative = l_end - l0;
  return out;
}

double exact_decay_lyapunov(const FlowSystem& sys,
                            const std::function<double(const State&)>& V,
                            double level, double a, const State& x,
                            const ExactDecayOptions& opts) {
  if (a <= 0.0) throw SpecError("exact_decay_lyapunov: exponent must be > 0");
  const double v0 = V(x) - level;
  if (v0 == 0.0) return 1.0;
  // V decreases along orbits, so the orbit meets the section backward when
  // V(x) < level and forward when V(x) > level.
  const double dir = (v0 < 0.0) ? -1.0 : 1.0;
  double inside = 0.0;
  double bracket = -1.0;
  for (double s = opts.march; s <= opts.horizon; s += opts.march) {
    const FlowResult r = sys.advance(x, dir * s);
    if (r.status != FlowStatus::interior)
      throw DomainError("exact_decay_lyapunov: orbit leaves the domain before "
                        "reaching the section");
    const double v = V(r.point) - level;
    if (v == 0.0 || (v > 0.0) != (v0 > 0.0)) {
      bracket = s;
      break;
    }
    inside = s;
  }
  if (bracket < 0.0)
    throw DomainError("exact_decay_lyapunov: orbit misses the section");
  double lo = inside, hi = bracket;
  while (hi - lo > opts.bisect_tol) {
    const double mid = 0.5 * (lo + hi);
    const double v = V(sys.advance(x, dir * mid).point) - level;
    if (v == 0.0 || (v > 0.0) != (v0 > 0.0))
      hi = mid;
    else
      lo = mid;
  }
  const double s_root = dir * 0.5 * (lo + hi);
  const double tau = -s_root;  // x = phi_tau(section point)
  return std::exp(-a * tau);
}

double linear_pseudometric(const FlowSystem& sys, const State& x,
                           const State& y) {
  const LinearModelSpec& spec = sys.linear_spec();
  auto rep = [&](const State& s) {
    if (s.coords.size() != 2)
      throw DomainError("linear_pseudometric: state must be (r, index)");
    const auto idx = static_cast<std::size_t>(s.coords[1]);
    if (idx >= spec.section.size())
      throw DomainError("linear_pseudometric: section index out of range");
    return std::pair<double, const std::vector<double>*>{s.coords[0],
                                                         &spec.section[idx]};
  };
  const auto [rx, vx] = rep(x);
  const auto [ry, vy] = rep(y);
  const std::size_t d = std::max(vx->size(), vy->size());
  double sum = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double a = (i < vx->size()) ? rx * (*vx)[i] : 0.0;
    const double b = (i < vy->size()) ? ry * (*vy)[i] : 0.0;
    sum += (a - b) * (a - b);
  }
  return std::sqrt(sum);
}

namespace {

double boundary_value(const BVPSpec& spec, const State& p) {
  const double f = spec.boundary(p);
  if (spec.require_positive && f <= 0.0)
    throw SpecError("catenary_bvp: boundary data must be positive");
  return f;
}

}  // namespace

double catenary_bvp(const FlowSystem& sys, const Block& block,
                    const BVPSpec& spec, const State& x, double t_max,
                    const HitTimeOptions& opts) {
  if (spec.exponent <= 0.0)
    throw SpecError("catenary_bvp: exponent must be > 0");
  if (!spec.boundary) throw SpecError("catenary_bvp: missing boundary data");
  const double lx = block.indicator(x);
  if (lx > block.level + block.band)
    throw DomainError("catenary_bvp: state outside the block");
  if (std::abs(lx - block.level) <= block.band) return boundary_value(spec, x);

  const HitTimes ht = hit_times(sys, block, x, t_max, opts);
  const double a = spec.exponent;
  if (ht.s_infinite && ht.u_infinite) return 0.0;

  if (ht.u_infinite) {
    const State pi_s = sys.advance(x, ht.t_s).point;
    return boundary_value(spec, pi_s) * std::exp(a * ht.t_s);
  }
  if (ht.s_infinite) {
    const State pi_u = sys.advance(x, ht.t_u).point;
    return boundary_value(spec, pi_u) * std::exp(-a * ht.t_u);
  }

  // Near W^s or W^u the interpolation degrades gracefully to the exponential
  // branch; switch over explicitly once half the horizon is exceeded.
  if (ht.total() > t_max / 2.0) {
    if (ht.t_u >= -ht.t_s) {
      const State pi_s = sys.advance(x, ht.t_s).point;
      return boundary_value(spec, pi_s) * std::exp(a * ht.t_s);
    }
    const State pi_u = sys.advance(x, ht.t_u).point;
    return boundary_value(spec, pi_u) * std::exp(-a * ht.t_u);
  }

  const State pi_s = sys.advance(x, ht.t_s).point;
  const State pi_u = sys.advance(x, ht.t_u).point;
  const double fs = boundary_value(spec, pi_s);
  const double fu = boundary_value(spec, pi_u);
  // [fs sinh(a T^u) - fu sinh(a T^s)] / sinh(a T) rewritten with expm1 so
  // that no intermediate grows like e^{aT}.
  const double num = fs * std::exp(a * ht.t_s) * (-std::expm1(-2.0 * a * ht.t_u)) +
                     fu * std::exp(-a * ht.t_u) * (-std::expm1(2.0 * a * ht.t_s));
  const double den = -std::expm1(-2.0 * a * ht.total());
  return num / den;
}

double BvpOrbitValues::at(double t) const {
  switch (branch_) {
    case Branch::isolated:
      return 0.0;
    case Branch::stable:
      return f_s_ * std::exp(a_ * (t_s_ - t));
    case Branch::unstable:
      return f_u_ * std::exp(-a_ * (t_u_ - t));
    case Branch::transient: {
      const double tu = t_u_ - t;
      const double ts = t_s_ - t;
      const double total = t_u_ - t_s_;
      const double num =
          f_s_ * std::exp(a_ * ts) * (-std::expm1(-2.0 * a_ * tu)) +
          f_u_ * std::exp(-a_ * tu) * (-std::expm1(2.0 * a_ * ts));
      return num / (-std::expm1(-2.0 * a_ * total));
    }
  }
  return 0.0;
}

BvpOrbitValues make_bvp_orbit_values(const FlowSystem& sys, const Block& block,
                                     const BVPSpec& spec, const State& x,
                                     double t_max, const HitTimeOptions& opts) {
  if (spec.exponent <= 0.0)
    throw SpecError("make_bvp_orbit_values: exponent must be > 0");
  BvpOrbitValues out;
  out.a_ = spec.exponent;
  const HitTimes ht = hit_times(sys, block, x, t_max, opts);
  out.t_s_ = ht.t_s;
  out.t_u_ = ht.t_u;
  if (ht.s_infinite && ht.u_infinite) {
    out.branch_ = BvpOrbitValues::Branch::isolated;
    return out;
  }
  if (ht.u_infinite) {
    out.branch_ = BvpOrbitValues::Branch::stable;
    out.f_s_ = boundary_value(spec, sys.advance(x, ht.t_s).point);
    return out;
  }
  if (ht.s_infinite) {
    out.branch_ = BvpOrbitValues::Branch::unstable;
    out.f_u_ = boundary_value(spec, sys.advance(x, ht.t_u).point);
    return out;
  }
  out.branch_ = BvpOrbitValues::Branch::transient;
  out.f_s_ = boundary_value(spec, sys.advance(x, ht.t_s).point);
  out.f_u_ = boundary_value(spec, sys.advance(x, ht.t_u).point);
  return out;
}

ScalarField catenary_sum_function(const ScalarField& alpha,
                                  const ScalarField& omega) {
  if (alpha.exponent != omega.exponent)
    throw SpecError("catenary_sum_function: exponent mismatch");
  ScalarField out;
  out.exponent = alpha.exponent;
  out.value = [fa = alpha.value, fo = omega.value](const State& x) {
    return fa(x) + fo(x);
  };
  return out;
}

PseudoMetric catenary_sum_pseudometric(const PseudoMetric& alpha,
                                       const PseudoMetric& omega) {
  if (alpha.exponent != omega.exponent)
    throw SpecError("catenary_sum_pseudometric: exponent mismatch");
  PseudoMetric out;
  out.exponent = alpha.exponent;
  out.value = [da = alpha.value, dw = omega.value](const State& x,
                                                   const State& y) {
    return da(x, y) + dw(x, y);
  };
  return out;
}

double derived_decreasing(const ScalarField& L, const FlowSystem& sys,
                          const State& x, double h) {
  return -flow_derivative(L.value, sys, x, h);
}

CatenaryReport verify_catenary(const ScalarField& field, const FlowSystem& sys,
                               const std::vector<State>& grid,
                               const Block* block, const VerifyOptions& opts) {
  CatenaryReport report;
  const double a2 = field.exponent * field.exponent;
  for (const State& x : grid) {
    const double v = field.value(x);
    const double lddot =
        flow_second_difference(field.value, sys, x, opts.second_step);
    const double residual = std::abs(lddot - a2 * v);
    if (residual > report.max_residual) {
      report.max_residual = residual;
      report.worst_point = x;
    }
    const bool on_lambda = block && block->lambda_distance &&
                           block->lambda_distance(x) <= opts.lambda_exclusion;
    if (!on_lambda && lddot <= 0.0 &&
        report.hyperbolicity.size() < opts.max_witnesses) {
      const double ldot = flow_derivative(field.value, sys, x, opts.first_step);
      report.hyperbolicity.push_back({x, v, ldot, lddot});
    }
    if (v < -opts.positivity_tol &&
        report.positivity.size() < opts.max_witnesses)
      report.positivity.push_back({x, v, 0.0, 0.0});
    ++report.grid_points;
  }

  if (opts.drift_start) {
    auto c_of = [&](const State& s) {
      const double v = field.value(s);
      const double ld = flow_derivative(field.value, sys, s, opts.first_step);
      return ld * ld - a2 * v * v;
    };
    State cur = *opts.drift_start;
    const double c0 = c_of(cur);
    const double dt = opts.drift_span / opts.drift_samples;
    for (int k = 1; k <= opts.drift_samples; ++k) {
      cur = sys.advance(cur, dt).point;
      report.constant_drift =
          std::max(report.constant_drift, std::abs(c_of(cur) - c0));
    }
  }
  return report;
}

double suspension_catenary(const FlowSystem& suspension, const Block& block,
                           const BVPSpec& spec, const DiscreteState& x,
                           double t_max, const HitTimeOptions& opts) {
  if (suspension.kind() != FlowSystem::Kind::suspension)
    throw SpecError("suspension_catenary: needs a suspension system");
  State rep;
  rep.coords = {0.0};
  rep.fiber = x;
  return catenary_bvp(suspension, block, spec, rep, t_max, opts);
}

}  // namespace catena
