#include "catena/block.hpp"

#include <cmath>
#include <limits>

namespace catena {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// First time |t| in (0, t_max] with the orbit outside the block, refined by
// bisection; nullopt when the side stays inside up to the horizon. dir is +1
// or -1. A flow-domain exit before the indicator crossing counts as the exit.
std::optional<double> first_crossing(const FlowSystem& sys, const Block& block,
                                     const State& x, double dir, double t_max,
                                     const HitTimeOptions& opts) {
  double inside = 0.0;
  for (std::int64_t k = 1;; ++k) {
    const double tk = std::min(static_cast<double>(k) * opts.march, t_max);
    const FlowResult r = sys.advance(x, dir * tk);
    if (r.status == FlowStatus::exited) return std::abs(r.exit_time);
    if (block.indicator(r.point) > block.level) {
      double lo = inside, hi = tk;
      while (hi - lo > opts.bisect_tol) {
        const double mid = 0.5 * (lo + hi);
        const FlowResult rm = sys.advance(x, dir * mid);
        if (rm.status == FlowStatus::exited) return std::abs(rm.exit_time);
        if (block.indicator(rm.point) > block.level)
          hi = mid;
        else
          lo = mid;
      }
      return 0.5 * (lo + hi);
    }
    inside = tk;
    if (tk >= t_max) return std::nullopt;
  }
}

bool orbit_near_lambda(const FlowSystem& sys, const Block& block,
                       const State& x, double t_max,
                       const HitTimeOptions& opts) {
  if (!block.lambda_distance) return true;
  const int samples = 16;
  for (int k = -samples; k <= samples; ++k) {
    const double t = t_max * static_cast<double>(k) / samples;
    const FlowResult r = sys.advance(x, t);
    if (r.status != FlowStatus::interior) return false;
    if (block.lambda_distance(r.point) > opts.lambda_ball) return false;
  }
  return true;
}

}  // namespace

double HitTimes::total() const {
  if (s_infinite || u_infinite) return kInf;
  return t_u - t_s;
}

HitTimes hit_times(const FlowSystem& sys, const Block& block, const State& x,
                   double t_max, const HitTimeOptions& opts) {
  if (!block.contains(x))
    throw DomainError("hit_times: state outside the block");
  if (t_max <= 0.0) throw DomainError("hit_times: t_max must be > 0");

  HitTimes ht;
  const auto fwd = first_crossing(sys, block, x, +1.0, t_max, opts);
  const auto bwd = first_crossing(sys, block, x, -1.0, t_max, opts);
  if (fwd) {
    ht.t_u = *fwd;
  } else {
    ht.u_infinite = true;
    ht.t_u = kInf;
  }
  if (bwd) {
    ht.t_s = -*bwd;
  } else {
    ht.s_infinite = true;
    ht.t_s = -kInf;
  }
  if (ht.s_infinite && ht.u_infinite)
    ht.in_lambda = orbit_near_lambda(sys, block, x, t_max, opts);
  return ht;
}

std::pair<std::optional<State>, std::optional<State>> boundary_projections(
    const FlowSystem& sys, const Block& block, const State& x, double t_max,
    const HitTimeOptions& opts) {
  const HitTimes ht = hit_times(sys, block, x, t_max, opts);
  std::optional<State> pi_s, pi_u;
  if (!ht.s_infinite) pi_s = sys.advance(x, ht.t_s).point;
  if (!ht.u_infinite) pi_u = sys.advance(x, ht.t_u).point;
  return {pi_s, pi_u};
}

std::vector<BoundarySide> boundary_split(const FlowSystem& sys,
                                         const Block& block,
                                         const std::vector<State>& sample,
                                         const BoundarySplitOptions& opts) {
  std::vector<BoundarySide> out;
  out.reserve(sample.size());
  for (const State& x : sample) {
    if (!block.on_boundary(x))
      throw DomainError("boundary_split: sample point off the boundary band");
    const double h = opts.derivative_step;
    const double fwd = block.indicator(sys.advance(x, h).point);
    const double bwd = block.indicator(sys.advance(x, -h).point);
    const double rate = (fwd - bwd) / (2.0 * h);
    if (std::abs(rate) <= opts.tie_tol)
      out.push_back(BoundarySide::both);
    else if (rate < 0.0)
      out.push_back(BoundarySide::sigma_s);
    else
      out.push_back(BoundarySide::sigma_u);
  }
  return out;
}

UniverseLabel classify_point(const FlowSystem& sys, const Block& block,
                             const State& x, double t_max,
                             const HitTimeOptions& opts) {
  const HitTimes ht = hit_times(sys, block, x, t_max, opts);
  UniverseLabel lab;
  lab.forward = ht.u_infinite ? UniverseLabel::Endpoint::lambda
                              : UniverseLabel::Endpoint::omega;
  lab.backward = ht.s_infinite ? UniverseLabel::Endpoint::lambda
                               : UniverseLabel::Endpoint::alpha;
  if (ht.s_infinite && ht.u_infinite) {
    lab.label = UniverseLabel::Kind::lambda;
    lab.lambda_confirmed = ht.in_lambda;
  } else if (ht.u_infinite) {
    lab.label = UniverseLabel::Kind::ws_minus_lambda;
  } else if (ht.s_infinite) {
    lab.label = UniverseLabel::Kind::wu_minus_lambda;
  } else {
    lab.label = UniverseLabel::Kind::transient;
  }
  return lab;
}

CocycleResidual cocycle_check(const FlowSystem& sys, const Block& block,
                              const State& x, double t, double t_max,
                              const HitTimeOptions& opts) {
  const FlowResult moved = sys.advance(x, t);
  if (moved.status != FlowStatus::interior || !block.contains(moved.point))
    throw DomainError("cocycle_check: phi_t(x) leaves the block");
  const HitTimes a = hit_times(sys, block, x, t_max, opts);
  const HitTimes b = hit_times(sys, block, moved.point, t_max, opts);
  CocycleResidual res;
  if (!a.u_infinite && !b.u_infinite)
    res.u_residual = std::abs(b.t_u - (a.t_u - t));
  else if (a.u_infinite != b.u_infinite)
    res.u_residual = kInf;
  if (a.transient() && b.transient())
    res.total_residual = std::abs(b.total() - a.total());
  else if (a.transient() != b.transient())
    res.total_residual = kInf;
  return res;
}

}  // namespace catena
