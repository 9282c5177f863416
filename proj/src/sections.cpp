#include "catena/sections.hpp"

#include <algorithm>
#include <cmath>

#include "catena/discrete.hpp"

namespace catena {

namespace {

State flow_to(const FlowSystem& sys, const State& x, double t) {
  const FlowResult r = sys.advance(x, t);
  if (r.status != FlowStatus::interior)
    throw TruncationError("section evaluation left the flow domain",
                          r.exit_time);
  return r.point;
}

}  // namespace

double theta(const FlowSystem& sys, const DistanceFn<State>& dist,
             const State& x, const State& y, const SectionSpec& spec) {
  const int n = spec.panels;
  if (n < 2 || n % 2 != 0)
    throw SpecError("theta: panel count must be even and >= 2");
  const double h = spec.tau / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const State yi = (i == 0) ? y : flow_to(sys, y, h * i);
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * dist(x, yi);
  }
  return sum * h / 3.0;
}

double theta_rate(const FlowSystem& sys, const DistanceFn<State>& dist,
                  const State& x, const State& y, const SectionSpec& spec) {
  return dist(x, flow_to(sys, y, spec.tau)) - dist(x, y);
}

SectionSpec make_section_spec(const FlowSystem& sys,
                              const DistanceFn<State>& dist,
                              const std::vector<State>& sample, double tau,
                              double eps, double delta) {
  if (tau <= 0.0 || eps <= 0.0 || delta <= 0.0)
    throw SpecError("make_section_spec: parameters must be positive");
  SectionSpec spec;
  spec.tau = tau;
  spec.eps = eps;
  spec.delta = delta;
  double rate = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const State& x : sample)
    for (const State& y : sample) {
      if (dist(x, y) > delta) continue;
      rate = std::min(rate, theta_rate(sys, dist, x, y, spec));
      any = true;
    }
  if (!any)
    throw SpecError("make_section_spec: no delta-close sample pairs to test");
  if (!(rate > 0.0))
    throw SpecError(
        "make_section_spec: transversality bound is not positive; the flow is "
        "not regular at this scale");
  spec.rate = rate;
  return spec;
}

double section_project(const FlowSystem& sys, const DistanceFn<State>& dist,
                       const State& x_ref, const State& y, double s0,
                       const SectionSpec& spec, double bisect_tol) {
  if (dist(x_ref, flow_to(sys, y, s0)) > spec.eps)
    throw DomainError("section_project: start point outside the section ball");
  const double target = theta(sys, dist, x_ref, x_ref, spec);
  auto g = [&](double s) {
    return theta(sys, dist, x_ref, flow_to(sys, y, s), spec) - target;
  };
  // Bracket the root within s0 +- tau; g is increasing near the section.
  const int scan = 50;
  const double span = spec.tau;
  double lo = s0, hi = s0;
  double glo = g(s0), ghi = glo;
  if (glo == 0.0) return s0;
  bool bracketed = false;
  for (int k = 1; k <= scan; ++k) {
    const double step = span * k / scan;
    if (glo > 0.0) {
      hi = lo;
      ghi = glo;
      lo = s0 - step;
      glo = g(lo);
      if (glo <= 0.0) {
        bracketed = true;
        break;
      }
    } else {
      lo = hi;
      glo = ghi;
      hi = s0 + step;
      ghi = g(hi);
      if (ghi >= 0.0) {
        bracketed = true;
        break;
      }
    }
  }
  if (!bracketed)
    throw ProjectionError("section_project: no bracket within s0 +- tau");
  while (hi - lo > bisect_tol) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) <= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

SectionWalk::SectionWalk(const FlowSystem& sys, DistanceFn<State> dist,
                         SectionSpec spec, State base,
                         std::vector<State> companions)
    : sys_(&sys),
      dist_(std::move(dist)),
      spec_(spec),
      base_(std::move(base)),
      companions_(std::move(companions)),
      reparam_(companions_.size()) {}

void SectionWalk::step_once(double signed_dt) {
  const State new_base = flow_to(*sys_, base_, signed_dt);
  const double target = theta(*sys_, dist_, new_base, new_base, spec_);
  std::vector<State> moved;
  std::vector<ReparamState> rep = reparam_;
  moved.reserve(companions_.size());
  for (std::size_t i = 0; i < companions_.size(); ++i) {
    const double s =
        section_project(*sys_, dist_, new_base, companions_[i], signed_dt, spec_);
    State c = flow_to(*sys_, companions_[i], s);
    rep[i].s += s;
    rep[i].residual =
        std::abs(theta(*sys_, dist_, new_base, c, spec_) - target);
    moved.push_back(std::move(c));
  }
  base_ = new_base;
  companions_ = std::move(moved);
  reparam_ = std::move(rep);
  t_ += signed_dt;
}

void SectionWalk::advance(double dt) {
  const double dir = (dt >= 0.0) ? 1.0 : -1.0;
  double remaining = std::abs(dt);
  double step = spec_.tau / 10.0;
  constexpr double kMinStep = 1e-4;
  while (remaining > 1e-15) {
    const double h = std::min(step, remaining);
    try {
      step_once(dir * h);
      remaining -= h;
    } catch (const ProjectionError&) {
      step *= 0.5;
      if (step < kMinStep) throw;
    }
  }
}

double sectional_metric(const StatePairMetricFn& pm, const FlowSystem& sys,
                        const DistanceFn<State>& dist, const SectionSpec& spec,
                        const State& x, const State& y, const State& z,
                        double theta_tol) {
  const double target = theta(sys, dist, x, x, spec);
  for (const State* p : {&y, &z}) {
    if (dist(x, *p) > spec.eps + theta_tol)
      throw DomainError("sectional_metric: point outside the section ball");
    if (std::abs(theta(sys, dist, x, *p, spec) - target) > theta_tol)
      throw DomainError("sectional_metric: point off the section");
  }
  return pm(x, y, x, z);
}

double sectional_catenary_residual(const StatePairMetricFn& pm,
                                   const FlowSystem& sys,
                                   const DistanceFn<State>& dist,
                                   const SectionSpec& spec, const State& x,
                                   const State& y, const State& z, double h) {
  const double d0 = pm(x, y, x, z);
  SectionWalk fwd(sys, dist, spec, x, {y, z});
  fwd.advance(h);
  const double dp = pm(fwd.base(), fwd.companion(0), fwd.base(), fwd.companion(1));
  SectionWalk bwd(sys, dist, spec, x, {y, z});
  bwd.advance(-h);
  const double dm = pm(bwd.base(), bwd.companion(0), bwd.base(), bwd.companion(1));
  return std::abs((dp - 2.0 * d0 + dm) / (h * h) - d0);
}

DistanceFn<State> make_suspension_distance(const FlowSystem& suspension,
                                           DistanceFn<DiscreteState> base_dist) {
  const double period = suspension.period();
  const DiscreteSystem base = suspension.base_system();
  return [period, base, bd = std::move(base_dist)](const State& p,
                                                   const State& q) -> double {
    if (p.coords.size() != 1 || !p.fiber || q.coords.size() != 1 || !q.fiber)
      throw DomainError("suspension distance: not suspension states");
    const auto k = std::llround((q.coords[0] - p.coords[0]) / period);
    const double u = q.coords[0] - static_cast<double>(k) * period - p.coords[0];
    const DiscreteState aligned = base.iterate(*q.fiber, k);
    return std::abs(u) + bd(*p.fiber, aligned);
  };
}

StatePairMetricFn make_suspension_shift_pair_metric(
    const FlowSystem& suspension, double lambda) {
  const double period = suspension.period();
  const DiscreteSystem base = suspension.base_system();
  return [period, base, lambda](const State& x1, const State& y1,
                                const State& x2, const State& y2) -> double {
    if (!y1.fiber || !y2.fiber)
      throw DomainError("pair metric: companions must be suspension states");
    const double phase_time = 0.5 * (x1.coords[0] + x2.coords[0]);
    auto aligned = [&](const State& y) {
      const auto k = std::llround((y.coords[0] - phase_time) / period);
      const DiscreteState z = base.iterate(*y.fiber, k);
      const auto* sp = std::get_if<SymbolicPoint>(&z);
      if (!sp) throw DomainError("pair metric: base points must be shift points");
      return *sp;
    };
    const SymbolicPoint a = aligned(y1);
    const SymbolicPoint b = aligned(y2);
    const double phase = phase_time / period;  // in [0, 1)
    const double growing = shift_metric_future(a, b, lambda);
    const double decaying = shift_metric_past(a, b, lambda);
    return growing * std::pow(lambda, phase) +
           decaying * std::pow(lambda, -phase);
  };
}

}  // namespace catena
