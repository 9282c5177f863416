#include "catena/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace catena {

std::string state_to_string(const State& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.coords.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(s.coords[i]);
  }
  out += ")";
  if (s.fiber) out += "@" + discrete_to_string(*s.fiber);
  return out;
}

namespace {

constexpr double kExitTimeTol = 1e-9;

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

std::vector<double> rk4_step(
    const std::function<void(const std::vector<double>&, std::vector<double>&)>&
        field,
    const std::vector<double>& y, double h) {
  const std::size_t d = y.size();
  std::vector<double> k1(d), k2(d), k3(d), k4(d), tmp(d), out(d);
  field(y, k1);
  for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  field(tmp, k2);
  for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  field(tmp, k3);
  for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + h * k3[i];
  field(tmp, k4);
  for (std::size_t i = 0; i < d; ++i)
    out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

FlowResult advance_closed(const ClosedFormSpec& spec, const State& x, double t) {
  if (!spec.domain) {
    FlowResult r;
    r.status = FlowStatus::interior;
    r.point = spec.map(x, t);
    return r;
  }
  if (spec.domain(x.coords) > 0.0)
    throw DomainError("advance: state outside the flow domain");
  const double dir = (t >= 0.0) ? 1.0 : -1.0;
  const double len = std::abs(t);
  double inside = 0.0;
  double probe = spec.probe_step;
  for (double s = std::min(probe, len);; s = std::min(s + probe, len)) {
    const State ps = spec.map(x, dir * s);
    if (spec.domain(ps.coords) > 0.0) {
      // bisect the exit in (inside, s]
      double lo = inside, hi = s;
      while (hi - lo > kExitTimeTol) {
        const double mid = 0.5 * (lo + hi);
        if (spec.domain(spec.map(x, dir * mid).coords) > 0.0)
          hi = mid;
        else
          lo = mid;
      }
      FlowResult r;
      r.status = FlowStatus::exited;
      r.exit_time = dir * 0.5 * (lo + hi);
      r.point = spec.map(x, r.exit_time);
      return r;
    }
    inside = s;
    if (s >= len) break;
  }
  FlowResult r;
  r.status = FlowStatus::interior;
  r.point = spec.map(x, t);
  return r;
}

FlowResult advance_ode(const OdeSpec& spec, const State& x, double t) {
  if (!all_finite(x.coords))
    throw DomainError("advance: state has non-finite coordinates");
  if (spec.domain && spec.domain(x.coords) > 0.0)
    throw DomainError("advance: state outside the flow domain");
  const double dir = (t >= 0.0) ? 1.0 : -1.0;
  double remaining = std::abs(t);
  std::vector<double> y = x.coords;
  double elapsed = 0.0;
  while (remaining > 0.0) {
    const double h = std::min(spec.step, remaining);
    std::vector<double> ynext = rk4_step(spec.field, y, dir * h);
    if (!all_finite(ynext))
      throw DivergenceError("advance: integration diverged", dir * elapsed);
    if (spec.domain && spec.domain(ynext) > 0.0) {
      double lo = 0.0, hi = h;  // partial step from y
      while (hi - lo > kExitTimeTol) {
        const double mid = 0.5 * (lo + hi);
        if (spec.domain(rk4_step(spec.field, y, dir * mid)) > 0.0)
          hi = mid;
        else
          lo = mid;
      }
      const double frac = 0.5 * (lo + hi);
      FlowResult r;
      r.status = FlowStatus::exited;
      r.exit_time = dir * (elapsed + frac);
      r.point.coords = rk4_step(spec.field, y, dir * frac);
      return r;
    }
    y = std::move(ynext);
    elapsed += h;
    remaining -= h;
  }
  FlowResult r;
  r.status = FlowStatus::interior;
  r.point.coords = std::move(y);
  return r;
}

FlowResult advance_linear(const LinearModelSpec& spec, const State& x, double t) {
  if (x.coords.size() != 2)
    throw DomainError("linear model state must be (r, section index)");
  const double r = x.coords[0];
  const auto idx = static_cast<std::size_t>(x.coords[1]);
  if (r < -1e-12 || r > 1.0 + 1e-12)
    throw DomainError("linear model: r outside [0, 1]");
  if (idx >= spec.section.size())
    throw DomainError("linear model: section index out of range");
  const double r2 = r * std::exp(-t);
  if (r2 > 1.0 + 1e-15) {
    // The backward orbit leaves the cone where r e^{-t} = 1.
    FlowResult out;
    out.status = FlowStatus::exited;
    out.exit_time = std::log(r);
    out.point.coords = {1.0, x.coords[1]};
    return out;
  }
  FlowResult out;
  out.status = FlowStatus::interior;
  out.point.coords = {r2, x.coords[1]};
  return out;
}

FlowResult advance_suspension(const SuspensionSpec& spec, const State& x,
                              double t) {
  if (x.coords.size() != 1 || !x.fiber)
    throw DomainError("suspension state must be (s, base point)");
  const double period = 1.0 / spec.nu;
  const double s = x.coords[0];
  if (s < 0.0 || s >= period + 1e-12)
    throw DomainError("suspension: fiber coordinate outside [0, period)");
  double raw = s + t;
  auto wraps = static_cast<std::int64_t>(std::floor(raw * spec.nu));
  double rep = raw - static_cast<double>(wraps) * period;
  while (rep >= period) {
    rep -= period;
    ++wraps;
  }
  while (rep < 0.0) {
    rep += period;
    --wraps;
  }
  FlowResult out;
  out.status = FlowStatus::interior;
  out.point.coords = {rep};
  out.point.fiber = spec.base.iterate(*x.fiber, wraps);
  return out;
}

FlowResult advance_fake(const FakeSingularitySpec& spec, const State& x,
                        double t) {
  if (x.coords.size() != 2)
    throw DomainError("fake singularity state must be (u, fiber index)");
  const int idx = static_cast<int>(x.coords[1]);
  if (idx < 0 || idx >= spec.fiber_points)
    throw DomainError("fake singularity: fiber index out of range");
  if (x.coords[0] == 0.0 && idx == spec.base_index) {
    // the fixed point itself
    FlowResult out;
    out.status = FlowStatus::interior;
    out.point = x;
    return out;
  }
  const double dir = (t >= 0.0) ? 1.0 : -1.0;
  double remaining = std::abs(t);
  double u = x.coords[0];
  double elapsed = 0.0;
  auto f = [&](const std::vector<double>& y, std::vector<double>& dy) {
    const double w = spec.speed(y[0], idx);
    if (w < 0.0) throw SpecError("fake singularity: negative speed sampled");
    dy[0] = dir * w;
  };
  std::vector<double> y{u};
  while (remaining > 0.0) {
    double h = std::min(spec.step, remaining);
    if (idx == spec.base_index)
      h = std::min(h, std::abs(y[0]) / 2.0 + 1e-12);  // non-Lipschitz slowdown at u = 0
    y = rk4_step(f, y, h);
    if (!std::isfinite(y[0]))
      throw DivergenceError("fake singularity: integration diverged",
                            dir * elapsed);
    elapsed += h;
    remaining -= h;
  }
  FlowResult out;
  out.status = FlowStatus::interior;
  out.point.coords = {y[0], x.coords[1]};
  return out;
}

}  // namespace

FlowResult FlowSystem::advance(const State& x, double t) const {
  switch (kind_) {
    case Kind::closed_form:
      return advance_closed(closed_, x, t);
    case Kind::ode:
      return advance_ode(ode_, x, t);
    case Kind::linear_model:
      return advance_linear(linear_, x, t);
    case Kind::suspension:
      return advance_suspension(susp_, x, t);
    case Kind::fake_singularity:
      return advance_fake(fake_, x, t);
  }
  throw DomainError("advance: unknown system kind");
}

double FlowSystem::period() const {
  if (kind_ != Kind::suspension)
    throw DomainError("period: not a suspension system");
  return 1.0 / susp_.nu;
}

const DiscreteSystem& FlowSystem::base_system() const {
  if (kind_ != Kind::suspension)
    throw DomainError("base_system: not a suspension system");
  return susp_.base;
}

const LinearModelSpec& FlowSystem::linear_spec() const {
  if (kind_ != Kind::linear_model)
    throw DomainError("linear_spec: not a linear model");
  return linear_;
}

FlowSystem FlowSystem::closed_form(ClosedFormSpec spec) {
  FlowSystem sys;
  sys.kind_ = Kind::closed_form;
  sys.closed_ = std::move(spec);
  return sys;
}

FlowSystem FlowSystem::ode(OdeSpec spec) {
  if (!spec.field) throw SpecError("ode system needs a vector field");
  if (spec.step <= 0.0) throw SpecError("ode step must be > 0");
  FlowSystem sys;
  sys.kind_ = Kind::ode;
  sys.ode_ = std::move(spec);
  return sys;
}

FlowSystem FlowSystem::linear_model(LinearModelSpec spec) {
  if (spec.section.empty())
    throw SpecError("linear model: empty section image");
  for (const auto& v : spec.section) {
    if (v.empty() || v[0] != 1.0)
      throw SpecError("linear model: every tuple must have first coordinate 1");
    double norm2 = 0.0;
    for (double c : v) norm2 += c * c;
    if (!std::isfinite(norm2))
      throw SpecError("linear model: non-finite tuple norm");
  }
  FlowSystem sys;
  sys.kind_ = Kind::linear_model;
  sys.linear_ = std::move(spec);
  return sys;
}

FlowSystem FlowSystem::suspension(SuspensionSpec spec) {
  if (spec.nu <= 0.0) throw SpecError("suspension: nu must be > 0");
  if (!spec.base.forward || !spec.base.backward)
    throw SpecError("suspension: base map must be invertible");
  FlowSystem sys;
  sys.kind_ = Kind::suspension;
  sys.susp_ = std::move(spec);
  return sys;
}

namespace {

void validate_fake_spec(const FakeSingularitySpec& spec) {
  if (!spec.speed) throw SpecError("fake singularity: missing speed oracle");
  if (spec.fiber_points < 1 || spec.base_index < 0 ||
      spec.base_index >= spec.fiber_points)
    throw SpecError("fake singularity: invalid fiber configuration");
  if (std::abs(spec.speed(0.0, spec.base_index)) > 1e-15)
    throw SpecError("fake singularity: speed must vanish at the fixed point");
  const double sample_u[] = {-1.0, -0.5, -0.1, -0.01, 0.01, 0.1, 0.5, 1.0};
  for (int idx = 0; idx < spec.fiber_points; ++idx) {
    for (double u : sample_u) {
      if (spec.speed(u, idx) <= 0.0)
        throw SpecError("fake singularity: speed must be positive off the fixed point");
    }
    if (idx != spec.base_index && spec.speed(0.0, idx) <= 0.0)
      throw SpecError("fake singularity: speed must be positive off the fixed point");
  }
  // Divergent time to the fixed point along the base fiber: W(u) <= C|u|
  // near 0 forces integral of 1/W to diverge. Checked via bounded ratios.
  double ratio_ref = 0.0;
  for (int k = 1; k <= 9; ++k) {
    const double u = std::pow(10.0, -k);
    const double rp = spec.speed(u, spec.base_index) / u;
    const double rm = spec.speed(-u, spec.base_index) / u;
    if (k == 1) ratio_ref = std::max(rp, rm);
    if (rp > 1e3 * (1.0 + ratio_ref) || rm > 1e3 * (1.0 + ratio_ref))
      throw SpecError(
          "fake singularity: speed does not vanish slowly enough at the fixed "
          "point (finite-time arrival)");
  }
}

}  // namespace

FlowSystem FlowSystem::fake_singularity(FakeSingularitySpec spec) {
  validate_fake_spec(spec);
  FlowSystem sys;
  sys.kind_ = Kind::fake_singularity;
  sys.fake_ = std::move(spec);
  return sys;
}

FlowSystem make_linear_attractor(LinearModelSpec spec) {
  return FlowSystem::linear_model(std::move(spec));
}

FlowSystem make_suspension(const DiscreteSystem& base, double nu) {
  return FlowSystem::suspension(SuspensionSpec{base, nu});
}

FlowSystem make_fake_singularity(FakeSingularitySpec spec) {
  return FlowSystem::fake_singularity(std::move(spec));
}

FlowSystem make_saddle_flow() {
  ClosedFormSpec spec;
  spec.map = [](const State& x, double t) -> State {
    if (x.coords.size() != 2) throw DomainError("saddle state must be planar");
    return State{{x.coords[0] * std::exp(t), x.coords[1] * std::exp(-t)}, {}};
  };
  return FlowSystem::closed_form(std::move(spec));
}

FlowSystem make_saddle_ode(double step) {
  OdeSpec spec;
  spec.field = [](const std::vector<double>& y, std::vector<double>& dy) {
    dy[0] = y[0];
    dy[1] = -y[1];
  };
  spec.step = step;
  return FlowSystem::ode(std::move(spec));
}

FlowSystem make_contraction_flow(double rate, std::size_t dim) {
  ClosedFormSpec spec;
  spec.map = [rate, dim](const State& x, double t) -> State {
    if (x.coords.size() != dim)
      throw DomainError("contraction state has wrong dimension");
    State out = x;
    const double f = std::exp(-rate * t);
    for (double& c : out.coords) c *= f;
    return out;
  };
  return FlowSystem::closed_form(std::move(spec));
}

FlowSystem make_contraction_ode(double rate, std::size_t dim, double step) {
  OdeSpec spec;
  spec.field = [rate, dim](const std::vector<double>& y, std::vector<double>& dy) {
    for (std::size_t i = 0; i < dim; ++i) dy[i] = -rate * y[i];
  };
  spec.step = step;
  return FlowSystem::ode(std::move(spec));
}

FlowSystem make_rotation_flow() {
  ClosedFormSpec spec;
  spec.map = [](const State& x, double t) -> State {
    if (x.coords.size() != 1)
      throw DomainError("rotation state must be a single angle");
    constexpr double two_pi = 6.283185307179586476925286766559;
    double a = std::fmod(x.coords[0] + t, two_pi);
    if (a < 0.0) a += two_pi;
    return State{{a}, {}};
  };
  return FlowSystem::closed_form(std::move(spec));
}

std::vector<TraceEntry> orbit_trace(const FlowSystem& sys, const State& x,
                                    double t0, double t1, double step) {
  if (!(t0 < t1)) throw DomainError("orbit_trace: need t0 < t1");
  if (step <= 0.0) throw DomainError("orbit_trace: step must be > 0");
  std::vector<TraceEntry> out;
  State cur = x;
  double cur_t = 0.0;
  for (std::int64_t k = 0;; ++k) {
    const double tk = t0 + static_cast<double>(k) * step;
    if (tk > t1 + 1e-12) break;
    const FlowResult r = sys.advance(cur, tk - cur_t);
    if (r.status == FlowStatus::exited) {
      out.push_back({cur_t + r.exit_time, r.point, true});
      return out;
    }
    cur = r.point;
    cur_t = tk;
    out.push_back({tk, cur, false});
  }
  return out;
}

}  // namespace catena
