#pragma once

#include <functional>
#include <vector>

#include "catena/common.hpp"
#include "catena/flow.hpp"
#include "catena/metric_core.hpp"

namespace catena {

/// Parameters of the local cross sections of a regular flow. `rate` is the
/// verified lower bound a of the theta derivative over delta-close pairs.
struct SectionSpec {
  double tau = 0.3;
  double eps = 0.05;   // section radius
  double delta = 0.1;  // closeness used by the transversality bound
  double rate = 0.0;   // a > 0
  int panels = 64;     // Simpson panels for theta
};

/// Estimates the transversality rate over the sampled states and rejects the
/// parameters when the bound is not positive.
SectionSpec make_section_spec(const FlowSystem& sys,
                              const DistanceFn<State>& dist,
                              const std::vector<State>& sample, double tau,
                              double eps, double delta);

/// theta_x(y): integral of dist(x, phi_t(y)) over [0, tau].
double theta(const FlowSystem& sys, const DistanceFn<State>& dist,
             const State& x, const State& y, const SectionSpec& spec);

/// Companion rate dist(x, phi_tau(y)) - dist(x, y) = d/dt theta_x(phi_t y).
double theta_rate(const FlowSystem& sys, const DistanceFn<State>& dist,
                  const State& x, const State& y, const SectionSpec& spec);

/// Root s near s0 of theta_{x_ref}(phi_s y) = theta_{x_ref}(x_ref), placing
/// phi_s(y) on the section through x_ref. Throws ProjectionError when no
/// bracket exists within s0 +- tau.
double section_project(const FlowSystem& sys, const DistanceFn<State>& dist,
                       const State& x_ref, const State& y, double s0,
                       const SectionSpec& spec, double bisect_tol = 1e-12);

struct ReparamState {
  double s = 0.0;         // accumulated companion time h(t)
  double residual = 0.0;  // last section residual
};

/// Advances a base point together with companions kept on its moving local
/// cross section. Outer steps of tau/10 with projection after each; steps
/// halve on projection failure down to 1e-4 before giving up.
class SectionWalk {
 public:
  SectionWalk(const FlowSystem& sys, DistanceFn<State> dist, SectionSpec spec,
              State base, std::vector<State> companions);

  void advance(double dt);

  const State& base() const { return base_; }
  const State& companion(std::size_t i) const { return companions_[i]; }
  std::size_t companions_count() const { return companions_.size(); }
  double time() const { return t_; }
  const ReparamState& reparam(std::size_t i) const { return reparam_[i]; }

 private:
  void step_once(double signed_dt);

  const FlowSystem* sys_;
  DistanceFn<State> dist_;
  SectionSpec spec_;
  State base_;
  std::vector<State> companions_;
  std::vector<ReparamState> reparam_;
  double t_ = 0.0;
};

/// Pseudo-metric on pairs (x, y) of the product flow; callers pass matching
/// first components when evaluating a sectional metric.
using StatePairMetricFn =
    std::function<double(const State&, const State&, const State&, const State&)>;

/// D_x(y, z) = pm((x,y), (x,z)) after checking that y and z lie on the
/// section through x.
double sectional_metric(const StatePairMetricFn& pm, const FlowSystem& sys,
                        const DistanceFn<State>& dist, const SectionSpec& spec,
                        const State& x, const State& y, const State& z,
                        double theta_tol = 1e-6);

/// |second flow difference of D_x(y,z) - D_x(y,z)| along the reparametrized
/// product flow, companions projected at every step.
double sectional_catenary_residual(const StatePairMetricFn& pm,
                                   const FlowSystem& sys,
                                   const DistanceFn<State>& dist,
                                   const SectionSpec& spec, const State& x,
                                   const State& y, const State& z,
                                   double h = 0.05);

/// Metric on a suspension space: fiber offset of the nearest representative
/// plus the base distance after aligning epochs.
DistanceFn<State> make_suspension_distance(const FlowSystem& suspension,
                                           DistanceFn<DiscreteState> base_dist);

/// Catenary pair pseudo-metric for the suspension of the full shift with
/// nu = 1/log(lambda): the stable/unstable split of the shift metric scaled
/// by the section phase, so values along the reparametrized flow follow
/// exact e^{+-t} curves. First components of the two pairs must agree.
StatePairMetricFn make_suspension_shift_pair_metric(
    const FlowSystem& suspension, double lambda);

}  // namespace catena
