#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "catena/block.hpp"
#include "catena/common.hpp"
#include "catena/flow.hpp"
#include "catena/metric_core.hpp"

namespace catena {

/// Scalar field over flow states together with the exponent a of the
/// relation Lddot = a^2 L it is expected to satisfy.
struct ScalarField {
  std::function<double(const State&)> value;
  double exponent = 1.0;
};

/// Central flow differences. First derivative uses step 1e-5, second
/// derivative 1e-4; both balance truncation against cancellation at double
/// precision.
double flow_derivative(const std::function<double(const State&)>& value,
                       const FlowSystem& sys, const State& x, double h = 1e-5);
double flow_second_difference(const std::function<double(const State&)>& value,
                              const FlowSystem& sys, const State& x,
                              double h = 1e-4);

// ---------------------------------------------------------------------------

struct AttractorLyapunovOptions {
  int samples = 10000;
  double ball = 1e-6;
};

/// Whitney size of the sampled forward orbit of x united with the attractor
/// point. Zero at the attractor, strictly decreasing along orbits.
double attractor_lyapunov(const FlowSystem& sys, const DistanceFn<State>& dist,
                          const State& attractor_point,
                          const SizeFunctionSpec<State>& spec, double horizon,
                          const State& x,
                          const AttractorLyapunovOptions& opts = {});

struct SmoothedValue {
  double value = 0.0;       // integral of L along [0, tau]
  double derivative = 0.0;  // L(phi_tau x) - L(x), exact difference formula
};

/// Orbital smoothing of a continuous Lyapunov function by composite Simpson
/// quadrature (64 panels by default).
SmoothedValue smooth_lyapunov(const std::function<double(const State&)>& L,
                              const FlowSystem& sys, double tau, const State& x,
                              int panels = 64);

struct ExactDecayOptions {
  double horizon = 50.0;
  double march = 0.05;
  double bisect_tol = 1e-12;
};

/// L(x) = e^{-a tau(x)} where tau is the signed orbit time from the level
/// section {V = level} to x. Satisfies L(phi_t x) = e^{-a t} L(x) up to the
/// time-solve tolerance.
double exact_decay_lyapunov(const FlowSystem& sys,
                            const std::function<double(const State&)>& V,
                            double level, double a, const State& x,
                            const ExactDecayOptions& opts = {});

/// Model-space pseudo-metric of a linear attractor: the Euclidean norm of
/// the difference of cone representations. Decays exactly by e^{-t}.
double linear_pseudometric(const FlowSystem& sys, const State& x,
                           const State& y);

// ---------------------------------------------------------------------------

struct BVPSpec {
  std::function<double(const State&)> boundary;  // f on the block boundary
  double exponent = 1.0;                         // a > 0
  bool require_positive = true;
};

/// Unique continuous solution of Lddot = a^2 L on the block with boundary
/// data f: hyperbolic-sine interpolation of the boundary values at the hit
/// times on transient orbits, exponential branches on W^s / W^u, zero on the
/// isolated set. Evaluated in a form stable for large a T.
double catenary_bvp(const FlowSystem& sys, const Block& block,
                    const BVPSpec& spec, const State& x, double t_max,
                    const HitTimeOptions& opts = {});

/// Values of a catenary boundary solve along the orbit through one point,
/// evaluated through the hit-time cocycle T^{s,u}(phi_t x) = T^{s,u}(x) - t.
/// The boundary data is fixed at the orbit's own projections, so at(t) is a
/// smooth function of t; combined with an independent cocycle check this
/// gives residuals free of hit-time quantization noise.
class BvpOrbitValues {
 public:
  enum class Branch { isolated, stable, unstable, transient };

  double at(double t) const;
  double value() const { return at(0.0); }
  Branch branch() const { return branch_; }
  /// Largest forward time still inside the block (infinite on W^s).
  double forward_window() const { return t_u_; }

 private:
  friend BvpOrbitValues make_bvp_orbit_values(const FlowSystem&, const Block&,
                                              const BVPSpec&, const State&,
                                              double, const HitTimeOptions&);
  Branch branch_ = Branch::isolated;
  double a_ = 1.0;
  double f_s_ = 0.0, f_u_ = 0.0;
  double t_s_ = 0.0, t_u_ = 0.0;
};

BvpOrbitValues make_bvp_orbit_values(const FlowSystem& sys, const Block& block,
                                     const BVPSpec& spec, const State& x,
                                     double t_max,
                                     const HitTimeOptions& opts = {});

/// Sum of an exact-growth and an exact-decay field with a common exponent.
ScalarField catenary_sum_function(const ScalarField& alpha,
                                  const ScalarField& omega);

struct PseudoMetric {
  std::function<double(const State&, const State&)> value;
  double exponent = 1.0;
};

PseudoMetric catenary_sum_pseudometric(const PseudoMetric& alpha,
                                       const PseudoMetric& omega);

/// Conley-style decreasing function -Ldot of a catenary field, estimated by
/// the central difference.
double derived_decreasing(const ScalarField& L, const FlowSystem& sys,
                          const State& x, double h = 1e-5);

// ---------------------------------------------------------------------------

struct CatenaryViolation {
  State point;
  double value = 0.0;
  double ldot = 0.0;
  double lddot = 0.0;
};

struct CatenaryReport {
  double max_residual = 0.0;  // max |Lddot - a^2 L| over the grid
  State worst_point;
  std::size_t grid_points = 0;
  std::vector<CatenaryViolation> hyperbolicity;  // off-Lambda with Lddot <= 0
  std::vector<CatenaryViolation> positivity;     // negative values
  double constant_drift = 0.0;  // max |c(phi_t x) - c(x)|, c = Ldot^2 - a^2 L^2
};

struct VerifyOptions {
  double first_step = 1e-5;
  double second_step = 1e-4;
  double lambda_exclusion = 1e-9;  // skip hyperbolicity this close to Lambda
  double positivity_tol = 1e-12;
  std::optional<State> drift_start;
  double drift_span = 5.0;
  int drift_samples = 32;
  std::size_t max_witnesses = 16;
};

/// Grid verification of the catenary relation, the hyperbolicity clause
/// (Lddot > 0 off the isolated set) and the constant of motion
/// Ldot^2 - a^2 L^2 along one orbit.
CatenaryReport verify_catenary(const ScalarField& field, const FlowSystem& sys,
                               const std::vector<State>& grid,
                               const Block* block = nullptr,
                               const VerifyOptions& opts = {});

/// Catenary boundary value problem of a suspension flow evaluated at the
/// zero-fiber representative of a base point.
double suspension_catenary(const FlowSystem& suspension, const Block& block,
                           const BVPSpec& spec, const DiscreteState& x,
                           double t_max, const HitTimeOptions& opts = {});

}  // namespace catena
