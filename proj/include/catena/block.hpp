#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "catena/common.hpp"
#include "catena/flow.hpp"

namespace catena {

/// Isolating block as the sublevel set {indicator <= level}.
struct Block {
  std::function<double(const State&)> indicator;  // L1
  double level = 1.0;                             // delta
  double band = 1e-9;                             // boundary tolerance in L1 units
  // Optional distance to the designated isolated set; confirms membership
  // when both hit times are infinite.
  std::function<double(const State&)> lambda_distance;

  bool contains(const State& x) const { return indicator(x) <= level + band; }
  bool on_boundary(const State& x) const {
    return std::abs(indicator(x) - level) <= band;
  }
};

struct HitTimeOptions {
  double march = 0.05;       // forward/backward probe spacing
  double bisect_tol = 1e-9;  // time tolerance of the crossing refinement
  double lambda_ball = 1e-6; // orbit-proximity requirement for the isolated set
};

/// Exit times of the orbit through x from the block. t_s <= 0 <= t_u; an
/// infinite side is flagged and stored as +-infinity.
struct HitTimes {
  double t_s = 0.0;
  double t_u = 0.0;
  bool s_infinite = false;
  bool u_infinite = false;
  bool in_lambda = false;

  bool in_ws() const { return u_infinite; }  // forward orbit stays in the block
  bool in_wu() const { return s_infinite; }
  bool transient() const { return !s_infinite && !u_infinite; }
  double total() const;  // t_u - t_s, infinite when a side is
};

HitTimes hit_times(const FlowSystem& sys, const Block& block, const State& x,
                   double t_max, const HitTimeOptions& opts = {});

/// Boundary points at the refined hit times; a side is absent exactly when
/// the corresponding hit time is infinite.
std::pair<std::optional<State>, std::optional<State>> boundary_projections(
    const FlowSystem& sys, const Block& block, const State& x, double t_max,
    const HitTimeOptions& opts = {});

enum class BoundarySide { sigma_s, sigma_u, both };

struct BoundarySplitOptions {
  double derivative_step = 1e-5;
  double tie_tol = 1e-7;
};

/// Labels boundary sample points by the sign of the flow derivative of the
/// indicator: entering orbits (<= 0) belong to Sigma_s, exiting (>= 0) to
/// Sigma_u, ties to both.
std::vector<BoundarySide> boundary_split(const FlowSystem& sys,
                                         const Block& block,
                                         const std::vector<State>& sample,
                                         const BoundarySplitOptions& opts = {});

struct UniverseLabel {
  enum class Kind { lambda, ws_minus_lambda, wu_minus_lambda, transient };
  enum class Endpoint { lambda, alpha, omega };
  Kind label = Kind::transient;
  Endpoint forward = Endpoint::omega;
  Endpoint backward = Endpoint::alpha;
  bool lambda_confirmed = false;  // orbit verified near the designated set
};

UniverseLabel classify_point(const FlowSystem& sys, const Block& block,
                             const State& x, double t_max,
                             const HitTimeOptions& opts = {});

struct CocycleResidual {
  double u_residual = 0.0;      // |T^u(phi_t x) - (T^u(x) - t)|
  double total_residual = 0.0;  // |T(phi_t x) - T(x)|
};

CocycleResidual cocycle_check(const FlowSystem& sys, const Block& block,
                              const State& x, double t, double t_max,
                              const HitTimeOptions& opts = {});

}  // namespace catena
