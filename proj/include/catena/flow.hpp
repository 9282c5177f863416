#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "catena/common.hpp"
#include "catena/discrete.hpp"

namespace catena {

/// State of a flow. All kinds use the coordinate vector; suspension states
/// additionally carry a base point of the suspended system in `fiber`.
///   closed_form / ode:  coords = phase-space coordinates
///   linear_model:       coords = {r, section index}
///   suspension:         coords = {s in [0, period)}, fiber = base point
///   fake_singularity:   coords = {u, fiber index}
struct State {
  std::vector<double> coords;
  std::optional<DiscreteState> fiber;
};

std::string state_to_string(const State& s);

enum class FlowStatus { interior, exited, undefined };

struct FlowResult {
  FlowStatus status = FlowStatus::undefined;
  State point;            // end state (interior) or boundary state (exited)
  double exit_time = 0.0; // signed, relative to the advance call
};

struct OdeSpec {
  std::function<void(const std::vector<double>&, std::vector<double>&)> field;
  double step = 1e-3;
  // Optional domain indicator, <= 0 inside. Exits are bisected in time.
  std::function<double(const std::vector<double>&)> domain;
};

struct ClosedFormSpec {
  std::function<State(const State&, double)> map;
  std::function<double(const std::vector<double>&)> domain;
  double probe_step = 1e-2;  // exit-detection march when a domain is set
};

struct LinearModelSpec {
  // Image of the cross section in the model space; every tuple must have
  // first coordinate exactly 1.
  std::vector<std::vector<double>> section;
};

struct SuspensionSpec {
  DiscreteSystem base;
  double nu = 1.0;  // return frequency; period = 1/nu
};

struct FakeSingularitySpec {
  // Speed W(u, fiber index), vanishing only at (0, base_index).
  std::function<double(double, int)> speed;
  int base_index = 0;
  int fiber_points = 1;
  double step = 1e-3;
};

class FlowSystem {
 public:
  enum class Kind { closed_form, ode, linear_model, suspension, fake_singularity };

  Kind kind() const { return kind_; }

  /// Flows x for time t (either sign). Closed forms evaluate exactly; the
  /// ode kind runs fixed-step RK4 with a final partial step; domain exits
  /// are refined by bisection to 1e-9 in time.
  FlowResult advance(const State& x, double t) const;

  // Suspension accessors.
  double period() const;
  const DiscreteSystem& base_system() const;

  const LinearModelSpec& linear_spec() const;

  static FlowSystem closed_form(ClosedFormSpec spec);
  static FlowSystem ode(OdeSpec spec);
  static FlowSystem linear_model(LinearModelSpec spec);
  static FlowSystem suspension(SuspensionSpec spec);
  static FlowSystem fake_singularity(FakeSingularitySpec spec);

 private:
  FlowSystem() = default;
  Kind kind_ = Kind::closed_form;
  ClosedFormSpec closed_;
  OdeSpec ode_;
  LinearModelSpec linear_;
  SuspensionSpec susp_;
  FakeSingularitySpec fake_;
};

FlowSystem make_linear_attractor(LinearModelSpec spec);
FlowSystem make_suspension(const DiscreteSystem& base, double nu);
FlowSystem make_fake_singularity(FakeSingularitySpec spec);

// Closed-form catalog used by scenarios and tests.
FlowSystem make_saddle_flow();                    // x' = x, y' = -y
FlowSystem make_saddle_ode(double step = 1e-3);
FlowSystem make_contraction_flow(double rate = 1.0, std::size_t dim = 1);
FlowSystem make_contraction_ode(double rate = 1.0, std::size_t dim = 1,
                                double step = 1e-3);
FlowSystem make_rotation_flow();                  // unit-speed circle, state = angle

struct TraceEntry {
  double t = 0.0;
  State state;
  bool exit_event = false;
};

/// States at uniform sample times in [t0, t1], truncated at a domain exit
/// with the refined exit event appended.
std::vector<TraceEntry> orbit_trace(const FlowSystem& sys, const State& x,
                                    double t0, double t1, double step);

}  // namespace catena
