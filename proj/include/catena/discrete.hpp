#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "catena/common.hpp"
#include "catena/metric_core.hpp"

namespace catena {

// ---------------------------------------------------------------------------
// Points of the full 2-shift with finitely many 1s over a background of 0s.
// Stored as the sorted list of coordinates carrying symbol 1; this is the
// canonical form, so equality of points is equality of the stored lists.

class SymbolicPoint {
 public:
  SymbolicPoint() = default;
  explicit SymbolicPoint(std::vector<std::int64_t> one_coords);

  int at(std::int64_t n) const;
  const std::vector<std::int64_t>& ones() const { return ones_; }

  /// Applies the left shift k times: the symbol at coordinate n+k moves to n.
  SymbolicPoint shifted(std::int64_t k) const;

  friend bool operator==(const SymbolicPoint&, const SymbolicPoint&) = default;

 private:
  std::vector<std::int64_t> ones_;
};

/// Sum of lambda^{-|n|} over the coordinates where x and y disagree.
double shift_metric(const SymbolicPoint& x, const SymbolicPoint& y,
                    double lambda);
/// Partial sums over n >= 0 (grows under the shift while symbols at 0 agree)
/// and n < 0 (decays). shift_metric = future + past.
double shift_metric_future(const SymbolicPoint& x, const SymbolicPoint& y,
                           double lambda);
double shift_metric_past(const SymbolicPoint& x, const SymbolicPoint& y,
                         double lambda);

// ---------------------------------------------------------------------------

struct TorusPoint {
  double u = 0.0, v = 0.0;
  friend bool operator==(const TorusPoint&, const TorusPoint&) = default;
};

double flat_torus_distance(const TorusPoint& a, const TorusPoint& b);

struct DiscretePair;

using DiscreteState = std::variant<SymbolicPoint, TorusPoint, std::int64_t,
                                   std::shared_ptr<const DiscretePair>>;

struct DiscretePair {
  DiscreteState first;
  DiscreteState second;
};

DiscreteState make_pair_state(DiscreteState a, DiscreteState b);
const DiscretePair& as_pair(const DiscreteState& s);
bool states_equal(const DiscreteState& a, const DiscreteState& b);
std::string discrete_to_string(const DiscreteState& s);

// ---------------------------------------------------------------------------

struct DiscreteSystem {
  enum class Kind { full_shift_2, toral_automorphism, finite_permutation, pair_system };
  Kind kind;
  std::function<DiscreteState(const DiscreteState&)> forward;
  std::function<DiscreteState(const DiscreteState&)> backward;

  DiscreteState iterate(const DiscreteState& x, std::int64_t n) const;
};

DiscreteSystem make_full_shift();
/// Hyperbolic automorphism of the 2-torus with matrix rows (2 1) and (1 1).
DiscreteSystem make_toral_automorphism();
DiscreteSystem make_finite_permutation(std::vector<int> perm);
DiscreteSystem make_pair_system(const DiscreteSystem& base);

/// L(f(x)) - 2 L(x) + L(f^{-1}(x)).
double second_difference(const std::function<double(const DiscreteState&)>& L,
                         const DiscreteSystem& f, const DiscreteState& x);

// ---------------------------------------------------------------------------

struct CatenaryRoots {
  double lambda_s;
  double lambda_u;
};

/// Roots of lambda^2 - 3 lambda + 1: ((3 - sqrt 5)/2, (3 + sqrt 5)/2).
CatenaryRoots catenary_roots();

struct DiscreteCatenarySpec {
  double lambda_s;
  double lambda_u;
  double delta = 0.5;
  std::int64_t n_max = 40;

  static DiscreteCatenarySpec standard(double delta = 0.5,
                                       std::int64_t n_max = 40);
  void validate() const;
};

struct DiscreteBvpResult {
  double value = 0.0;  // u_0
  bool diagonal = false;
  std::int64_t n_s = 0, n_u = 0;   // first exit indices (capped on W branches)
  bool stable_branch = false;      // forward orbit never exits before n_max
  bool unstable_branch = false;    // backward orbit never exits before n_max
  std::vector<double> orbit_values;  // u_k for k = k_lo .. k_lo + size - 1
  std::int64_t k_lo = 0;

  double at(std::int64_t k) const;
};

/// Discrete catenary boundary value problem on the pair space of f: orbit
/// values solve u_{k+1} - 3 u_k + u_{k-1} = 0 with u = delta at the exit
/// indices; exponential branch when one side never exits before n_max.
DiscreteBvpResult discrete_catenary_bvp(const DiscreteSystem& f,
                                        const DistanceFn<DiscreteState>& dist,
                                        const DiscreteCatenarySpec& spec,
                                        const DiscreteState& x,
                                        const DiscreteState& y);

// ---------------------------------------------------------------------------

struct ExpansivityRecord {
  DiscreteState x, y;
  bool diagonal = false;
  bool resolved = false;
  std::int64_t separating_n = 0;
  double separation = 0.0;
};

struct ExpansivityReport {
  std::vector<ExpansivityRecord> records;
  std::size_t unresolved = 0;  // distinct pairs that never separated
};

/// For each pair, scans n = 0, 1, -1, 2, -2, ... up to |n| <= horizon and
/// records the first n with dist(f^n x, f^n y) > delta.
ExpansivityReport expansivity_probe(
    const DiscreteSystem& f, const DistanceFn<DiscreteState>& dist,
    double delta,
    const std::vector<std::pair<DiscreteState, DiscreteState>>& pairs,
    std::int64_t horizon);

// ---------------------------------------------------------------------------

struct HyperspaceResult {
  std::vector<std::vector<DiscreteState>> iterates;  // k = -n .. n
  std::vector<double> diameters;
  std::int64_t n = 0;
  std::optional<std::int64_t> first_exceeding;  // smallest |k| with diam > delta

  const std::vector<DiscreteState>& at(std::int64_t k) const {
    return iterates[static_cast<std::size_t>(k + n)];
  }
  double diameter_at(std::int64_t k) const {
    return diameters[static_cast<std::size_t>(k + n)];
  }
};

/// Elementwise images g^k(A) for |k| <= n with diameters tracked; flags the
/// first iterate whose diameter exceeds delta when one is given.
HyperspaceResult hyperspace_iterate(const DiscreteSystem& f,
                                    const std::vector<DiscreteState>& A,
                                    const DistanceFn<DiscreteState>& dist,
                                    std::int64_t n,
                                    std::optional<double> delta = {});

// ---------------------------------------------------------------------------

/// Pseudo-metric on unordered pairs {a,b}, {c,d}.
template <class P>
using PairPseudoMetricFn =
    std::function<double(const P&, const P&, const P&, const P&)>;

/// Local metric induced by a pair pseudo-metric: D_x(y,z) = pm({x,y},{x,z}),
/// defined for y, z within the given radius of x.
template <class P>
double local_metric(const PairPseudoMetricFn<P>& pm,
                    const DistanceFn<P>& ambient, double radius, const P& x,
                    const P& y, const P& z) {
  if (ambient(x, y) > radius || ambient(x, z) > radius)
    throw DomainError("local_metric: point outside the base radius");
  return pm(x, y, x, z);
}

}  // namespace catena
