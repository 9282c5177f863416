#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "catena/common.hpp"

namespace catena {

template <class P>
using DistanceFn = std::function<double(const P&, const P&)>;

/// Finite subset of an ambient metric space. Sets that take part in the same
/// computation must share the ambient distance oracle.
template <class P>
struct PointSet {
  std::vector<P> points;
  DistanceFn<P> dist;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
};

template <class P>
double distance_to_set(const P& a, const PointSet<P>& B) {
  double best = std::numeric_limits<double>::infinity();
  for (const P& b : B.points) best = std::min(best, B.dist(a, b));
  return best;
}

/// max of the two directed sup-inf distances between finite sets.
template <class P>
double hausdorff_distance(const PointSet<P>& A, const PointSet<P>& B) {
  if (A.empty() || B.empty())
    throw DomainError("hausdorff_distance: empty input set");
  double h = 0.0;
  for (const P& a : A.points) h = std::max(h, distance_to_set(a, B));
  for (const P& b : B.points) h = std::max(h, distance_to_set(b, A));
  return h;
}

/// Reference points q_1..q_m for a size function; q_i carries weight 2^{-i}.
template <class P>
struct SizeFunctionSpec {
  std::vector<P> refs;
};

/// Deterministic farthest-point sampling of reference points from an ambient
/// sample. Starts at index 0, then greedily maximizes the min distance to the
/// chosen refs (ties resolved to the lowest index). Stops early if only
/// duplicates remain, so refs stay pairwise distinct.
template <class P>
SizeFunctionSpec<P> farthest_point_refs(const PointSet<P>& ambient,
                                        int depth = 16) {
  if (ambient.empty())
    throw DomainError("farthest_point_refs: empty ambient sample");
  if (depth < 1) throw SpecError("farthest_point_refs: depth must be >= 1");
  const std::size_t n = ambient.size();
  SizeFunctionSpec<P> spec;
  std::vector<double> min_d(n, std::numeric_limits<double>::infinity());
  std::size_t pick = 0;
  for (int i = 0; i < depth; ++i) {
    spec.refs.push_back(ambient.points[pick]);
    for (std::size_t j = 0; j < n; ++j)
      min_d[j] =
          std::min(min_d[j], ambient.dist(ambient.points[j], ambient.points[pick]));
    std::size_t next = 0;
    for (std::size_t j = 1; j < n; ++j)
      if (min_d[j] > min_d[next]) next = j;
    if (min_d[next] <= 0.0) break;  // only duplicates of chosen refs remain
    pick = next;
  }
  return spec;
}

/// Whitney size: sum over refs of 2^{-i} (max - min) of dist(q_i, .) on A.
/// Zero exactly on singletons, strictly monotone under proper inclusion
/// whenever some reference point separates the two sets.
template <class P>
double whitney_size(const PointSet<P>& A, const SizeFunctionSpec<P>& spec) {
  if (A.empty()) throw DomainError("whitney_size: empty set");
  if (spec.refs.empty()) throw SpecError("whitney_size: no reference points");
  double mu = 0.0;
  double w = 1.0;
  for (const P& q : spec.refs) {
    w *= 0.5;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const P& x : A.points) {
      const double d = A.dist(q, x);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    mu += w * (hi - lo);
  }
  return mu;
}

/// Size of a maximum subset whose pairwise distances are strictly greater
/// than delta. Exact branch-and-bound; capped at 20 points.
template <class P>
int delta_cardinality(const PointSet<P>& A, double delta) {
  if (A.empty()) throw DomainError("delta_cardinality: empty set");
  if (delta <= 0.0) throw DomainError("delta_cardinality: delta must be > 0");
  const std::size_t n = A.size();
  if (n > 20)
    throw CapacityError(
        "delta_cardinality: exhaustive search capped at 20 points; subsample "
        "the input");
  std::vector<std::uint32_t> conflict(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (A.dist(A.points[i], A.points[j]) <= delta) {
        conflict[i] |= (1u << j);
        conflict[j] |= (1u << i);
      }
  std::function<int(std::uint32_t)> best = [&](std::uint32_t cand) -> int {
    if (cand == 0) return 0;
    const int v = std::countr_zero(cand);
    const std::uint32_t rest = cand & (cand - 1);
    const int skip = best(rest);
    const int take = 1 + best(rest & ~conflict[static_cast<std::size_t>(v)]);
    return std::max(skip, take);
  };
  const std::uint32_t all = (n == 32) ? ~0u : ((1u << n) - 1);
  return best(all);
}

/// Local metric oracle family: D(base, y, z), defined for y, z within the
/// gluing radius of base.
template <class P>
using LocalMetricFn = std::function<double(const P&, const P&, const P&)>;

namespace detail {

inline std::string format_components(
    const std::vector<std::vector<std::size_t>>& comps) {
  std::string s;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    s += (c == 0 ? "{" : ", {");
    for (std::size_t k = 0; k < comps[c].size(); ++k) {
      if (k) s += " ";
      s += std::to_string(comps[c][k]);
      if (k == 7 && comps[c].size() > 8) {
        s += " ...";
        break;
      }
    }
    s += "}";
  }
  return s;
}

}  // namespace detail

/// Glue a family of local metrics into a global table by shortest paths on
/// the delta-chain graph. Edge i-j exists when dist(p_i, p_j) <= delta and
/// weighs min(D(p_i, p_i, p_j), D(p_j, p_i, p_j)); for a base-compatible
/// family the two coincide. Throws PartitionError naming the components when
/// the chain graph is disconnected.
template <class P>
std::vector<std::vector<double>> glue_local_metric(const PointSet<P>& sample,
                                                   double delta,
                                                   const LocalMetricFn<P>& local) {
  if (sample.empty()) throw DomainError("glue_local_metric: empty sample");
  if (delta <= 0.0) throw DomainError("glue_local_metric: delta must be > 0");
  const std::size_t n = sample.size();
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (sample.dist(sample.points[i], sample.points[j]) > delta) continue;
      const double w =
          std::min(local(sample.points[i], sample.points[i], sample.points[j]),
                   local(sample.points[j], sample.points[i], sample.points[j]));
      adj[i].push_back({j, w});
      adj[j].push_back({i, w});
    }

  // connectivity
  {
    std::vector<int> comp(n, -1);
    int ncomp = 0;
    for (std::size_t s = 0; s < n; ++s) {
      if (comp[s] >= 0) continue;
      std::vector<std::size_t> stack{s};
      comp[s] = ncomp;
      while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (const auto& [v, w] : adj[u])
          if (comp[v] < 0) {
            comp[v] = ncomp;
            stack.push_back(v);
          }
      }
      ++ncomp;
    }
    if (ncomp > 1) {
      std::vector<std::vector<std::size_t>> comps(ncomp);
      for (std::size_t i = 0; i < n; ++i) comps[comp[i]].push_back(i);
      throw PartitionError("glue_local_metric: chain graph disconnected: " +
                               detail::format_components(comps),
                           std::move(comps));
    }
  }

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> rho(n, std::vector<double>(n, inf));
  using Item = std::pair<double, std::size_t>;
  for (std::size_t s = 0; s < n; ++s) {
    auto& dist = rho[s];
    dist[s] = 0.0;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    pq.push({0.0, s});
    while (!pq.empty()) {
      const auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      for (const auto& [v, w] : adj[u]) {
        const double nd = d + w;
        if (nd < dist[v]) {
          dist[v] = nd;
          pq.push({nd, v});
        }
      }
    }
  }
  // Exact symmetry of the table.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      rho[i][j] = rho[j][i] = std::min(rho[i][j], rho[j][i]);

  // Min-plus closure to a fixpoint. Independent Dijkstra runs sum the same
  // real path with different bracketing, which can leave ulp-level triangle
  // violations; the closure removes them so the table satisfies the triangle
  // inequality exactly in floating point. Skipped for very large samples.
  if (n <= 4096) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) {
          const double rik = rho[i][k];
          for (std::size_t j = i + 1; j < n; ++j) {
            const double cand = rik + rho[k][j];
            if (cand < rho[i][j]) {
              rho[i][j] = rho[j][i] = cand;
              changed = true;
            }
          }
        }
    }
  }
  return rho;
}

/// Counts violations of the locally minimizing property on a sample: for
/// every pair with dist(x, y) < delta, the base-point value D_x(x, y) must
/// not exceed D_z(x, y) for any z within delta of both. Zero violations make
/// the family safe to glue into a global metric.
template <class P>
std::size_t local_minimizing_violations(const PointSet<P>& sample, double delta,
                                        const LocalMetricFn<P>& local,
                                        double tol = 1e-12) {
  std::size_t violations = 0;
  const std::size_t n = sample.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const P& x = sample.points[i];
      const P& y = sample.points[j];
      if (sample.dist(x, y) >= delta) continue;
      const double base = local(x, x, y);
      for (std::size_t k = 0; k < n; ++k) {
        const P& z = sample.points[k];
        if (sample.dist(z, x) > delta || sample.dist(z, y) > delta) continue;
        if (base > local(z, x, y) + tol) ++violations;
      }
    }
  return violations;
}

// ---------------------------------------------------------------------------
// Metric axiom checking over an index-based distance oracle.

struct AxiomWitness {
  std::size_t i = 0, j = 0, k = 0;
  double lhs = 0.0, rhs = 0.0;
};

struct MetricAxiomReport {
  std::vector<AxiomWitness> nonnegativity;
  std::vector<AxiomWitness> symmetry;
  std::vector<AxiomWitness> identity;         // d(x,x) != 0
  std::vector<AxiomWitness> indiscernibility; // d(x,y) == 0 for x != y
  std::vector<AxiomWitness> triangle;
  std::size_t pairs_checked = 0;
  std::size_t triples_checked = 0;

  // require_indiscernibility=false accepts pseudo-metrics.
  bool clean(bool require_indiscernibility = true) const {
    return nonnegativity.empty() && symmetry.empty() && identity.empty() &&
           triangle.empty() &&
           (!require_indiscernibility || indiscernibility.empty());
  }
  std::size_t total_violations(bool require_indiscernibility = true) const {
    return nonnegativity.size() + symmetry.size() + identity.size() +
           triangle.size() +
           (require_indiscernibility ? indiscernibility.size() : 0);
  }
};

struct AxiomCheckOptions {
  double tol = 1e-9;
  std::size_t exhaustive_limit = 24;  // n <= limit: all pairs and triples
  std::size_t sample_pairs = 2000;
  std::size_t sample_triples = 1000;
  std::uint64_t seed = 20240915;
  // Optional identity oracle; defaults to index equality.
  std::function<bool(std::size_t, std::size_t)> same;
};

MetricAxiomReport check_metric_axioms(
    std::size_t n, const std::function<double(std::size_t, std::size_t)>& d,
    const AxiomCheckOptions& opts = {});

}  // namespace catena
