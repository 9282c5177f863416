#include "catena/discrete.hpp"

#include <algorithm>
#include <cmath>

namespace catena {

SymbolicPoint::SymbolicPoint(std::vector<std::int64_t> one_coords)
    : ones_(std::move(one_coords)) {
  std::sort(ones_.begin(), ones_.end());
  ones_.erase(std::unique(ones_.begin(), ones_.end()), ones_.end());
}

int SymbolicPoint::at(std::int64_t n) const {
  return std::binary_search(ones_.begin(), ones_.end(), n) ? 1 : 0;
}

SymbolicPoint SymbolicPoint::shifted(std::int64_t k) const {
  SymbolicPoint out;
  out.ones_.reserve(ones_.size());
  for (std::int64_t m : ones_) out.ones_.push_back(m - k);
  return out;
}

namespace {

// Walks the symmetric difference of the two sorted coordinate lists.
template <class Fn>
void for_each_disagreement(const SymbolicPoint& x, const SymbolicPoint& y,
                           Fn&& fn) {
  const auto& a = x.ones();
  const auto& b = y.ones();
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i] < b[j])) {
      fn(a[i++]);
    } else if (i == a.size() || b[j] < a[i]) {
      fn(b[j++]);
    } else {
      ++i;
      ++j;
    }
  }
}

}  // namespace

double shift_metric(const SymbolicPoint& x, const SymbolicPoint& y,
                    double lambda) {
  if (lambda <= 1.0) throw SpecError("shift_metric: lambda must be > 1");
  double sum = 0.0;
  for_each_disagreement(x, y, [&](std::int64_t n) {
    sum += std::pow(lambda, -static_cast<double>(std::llabs(n)));
  });
  return sum;
}

double shift_metric_future(const SymbolicPoint& x, const SymbolicPoint& y,
                           double lambda) {
  double sum = 0.0;
  for_each_disagreement(x, y, [&](std::int64_t n) {
    if (n >= 0) sum += std::pow(lambda, -static_cast<double>(n));
  });
  return sum;
}

double shift_metric_past(const SymbolicPoint& x, const SymbolicPoint& y,
                         double lambda) {
  double sum = 0.0;
  for_each_disagreement(x, y, [&](std::int64_t n) {
    if (n < 0) sum += std::pow(lambda, static_cast<double>(n));
  });
  return sum;
}

double flat_torus_distance(const TorusPoint& a, const TorusPoint& b) {
  auto wrap = [](double d) {
    d = std::abs(d - std::floor(d));
    return std::min(d, 1.0 - d);
  };
  const double du = wrap(a.u - b.u);
  const double dv = wrap(a.v - b.v);
  return std::sqrt(du * du + dv * dv);
}

DiscreteState make_pair_state(DiscreteState a, DiscreteState b) {
  return std::make_shared<const DiscretePair>(
      DiscretePair{std::move(a), std::move(b)});
}

const DiscretePair& as_pair(const DiscreteState& s) {
  const auto* p = std::get_if<std::shared_ptr<const DiscretePair>>(&s);
  if (!p || !*p) throw DomainError("expected a pair state");
  return **p;
}

bool states_equal(const DiscreteState& a, const DiscreteState& b) {
  if (a.index() != b.index()) return false;
  if (const auto* pa = std::get_if<std::shared_ptr<const DiscretePair>>(&a)) {
    const auto& pb = std::get<std::shared_ptr<const DiscretePair>>(b);
    return states_equal((*pa)->first, pb->first) &&
           states_equal((*pa)->second, pb->second);
  }
  if (const auto* sa = std::get_if<SymbolicPoint>(&a))
    return *sa == std::get<SymbolicPoint>(b);
  if (const auto* ta = std::get_if<TorusPoint>(&a))
    return *ta == std::get<TorusPoint>(b);
  return std::get<std::int64_t>(a) == std::get<std::int64_t>(b);
}

std::string discrete_to_string(const DiscreteState& s) {
  if (const auto* sp = std::get_if<SymbolicPoint>(&s)) {
    std::string out = "shift{";
    for (std::size_t i = 0; i < sp->ones().size(); ++i) {
      if (i) out += ",";
      out += std::to_string(sp->ones()[i]);
    }
    return out + "}";
  }
  if (const auto* tp = std::get_if<TorusPoint>(&s))
    return "torus(" + std::to_string(tp->u) + "," + std::to_string(tp->v) + ")";
  if (const auto* ip = std::get_if<std::int64_t>(&s))
    return "index(" + std::to_string(*ip) + ")";
  const auto& pr = as_pair(s);
  return "(" + discrete_to_string(pr.first) + ", " +
         discrete_to_string(pr.second) + ")";
}

DiscreteState DiscreteSystem::iterate(const DiscreteState& x,
                                      std::int64_t n) const {
  DiscreteState cur = x;
  for (std::int64_t k = 0; k < std::llabs(n); ++k)
    cur = (n > 0) ? forward(cur) : backward(cur);
  return cur;
}

DiscreteSystem make_full_shift() {
  DiscreteSystem sys;
  sys.kind = DiscreteSystem::Kind::full_shift_2;
  sys.forward = [](const DiscreteState& s) -> DiscreteState {
    return std::get<SymbolicPoint>(s).shifted(1);
  };
  sys.backward = [](const DiscreteState& s) -> DiscreteState {
    return std::get<SymbolicPoint>(s).shifted(-1);
  };
  return sys;
}

DiscreteSystem make_toral_automorphism() {
  DiscreteSystem sys;
  sys.kind = DiscreteSystem::Kind::toral_automorphism;
  auto mod1 = [](double x) { return x - std::floor(x); };
  sys.forward = [mod1](const DiscreteState& s) -> DiscreteState {
    const auto& p = std::get<TorusPoint>(s);
    return TorusPoint{mod1(2.0 * p.u + p.v), mod1(p.u + p.v)};
  };
  sys.backward = [mod1](const DiscreteState& s) -> DiscreteState {
    const auto& p = std::get<TorusPoint>(s);
    return TorusPoint{mod1(p.u - p.v), mod1(-p.u + 2.0 * p.v)};
  };
  return sys;
}

DiscreteSystem make_finite_permutation(std::vector<int> perm) {
  const int n = static_cast<int>(perm.size());
  std::vector<int> inv(perm.size());
  std::vector<char> seen(perm.size(), 0);
  for (int i = 0; i < n; ++i) {
    if (perm[i] < 0 || perm[i] >= n || seen[perm[i]])
      throw SpecError("make_finite_permutation: not a permutation");
    seen[perm[i]] = 1;
    inv[perm[i]] = i;
  }
  DiscreteSystem sys;
  sys.kind = DiscreteSystem::Kind::finite_permutation;
  sys.forward = [perm, n](const DiscreteState& s) -> DiscreteState {
    const auto i = std::get<std::int64_t>(s);
    if (i < 0 || i >= n) throw DomainError("permutation index out of range");
    return static_cast<std::int64_t>(perm[static_cast<std::size_t>(i)]);
  };
  sys.backward = [inv, n](const DiscreteState& s) -> DiscreteState {
    const auto i = std::get<std::int64_t>(s);
    if (i < 0 || i >= n) throw DomainError("permutation index out of range");
    return static_cast<std::int64_t>(inv[static_cast<std::size_t>(i)]);
  };
  return sys;
}

DiscreteSystem make_pair_system(const DiscreteSystem& base) {
  DiscreteSystem sys;
  sys.kind = DiscreteSystem::Kind::pair_system;
  sys.forward = [base](const DiscreteState& s) -> DiscreteState {
    const auto& p = as_pair(s);
    return make_pair_state(base.forward(p.first), base.forward(p.second));
  };
  sys.backward = [base](const DiscreteState& s) -> DiscreteState {
    const auto& p = as_pair(s);
    return make_pair_state(base.backward(p.first), base.backward(p.second));
  };
  return sys;
}

double second_difference(const std::function<double(const DiscreteState&)>& L,
                         const DiscreteSystem& f, const DiscreteState& x) {
  return L(f.forward(x)) - 2.0 * L(x) + L(f.backward(x));
}

CatenaryRoots catenary_roots() {
  const double s5 = std::sqrt(5.0);
  return {(3.0 - s5) / 2.0, (3.0 + s5) / 2.0};
}

DiscreteCatenarySpec DiscreteCatenarySpec::standard(double delta,
                                                    std::int64_t n_max) {
  const auto roots = catenary_roots();
  DiscreteCatenarySpec spec{roots.lambda_s, roots.lambda_u, delta, n_max};
  spec.validate();
  return spec;
}

void DiscreteCatenarySpec::validate() const {
  if (!(lambda_s > 0.0 && lambda_s < 1.0 && lambda_u > 1.0))
    throw SpecError("DiscreteCatenarySpec: need 0 < lambda_s < 1 < lambda_u");
  if (std::abs(lambda_s * lambda_u - 1.0) > 1e-12 ||
      std::abs(lambda_s + lambda_u - 3.0) > 1e-12)
    throw SpecError("DiscreteCatenarySpec: roots must satisfy product 1, sum 3");
  if (delta <= 0.0) throw SpecError("DiscreteCatenarySpec: delta must be > 0");
  if (n_max < 1) throw SpecError("DiscreteCatenarySpec: n_max must be >= 1");
}

double DiscreteBvpResult::at(std::int64_t k) const {
  const std::int64_t idx = k - k_lo;
  if (idx < 0 || idx >= static_cast<std::int64_t>(orbit_values.size()))
    throw DomainError("DiscreteBvpResult: index outside the solved range");
  return orbit_values[static_cast<std::size_t>(idx)];
}

DiscreteBvpResult discrete_catenary_bvp(const DiscreteSystem& f,
                                        const DistanceFn<DiscreteState>& dist,
                                        const DiscreteCatenarySpec& spec,
                                        const DiscreteState& x,
                                        const DiscreteState& y) {
  spec.validate();
  DiscreteBvpResult res;
  if (dist(x, y) > spec.delta)
    throw DomainError("discrete_catenary_bvp: pair outside the delta block");
  if (states_equal(x, y)) {
    res.diagonal = true;
    res.orbit_values = {0.0};
    return res;
  }

  // First exit indices of the pair orbit from the delta block.
  std::optional<std::int64_t> exit_u, exit_s;
  {
    DiscreteState xf = x, yf = y;
    for (std::int64_t n = 1; n <= spec.n_max; ++n) {
      xf = f.forward(xf);
      yf = f.forward(yf);
      if (dist(xf, yf) > spec.delta) {
        exit_u = n;
        break;
      }
    }
    DiscreteState xb = x, yb = y;
    for (std::int64_t n = 1; n <= spec.n_max; ++n) {
      xb = f.backward(xb);
      yb = f.backward(yb);
      if (dist(xb, yb) > spec.delta) {
        exit_s = -n;
        break;
      }
    }
  }
  res.stable_branch = !exit_u.has_value();
  res.unstable_branch = !exit_s.has_value();
  res.n_u = exit_u.value_or(spec.n_max);
  res.n_s = exit_s.value_or(-spec.n_max);

  const double T = std::log(spec.lambda_u);

  if (res.stable_branch && res.unstable_branch) {
    // Numerically indistinguishable from a pair inside the isolated set.
    res.orbit_values = {0.0};
    return res;
  }

  if (res.stable_branch) {
    // Forward-asymptotic pair: u_k = delta lambda_s^{k - n_s}.
    res.k_lo = res.n_s;
    for (std::int64_t k = res.n_s; k <= spec.n_max; ++k)
      res.orbit_values.push_back(
          spec.delta * std::pow(spec.lambda_s, static_cast<double>(k - res.n_s)));
    res.value = res.at(0);
    return res;
  }
  if (res.unstable_branch) {
    // Backward-asymptotic pair: u_k = delta lambda_u^{k - n_u}.
    res.k_lo = -spec.n_max;
    for (std::int64_t k = -spec.n_max; k <= res.n_u; ++k)
      res.orbit_values.push_back(
          spec.delta * std::pow(spec.lambda_u, static_cast<double>(k - res.n_u)));
    res.value = res.at(0);
    return res;
  }

  // Transient pair: unique recurrence solution with u = delta at both exits,
  // u_k = delta [sinh((n_u - k)T) + sinh((k - n_s)T)] / sinh((n_u - n_s)T).
  res.k_lo = res.n_s;
  const double den = std::sinh(static_cast<double>(res.n_u - res.n_s) * T);
  for (std::int64_t k = res.n_s; k <= res.n_u; ++k) {
    const double num = std::sinh(static_cast<double>(res.n_u - k) * T) +
                       std::sinh(static_cast<double>(k - res.n_s) * T);
    res.orbit_values.push_back(spec.delta * num / den);
  }
  res.value = res.at(0);
  return res;
}

ExpansivityReport expansivity_probe(
    const DiscreteSystem& f, const DistanceFn<DiscreteState>& dist,
    double delta,
    const std::vector<std::pair<DiscreteState, DiscreteState>>& pairs,
    std::int64_t horizon) {
  ExpansivityReport report;
  for (const auto& [x, y] : pairs) {
    ExpansivityRecord rec;
    rec.x = x;
    rec.y = y;
    if (states_equal(x, y)) {
      rec.diagonal = true;
      report.records.push_back(std::move(rec));
      continue;
    }
    // n = 0, 1, -1, 2, -2, ... first separation wins.
    const double d0 = dist(x, y);
    if (d0 > delta) {
      rec.resolved = true;
      rec.separating_n = 0;
      rec.separation = d0;
    } else {
      DiscreteState xf = x, yf = y, xb = x, yb = y;
      for (std::int64_t n = 1; n <= horizon && !rec.resolved; ++n) {
        xf = f.forward(xf);
        yf = f.forward(yf);
        double d = dist(xf, yf);
        if (d > delta) {
          rec.resolved = true;
          rec.separating_n = n;
          rec.separation = d;
          break;
        }
        xb = f.backward(xb);
        yb = f.backward(yb);
        d = dist(xb, yb);
        if (d > delta) {
          rec.resolved = true;
          rec.separating_n = -n;
          rec.separation = d;
        }
      }
    }
    if (!rec.resolved) ++report.unresolved;
    report.records.push_back(std::move(rec));
  }
  return report;
}

namespace {

double set_diameter(const std::vector<DiscreteState>& A,
                    const DistanceFn<DiscreteState>& dist) {
  double d = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = i + 1; j < A.size(); ++j)
      d = std::max(d, dist(A[i], A[j]));
  return d;
}

}  // namespace

HyperspaceResult hyperspace_iterate(const DiscreteSystem& f,
                                    const std::vector<DiscreteState>& A,
                                    const DistanceFn<DiscreteState>& dist,
                                    std::int64_t n,
                                    std::optional<double> delta) {
  if (A.empty()) throw DomainError("hyperspace_iterate: empty set");
  if (A.size() > 20)
    throw CapacityError("hyperspace_iterate: capped at 20 points");
  if (n < 0) throw DomainError("hyperspace_iterate: n must be >= 0");

  HyperspaceResult res;
  res.n = n;
  res.iterates.resize(static_cast<std::size_t>(2 * n + 1));
  res.diameters.resize(static_cast<std::size_t>(2 * n + 1));
  res.iterates[static_cast<std::size_t>(n)] = A;

  for (std::int64_t k = 1; k <= n; ++k) {
    auto& fwd = res.iterates[static_cast<std::size_t>(n + k)];
    for (const auto& p : res.iterates[static_cast<std::size_t>(n + k - 1)])
      fwd.push_back(f.forward(p));
    auto& bwd = res.iterates[static_cast<std::size_t>(n - k)];
    for (const auto& p : res.iterates[static_cast<std::size_t>(n - k + 1)])
      bwd.push_back(f.backward(p));
  }
  for (std::int64_t k = -n; k <= n; ++k)
    res.diameters[static_cast<std::size_t>(k + n)] =
        set_diameter(res.iterates[static_cast<std::size_t>(k + n)], dist);

  if (delta) {
    for (std::int64_t a = 0; a <= n && !res.first_exceeding; ++a) {
      if (res.diameter_at(a) > *delta)
        res.first_exceeding = a;
      else if (a > 0 && res.diameter_at(-a) > *delta)
        res.first_exceeding = -a;
    }
  }
  return res;
}

}  // namespace catena
