#include "catena/metric_core.hpp"

#include <random>

namespace catena {

namespace {

void check_pair(std::size_t i, std::size_t j,
                const std::function<double(std::size_t, std::size_t)>& d,
                const AxiomCheckOptions& opts, MetricAxiomReport& report) {
  const double dij = d(i, j);
  const double dji = d(j, i);
  if (dij < -opts.tol) report.nonnegativity.push_back({i, j, 0, dij, 0.0});
  if (std::abs(dij - dji) > opts.tol)
    report.symmetry.push_back({i, j, 0, dij, dji});
  const bool same = opts.same ? opts.same(i, j) : (i == j);
  if (same) {
    if (std::abs(dij) > opts.tol) report.identity.push_back({i, j, 0, dij, 0.0});
  } else if (std::abs(dij) <= opts.tol) {
    report.indiscernibility.push_back({i, j, 0, dij, 0.0});
  }
  ++report.pairs_checked;
}

void check_triple(std::size_t i, std::size_t j, std::size_t k,
                  const std::function<double(std::size_t, std::size_t)>& d,
                  const AxiomCheckOptions& opts, MetricAxiomReport& report) {
  const double lhs = d(i, k);
  const double rhs = d(i, j) + d(j, k);
  if (lhs > rhs + opts.tol) report.triangle.push_back({i, j, k, lhs, rhs});
  ++report.triples_checked;
}

}  // namespace

MetricAxiomReport check_metric_axioms(
    std::size_t n, const std::function<double(std::size_t, std::size_t)>& d,
    const AxiomCheckOptions& opts) {
  MetricAxiomReport report;
  if (n == 0) return report;

  if (n <= opts.exhaustive_limit) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) check_pair(i, j, d, opts, report);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          if (i == j || j == k || i == k) continue;
          check_triple(i, j, k, d, opts, report);
        }
    return report;
  }

  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t t = 0; t < opts.sample_pairs; ++t) {
    const std::size_t i = pick(rng);
    const std::size_t j = pick(rng);
    check_pair(i, j, d, opts, report);
    check_pair(i, i, d, opts, report);
  }
  for (std::size_t t = 0; t < opts.sample_triples; ++t) {
    std::size_t i = pick(rng), j = pick(rng), k = pick(rng);
    check_triple(i, j, k, d, opts, report);
  }
  return report;
}

}  // namespace catena
