#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "catena/metric_core.hpp"

using namespace catena;

namespace {

PointSet<double> line_set(std::vector<double> pts) {
  PointSet<double> s;
  s.points = std::move(pts);
  s.dist = [](double a, double b) { return std::abs(a - b); };
  return s;
}

// Brute-force oracle for the two-sided sup-inf definition.
double hausdorff_oracle(const std::vector<double>& A,
                        const std::vector<double>& B) {
  auto directed = [](const std::vector<double>& from,
                     const std::vector<double>& to) {
    double sup = 0.0;
    for (double a : from) {
      double inf = std::numeric_limits<double>::infinity();
      for (double b : to) inf = std::min(inf, std::abs(a - b));
      sup = std::max(sup, inf);
    }
    return sup;
  };
  return std::max(directed(A, B), directed(B, A));
}

}  // namespace

TEST_CASE("hausdorff distance on singletons and small sets") {
  CHECK(hausdorff_distance(line_set({0.0}), line_set({0.0})) == 0.0);
  CHECK(hausdorff_distance(line_set({0.0}), line_set({1.0})) == 1.0);
  // Frozen from the brute-force oracle: sup_a inf_b = 1 both ways.
  CHECK(hausdorff_oracle({0.0, 2.0}, {1.0}) == 1.0);
  CHECK(hausdorff_distance(line_set({0.0, 2.0}), line_set({1.0})) == 1.0);
  CHECK_THROWS_AS(hausdorff_distance(line_set({}), line_set({1.0})), DomainError);

  // zero exactly when equal as sets, regardless of ordering or duplicates
  CHECK(hausdorff_distance(line_set({0.25, 0.5, 0.25}), line_set({0.5, 0.25})) ==
        0.0);
  CHECK(hausdorff_distance(line_set({0.25, 0.5}), line_set({0.5, 0.2500001})) >
        0.0);
}

TEST_CASE("hausdorff distance agrees with the oracle on random sets") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a, b;
    for (int i = 0; i < 1 + static_cast<int>(rng() % 6); ++i) a.push_back(coord(rng));
    for (int i = 0; i < 1 + static_cast<int>(rng() % 6); ++i) b.push_back(coord(rng));
    CHECK(hausdorff_distance(line_set(a), line_set(b)) ==
          doctest::Approx(hausdorff_oracle(a, b)).epsilon(1e-14));
  }
}

TEST_CASE("hausdorff distance satisfies the metric axioms on random sets") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  std::vector<std::vector<double>> sets;
  for (int i = 0; i < 60; ++i) {
    std::vector<double> s;
    for (int k = 0; k < 1 + static_cast<int>(rng() % 5); ++k)
      s.push_back(coord(rng));
    sets.push_back(std::move(s));
  }
  AxiomCheckOptions opts;
  opts.tol = 1e-12;
  opts.sample_pairs = 2000;
  opts.sample_triples = 1500;
  const auto report = check_metric_axioms(
      sets.size(),
      [&](std::size_t i, std::size_t j) {
        return hausdorff_distance(line_set(sets[i]), line_set(sets[j]));
      },
      opts);
  CHECK(report.nonnegativity.empty());
  CHECK(report.symmetry.empty());
  CHECK(report.identity.empty());
  CHECK(report.triangle.empty());
  CHECK(report.triples_checked >= 1000);
}

TEST_CASE("whitney size basics") {
  SizeFunctionSpec<double> spec;
  spec.refs = {0.0, 1.0};

  CHECK(whitney_size(line_set({0.37}), spec) == 0.0);

  // refs q1=0, q2=1, depth 2 on A={0,1}: mu_1 = mu_2 = 1, mu = 1/2 + 1/4.
  CHECK(whitney_size(line_set({0.0, 1.0}), spec) == doctest::Approx(0.75).epsilon(1e-15));

  CHECK_THROWS_AS(whitney_size(line_set({}), spec), DomainError);
}

TEST_CASE("whitney size is strictly monotone on distinguished nested pairs") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  std::uniform_real_distribution<double> bump(0.01, 0.2);
  PointSet<double> ambient = line_set({0.0});
  for (int i = 0; i < 63; ++i) ambient.points.push_back(coord(rng));
  const auto spec = farthest_point_refs(ambient, 16);
  CHECK(spec.refs.size() == 16);
  CHECK(spec.refs[0] == 0.0);

  // B extends A past its maximum, so the ref at 0 distinguishes the pair.
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> small;
    for (int k = 0; k < 2 + static_cast<int>(rng() % 5); ++k)
      small.push_back(coord(rng));
    std::vector<double> big = small;
    big.push_back(*std::max_element(small.begin(), small.end()) + bump(rng));
    const double mu_small = whitney_size(line_set(small), spec);
    const double mu_big = whitney_size(line_set(big), spec);
    CHECK(mu_small < mu_big);
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("farthest point refs are pairwise distinct and deterministic") {
  PointSet<double> ambient = line_set({0.0, 1.0, 0.5, 0.0, 0.25});
  const auto spec = farthest_point_refs(ambient, 16);
  for (std::size_t i = 0; i < spec.refs.size(); ++i)
    for (std::size_t j = i + 1; j < spec.refs.size(); ++j)
      CHECK(spec.refs[i] != spec.refs[j]);
  const auto again = farthest_point_refs(ambient, 16);
  CHECK(spec.refs == again.refs);
  CHECK(spec.refs[0] == 0.0);
  CHECK(spec.refs[1] == 1.0);
}

TEST_CASE("delta cardinality") {
  CHECK(delta_cardinality(line_set({0.3}), 1.0) == 1);
  // Frozen from exhaustive subset enumeration.
  CHECK(delta_cardinality(line_set({0.0, 0.4, 0.8, 1.2}), 0.5) == 2);
  // min pairwise distance > delta: the whole set is separated
  CHECK(delta_cardinality(line_set({0.0, 1.0, 2.0, 3.0}), 0.5) == 4);
  // ties at exactly delta are not separated
  CHECK(delta_cardinality(line_set({0.0, 0.5}), 0.5) == 1);

  std::vector<double> big(21, 0.0);
  CHECK_THROWS_AS(delta_cardinality(line_set(big), 0.5), CapacityError);
  CHECK_THROWS_AS(delta_cardinality(line_set({0.0, 1.0}), 0.0), DomainError);
}

TEST_CASE("delta cardinality is nonincreasing in delta") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coord(0.0, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> pts;
    for (int i = 0; i < 10; ++i) pts.push_back(coord(rng));
    const auto set = line_set(pts);
    int prev = std::numeric_limits<int>::max();
    for (double delta : {0.1, 0.3, 0.7, 1.5, 3.0}) {
      const int card = delta_cardinality(set, delta);
      CHECK(card <= prev);
      prev = card;
    }
  }
}

TEST_CASE("glue local metric") {
  LocalMetricFn<double> euclid = [](double, double y, double z) {
    return std::abs(y - z);
  };

  SUBCASE("two close points use the direct local value") {
    const auto rho = glue_local_metric(line_set({0.0, 0.3}), 0.5, euclid);
    CHECK(rho[0][1] == 0.3);
    CHECK(rho[0][0] == 0.0);
  }

  SUBCASE("chain 0, 0.4, 0.8 reaches across via two hops") {
    const auto rho = glue_local_metric(line_set({0.0, 0.4, 0.8}), 0.5, euclid);
    CHECK(rho[0][2] == doctest::Approx(0.8).epsilon(1e-15));
  }

  SUBCASE("disconnected chain graph is a partition error") {
    try {
      glue_local_metric(line_set({0.0, 0.1, 5.0}), 0.5, euclid);
      FAIL("expected PartitionError");
    } catch (const PartitionError& e) {
      CHECK(e.components().size() == 2);
    }
  }

  SUBCASE("glued table passes the axiom check") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> coord(0.0, 1.0);
    std::vector<double> pts;
    for (int i = 0; i < 40; ++i) pts.push_back(coord(rng));
    const auto set = line_set(pts);
    const auto rho = glue_local_metric(set, 0.2, euclid);
    AxiomCheckOptions opts;
    opts.tol = 0.0;  // shortest-path tables are exact
    const auto report = check_metric_axioms(
        pts.size(), [&](std::size_t i, std::size_t j) { return rho[i][j]; },
        opts);
    CHECK(report.clean(false));
  }
}

TEST_CASE("locally minimizing check") {
  LocalMetricFn<double> euclid = [](double, double y, double z) {
    return std::abs(y - z);
  };
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  PointSet<double> sample = line_set({});
  for (int i = 0; i < 30; ++i) sample.points.push_back(coord(rng));

  CHECK(local_minimizing_violations(sample, 0.3, euclid) == 0);

  // shrinking the metric away from its own base point breaks the property
  LocalMetricFn<double> skew = [](double base, double y, double z) {
    const double scale = (base > 0.5) ? 0.5 : 1.0;
    return scale * std::abs(y - z);
  };
  CHECK(local_minimizing_violations(sample, 0.3, skew) > 0);
}

TEST_CASE("metric axiom checker flags constructed violations") {
  // d(x,y) = |x-y|^2 on 0,1,2: d(0,2)=4 > d(0,1)+d(1,2)=2.
  std::vector<double> pts{0.0, 1.0, 2.0};
  const auto report = check_metric_axioms(3, [&](std::size_t i, std::size_t j) {
    const double d = pts[i] - pts[j];
    return d * d;
  });
  CHECK(!report.triangle.empty());
  CHECK(report.symmetry.empty());

  // pseudo-metric with a glued pair: identity-of-indiscernibles flagged only
  const auto report2 = check_metric_axioms(3, [&](std::size_t i, std::size_t j) {
    auto cls = [](std::size_t k) { return k == 2 ? 0 : k; };  // glue 2 onto 0
    return std::abs(static_cast<double>(cls(i)) - static_cast<double>(cls(j)));
  });
  CHECK(!report2.indiscernibility.empty());
  CHECK(report2.clean(false));

  // Euclidean on random points: no violations at all
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  std::vector<double> sample;
  for (int i = 0; i < 50; ++i) sample.push_back(coord(rng));
  const auto report3 = check_metric_axioms(50, [&](std::size_t i, std::size_t j) {
    return std::abs(sample[i] - sample[j]);
  });
  CHECK(report3.clean());
}
