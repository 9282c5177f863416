#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "catena/flow.hpp"

using namespace catena;

namespace {

State planar(double x, double y) { return State{{x, y}, {}}; }

double dist2(const State& a, const State& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.coords.size(); ++i)
    s += (a.coords[i] - b.coords[i]) * (a.coords[i] - b.coords[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("saddle closed form is exact") {
  const FlowSystem saddle = make_saddle_flow();
  const FlowResult r = saddle.advance(planar(1.0, 1.0), 1.0);
  CHECK(r.status == FlowStatus::interior);
  CHECK(r.point.coords[0] == std::exp(1.0));
  CHECK(r.point.coords[1] == std::exp(-1.0));
  // identity axiom
  const FlowResult id = saddle.advance(planar(0.3, -0.7), 0.0);
  CHECK(id.point.coords[0] == 0.3);
  CHECK(id.point.coords[1] == -0.7);
}

TEST_CASE("rk4 saddle matches the closed form at fourth order") {
  const FlowSystem exact = make_saddle_flow();
  const FlowSystem rk = make_saddle_ode(1e-3);
  const State x0 = planar(1.0, 1.0);
  const State want = exact.advance(x0, 1.0).point;
  const State got = rk.advance(x0, 1.0).point;
  CHECK(dist2(want, got) <= 1e-10);

  // halving the step cuts the endpoint error by about 2^4
  auto endpoint_error = [&](double h) {
    const FlowSystem sys = make_saddle_ode(h);
    return dist2(sys.advance(x0, 1.0).point, want);
  };
  const double e1 = endpoint_error(0.05);
  const double e2 = endpoint_error(0.025);
  CHECK(e1 / e2 >= 14.0);
  CHECK(e1 / e2 <= 18.0);
}

TEST_CASE("group law residuals") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::uniform_real_distribution<double> time(-1.0, 1.0);

  SUBCASE("closed form") {
    const FlowSystem sys = make_saddle_flow();
    for (int i = 0; i < 200; ++i) {
      const State x = planar(coord(rng), coord(rng));
      const double s = time(rng), t = time(rng);
      const State two = sys.advance(sys.advance(x, s).point, t).point;
      const State one = sys.advance(x, s + t).point;
      CHECK(dist2(two, one) <= 1e-12);
    }
  }

  SUBCASE("rk4") {
    const FlowSystem sys = make_saddle_ode(1e-3);
    for (int i = 0; i < 200; ++i) {
      const State x = planar(coord(rng), coord(rng));
      const double s = time(rng), t = time(rng);
      const State two = sys.advance(sys.advance(x, s).point, t).point;
      const State one = sys.advance(x, s + t).point;
      CHECK(dist2(two, one) <= 1e-7);
    }
  }
}

TEST_CASE("ode domain exit is refined by bisection") {
  OdeSpec spec;
  spec.field = [](const std::vector<double>& y, std::vector<double>& dy) {
    dy[0] = y[0];
    dy[1] = -y[1];
  };
  spec.domain = [](const std::vector<double>& y) {
    return std::abs(y[0]) + std::abs(y[1]) - 1.0;
  };
  const FlowSystem sys = FlowSystem::ode(std::move(spec));
  const FlowResult r = sys.advance(planar(0.1, 0.5), 5.0);
  REQUIRE(r.status == FlowStatus::exited);
  // frozen from the closed form: 0.1 e^t + 0.5 e^{-t} = 1 exits at
  // t = ln((1 + sqrt(0.8)) / 0.2) = 2.2483544...
  CHECK(r.exit_time ==
        doctest::Approx(std::log((1.0 + std::sqrt(0.8)) / 0.2)).epsilon(1e-6));
  CHECK(r.exit_time == doctest::Approx(2.2483544).epsilon(1e-6));
  CHECK(std::abs(std::abs(r.point.coords[0]) + std::abs(r.point.coords[1]) - 1.0) <=
        1e-7);
  CHECK_THROWS_AS(sys.advance(planar(2.0, 2.0), 1.0), DomainError);
}

TEST_CASE("ode divergence reports the last valid time") {
  OdeSpec spec;
  spec.field = [](const std::vector<double>& y, std::vector<double>& dy) {
    dy[0] = y[0] * y[0];  // blows up in finite time
  };
  spec.step = 1e-2;
  const FlowSystem sys = FlowSystem::ode(std::move(spec));
  CHECK_THROWS_AS(sys.advance(State{{5.0}, {}}, 10.0), DivergenceError);
}

TEST_CASE("orbit trace") {
  const FlowSystem saddle = make_saddle_flow();

  SUBCASE("fixed point trace is constant") {
    const auto trace = orbit_trace(saddle, planar(0.0, 0.0), 0.0, 1.0, 0.25);
    CHECK(trace.size() == 5);
    for (const auto& e : trace) {
      CHECK(e.state.coords[0] == 0.0);
      CHECK(e.state.coords[1] == 0.0);
      CHECK(!e.exit_event);
    }
  }

  SUBCASE("trace truncates at the refined exit event") {
    ClosedFormSpec spec;
    spec.map = [](const State& x, double t) -> State {
      return {{x.coords[0] * std::exp(t), x.coords[1] * std::exp(-t)}, {}};
    };
    spec.domain = [](const std::vector<double>& y) {
      return std::abs(y[0]) + std::abs(y[1]) - 1.0;
    };
    const FlowSystem blocked = FlowSystem::closed_form(std::move(spec));
    const auto trace = orbit_trace(blocked, planar(0.1, 0.5), 0.0, 5.0, 0.1);
    REQUIRE(!trace.empty());
    CHECK(trace.back().exit_event);
    CHECK(trace.back().t ==
          doctest::Approx(std::log((1.0 + std::sqrt(0.8)) / 0.2)).epsilon(1e-6));
  }
}

TEST_CASE("linear attractor model") {
  LinearModelSpec spec;
  spec.section = {{1.0, 0.5}, {1.0, -0.25}};
  const FlowSystem sys = make_linear_attractor(spec);

  SUBCASE("decay of the radial coordinate is exact") {
    const FlowResult r = sys.advance(State{{1.0, 1.0}, {}}, 0.7);
    CHECK(r.status == FlowStatus::interior);
    CHECK(r.point.coords[0] == std::exp(-0.7));
    CHECK(r.point.coords[1] == 1.0);
  }

  SUBCASE("origin is fixed") {
    const FlowResult r = sys.advance(State{{0.0, 0.0}, {}}, -3.0);
    CHECK(r.status == FlowStatus::interior);
    CHECK(r.point.coords[0] == 0.0);
  }

  SUBCASE("backward time beyond -log r leaves the cone") {
    const FlowResult r = sys.advance(State{{0.5, 0.0}, {}}, -1.0);
    REQUIRE(r.status == FlowStatus::exited);
    CHECK(r.exit_time == doctest::Approx(std::log(0.5)).epsilon(1e-12));
    CHECK(r.point.coords[0] == 1.0);
  }

  SUBCASE("successive norms scale by e^{-1} under unit steps") {
    State cur{{1.0, 0.0}, {}};
    double prev = 1.0;
    for (int i = 0; i < 5; ++i) {
      cur = sys.advance(cur, 1.0).point;
      CHECK(cur.coords[0] == doctest::Approx(prev * std::exp(-1.0)).epsilon(1e-14));
      prev = cur.coords[0];
    }
  }

  SUBCASE("group law of the radial decay") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> rdist(0.05, 1.0);
    std::uniform_real_distribution<double> tdist(0.0, 2.0);
    for (int i = 0; i < 200; ++i) {
      const State x{{rdist(rng), 0.0}, {}};
      const double s = tdist(rng), t = tdist(rng);
      const State two = sys.advance(sys.advance(x, s).point, t).point;
      const State one = sys.advance(x, s + t).point;
      CHECK(std::abs(two.coords[0] - one.coords[0]) <= 1e-12);
    }
  }

  SUBCASE("invalid section tuples are rejected") {
    CHECK_THROWS_AS(make_linear_attractor(LinearModelSpec{{{0.5, 1.0}}}),
                    SpecError);
  }

  SUBCASE("radial coordinates outside the cone are rejected") {
    CHECK_THROWS_AS(sys.advance(State{{1.5, 0.0}, {}}, 1.0), DomainError);
    CHECK_THROWS_AS(sys.advance(State{{0.5, 7.0}, {}}, 1.0), DomainError);
  }
}

TEST_CASE("suspension flow") {
  const DiscreteSystem shift = make_full_shift();
  const double nu = 0.8;
  const FlowSystem sys = make_suspension(shift, nu);
  const double period = 1.0 / nu;
  const SymbolicPoint w({2, 5});
  State x;
  x.coords = {0.0};
  x.fiber = w;

  SUBCASE("one period applies the base map once") {
    const FlowResult r = sys.advance(x, period);
    CHECK(r.point.coords[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(states_equal(*r.point.fiber, DiscreteState(w.shifted(1))));
  }

  SUBCASE("zero time is the identity") {
    const FlowResult r = sys.advance(x, 0.0);
    CHECK(r.point.coords[0] == 0.0);
    CHECK(states_equal(*r.point.fiber, DiscreteState(w)));
  }

  SUBCASE("one backward period applies the inverse") {
    const FlowResult r = sys.advance(x, -period);
    CHECK(r.point.coords[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(states_equal(*r.point.fiber, DiscreteState(w.shifted(-1))));
  }

  SUBCASE("wrap count matches floor(nu t + nu s)") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> sdist(0.0, period * 0.999);
    std::uniform_real_distribution<double> tdist(0.0, 10.0);
    for (int i = 0; i < 100; ++i) {
      State y;
      const double s = sdist(rng);
      const double t = tdist(rng);
      y.coords = {s};
      y.fiber = w;
      const FlowResult r = sys.advance(y, t);
      const auto wraps = static_cast<std::int64_t>(std::floor(nu * t + nu * s));
      CHECK(states_equal(*r.point.fiber, DiscreteState(w.shifted(wraps))));
    }
  }

  SUBCASE("group law across wraps") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> tdist(-4.0, 4.0);
    for (int i = 0; i < 200; ++i) {
      const double s = tdist(rng), t = tdist(rng);
      const State two = sys.advance(sys.advance(x, s).point, t).point;
      const State one = sys.advance(x, s + t).point;
      CHECK(two.coords[0] == doctest::Approx(one.coords[0]).epsilon(1e-9));
      CHECK(states_equal(*two.fiber, *one.fiber));
    }
  }
}

TEST_CASE("suspensions require an invertible base map") {
  DiscreteSystem one_way;
  one_way.kind = DiscreteSystem::Kind::full_shift_2;
  one_way.forward = [](const DiscreteState& s) { return s; };
  CHECK_THROWS_AS(make_suspension(one_way, 1.0), SpecError);
}

TEST_CASE("fake singularity flow") {
  FakeSingularitySpec spec;
  spec.fiber_points = 3;
  spec.base_index = 0;
  spec.speed = [](double u, int idx) {
    return std::abs(u) + 0.5 * std::abs(idx);
  };
  const FlowSystem sys = make_fake_singularity(spec);

  SUBCASE("fixed point stays put") {
    const FlowResult r = sys.advance(State{{0.0, 0.0}, {}}, 5.0);
    CHECK(r.point.coords[0] == 0.0);
  }

  SUBCASE("base fiber from u=1 grows like e^t") {
    const FlowResult r = sys.advance(State{{1.0, 0.0}, {}}, 2.0);
    CHECK(r.point.coords[0] == doctest::Approx(std::exp(2.0)).epsilon(1e-9));
  }

  SUBCASE("base fiber from u=-1 approaches zero without crossing") {
    State cur{{-1.0, 0.0}, {}};
    double prev = -1.0;
    for (int k = 1; k <= 10; ++k) {
      cur = sys.advance(cur, 1.0).point;
      CHECK(cur.coords[0] < 0.0);       // never reaches the fixed point
      CHECK(cur.coords[0] > prev);      // strictly monotone toward it
      prev = cur.coords[0];
    }
    CHECK(cur.coords[0] ==
          doctest::Approx(-std::exp(-10.0)).epsilon(1e-6));
  }

  SUBCASE("off-base fibers pass through u=0 at positive speed") {
    const FlowResult r = sys.advance(State{{-0.2, 1.0}, {}}, 1.0);
    CHECK(r.point.coords[0] > 0.0);
  }

  SUBCASE("group law within the integration budget") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> udist(0.2, 1.0);
    std::uniform_real_distribution<double> tdist(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
      const double idx = (i % 2) ? 1.0 : 0.0;
      const State x{{udist(rng), idx}, {}};
      const double s = tdist(rng), t = tdist(rng);
      const State two = sys.advance(sys.advance(x, s).point, t).point;
      const State one = sys.advance(x, s + t).point;
      CHECK(std::abs(two.coords[0] - one.coords[0]) <= 1e-7);
    }
  }

  SUBCASE("spec validation rejects bad speeds") {
    FakeSingularitySpec bad = spec;
    bad.speed = [](double u, int) { return std::abs(u) - 0.01; };
    CHECK_THROWS_AS(make_fake_singularity(bad), SpecError);

    FakeSingularitySpec fast = spec;
    // vanishes too fast: sqrt gives a finite-time arrival
    fast.speed = [](double u, int idx) {
      return std::sqrt(std::abs(u)) + 0.5 * std::abs(idx);
    };
    CHECK_THROWS_AS(make_fake_singularity(fast), SpecError);
  }
}
