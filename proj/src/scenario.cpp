#include "catena/scenario.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "catena/block.hpp"
#include "catena/discrete.hpp"
#include "catena/fields.hpp"
#include "catena/flow.hpp"
#include "catena/metric_core.hpp"
#include "catena/sections.hpp"

namespace catena {

namespace {

using json = nlohmann::json;

const json& require_field(const json& j, const std::string& key,
                          const std::string& ctx) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigError("missing field '" + ctx + key + "'", ctx + key);
  return j.at(key);
}

double number_or(const json& j, const std::string& key, double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_number())
    throw ConfigError("field '" + key + "' must be a number", key);
  return j.at(key).get<double>();
}

std::string string_field(const json& j, const std::string& key,
                         const std::string& ctx) {
  const json& v = require_field(j, key, ctx);
  if (!v.is_string())
    throw ConfigError("field '" + ctx + key + "' must be a string", ctx + key);
  return v.get<std::string>();
}

using StateFn = std::function<double(const State&)>;

struct SystemBundle {
  std::optional<FlowSystem> flow;
  std::optional<DiscreteSystem> discrete;  // suspension base or plain discrete
  bool pair_base = false;
  double lambda = 0.0;  // shift metric parameter when shift points are around
  double nu = 0.0;
  std::string kind;
};

// Shift points come either as a bare array of coordinates carrying symbol 1
// or as {offset, support: [[n, symbol], ...]} with the symbol at n + offset.
SymbolicPoint parse_symbolic(const json& j, const std::string& ctx) {
  std::vector<std::int64_t> ones;
  if (j.is_array()) {
    for (const auto& v : j) ones.push_back(v.get<std::int64_t>());
    return SymbolicPoint(std::move(ones));
  }
  if (j.is_object() && j.contains("support")) {
    const auto offset =
        static_cast<std::int64_t>(number_or(j, "offset", 0.0));
    for (const auto& entry : j.at("support")) {
      if (!entry.is_array() || entry.size() != 2)
        throw ConfigError("support entries must be [coordinate, symbol] pairs",
                          ctx + ".support");
      const auto n = entry[0].get<std::int64_t>();
      const auto symbol = entry[1].get<int>();
      if (symbol != 0 && symbol != 1)
        throw ConfigError("symbols must be 0 or 1", ctx + ".support");
      if (symbol == 1) ones.push_back(n + offset);
    }
    return SymbolicPoint(std::move(ones));
  }
  throw ConfigError(
      "field '" + ctx + "' must be a coordinate array or {offset, support}",
      ctx);
}

SystemBundle build_system(const json& cfg) {
  const json& j = require_field(cfg, "system", "");
  SystemBundle b;
  b.kind = string_field(j, "kind", "system.");
  b.lambda = catenary_roots().lambda_u;
  if (b.kind == "closed_form") {
    const std::string name = string_field(j, "name", "system.");
    if (name == "saddle")
      b.flow = make_saddle_flow();
    else if (name == "contraction")
      b.flow = make_contraction_flow(number_or(j, "rate", 1.0),
                                     static_cast<std::size_t>(number_or(j, "dim", 1)));
    else if (name == "rotation")
      b.flow = make_rotation_flow();
    else
      throw ConfigError("unknown closed form '" + name + "'", "system.name");
  } else if (b.kind == "ode") {
    const std::string name = string_field(j, "name", "system.");
    const double step = number_or(j, "step", 1e-3);
    if (name == "saddle")
      b.flow = make_saddle_ode(step);
    else if (name == "contraction")
      b.flow = make_contraction_ode(number_or(j, "rate", 1.0),
                                    static_cast<std::size_t>(number_or(j, "dim", 1)),
                                    step);
    else
      throw ConfigError("unknown ode field '" + name + "'", "system.name");
  } else if (b.kind == "linear_model") {
    const json& sec = require_field(j, "section", "system.");
    LinearModelSpec spec;
    for (const auto& row : sec)
      spec.section.push_back(row.get<std::vector<double>>());
    b.flow = make_linear_attractor(std::move(spec));
  } else if (b.kind == "suspension") {
    const json& base = require_field(j, "base", "system.");
    const std::string bname = string_field(base, "kind", "system.base.");
    if (bname == "full_shift_2") {
      b.discrete = make_full_shift();
    } else if (bname == "pair_shift") {
      b.discrete = make_pair_system(make_full_shift());
      b.pair_base = true;
    } else if (bname == "toral_automorphism") {
      b.discrete = make_toral_automorphism();
    } else {
      throw ConfigError("unknown suspension base '" + bname + "'",
                        "system.base.kind");
    }
    const json& nu = require_field(j, "nu", "system.");
    if (nu.is_string() && nu.get<std::string>() == "catenary")
      b.nu = 1.0 / std::log(b.lambda);
    else if (nu.is_number())
      b.nu = nu.get<double>();
    else
      throw ConfigError("field 'system.nu' must be a number or \"catenary\"",
                        "system.nu");
    b.flow = make_suspension(*b.discrete, b.nu);
  } else if (b.kind == "fake_singularity") {
    const std::string speed = string_field(j, "speed", "system.");
    FakeSingularitySpec spec;
    spec.fiber_points = static_cast<int>(number_or(j, "fiber_points", 1));
    spec.base_index = static_cast<int>(number_or(j, "base_index", 0));
    spec.step = number_or(j, "step", 1e-3);
    const double spacing = number_or(j, "fiber_spacing", 0.5);
    if (speed == "abs_plus_index_distance") {
      const int base = spec.base_index;
      spec.speed = [base, spacing](double u, int idx) {
        return std::abs(u) + spacing * std::abs(idx - base);
      };
    } else {
      throw ConfigError("unknown speed '" + speed + "'", "system.speed");
    }
    b.flow = make_fake_singularity(std::move(spec));
  } else if (b.kind == "discrete") {
    const std::string name = string_field(j, "name", "system.");
    if (name == "full_shift_2")
      b.discrete = make_full_shift();
    else if (name == "pair_shift") {
      b.discrete = make_pair_system(make_full_shift());
      b.pair_base = true;
    } else if (name == "toral_automorphism")
      b.discrete = make_toral_automorphism();
    else
      throw ConfigError("unknown discrete system '" + name + "'", "system.name");
  } else {
    throw ConfigError("unknown system kind '" + b.kind + "'", "system.kind");
  }
  return b;
}

State parse_state(const json& j, const SystemBundle&, const std::string& ctx) {
  State s;
  if (j.is_array()) {
    s.coords = j.get<std::vector<double>>();
    return s;
  }
  if (j.is_object()) {
    if (j.contains("s")) {
      s.coords = {j.at("s").get<double>()};
      if (j.contains("pair")) {
        const json& pr = j.at("pair");
        if (!pr.is_array() || pr.size() != 2)
          throw ConfigError("field '" + ctx + ".pair' must hold two points",
                            ctx + ".pair");
        s.fiber = make_pair_state(parse_symbolic(pr[0], ctx + ".pair[0]"),
                                  parse_symbolic(pr[1], ctx + ".pair[1]"));
      } else if (j.contains("ones")) {
        s.fiber = parse_symbolic(j.at("ones"), ctx + ".ones");
      } else {
        throw ConfigError("suspension state needs 'pair' or 'ones'", ctx);
      }
      return s;
    }
    if (j.contains("u")) {
      s.coords = {j.at("u").get<double>(), number_or(j, "index", 0.0)};
      return s;
    }
    if (j.contains("r")) {
      s.coords = {j.at("r").get<double>(), number_or(j, "index", 0.0)};
      return s;
    }
  }
  throw ConfigError("cannot parse state at '" + ctx + "'", ctx);
}

StateFn build_state_fn(const json& j, const SystemBundle& b,
                       const std::string& ctx) {
  const std::string name = string_field(j, "name", ctx + ".");
  if (name == "l1_norm")
    return [](const State& s) {
      double v = 0.0;
      for (double c : s.coords) v += std::abs(c);
      return v;
    };
  if (name == "euclidean_norm")
    return [](const State& s) {
      double v = 0.0;
      for (double c : s.coords) v += c * c;
      return std::sqrt(v);
    };
  if (name == "sup_norm")
    return [](const State& s) {
      double v = 0.0;
      for (double c : s.coords) v = std::max(v, std::abs(c));
      return v;
    };
  if (name == "abs_coord") {
    const auto idx = static_cast<std::size_t>(number_or(j, "index", 0.0));
    return [idx](const State& s) {
      if (idx >= s.coords.size())
        throw DomainError("abs_coord: index out of range");
      return std::abs(s.coords[idx]);
    };
  }
  if (name == "constant") {
    const double v = number_or(j, "value", 1.0);
    return [v](const State&) { return v; };
  }
  if (name == "pair_shift_distance") {
    if (!b.pair_base)
      throw ConfigError("pair_shift_distance needs a pair_shift base",
                        ctx + ".name");
    const double lambda = b.lambda;
    return [lambda](const State& s) {
      if (!s.fiber) throw DomainError("pair_shift_distance: no fiber");
      const auto& pr = as_pair(*s.fiber);
      return shift_metric(std::get<SymbolicPoint>(pr.first),
                          std::get<SymbolicPoint>(pr.second), lambda);
    };
  }
  throw ConfigError("unknown function '" + name + "'", ctx + ".name");
}

struct BlockBundle {
  Block block;
  double t_max = 50.0;
};

std::optional<BlockBundle> build_block(const json& cfg, const SystemBundle& b,
                                       json& echo) {
  if (!cfg.contains("block")) return std::nullopt;
  const json& j = cfg.at("block");
  BlockBundle out;
  out.block.indicator = build_state_fn(require_field(j, "indicator", "block."),
                                       b, "block.indicator");
  out.block.level = require_field(j, "level", "block.").get<double>();
  out.block.band = number_or(j, "band", 1e-9);
  out.t_max = number_or(j, "t_max", 50.0);
  if (j.contains("lambda_distance"))
    out.block.lambda_distance =
        build_state_fn(j.at("lambda_distance"), b, "block.lambda_distance");
  echo["block"]["band"] = out.block.band;
  echo["block"]["t_max"] = out.t_max;
  return out;
}

std::vector<State> build_grid(const json& j, const Block* block,
                              double margin) {
  const auto mins = require_field(j, "min", "verification.grid.")
                        .get<std::vector<double>>();
  const auto maxs = require_field(j, "max", "verification.grid.")
                        .get<std::vector<double>>();
  const auto ns = require_field(j, "n", "verification.grid.")
                      .get<std::vector<std::size_t>>();
  if (mins.size() != maxs.size() || mins.size() != ns.size())
    throw ConfigError("grid min/max/n must have equal lengths",
                      "verification.grid");
  std::vector<State> grid;
  std::vector<std::size_t> idx(ns.size(), 0);
  const bool restrict_to_block = j.value("restrict_to_block", block != nullptr);
  while (true) {
    State s;
    for (std::size_t d = 0; d < ns.size(); ++d) {
      const double t = (ns[d] > 1)
                           ? static_cast<double>(idx[d]) / (ns[d] - 1)
                           : 0.5;
      s.coords.push_back(mins[d] + t * (maxs[d] - mins[d]));
    }
    if (!restrict_to_block || !block ||
        block->indicator(s) <= block->level - margin)
      grid.push_back(std::move(s));
    std::size_t d = 0;
    for (; d < ns.size(); ++d) {
      if (++idx[d] < ns[d]) break;
      idx[d] = 0;
    }
    if (d == ns.size()) break;
  }
  return grid;
}

struct ToleranceSet {
  const json* j;
  double scale;
  double get(const std::string& key, double fallback) const {
    double v = fallback;
    if (j && j->contains(key)) v = j->at(key).get<double>();
    return v * scale;
  }
};

void add_check(std::vector<CheckResult>& checks, const std::string& name,
               double value, double tol, const std::string& witness = "") {
  checks.push_back({name, value, tol, value <= tol, witness});
}

ScalarField maybe_injected(ScalarField field, const json& cfg) {
  if (!cfg.contains("inject_bump")) return field;
  const json& j = cfg.at("inject_bump");
  const auto center = require_field(j, "center", "inject_bump.")
                          .get<std::vector<double>>();
  const double radius = number_or(j, "radius", 0.1);
  const double height = number_or(j, "height", 0.1);
  ScalarField out;
  out.exponent = field.exponent;
  out.value = [inner = field.value, center, radius, height](const State& s) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < center.size() && i < s.coords.size(); ++i)
      d2 += (s.coords[i] - center[i]) * (s.coords[i] - center[i]);
    const double r2 = radius * radius;
    double v = inner(s);
    if (d2 < r2) {
      const double w = 1.0 - d2 / r2;
      v += height * w * w;
    }
    return v;
  };
  return out;
}

// --- shift pair generators -------------------------------------------------

SymbolicPoint random_symbolic(std::mt19937_64& rng, int span = 12,
                              double density = 0.2) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<std::int64_t> ones;
  for (int n = -span; n <= span; ++n)
    if (coin(rng) < density) ones.push_back(n);
  return SymbolicPoint(std::move(ones));
}

// Flips coordinates of x at the given positions.
SymbolicPoint flipped(const SymbolicPoint& x,
                      const std::vector<std::int64_t>& at) {
  std::vector<std::int64_t> ones = x.ones();
  for (std::int64_t n : at) {
    auto it = std::find(ones.begin(), ones.end(), n);
    if (it == ones.end())
      ones.push_back(n);
    else
      ones.erase(it);
  }
  return SymbolicPoint(std::move(ones));
}

// Random pair inside the delta block of the pair shift (coordinate 0 agrees;
// flip positions keep the distance under delta). kind cycles through
// transient / forward-asymptotic / backward-asymptotic difference supports.
std::pair<SymbolicPoint, SymbolicPoint> random_block_pair(std::mt19937_64& rng,
                                                          int kind) {
  std::uniform_int_distribution<int> offset(2, 9);
  const SymbolicPoint x = random_symbolic(rng);
  std::vector<std::int64_t> flips;
  if (kind % 3 == 0) {
    flips = {-static_cast<std::int64_t>(offset(rng)),
             static_cast<std::int64_t>(offset(rng))};
  } else if (kind % 3 == 1) {
    flips = {-static_cast<std::int64_t>(offset(rng))};
  } else {
    flips = {static_cast<std::int64_t>(offset(rng))};
  }
  return {x, flipped(x, flips)};
}

// --- construction runners --------------------------------------------------

struct ScenarioContext {
  const json& cfg;
  SystemBundle& bundle;
  std::optional<BlockBundle>& block;
  ToleranceSet tol;
  std::mt19937_64& rng;
  json& echo;
  std::string out_dir;
  std::vector<std::string>* csv_paths = nullptr;
};

std::string format_double(double v);

std::optional<std::string> csv_target(const ScenarioContext& ctx,
                                      const std::string& key) {
  if (!ctx.cfg.contains("output") || !ctx.cfg.at("output").contains(key))
    return std::nullopt;
  std::filesystem::create_directories(ctx.out_dir);
  return (std::filesystem::path(ctx.out_dir) /
          ctx.cfg.at("output").at(key).get<std::string>())
      .string();
}

std::optional<ScalarField> build_field(const ScenarioContext& ctx) {
  const std::string construction =
      string_field(ctx.cfg, "construction", "");
  if (construction == "sum") {
    const json& j = require_field(ctx.cfg, "sum", "");
    const double a = number_or(j, "a", 1.0);
    ScalarField alpha{build_state_fn(require_field(j, "alpha", "sum."),
                                     ctx.bundle, "sum.alpha"),
                      a};
    ScalarField omega{build_state_fn(require_field(j, "omega", "sum."),
                                     ctx.bundle, "sum.omega"),
                      a};
    return maybe_injected(catenary_sum_function(alpha, omega), ctx.cfg);
  }
  if (construction == "bvp") {
    if (!ctx.block) throw ConfigError("bvp construction needs a block", "block");
    const json& j = require_field(ctx.cfg, "bvp", "");
    BVPSpec spec;
    spec.exponent = number_or(j, "a", 1.0);
    spec.boundary = build_state_fn(require_field(j, "boundary", "bvp."),
                                   ctx.bundle, "bvp.boundary");
    const FlowSystem& sys = *ctx.bundle.flow;
    const Block& block = ctx.block->block;
    const double t_max = ctx.block->t_max;
    ScalarField field;
    field.exponent = spec.exponent;
    field.value = [&sys, block, spec, t_max](const State& x) {
      return catenary_bvp(sys, block, spec, x, t_max);
    };
    return maybe_injected(field, ctx.cfg);
  }
  if (construction == "exact_decay") {
    const json& j = require_field(ctx.cfg, "exact_decay", "");
    const double a = number_or(j, "a", 1.0);
    const double level = require_field(j, "level", "exact_decay.").get<double>();
    StateFn aux = build_state_fn(require_field(j, "aux", "exact_decay."),
                                 ctx.bundle, "exact_decay.aux");
    const FlowSystem& sys = *ctx.bundle.flow;
    ScalarField field;
    field.exponent = a;
    field.value = [&sys, aux, level, a](const State& x) {
      return exact_decay_lyapunov(sys, aux, level, a, x);
    };
    return maybe_injected(field, ctx.cfg);
  }
  return std::nullopt;
}

// Recurrence of suspension boundary values along pair orbits; exercises the
// telescoping identity of the catenary solve with e^T = lambda_u.
std::vector<CheckResult> run_suspension_recurrence(const ScenarioContext& ctx) {
  const json& j = require_field(ctx.cfg.at("bvp"), "recurrence", "bvp.");
  if (!ctx.bundle.flow ||
      ctx.bundle.flow->kind() != FlowSystem::Kind::suspension ||
      !ctx.bundle.pair_base)
    throw ConfigError("recurrence check needs a pair-shift suspension",
                      "system");
  const FlowSystem& sys = *ctx.bundle.flow;
  const DiscreteSystem& pairs = sys.base_system();
  const Block& block = ctx.block->block;
  const double t_max = ctx.block->t_max;

  BVPSpec spec;
  spec.exponent = number_or(ctx.cfg.at("bvp"), "a", 1.0);
  spec.boundary = build_state_fn(
      require_field(ctx.cfg.at("bvp"), "boundary", "bvp."), ctx.bundle,
      "bvp.boundary");

  const int orbits = static_cast<int>(number_or(j, "orbits", 20));
  const auto range = static_cast<std::int64_t>(number_or(j, "range", 4));
  const double lambda = ctx.bundle.lambda;

  double worst = 0.0;
  std::string witness;
  int made = 0;
  int kind = 0;
  while (made < orbits) {
    auto [x, y] = random_block_pair(ctx.rng, kind++);
    if (x == y || shift_metric(x, y, lambda) > block.level) continue;
    const DiscreteState pair = make_pair_state(x, y);
    auto in_block = [&](const DiscreteState& p) {
      return shift_metric(std::get<SymbolicPoint>(as_pair(p).first),
                          std::get<SymbolicPoint>(as_pair(p).second),
                          lambda) <= block.level;
    };
    // maximal contiguous in-block window around k = 0
    std::int64_t k_lo = 0, k_hi = 0;
    while (k_lo > -range && in_block(pairs.iterate(pair, k_lo - 1))) --k_lo;
    while (k_hi < range && in_block(pairs.iterate(pair, k_hi + 1))) ++k_hi;
    std::vector<double> u;
    for (std::int64_t k = k_lo; k <= k_hi; ++k)
      u.push_back(
          suspension_catenary(sys, block, spec, pairs.iterate(pair, k), t_max));
    if (u.size() < 3) continue;
    for (std::size_t i = 1; i + 1 < u.size(); ++i) {
      const double r = std::abs(u[i + 1] - 3.0 * u[i] + u[i - 1]);
      if (r > worst) {
        worst = r;
        witness = discrete_to_string(pair);
      }
    }
    ++made;
  }
  std::vector<CheckResult> checks;
  add_check(checks, "suspension_recurrence", worst,
            ctx.tol.get("recurrence", 1e-6), witness);
  ctx.echo["bvp"]["recurrence"]["orbits"] = orbits;
  ctx.echo["bvp"]["recurrence"]["range"] = range;
  return checks;
}

std::vector<CheckResult> run_grid_verification(const ScenarioContext& ctx,
                                               const ScalarField& field) {
  std::vector<CheckResult> checks;
  const json& v = require_field(ctx.cfg, "verification", "");
  const double margin = number_or(v, "block_margin", 1e-3);
  const Block* blk = ctx.block ? &ctx.block->block : nullptr;
  const std::vector<State> grid =
      build_grid(require_field(v, "grid", "verification."), blk, margin);

  VerifyOptions vo;
  if (v.contains("drift_start"))
    vo.drift_start = parse_state(v.at("drift_start"), ctx.bundle,
                                 "verification.drift_start");
  vo.drift_span = number_or(v, "drift_span", 5.0);

  ctx.echo["verification"]["block_margin"] = margin;
  ctx.echo["verification"]["first_step"] = vo.first_step;
  ctx.echo["verification"]["second_step"] = vo.second_step;
  if (vo.drift_start) ctx.echo["verification"]["drift_span"] = vo.drift_span;
  // flag blocks clipped by the verification box
  if (blk) {
    const json& g = v.at("grid");
    const auto mins = g.at("min").get<std::vector<double>>();
    const auto maxs = g.at("max").get<std::vector<double>>();
    bool touches = false;
    for (const State& x : grid)
      for (std::size_t d = 0; d < x.coords.size(); ++d)
        if (x.coords[d] <= mins[d] + 1e-12 || x.coords[d] >= maxs[d] - 1e-12)
          touches = true;
    ctx.echo["verification"]["block_touches_grid_hull"] = touches;
  }

  const bool is_bvp = string_field(ctx.cfg, "construction", "") == "bvp";
  // (L, Ldot, Lddot) per grid point, construction-appropriate
  std::function<std::array<double, 3>(const State&)> row_eval;
  CatenaryReport report;
  if (!is_bvp) {
    report = verify_catenary(field, *ctx.bundle.flow, grid, blk, vo);
    row_eval = [&, h1 = vo.first_step, h2 = vo.second_step](const State& x) {
      return std::array<double, 3>{
          field.value(x), flow_derivative(field.value, *ctx.bundle.flow, x, h1),
          flow_second_difference(field.value, *ctx.bundle.flow, x, h2)};
    };
  } else {
    // Boundary solves are verified along orbits through the hit-time
    // cocycle; a pointwise finite difference would re-bisect the hit times
    // at each stencil point and drown the residual in quantization noise.
    const FlowSystem& sys = *ctx.bundle.flow;
    BVPSpec spec;
    spec.exponent = field.exponent;
    spec.boundary = build_state_fn(
        require_field(ctx.cfg.at("bvp"), "boundary", "bvp."), ctx.bundle,
        "bvp.boundary");
    const double a2 = field.exponent * field.exponent;
    const double h = vo.second_step;
    row_eval = [&, spec, h1 = vo.first_step, h](const State& x) {
      const auto orbit = make_bvp_orbit_values(*ctx.bundle.flow,
                                               ctx.block->block, spec, x,
                                               ctx.block->t_max);
      const double v0 = orbit.value();
      return std::array<double, 3>{
          v0, (orbit.at(h1) - orbit.at(-h1)) / (2.0 * h1),
          (orbit.at(h) - 2.0 * v0 + orbit.at(-h)) / (h * h)};
    };
    for (const State& x : grid) {
      const auto orbit = make_bvp_orbit_values(sys, ctx.block->block, spec, x,
                                               ctx.block->t_max);
      const double v0 = orbit.value();
      const double lddot =
          (orbit.at(h) - 2.0 * v0 + orbit.at(-h)) / (h * h);
      const double residual = std::abs(lddot - a2 * v0);
      if (residual > report.max_residual) {
        report.max_residual = residual;
        report.worst_point = x;
      }
      const bool on_lambda =
          blk && blk->lambda_distance &&
          blk->lambda_distance(x) <= vo.lambda_exclusion;
      if (!on_lambda && lddot <= 0.0 &&
          report.hyperbolicity.size() < vo.max_witnesses)
        report.hyperbolicity.push_back({x, v0, 0.0, lddot});
      if (v0 < -vo.positivity_tol &&
          report.positivity.size() < vo.max_witnesses)
        report.positivity.push_back({x, v0, 0.0, 0.0});
      ++report.grid_points;
    }
    if (vo.drift_start) {
      const auto orbit = make_bvp_orbit_values(
          sys, ctx.block->block, spec, *vo.drift_start, ctx.block->t_max);
      const double span =
          std::min(vo.drift_span, orbit.forward_window() - 1e-2);
      auto c_of = [&](double t) {
        const double hd = vo.first_step;
        const double ld = (orbit.at(t + hd) - orbit.at(t - hd)) / (2.0 * hd);
        const double val = orbit.at(t);
        return ld * ld - a2 * val * val;
      };
      const double c0 = c_of(0.0);
      for (int k = 1; k <= vo.drift_samples; ++k) {
        const double t = span * k / vo.drift_samples;
        report.constant_drift =
            std::max(report.constant_drift, std::abs(c_of(t) - c0));
      }
    }
  }

  add_check(checks, "grid_residual", report.max_residual,
            ctx.tol.get("residual", 1e-6), state_to_string(report.worst_point));
  add_check(checks, "hyperbolicity_violations",
            static_cast<double>(report.hyperbolicity.size()), 0.0,
            report.hyperbolicity.empty()
                ? ""
                : state_to_string(report.hyperbolicity.front().point));
  add_check(checks, "positivity_violations",
            static_cast<double>(report.positivity.size()), 0.0,
            report.positivity.empty()
                ? ""
                : state_to_string(report.positivity.front().point));
  if (vo.drift_start)
    add_check(checks, "constant_drift", report.constant_drift,
              ctx.tol.get("drift", 1e-8));

  if (const auto target = csv_target(ctx, "grid_csv")) {
    std::ofstream out(*target);
    if (!out)
      throw ConfigError("cannot open grid output '" + *target + "'",
                        "output.grid_csv");
    const std::size_t dim = grid.empty() ? 0 : grid.front().coords.size();
    for (std::size_t d = 0; d < dim; ++d) out << (d ? ",c" : "c") << d;
    out << ",L,Ldot,Lddot,residual\n";
    const double a2 = field.exponent * field.exponent;
    for (const State& x : grid) {
      const auto [val, ld, ldd] = row_eval(x);
      for (std::size_t d = 0; d < dim; ++d)
        out << (d ? "," : "") << format_double(x.coords[d]);
      out << "," << format_double(val) << "," << format_double(ld) << ","
          << format_double(ldd) << "," << format_double(ldd - a2 * val)
          << "\n";
    }
    if (ctx.csv_paths) ctx.csv_paths->push_back(*target);
  }

  if (v.contains("reference")) {
    const json& r = v.at("reference");
    StateFn ref = build_state_fn(require_field(r, "field", "verification.reference."),
                                 ctx.bundle, "verification.reference.field");
    double worst = 0.0;
    std::string witness;
    for (const State& x : grid) {
      const double d = std::abs(field.value(x) - ref(x));
      if (d > worst) {
        worst = d;
        witness = state_to_string(x);
      }
    }
    add_check(checks, "reference_mismatch", worst,
              number_or(r, "tol", 1e-6) * ctx.tol.scale, witness);
  }

  // Boundary condition at the projections of the probe points.
  if (ctx.cfg.contains("bvp") && ctx.cfg.at("bvp").contains("probe_points")) {
    const FlowSystem& sys = *ctx.bundle.flow;
    StateFn boundary = build_state_fn(
        require_field(ctx.cfg.at("bvp"), "boundary", "bvp."), ctx.bundle,
        "bvp.boundary");
    double worst = 0.0;
    for (const auto& pj : ctx.cfg.at("bvp").at("probe_points")) {
      const State x = parse_state(pj, ctx.bundle, "bvp.probe_points");
      const auto [pi_s, pi_u] =
          boundary_projections(sys, ctx.block->block, x, ctx.block->t_max);
      for (const auto& p : {pi_s, pi_u})
        if (p) worst = std::max(worst,
                                std::abs(field.value(*p) - boundary(*p)));
    }
    add_check(checks, "boundary_mismatch", worst,
              ctx.tol.get("boundary", 1e-8));
  }
  return checks;
}

std::vector<CheckResult> run_attractor_size(const ScenarioContext& ctx) {
  const json& j = require_field(ctx.cfg, "attractor_size", "");
  const FlowSystem& sys = *ctx.bundle.flow;
  std::vector<CheckResult> checks;

  DistanceFn<State> dist = [](const State& a, const State& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.coords.size(); ++i)
      s += (a.coords[i] - b.coords[i]) * (a.coords[i] - b.coords[i]);
    return std::sqrt(s);
  };
  const State p = parse_state(require_field(j, "p", "attractor_size."),
                              ctx.bundle, "attractor_size.p");
  const double horizon = number_or(j, "horizon", 20.0);

  SizeFunctionSpec<State> spec;
  if (j.contains("refs")) {
    for (const auto& rj : j.at("refs"))
      spec.refs.push_back(parse_state(rj, ctx.bundle, "attractor_size.refs"));
  } else {
    throw ConfigError("attractor_size needs explicit refs", "attractor_size.refs");
  }
  AttractorLyapunovOptions opts;
  opts.samples = static_cast<int>(number_or(j, "samples", 10000));
  ctx.echo["attractor_size"]["samples"] = opts.samples;
  ctx.echo["attractor_size"]["horizon"] = horizon;
  ctx.echo["attractor_size"]["convergence_ball"] = opts.ball;

  auto L = [&](const State& x) {
    return attractor_lyapunov(sys, dist, p, spec, horizon, x, opts);
  };

  add_check(checks, "value_at_attractor", std::abs(L(p)), 1e-12 * ctx.tol.scale);

  if (j.contains("expected")) {
    const json& e = j.at("expected");
    const State x = parse_state(require_field(e, "x", "attractor_size.expected."),
                                ctx.bundle, "attractor_size.expected.x");
    const double want = require_field(e, "value", "attractor_size.expected.")
                            .get<double>();
    add_check(checks, "expected_value", std::abs(L(x) - want),
              number_or(e, "tol", 1e-3) * ctx.tol.scale);
  }

  std::size_t violations = 0;
  if (j.contains("monotone_starts")) {
    const std::vector<double> ts =
        j.value("monotone_ts", std::vector<double>{0.1, 1.0, 5.0});
    for (const auto& xj : j.at("monotone_starts")) {
      const State x = parse_state(xj, ctx.bundle, "attractor_size.monotone_starts");
      const double lx = L(x);
      for (double t : ts) {
        const State moved = sys.advance(x, t).point;
        if (!(L(moved) < lx)) ++violations;
      }
    }
    add_check(checks, "monotonicity_violations",
              static_cast<double>(violations), 0.0);
  }
  return checks;
}

std::vector<CheckResult> run_shift_metric(const ScenarioContext& ctx) {
  const json& j = ctx.cfg.contains("shift_metric") ? ctx.cfg.at("shift_metric")
                                                   : json::object();
  const int pairs = static_cast<int>(number_or(j, "pairs", 200));
  const auto roots = catenary_roots();
  const double lambda = roots.lambda_u;
  std::vector<CheckResult> checks;

  add_check(checks, "root_product", std::abs(roots.lambda_s * roots.lambda_u - 1.0),
            ctx.tol.get("roots", 1e-15));
  add_check(checks, "root_sum", std::abs(roots.lambda_s + roots.lambda_u - 3.0),
            ctx.tol.get("roots", 1e-15));

  double worst = 0.0;
  std::string witness;
  std::uniform_int_distribution<int> offset(1, 10);
  int made = 0;
  while (made < pairs) {
    const SymbolicPoint x = random_symbolic(ctx.rng);
    std::vector<std::int64_t> flips;
    const int nf = 1 + static_cast<int>(ctx.rng() % 2);
    for (int k = 0; k < nf; ++k) {
      const std::int64_t o = offset(ctx.rng);
      flips.push_back((ctx.rng() % 2) ? o : -o);
    }
    const SymbolicPoint y = flipped(x, flips);
    if (x == y) continue;
    const double d0 = shift_metric(x, y, lambda);
    if (d0 >= 1.0) continue;
    const double dp = shift_metric(x.shifted(1), y.shifted(1), lambda);
    const double dm = shift_metric(x.shifted(-1), y.shifted(-1), lambda);
    const double residual = std::abs(dp - 2.0 * d0 + dm - d0);
    if (residual > worst) {
      worst = residual;
      witness = discrete_to_string(x) + " vs " + discrete_to_string(y);
    }
    ++made;
  }
  add_check(checks, "catenary_relation", worst, ctx.tol.get("relation", 1e-12),
            witness);
  ctx.echo["shift_metric"]["pairs"] = pairs;
  ctx.echo["shift_metric"]["lambda"] = lambda;
  return checks;
}

std::vector<CheckResult> run_discrete_bvp(const ScenarioContext& ctx) {
  const json& j = ctx.cfg.contains("discrete_bvp") ? ctx.cfg.at("discrete_bvp")
                                                   : json::object();
  const int pairs = static_cast<int>(number_or(j, "pairs", 100));
  DiscreteCatenarySpec spec = DiscreteCatenarySpec::standard(
      number_or(j, "delta", 0.5),
      static_cast<std::int64_t>(number_or(j, "n_max", 40)));
  const DiscreteSystem shift = make_full_shift();
  const double lambda = catenary_roots().lambda_u;
  DistanceFn<DiscreteState> dist = [lambda](const DiscreteState& a,
                                            const DiscreteState& b) {
    return shift_metric(std::get<SymbolicPoint>(a), std::get<SymbolicPoint>(b),
                        lambda);
  };

  double worst = 0.0;
  std::string witness;
  int made = 0;
  int kind = 0;
  while (made < pairs) {
    auto [x, y] = random_block_pair(ctx.rng, kind++);
    if (x == y) continue;
    if (shift_metric(x, y, lambda) > spec.delta) continue;
    const DiscreteBvpResult res =
        discrete_catenary_bvp(shift, dist, spec, x, y);
    for (std::size_t i = 1; i + 1 < res.orbit_values.size(); ++i) {
      const double r = std::abs(res.orbit_values[i + 1] -
                                3.0 * res.orbit_values[i] +
                                res.orbit_values[i - 1]);
      if (r > worst) {
        worst = r;
        witness = discrete_to_string(x) + " vs " + discrete_to_string(y);
      }
    }
    ++made;
  }
  std::vector<CheckResult> checks;
  add_check(checks, "recurrence_residual", worst,
            ctx.tol.get("recurrence", 1e-10), witness);
  ctx.echo["discrete_bvp"]["delta"] = spec.delta;
  ctx.echo["discrete_bvp"]["n_max"] = spec.n_max;
  ctx.echo["discrete_bvp"]["pairs"] = pairs;
  ctx.echo["discrete_bvp"]["lambda_s"] = spec.lambda_s;
  ctx.echo["discrete_bvp"]["lambda_u"] = spec.lambda_u;
  return checks;
}

std::vector<CheckResult> run_sectional(const ScenarioContext& ctx) {
  const json& j = ctx.cfg.contains("sectional") ? ctx.cfg.at("sectional")
                                                : json::object();
  if (!ctx.bundle.flow ||
      ctx.bundle.flow->kind() != FlowSystem::Kind::suspension ||
      ctx.bundle.pair_base)
    throw ConfigError("sectional construction needs a suspension of the full shift",
                      "system");
  const FlowSystem& sys = *ctx.bundle.flow;
  const double lambda = ctx.bundle.lambda;
  const double period = sys.period();

  DistanceFn<State> dist = make_suspension_distance(
      sys, [lambda](const DiscreteState& a, const DiscreteState& b) {
        return shift_metric(std::get<SymbolicPoint>(a),
                            std::get<SymbolicPoint>(b), lambda);
      });

  const double tau = number_or(j, "tau", 0.3);
  const double eps = number_or(j, "eps", 0.05);
  const double delta = number_or(j, "delta", 0.1);
  const int bases = static_cast<int>(number_or(j, "bases", 6));

  // Sample states for the transversality estimate.
  std::vector<State> sample;
  std::uniform_real_distribution<double> phase(0.0, period * 0.999);
  for (int i = 0; i < 12; ++i) {
    State s;
    s.coords = {phase(ctx.rng)};
    s.fiber = random_symbolic(ctx.rng);
    sample.push_back(std::move(s));
  }
  const SectionSpec spec = make_section_spec(sys, dist, sample, tau, eps, delta);
  const StatePairMetricFn pm = make_suspension_shift_pair_metric(sys, lambda);

  double worst_proj = 0.0;
  double worst_cat = 0.0;
  std::size_t monotone_violations = 0;
  std::uniform_int_distribution<int> far(4, 9);

  for (int i = 0; i < bases; ++i) {
    State x;
    x.coords = {phase(ctx.rng)};
    const SymbolicPoint w = random_symbolic(ctx.rng);
    x.fiber = w;
    auto companion_of = [&](const SymbolicPoint& z) {
      State y0;
      y0.coords = x.coords;
      y0.fiber = z;
      const double s = section_project(sys, dist, x, y0, 0.0, spec);
      return sys.advance(y0, s).point;
    };
    const State y = companion_of(flipped(w, {-static_cast<std::int64_t>(far(ctx.rng))}));
    const State z = companion_of(flipped(w, {static_cast<std::int64_t>(far(ctx.rng))}));

    // projection residuals along a short reparametrized run; the first
    // base's trace is exported when a residual CSV was requested
    std::ofstream residual_csv;
    if (i == 0) {
      if (const auto target = csv_target(ctx, "residual_csv")) {
        residual_csv.open(*target);
        if (residual_csv) residual_csv << "t,s,residual\n";
        if (ctx.csv_paths) ctx.csv_paths->push_back(*target);
      }
    }
    SectionWalk walk(sys, dist, spec, x, {y, z});
    double prev_s0 = walk.reparam(0).s;
    double prev_s1 = walk.reparam(1).s;
    for (int step = 0; step < 5; ++step) {
      walk.advance(0.1);
      worst_proj = std::max({worst_proj, walk.reparam(0).residual,
                             walk.reparam(1).residual});
      if (!(walk.reparam(0).s > prev_s0) || !(walk.reparam(1).s > prev_s1))
        ++monotone_violations;
      prev_s0 = walk.reparam(0).s;
      prev_s1 = walk.reparam(1).s;
      if (residual_csv.is_open())
        residual_csv << format_double(walk.time()) << ","
                     << format_double(walk.reparam(0).s) << ","
                     << format_double(walk.reparam(0).residual) << "\n";
    }

    worst_cat = std::max(
        worst_cat, sectional_catenary_residual(pm, sys, dist, spec, x, y, z));
  }

  ctx.echo["sectional"]["tau"] = spec.tau;
  ctx.echo["sectional"]["eps"] = spec.eps;
  ctx.echo["sectional"]["delta"] = spec.delta;
  ctx.echo["sectional"]["bases"] = bases;
  ctx.echo["sectional"]["rate_estimate"] = spec.rate;
  std::vector<CheckResult> checks;
  add_check(checks, "transversality_rate_deficit",
            std::max(0.0, -spec.rate), 0.0);
  add_check(checks, "projection_residual", worst_proj,
            ctx.tol.get("projection", 1e-9));
  add_check(checks, "reparam_monotonicity_violations",
            static_cast<double>(monotone_violations), 0.0);
  add_check(checks, "catenary_residual", worst_cat,
            ctx.tol.get("catenary", 1e-3));
  return checks;
}

std::vector<CheckResult> run_exact_decay(const ScenarioContext& ctx,
                                         const ScalarField& field) {
  const json& j = require_field(ctx.cfg, "exact_decay", "");
  const FlowSystem& sys = *ctx.bundle.flow;
  const double a = field.exponent;
  std::vector<CheckResult> checks;

  const int samples = static_cast<int>(number_or(j, "samples", 100));
  const double t_span = number_or(j, "t_span", 5.0);
  std::uniform_real_distribution<double> tdist(0.0, t_span);
  std::uniform_real_distribution<double> xdist(number_or(j, "sample_min", 0.1),
                                               number_or(j, "sample_max", 1.0));
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double mag = xdist(ctx.rng);
    const double sign = (ctx.rng() % 2) ? 1.0 : -1.0;
    State x;
    x.coords = {sign * mag};
    const double t = tdist(ctx.rng);
    const double lx = field.value(x);
    const double lt = field.value(sys.advance(x, t).point);
    worst = std::max(worst, std::abs(lt - std::exp(-a * t) * lx));
  }
  add_check(checks, "decay_law", worst, ctx.tol.get("decay", 1e-8));
  ctx.echo["exact_decay"]["samples"] = samples;
  ctx.echo["exact_decay"]["t_span"] = t_span;

  if (j.contains("quad_l")) {
    const double l = j.at("quad_l").get<double>();
    std::size_t violations = 0;
    for (int i = 0; i < samples; ++i) {
      const double mag = xdist(ctx.rng);
      const double sign = (ctx.rng() % 2) ? 1.0 : -1.0;
      State x;
      x.coords = {sign * mag};
      double n2 = 0.0;
      for (double c : x.coords) n2 += c * c;
      if (field.value(x) > l * n2 * (1.0 + 1e-9)) ++violations;
    }
    add_check(checks, "quadratic_bound_violations",
              static_cast<double>(violations), 0.0);
  }
  return checks;
}

// --- trace / csv -----------------------------------------------------------

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_csv(const std::string& path, const FlowSystem& sys,
                     const std::vector<TraceEntry>& trace,
                     const ScalarField* field) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open trace output '" + path + "'", "output");
  const std::size_t dim = trace.empty() ? 0 : trace.front().state.coords.size();
  const bool has_fiber = !trace.empty() && trace.front().state.fiber.has_value();
  out << "t";
  for (std::size_t d = 0; d < dim; ++d) out << ",c" << d;
  if (has_fiber) out << ",fiber";
  if (field) out << ",L,Ldot,Lddot,residual";
  out << ",event\n";
  const double a2 = field ? field->exponent * field->exponent : 0.0;
  for (const TraceEntry& e : trace) {
    out << format_double(e.t);
    for (double c : e.state.coords) out << "," << format_double(c);
    if (has_fiber) out << ",\"" << discrete_to_string(*e.state.fiber) << "\"";
    if (field) {
      const double v = field->value(e.state);
      double ld = 0.0, ldd = 0.0;
      if (!e.exit_event) {
        ld = flow_derivative(field->value, sys, e.state);
        ldd = flow_second_difference(field->value, sys, e.state);
      }
      out << "," << format_double(v) << "," << format_double(ld) << ","
          << format_double(ldd) << "," << format_double(ldd - a2 * v);
    }
    out << "," << (e.exit_event ? "exit" : "") << "\n";
  }
}

// --- report ----------------------------------------------------------------

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'", "path");
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what(),
                      "json");
  }
  if (!cfg.is_object()) throw ConfigError("scenario must be a JSON object", "json");
  const int version = static_cast<int>(number_or(cfg, "schema_version", 0.0));
  if (version != 1)
    throw ConfigError("unsupported schema_version (expected 1)",
                      "schema_version");
  return cfg;
}

}  // namespace

ScenarioOutcome run_scenario(const std::string& config_path,
                             const RunOptions& opts) {
  const auto t_begin = std::chrono::steady_clock::now();
  const json cfg = load_config(config_path);
  const std::string name = cfg.value("name", std::string("scenario"));
  std::uint64_t seed =
      opts.seed_override.value_or(static_cast<std::uint64_t>(
          number_or(cfg, "seed", 1.0)));
  std::mt19937_64 rng(seed);

  json echo = cfg;
  echo["seed"] = seed;
  echo["tolerance_scale"] = opts.tolerance_scale;

  SystemBundle bundle = build_system(cfg);
  auto block = build_block(cfg, bundle, echo);

  const json* tolerances = nullptr;
  if (cfg.contains("verification") && cfg.at("verification").contains("tolerances"))
    tolerances = &cfg.at("verification").at("tolerances");
  ToleranceSet tol{tolerances, opts.tolerance_scale};

  ScenarioContext ctx{cfg, bundle, block, tol, rng, echo, {}, nullptr};
  ScenarioOutcome outcome;
  ctx.out_dir = opts.out_dir;
  ctx.csv_paths = &outcome.csv_paths;
  const std::string construction = string_field(cfg, "construction", "");

  std::vector<CheckResult> checks;
  if (construction == "sum" || construction == "bvp") {
    const auto field = build_field(ctx);
    if (cfg.contains("verification") &&
        cfg.at("verification").contains("grid"))
      checks = run_grid_verification(ctx, *field);
    if (construction == "bvp" && cfg.at("bvp").contains("recurrence")) {
      const auto more = run_suspension_recurrence(ctx);
      checks.insert(checks.end(), more.begin(), more.end());
    }
    if (checks.empty())
      throw ConfigError("no verification requested for this construction",
                        "verification");
  } else if (construction == "exact_decay") {
    const auto field = build_field(ctx);
    checks = run_exact_decay(ctx, *field);
  } else if (construction == "attractor_size") {
    checks = run_attractor_size(ctx);
  } else if (construction == "shift_metric") {
    checks = run_shift_metric(ctx);
  } else if (construction == "discrete_bvp") {
    checks = run_discrete_bvp(ctx);
  } else if (construction == "sectional") {
    checks = run_sectional(ctx);
  } else {
    throw ConfigError("unknown construction '" + construction + "'",
                      "construction");
  }

  outcome.name = name;
  outcome.checks = checks;
  bool pass = true;
  for (const auto& c : checks) pass = pass && c.pass;
  outcome.exit_code = pass ? 0 : 1;

  // Optional trace alongside a run.
  if (cfg.contains("trace")) {
    ScenarioOutcome t = orbit_export(config_path, opts);
    for (auto& p : t.csv_paths) outcome.csv_paths.push_back(std::move(p));
  }

  json report;
  report["schema_version"] = 1;
  report["name"] = name;
  report["seed"] = seed;
  report["config"] = echo;
  report["verdict"] = pass ? "pass" : "fail";
  json jchecks = json::array();
  for (const auto& c : checks) {
    json jc;
    jc["name"] = c.name;
    jc["value"] = c.value;
    jc["tolerance"] = c.tolerance;
    jc["pass"] = c.pass;
    if (!c.witness.empty()) jc["witness"] = c.witness;
    jchecks.push_back(jc);
  }
  report["checks"] = jchecks;
  const auto t_end = std::chrono::steady_clock::now();
  report["wall_time_ms"] =
      std::chrono::duration<double, std::milli>(t_end - t_begin).count();

  std::filesystem::create_directories(opts.out_dir);
  const std::string report_name =
      (cfg.contains("output") && cfg.at("output").contains("report"))
          ? cfg.at("output").at("report").get<std::string>()
          : name + ".report.json";
  outcome.report_path =
      (std::filesystem::path(opts.out_dir) / report_name).string();
  std::ofstream out(outcome.report_path);
  if (!out)
    throw ConfigError("cannot write report '" + outcome.report_path + "'",
                      "output.report");
  out << report.dump(2) << "\n";
  return outcome;
}

ScenarioOutcome orbit_export(const std::string& config_path,
                             const RunOptions& opts) {
  const json cfg = load_config(config_path);
  const std::string name = cfg.value("name", std::string("scenario"));
  std::uint64_t seed = opts.seed_override.value_or(
      static_cast<std::uint64_t>(number_or(cfg, "seed", 1.0)));
  std::mt19937_64 rng(seed);

  json echo = cfg;
  SystemBundle bundle = build_system(cfg);
  auto block = build_block(cfg, bundle, echo);
  if (!bundle.flow)
    throw ConfigError("trace needs a flow system", "system.kind");

  const json& t = require_field(cfg, "trace", "");
  const State start = parse_state(require_field(t, "start", "trace."), bundle,
                                  "trace.start");
  const double t0 = number_or(t, "t0", 0.0);
  const double t1 = require_field(t, "t1", "trace.").get<double>();
  const double step = number_or(t, "step", 0.01);

  const json* tolerances = nullptr;
  ToleranceSet tol{tolerances, opts.tolerance_scale};
  ScenarioContext ctx{cfg, bundle, block, tol, rng, echo, {}, nullptr};
  ctx.out_dir = opts.out_dir;

  std::optional<ScalarField> field;
  if (t.contains("field")) {
    ScalarField f;
    f.exponent = number_or(t, "a", 1.0);
    f.value = build_state_fn(t.at("field"), bundle, "trace.field");
    field = maybe_injected(f, cfg);
  } else if (cfg.contains("construction")) {
    field = build_field(ctx);
  }

  const auto trace = orbit_trace(*bundle.flow, start, t0, t1, step);

  std::filesystem::create_directories(opts.out_dir);
  const std::string csv_name =
      (cfg.contains("output") && cfg.at("output").contains("trace_csv"))
          ? cfg.at("output").at("trace_csv").get<std::string>()
          : name + ".trace.csv";
  const std::string path =
      (std::filesystem::path(opts.out_dir) / csv_name).string();
  write_trace_csv(path, *bundle.flow, trace, field ? &*field : nullptr);

  ScenarioOutcome outcome;
  outcome.name = name;
  outcome.exit_code = 0;
  outcome.csv_paths.push_back(path);
  return outcome;
}

int verify_suite(const std::string& suite_path, const RunOptions& opts,
                 std::ostream& out) {
  std::ifstream in(suite_path);
  if (!in) throw ConfigError("cannot open suite file '" + suite_path + "'", "path");
  json suite;
  try {
    suite = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("suite is not valid JSON: ") + e.what(),
                      "json");
  }
  const json& list = require_field(suite, "scenarios", "");
  if (!list.is_array())
    throw ConfigError("'scenarios' must be an array", "scenarios");
  if (list.empty()) {
    out << "warning: empty suite\n";
    return 0;
  }
  const auto base = std::filesystem::path(suite_path).parent_path();
  int aggregate = 0;
  for (const auto& entry : list) {
    const std::string rel = entry.get<std::string>();
    const std::string path = (base / rel).string();
    if (!std::filesystem::exists(path))
      throw ConfigError("scenario file not found: " + path, "scenarios");
    int code = 0;
    std::string verdict;
    try {
      const ScenarioOutcome o = run_scenario(path, opts);
      code = o.exit_code;
      verdict = (code == 0) ? "pass" : "FAIL";
      if (code != 0) {
        for (const auto& c : o.checks)
          if (!c.pass) {
            verdict += " (" + c.name + "=" + format_double(c.value) +
                       " > " + format_double(c.tolerance) + ")";
            break;
          }
      }
    } catch (const ConfigError& e) {
      code = 2;
      verdict = std::string("CONFIG ERROR: ") + e.what();
    }
    out << rel << ": " << verdict << "\n";
    aggregate = std::max(aggregate, code);
  }
  return aggregate;
}

}  // namespace catena
