#include "tscope/config.hpp"

#include "tscope/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tscope {

using nlohmann::json;

namespace {

double positive(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  const double v = j.at(key).get<double>();
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("'") + key + "' must be positive");
  return v;
}

int positive_int(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer() || j.at(key).get<long long>() <= 0)
    throw ConfigError(std::string("'") + key + "' must be a positive integer");
  return j.at(key).get<int>();
}

// "auto" or a positive number; auto maps to 0.
double auto_or_positive(const json& j, const char* key) {
  if (!j.contains(key)) return 0.0;
  const auto& v = j.at(key);
  if (v.is_string()) {
    if (v.get<std::string>() != "auto") throw ConfigError(std::string("'") + key + "' must be \"auto\" or a number");
    return 0.0;
  }
  return positive(j, key, 0.0);
}

TimeGrid parse_time(const json& j, TimeGrid t) {
  t.t_min = positive(j, "t_min", t.t_min);
  t.t_max = positive(j, "t_max", t.t_max);
  t.samples = positive_int(j, "samples", t.samples);
  if (!(t.t_max > t.t_min)) throw ConfigError("time grid needs t_max > t_min");
  if (t.samples < 2) throw ConfigError("time grid needs at least two samples");
  return t;
}

json time_json(const TimeGrid& t) { return {{"t_min", t.t_min}, {"t_max", t.t_max}, {"samples", t.samples}}; }

PotentialConfig parse_potential(const json& j) {
  if (!j.is_object()) throw ConfigError("'potential' must be an object");
  PotentialConfig p;
  const std::string kind = j.value("kind", std::string());
  const char* strength = "coupling";
  if (kind == "square_well") {
    p.kind = PotentialKind::square_well;
    p.radius = positive(j, "radius", 1.0);
    strength = "depth";
  } else if (kind == "resonant" || kind == "eigen") {
    p.kind = kind == "resonant" ? PotentialKind::resonant : PotentialKind::eigen;
    p.radius = positive(j, "R", kind == "resonant" ? 2.0 : 2.5);
    p.sampling = Sampling::point;
  } else if (kind == "grid") {
    p.kind = PotentialKind::grid;
    if (!j.contains("values") || !j.at("values").is_string()) throw ConfigError("grid potential needs 'values' path");
    p.values_path = j.at("values").get<std::string>();
    p.sampling = Sampling::point;
  } else {
    throw ConfigError("unknown potential kind '" + kind + "'");
  }
  if (j.contains(strength)) {
    const auto& s = j.at(strength);
    if (s.is_string()) {
      if (s.get<std::string>() != "grid_critical")
        throw ConfigError(std::string("'") + strength + "' must be a number or \"grid_critical\"");
      if (p.kind == PotentialKind::grid) throw ConfigError("grid potentials cannot be tuned");
      p.grid_critical = true;
    } else if (s.is_number() && std::isfinite(s.get<double>())) {
      p.coupling = s.get<double>();
    } else {
      throw ConfigError(std::string("'") + strength + "' must be a number or \"grid_critical\"");
    }
  } else if (p.kind == PotentialKind::square_well) {
    throw ConfigError("square_well needs 'depth'");
  }
  p.factor = positive(j, "factor", 1.0);
  if (j.contains("sampling")) {
    const std::string s = j.at("sampling").get<std::string>();
    if (s == "l1") p.sampling = Sampling::l1_preserving;
    else if (s == "point") p.sampling = Sampling::point;
    else throw ConfigError("'sampling' must be \"l1\" or \"point\"");
  }
  return p;
}

}  // namespace

std::vector<double> TimeGrid::times() const {
  std::vector<double> out(samples);
  const double a = std::log(t_min), b = std::log(t_max);
  for (int i = 0; i < samples; ++i) out[i] = std::exp(a + (b - a) * i / (samples - 1));
  out.front() = t_min;
  out.back() = t_max;
  return out;
}

ThresholdOptions RunConfig::threshold_options() const {
  ThresholdOptions o;
  o.eps_rank = eps_rank;
  o.lambda0 = lambda0;
  return o;
}

json RunConfig::to_json() const {
  // Same vocabulary as the input, so parse_config(to_json()) round-trips.
  json p = {{"kind", to_string(potential.kind)},
            {"factor", potential.factor},
            {"sampling", potential.sampling == Sampling::l1_preserving ? "l1" : "point"}};
  const bool well = potential.kind == PotentialKind::square_well;
  const char* strength = well ? "depth" : "coupling";
  if (potential.grid_critical) p[strength] = "grid_critical";
  else p[strength] = potential.coupling;
  if (potential.kind == PotentialKind::grid) p["values"] = potential.values_path;
  else p[well ? "radius" : "R"] = potential.radius;
  return {{"potential", p},
          {"grid", {{"n", grid_n}, {"L", grid_L}}},
          {"eps_rank", eps_rank > 0 ? json(eps_rank) : json("auto")},
          {"lambda0", lambda0 > 0 ? json(lambda0) : json("auto")},
          {"time", time_json(time)},
          {"sample_pairs", sample_pairs},
          {"seed", seed},
          {"evolve",
           {{"n", evolve.n},
            {"L", evolve.L},
            {"dt", evolve.dt},
            {"sigma", evolve.sigma},
            {"absorber_fraction", evolve.absorber_fraction},
            {"absorber_strength", evolve.absorber_strength},
            {"window", time_json(evolve.window)},
            {"t_end", evolve.t_end}}},
          {"tune", {{"ell", tune.ell}, {"c_lo", tune.c_lo}, {"c_hi", tune.c_hi}}}};
}

std::string RunConfig::hash() const {
  // 64-bit FNV-1a of the canonical JSON.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json().dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig parse_config(const json& j) {
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig c;
    if (j.contains("potential")) c.potential = parse_potential(j.at("potential"));
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      c.grid_n = positive_int(g, "n", c.grid_n);
      c.grid_L = positive(g, "L", c.grid_L);
    }
    if (c.grid_n < 4) throw ConfigError("grid.n must be at least 4");
    c.eps_rank = auto_or_positive(j, "eps_rank");
    c.lambda0 = auto_or_positive(j, "lambda0");
    if (j.contains("time")) c.time = parse_time(j.at("time"), c.time);
    c.sample_pairs = positive_int(j, "sample_pairs", c.sample_pairs);
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned()) throw ConfigError("'seed' must be a non-negative integer");
      c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("evolve")) {
      const auto& e = j.at("evolve");
      c.evolve.n = positive_int(e, "n", c.evolve.n);
      c.evolve.L = positive(e, "L", c.evolve.L);
      c.evolve.dt = positive(e, "dt", c.evolve.dt);
      c.evolve.sigma = positive(e, "sigma", c.evolve.sigma);
      if (e.contains("absorber_fraction")) {
        const double f = e.at("absorber_fraction").get<double>();
        if (!(f >= 0.0 && f < 1.0)) throw ConfigError("'absorber_fraction' must lie in [0, 1)");
        c.evolve.absorber_fraction = f;
      }
      c.evolve.absorber_strength = positive(e, "absorber_strength", c.evolve.absorber_strength);
      if (e.contains("window")) c.evolve.window = parse_time(e.at("window"), c.evolve.window);
      c.evolve.t_end = positive(e, "t_end", c.evolve.window.t_max);
      if (c.evolve.t_end < c.evolve.window.t_max) throw ConfigError("'t_end' must not precede the fit window end");
    }
    if (j.contains("tune")) {
      const auto& t = j.at("tune");
      if (t.contains("ell")) {
        const int ell = t.at("ell").get<int>();
        if (ell < 0 || ell > 8) throw ConfigError("'ell' must lie in [0, 8]");
        c.tune.ell = ell;
      }
      c.tune.c_lo = positive(t, "c_lo", c.tune.c_lo);
      c.tune.c_hi = positive(t, "c_hi", c.tune.c_hi);
      if (!(c.tune.c_hi > c.tune.c_lo)) throw ConfigError("tune bracket needs c_hi > c_lo");
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return parse_config(j);
}

BuiltPotential build_potential(const PotentialConfig& pc, const Grid3& g) {
  BuiltPotential out;
  try {
    switch (pc.kind) {
      case PotentialKind::square_well: out.potential = Potential::square_well(1.0, pc.radius); break;
      case PotentialKind::resonant: out.potential = Potential::resonant(pc.radius); break;
      case PotentialKind::eigen: out.potential = Potential::eigen(pc.radius); break;
      case PotentialKind::grid: {
        std::ifstream in(pc.values_path);
        if (!in) throw ConfigError("cannot open grid potential '" + pc.values_path + "'");
        json arr;
        in >> arr;
        if (!arr.is_array() || static_cast<Index>(arr.size()) != g.size())
          throw ConfigError("grid potential must be an array of n^3 numbers");
        RVector vals(g.size());
        for (Index i = 0; i < g.size(); ++i) vals[i] = arr[static_cast<std::size_t>(i)].get<double>();
        out.potential = Potential::from_grid(g, std::move(vals));
        out.coupling = pc.coupling;
        out.potential = out.potential.with_coupling(pc.coupling);
        return out;
      }
    }
    out.potential = out.potential.with_sampling(pc.sampling);
    if (pc.radius >= g.L()) throw ConfigError("potential radius must be below the grid half-width L");
    double c = pc.coupling;
    if (pc.grid_critical) {
      const double nominal = pc.kind == PotentialKind::square_well ? pi * pi / (4.0 * pc.radius * pc.radius) : 1.0;
      // The eigen shape crosses with a threefold eigenvalue; a narrow bracket isolates that crossing.
      const double lo = pc.kind == PotentialKind::eigen ? 0.95 : 0.8, hi = pc.kind == PotentialKind::eigen ? 1.1 : 1.25;
      c = tune_on_grid(out.potential, g, lo * nominal, hi * nominal).coupling;
      out.tuned = true;
    }
    out.coupling = c * pc.factor;
    out.potential = out.potential.with_coupling(out.coupling);
    return out;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace tscope
