#include "tscope/commands.hpp"

#include "tscope/decay.hpp"
#include "tscope/errors.hpp"
#include "tscope/experiments.hpp"
#include "tscope/fit.hpp"
#include "tscope/lambda_quadrature.hpp"
#include "tscope/radial.hpp"
#include "tscope/report.hpp"

#include <cmath>
#include <iostream>

namespace tscope {

using nlohmann::json;

namespace {

json provenance(const RunConfig& cfg, const Grid3& g) {
  return {{"config_hash", cfg.hash()}, {"config", cfg.to_json()}, {"grid", {{"n", g.n()}, {"L", g.L()}, {"h", g.h()}}}};
}

json threshold_diagnostics(const ThresholdData& td) {
  return {{"lambda0", td.lambda0()},
          {"lambda0_condition", td.lambda0_condition()},
          {"eps_rank", td.eps_rank()},
          {"eps_rank2", td.eps_rank2()},
          {"support_points", td.family().dim()},
          {"alpha", td.split().alpha}};
}

struct Setup {
  Grid3 grid;
  BuiltPotential built;
  ThresholdData td;
};

Setup setup(const RunConfig& cfg) {
  const Grid3 g = build_grid(cfg.grid_n, cfg.grid_L);
  BuiltPotential bp = build_potential(cfg.potential, g);
  ThresholdData td = compute_threshold_data(split_potential(bp.potential, g), cfg.threshold_options());
  return {g, std::move(bp), std::move(td)};
}

json potential_json(const BuiltPotential& bp) {
  return {{"kind", to_string(bp.potential.kind())}, {"coupling", bp.coupling}, {"grid_tuned", bp.tuned},
          {"support_radius", bp.potential.support_radius()}};
}

// JSON has no infinity; an absent margin is reported as null.
json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void emit_json(const std::string& dir, const std::string& name, const json& j) { write_file(dir, name, j.dump(2) + "\n"); }

}  // namespace

json cmd_classify(const RunConfig& cfg, const std::string& out_dir) {
  const Setup s = setup(cfg);
  const Classification c = classify_threshold(s.td);
  json j = provenance(cfg, s.grid);
  j["potential"] = potential_json(s.built);
  j["threshold"] = threshold_diagnostics(s.td);
  j["class"] = to_string(c.cls);
  j["rank_s1"] = c.rank_s1;
  j["rank_s2"] = c.rank_s2;
  j["margins"] = {{"s1_kept", finite_or_null(c.kept_margin_s1)},
                  {"s1_discarded", finite_or_null(c.discarded_margin_s1)},
                  {"s2_kept", finite_or_null(c.kept_margin_s2)},
                  {"s2_discarded", finite_or_null(c.discarded_margin_s2)}};
  if (c.rank_s2 > 0) j["b0_min_eigenvalue"] = s.td.b0_min_eigenvalue();
  if (c.rank_s1 > 0) j["m0_norm"] = s.td.m0().norm();
  emit_json(out_dir, "classify.json", j);
  return j;
}

json cmd_tune(const RunConfig& cfg, const std::string& out_dir) {
  const auto& pc = cfg.potential;
  Potential W;
  switch (pc.kind) {
    case PotentialKind::square_well: W = Potential::square_well(1.0, pc.radius); break;
    case PotentialKind::resonant: W = Potential::resonant(pc.radius); break;
    case PotentialKind::eigen: W = Potential::eigen(pc.radius); break;
    case PotentialKind::grid: throw ConfigError("tune needs a radial potential");
  }
  TuneResult tr;
  try {
    tr = tune_coupling(W, cfg.tune.ell, cfg.tune.c_lo, cfg.tune.c_hi);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  json j = {{"config_hash", cfg.hash()},
            {"config", cfg.to_json()},
            {"kind", to_string(pc.kind)},
            {"radius", pc.radius},
            {"ell", cfg.tune.ell},
            {"bracket", {cfg.tune.c_lo, cfg.tune.c_hi}},
            {"c_star", tr.c_star},
            {"residual_a", tr.residual_a},
            {"iterations", tr.iterations}};
  emit_json(out_dir, "tune.json", j);
  return j;
}

json cmd_laurent(const RunConfig& cfg, const std::string& out_dir) {
  const Setup s = setup(cfg);
  const LaurentExpansion le = laurent_of_A_inverse(s.td);
  const double n2 = le.c_minus2.norm(), n1 = le.c_minus1.norm();
  CsvTable csv{{"lambda", "inverse_norm", "c_minus2_norm", "c_minus1_norm", "remainder_norm"}, {}};
  PlotSeries inv{"||A(l)^-1||", {}, {}}, rem{"||remainder||", {}, {}};
  for (int k = 1; k <= 14; ++k) {
    const double l = s.td.lambda0() * std::ldexp(1.0, -k);
    const double ni = s.td.inverse_at(l).norm();
    const double nr = le.regular_at(l).norm();
    csv.rows.push_back({l, ni, n2, n1, nr});
    inv.x.push_back(l);
    inv.y.push_back(ni);
    rem.x.push_back(l);
    rem.y.push_back(nr);
  }
  write_file(out_dir, "laurent.csv", csv.str());
  write_file(out_dir, "laurent.svg", svg_loglog("Laurent remainder", "lambda", "norm", {inv, rem}));
  json j = provenance(cfg, s.grid);
  j["potential"] = potential_json(s.built);
  j["threshold"] = threshold_diagnostics(s.td);
  j["class"] = to_string(classify_threshold(s.td).cls);
  j["c_minus2_norm"] = n2;
  j["c_minus1_norm"] = n1;
  j["remainder_max"] = *std::max_element(rem.y.begin(), rem.y.end());
  emit_json(out_dir, "laurent.json", j);
  return j;
}

json cmd_evolve(const RunConfig& cfg, const std::string& out_dir) {
  const auto& ec = cfg.evolve;
  const Grid3 g = build_grid(ec.n, ec.L);
  RVector V = RVector::Zero(g.size());
  json pot = nullptr;
  const bool free = cfg.potential.kind != PotentialKind::grid && !cfg.potential.grid_critical &&
                    cfg.potential.coupling == 0.0;
  if (!free) {
    const BuiltPotential bp = build_potential(cfg.potential, g);
    V = bp.potential.sample(g);
    pot = potential_json(bp);
  }
  CVector psi(g.size());
  for (Index p = 0; p < g.size(); ++p) {
    const double r = g.radius(p);
    psi[p] = std::exp(-r * r / (2.0 * ec.sigma * ec.sigma));
  }
  const GridFunction psi0(g, psi);
  const double l1 = psi.cwiseAbs().sum() * g.weight();
  const double revival = revival_estimate(psi0);
  std::vector<double> times = ec.window.times();
  const double ratio = times.size() > 1 ? times[1] / times[0] : 2.0;
  while (times.back() * ratio <= ec.t_end * (1.0 + 1e-12)) times.push_back(times.back() * ratio);
  SplitStepPropagator prop(g, V, ec.dt, Absorber{ec.absorber_fraction, ec.absorber_strength});
  const Trajectory tr = prop.run(psi0, times);
  const DecayFit fit = measure_sup_decay(tr.samples, l1, ec.window.t_min, ec.window.t_max, revival);

  CsvTable csv{{"t", "sup_norm", "l2_norm"}, {}};
  PlotSeries series{"sup|psi| / ||psi0||_1", {}, {}};
  for (const auto& smp : tr.samples) {
    csv.rows.push_back({smp.t, smp.sup_norm, smp.l2_norm});
    series.x.push_back(smp.t);
    series.y.push_back(smp.sup_norm / l1);
  }
  write_file(out_dir, "evolve.csv", csv.str());
  const PlotLine line{"fit slope " + format_number(fit.slope), fit.slope, fit.intercept, fit.t_min, fit.t_max};
  write_file(out_dir, "evolve.svg", svg_loglog("sup-norm decay", "t", "sup|psi|/||psi0||_1", {series}, {line}));
  json j = provenance(cfg, g);
  j["potential"] = pot;
  j["dt"] = ec.dt;
  j["psi0_l1_norm"] = l1;
  j["fit"] = {{"t_min", fit.t_min}, {"t_max", fit.t_max}, {"slope", fit.slope}, {"intercept", fit.intercept},
              {"r_squared", fit.r_squared}, {"samples", fit.times.size()}};
  j["revival_time"] = revival;
  j["revival_rule"] = "fit window must end below 2L/p_rms(psi0)";
  j["unitary_drift"] = tr.unitary_drift;
  emit_json(out_dir, "evolve.json", j);
  return j;
}

json cmd_theorem_check(const RunConfig& cfg, const std::string& out_dir) {
  const Setup s = setup(cfg);
  const CutoffSpec cutoff(s.td.lambda0());
  const auto pairs = stratified_pairs(s.td.split(), cfg.sample_pairs, cfg.seed);
  const TheoremTable tab = theorem_check(s.td, cutoff, cfg.time.times(), pairs);
  CsvTable csv{{"t", "D_t", "Ft_sup"}, {}};
  PlotSeries d{"D(t)", {}, {}}, k{"sup |K|", {}, {}};
  for (const auto& row : tab.rows) {
    csv.rows.push_back({row.t, row.D, row.Ft_sup});
    d.x.push_back(row.t);
    d.y.push_back(row.D);
    k.x.push_back(row.t);
    k.y.push_back(row.K_sup);
  }
  write_file(out_dir, "theorem_check.csv", csv.str());
  const PlotLine line{"fit slope " + format_number(tab.slope), tab.slope, tab.intercept, tab.rows.front().t,
                      tab.rows.back().t};
  write_file(out_dir, "theorem_check.svg", svg_loglog("low-energy residual", "t", "sup over pairs", {d, k}, {line}));
  json j = provenance(cfg, s.grid);
  j["potential"] = potential_json(s.built);
  j["threshold"] = threshold_diagnostics(s.td);
  j["class"] = to_string(classify_threshold(s.td).cls);
  j["sample_pairs"] = pairs.size();
  j["seed"] = cfg.seed;
  j["slope"] = tab.slope;
  j["intercept"] = tab.intercept;
  j["r_squared"] = tab.r_squared;
  j["chebyshev_nodes"] = tab.chebyshev_nodes;
  j["interpolation_residual"] = tab.interpolation_residual;
  j["oscillations_at_t_max"] = oscillation_count(tab.rows.back().t, cutoff.lambda0());
  j["ft_definition"] = tab.regular ? "F_t = 0 (regular threshold)"
                                   : "F_t from C_-1 plus the F_1t term from C_-2; the remainder stays in D(t)";
  emit_json(out_dir, "theorem_check.json", j);
  return j;
}

json cmd_selftest(const RunConfig& cfg, const std::string& out_dir, bool echo) {
  AcceptanceOptions opt;
  opt.seed = cfg.seed;
  json results = json::array();
  bool all = true;
  run_acceptance(opt, [&](const CriterionResult& r) {
    if (echo) std::cout << format_result(r) << std::endl;
    all = all && r.pass;
    results.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"data", r.data}});
  });
  json j = {{"config_hash", cfg.hash()}, {"seed", cfg.seed}, {"all_pass", all}, {"criteria", results}};
  emit_json(out_dir, "selftest.json", j);
  return j;
}

}  // namespace tscope
