// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#include "capow/power.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "capow/linsolve.hpp"

namespace capow {
namespace {

constexpr double kBoltzmann = 1.380649e-23;
constexpr double kAtmosphere = 101325.0;

double min_face_concentration(const TransportSolution& sol) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& f : sol.field.faces) m = std::min(m, f.concentration);
  return m;
}

}  // namespace

ScenarioModel prepare_model(const ScenarioConfig& cfg) {
  ScenarioModel m;
  m.mesh = build_mesh(cfg);
  m.flow = solve_flow(m.mesh, cfg);
  m.core = trace_core_boundary(m.flow, m.mesh, cfg);
  return m;
}

std::vector<double> ring_face_area(const AxiMesh& mesh) {
  std::vector<double> area(mesh.rings.size(), 0.0);
  for (std::size_t q = 0; q < mesh.rings.size(); ++q) {
    for (int j = mesh.rings[q].j_begin; j < mesh.rings[q].j_end; ++j) {
      area[q] += mesh.radial_area(mesh.i_robot, j);
    }
  }
  return area;
}

PowerReport power_report(const TransportSolution& sol, const ScenarioConfig& cfg) {
  if (!sol.coupling.converged) {
    throw SolverError("power_report: oxygen solution did not converge (last change " +
                      std::to_string(std::max(sol.coupling.change_c, sol.coupling.change_s)) + ")");
  }
  const double per_molecule = cfg.tissue.reaction_energy / 6;
  const double cap = derived_quantities(cfg).max_robot_uptake * cfg.robot.per_ring;
  PowerReport r;
  r.ring_uptake = sol.field.ring_uptake;
  const std::size_t n = r.ring_uptake.size();
  r.ring_power.resize(n);
  r.robot_power.resize(n);
  r.capped.resize(n);
  for (std::size_t q = 0; q < n; ++q) {
    r.ring_power[q] = r.ring_uptake[q] * per_molecule;
    r.robot_power[q] = r.ring_power[q] / cfg.robot.per_ring;
    r.capped[q] = r.ring_uptake[q] >= cap * (1 - 1e-9);
    r.uptake += r.ring_uptake[q];
    r.aggregate_power += r.ring_power[q];
  }
  if (n > 0) {
    r.average_robot_power = r.aggregate_power / (static_cast<double>(n) * cfg.robot.per_ring);
    r.min_robot_power = *std::min_element(r.robot_power.begin(), r.robot_power.end());
  }
  if (cfg.robot.pumps) r.pump_power = r.uptake * cfg.robot.pump_energy;
  r.balance_residual = sol.balance.relative_residual;
  return r;
}

PowerRun solve_power(const ScenarioModel& model, const ScenarioConfig& cfg,
                     std::vector<RingCondition> conditions, const TransportSolution* start) {
  const double cap = derived_quantities(cfg).max_robot_uptake * cfg.robot.per_ring;
  const auto area = ring_face_area(model.mesh);
  PowerRun run;
  run.solution = solve_coupled(model.mesh, model.flow, model.core, cfg, conditions, start);
  for (std::size_t pass = 0; pass <= conditions.size(); ++pass) {
    bool changed = false;
    for (std::size_t q = 0; q < conditions.size(); ++q) {
      auto& c = conditions[q];
      const bool pumping = c.kind == RingBc::absorb || c.kind == RingBc::flux;
      if (pumping && run.solution.field.ring_uptake[q] > cap * (1 + 1e-9)) {
        c.kind = RingBc::flux;
        c.flux = cap / area[q];
        changed = true;
      }
    }
    if (!changed) break;
    run.solution = solve_coupled(model.mesh, model.flow, model.core, cfg, conditions, &run.solution);
  }
  run.report = power_report(run.solution, cfg);
  return run;
}

UniformFluxResult uniform_flux_search(const ScenarioModel& model, const ScenarioConfig& cfg,
                                      const TransportSolution* full) {
  const auto area = ring_face_area(model.mesh);
  double total_area = 0;
  for (double a : area) total_area += a;
  if (area.empty() || total_area <= 0) throw SolverError("uniform_flux_search: no pumping rings");

  UniformFluxResult res;
  auto conditions_for = [&](double flux) {
    std::vector<RingCondition> c(area.size());
    for (auto& x : c) {
      x.kind = RingBc::flux;
      x.flux = flux;
    }
    return c;
  };
  const TransportSolution* warm = full;
  PowerRun probe;
  auto feasible = [&](double flux) {
    probe = solve_power(model, cfg, conditions_for(flux), warm);
    ++res.solves;
    return min_face_concentration(probe.solution) >= 0;
  };

  // The mean full-absorb flux is feasible only if uptake were already uniform,
  // so it is a good first guess for the upper end.
  double guess;
  if (full) {
    guess = full->field.robot_uptake / total_area;
  } else {
    PowerRun f = solve_power(model, cfg, std::vector<RingCondition>(area.size()));
    ++res.solves;
    guess = f.solution.field.robot_uptake / total_area;
  }
  double lo = 0, hi = guess;
  PowerRun best;
  best.solution.coupling.converged = false;
  for (int k = 0; feasible(hi); ++k) {
    if (k > 20) throw SolverError("uniform_flux_search: no infeasible flux found");
    lo = hi;
    best = probe;
    warm = &best.solution;
    hi *= 2;
  }
  while (hi - lo > 1e-3 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      lo = mid;
      best = probe;
      warm = &best.solution;
    } else {
      hi = mid;
    }
  }
  if (!best.solution.coupling.converged) best = solve_power(model, cfg, conditions_for(lo), warm);
  res.flux = lo;
  res.run = std::move(best);
  return res;
}

DutyCycleResult duty_cycle_average(const ScenarioModel& model, const ScenarioConfig& cfg) {
  DutyCycleResult res;
  ScenarioConfig c = cfg;
  c.robot.pump_mode = PumpMode::duty_cycle;
  c.robot.duty_phase = DutyPhase::odd_active;
  res.odd_active = solve_power(model, c, ring_conditions(c));
  c.robot.duty_phase = DutyPhase::even_active;
  res.even_active = solve_power(model, c, ring_conditions(c), &res.odd_active.solution);

  const auto& a = res.odd_active.report;
  const auto& b = res.even_active.report;
  auto& m = res.average;
  const std::size_t n = a.ring_uptake.size();
  m.ring_uptake.resize(n);
  m.ring_power.resize(n);
  m.robot_power.resize(n);
  m.capped.resize(n);
  for (std::size_t q = 0; q < n; ++q) {
    m.ring_uptake[q] = 0.5 * (a.ring_uptake[q] + b.ring_uptake[q]);
    m.ring_power[q] = 0.5 * (a.ring_power[q] + b.ring_power[q]);
    m.robot_power[q] = 0.5 * (a.robot_power[q] + b.robot_power[q]);
    m.capped[q] = a.capped[q] || b.capped[q];
  }
  m.uptake = 0.5 * (a.uptake + b.uptake);
  m.aggregate_power = 0.5 * (a.aggregate_power + b.aggregate_power);
  m.average_robot_power = 0.5 * (a.average_robot_power + b.average_robot_power);
  m.min_robot_power = n ? *std::min_element(m.robot_power.begin(), m.robot_power.end()) : 0.0;
  m.pump_power = 0.5 * (a.pump_power + b.pump_power);
  m.balance_residual = std::max(std::abs(a.balance_residual), std::abs(b.balance_residual));
  return res;
}

PowerRun run_design(const ScenarioModel& model, const ScenarioConfig& cfg) {
  if (!cfg.robot.pumps || cfg.robot.pump_mode == PumpMode::full_absorb) {
    return solve_power(model, cfg, ring_conditions(cfg));
  }
  if (cfg.robot.pump_mode == PumpMode::uniform_flux) {
    if (cfg.robot.uniform_flux > 0) return solve_power(model, cfg, ring_conditions(cfg));
    return uniform_flux_search(model, cfg).run;
  }
  auto duty = duty_cycle_average(model, cfg);
  PowerRun out = std::move(duty.odd_active);
  out.report = duty.average;
  return out;
}

RingProfile ring_position_profile(const PowerReport& report) {
  RingProfile p;
  p.robot_power = report.robot_power;
  const int n = static_cast<int>(p.robot_power.size());
  if (n == 0) return p;
  const auto& v = p.robot_power;
  p.max_ring = static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin()) + 1;
  p.leading_max = true;
  for (int q = 1; q < n; ++q) p.leading_max = p.leading_max && v[0] > v[q];
  if (n >= 3) {
    const auto it = std::min_element(v.begin() + 1, v.end() - 1);
    p.interior_min_ring = static_cast<int>(it - v.begin()) + 1;
    p.trailing_above_interior_min = v[n - 1] > *it;
  }
  return p;
}

BurstEstimate burst_storage_estimate(const ScenarioConfig& cfg, double uptake,
                                     double store_fraction, double pressure_atm, int robots) {
  BurstEstimate b;
  const double volume = store_fraction * cfg.robot.volume;
  b.per_robot_molecules =
      pressure_atm * kAtmosphere * volume / (kBoltzmann * cfg.fluid.ambient_temperature);
  b.stored_molecules = b.per_robot_molecules * robots;
  const auto d = derived_quantities(cfg);
  b.burst_power = d.max_robot_power;
  b.burst_seconds = d.max_robot_uptake > 0 ? b.per_robot_molecules / d.max_robot_uptake : 0.0;
  b.supply_seconds = uptake > 0 ? b.stored_molecules / uptake : 0.0;
  return b;
}

}  // namespace capow
