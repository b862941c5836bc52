// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "capow/kinetics.hpp"
#include "capow/power.hpp"
#include "capow/table.hpp"
#include "doctest.h"

using namespace capow;

namespace {

ScenarioConfig design(int rings, bool pumps, double nd = 3e21) {
  auto c = preset("low_demand");
  c.robot.rings = rings;
  c.robot.pumps = pumps;
  c.robot.site_density = nd;
  validate(c);
  return c;
}

double face_min(const TransportSolution& s) {
  double m = 1e300;
  for (const auto& f : s.field.faces) m = std::min(m, f.concentration);
  return m;
}

}  // namespace

TEST_CASE("ring conditions follow the pump mode") {
  auto c = design(4, true);
  for (const auto& r : ring_conditions(c)) CHECK(r.kind == RingBc::absorb);
  c.robot.pumps = false;
  for (const auto& r : ring_conditions(c)) CHECK(r.kind == RingBc::volumetric);
  c.robot.pumps = true;
  c.robot.pump_mode = PumpMode::duty_cycle;
  c.robot.duty_phase = DutyPhase::odd_active;
  auto odd = ring_conditions(c);
  CHECK(odd[0].kind == RingBc::absorb);
  CHECK(odd[1].kind == RingBc::inert);
  CHECK(odd[2].kind == RingBc::absorb);
  c.robot.duty_phase = DutyPhase::even_active;
  auto even = ring_conditions(c);
  CHECK(even[0].kind == RingBc::inert);
  CHECK(even[3].kind == RingBc::absorb);
  c.robot.pump_mode = PumpMode::uniform_flux;
  c.robot.uniform_flux = 1e19;
  for (const auto& r : ring_conditions(c)) {
    CHECK(r.kind == RingBc::flux);
    CHECK(r.flux == 1e19);
  }
}

TEST_CASE("reactive shell holds the requested volume fraction") {
  auto c = design(1, false);
  CHECK(shell_thickness(c) == 0.0);
  for (double f : {0.1, 0.5}) {
    c.robot.shell_fraction = f;
    const double t = shell_thickness(c);
    const double inner = 3e-6;
    const double shell = (inner + t) * (inner + t) - inner * inner;
    CHECK(shell / (16e-12 - 9e-12) == doctest::Approx(f).epsilon(1e-9));
  }
}

TEST_CASE("robot-free vessel: conservation and near-equilibrium cells") {
  const auto cfg = design(0, true);
  const auto model = prepare_model(cfg);
  const auto sol = solve_coupled(model.mesh, model.flow, model.core, cfg, {});
  REQUIRE(sol.coupling.converged);
  CHECK(std::abs(sol.balance.relative_residual) < 1e-4);
  CHECK(sol.field.robot_uptake == 0.0);
  const auto audit = species_balance_audit(sol, model.mesh, model.flow, model.core, cfg);
  CHECK(audit.relative_residual == doctest::Approx(sol.balance.relative_residual).epsilon(1e-6));
  // Tissue consumption matches its Michaelis-Menten rate over the volume.
  CHECK(sol.field.tissue_uptake > 0);
  CHECK(sol.field.tissue_uptake <
        6 * 4e3 / 4e-18 * std::numbers::pi * (1600e-12 - 16e-12) * 100e-6);
  // Concentration falls away from the vessel.
  const int j = model.mesh.z.locate(50e-6);
  double prev = 1e300;
  for (int i = model.mesh.i_wall; i < model.mesh.nr(); ++i) {
    const double c = sol.field.c[model.mesh.index(i, j)];
    CHECK(c <= prev);
    prev = c;
  }
  CHECK(concentration_at(sol, model.mesh, 10e-6, j) < concentration_at(sol, model.mesh, 5e-6, j));
  for (std::size_t k = 0; k < sol.saturation.s.size(); ++k) {
    CHECK(std::abs(sol.saturation.s[k] - sol.saturation.s_eq[k]) < 5e-3);
  }
  CHECK(sol.saturation.inlet ==
        doctest::Approx(hill_equilibrium(partial_pressure_ratio(7e22, cfg), cfg.rbc.hill_n)));
}

TEST_CASE("single ring with pumps: uptake bookkeeping and power") {
  const auto cfg = design(1, true);
  const auto model = prepare_model(cfg);
  const auto run = solve_power(model, cfg, ring_conditions(cfg));
  const auto& f = run.solution.field;
  double faces = 0;
  for (const auto& x : f.faces) {
    faces += x.uptake;
    CHECK(x.concentration == doctest::Approx(0.0).epsilon(1e-12));
  }
  CHECK(faces == doctest::Approx(f.ring_uptake[0]).epsilon(1e-12));
  CHECK(f.robot_uptake == doctest::Approx(f.ring_uptake[0]));
  const auto& rep = run.report;
  CHECK(rep.ring_power[0] == doctest::Approx(f.ring_uptake[0] * 4e-18 / 6));
  CHECK(rep.robot_power[0] == doctest::Approx(rep.ring_power[0] / 20));
  CHECK(rep.pump_power == doctest::Approx(rep.uptake * cfg.robot.pump_energy));
  CHECK(std::abs(rep.balance_residual) < 1e-3);
  CHECK(!rep.capped[0]);

  // Deterministic: a second solve reproduces every value bit for bit.
  const auto again = solve_power(model, cfg, ring_conditions(cfg));
  CHECK(again.solution.field.c == f.c);
  CHECK(again.solution.saturation.s == run.solution.saturation.s);
}

TEST_CASE("capacity cap limits pumped uptake") {
  const auto cfg = design(1, true, 1e18);
  const auto model = prepare_model(cfg);
  const auto run = solve_power(model, cfg, ring_conditions(cfg));
  const double cap = 6 * 1e18 * 1.1e-18 * 1e6 * 20;
  CHECK(run.report.capped[0]);
  CHECK(run.report.ring_uptake[0] == doctest::Approx(cap).epsilon(1e-6));
  CHECK(run.solution.conditions[0].kind == RingBc::flux);
  CHECK(face_min(run.solution) > 0);
}

TEST_CASE("free diffusion uptake equals the interior reaction") {
  const auto cfg = design(1, false);
  const auto model = prepare_model(cfg);
  const auto run = solve_power(model, cfg, ring_conditions(cfg));
  const auto& m = model.mesh;
  double reacted = 0;
  for (int j = 0; j < m.nz(); ++j) {
    for (int i = 0; i < m.nr(); ++i) {
      if (m.at(i, j) == Region::robot) reacted += run.solution.field.sink[m.index(i, j)] * m.volume(i, j);
    }
  }
  CHECK(reacted == doctest::Approx(run.solution.field.ring_uptake[0]).epsilon(1e-6));
  CHECK(run.report.pump_power == 0.0);
}

TEST_CASE("uniform flux search lands on the feasibility edge") {
  const auto cfg = design(2, true);
  const auto model = prepare_model(cfg);
  const auto full = solve_power(model, cfg, ring_conditions(cfg));
  const auto u = uniform_flux_search(model, cfg, &full.solution);
  CHECK(u.flux > 0);
  CHECK(face_min(u.run.solution) >= 0);
  CHECK(face_min(u.run.solution) < 0.02 * 7e22);
  CHECK(u.run.report.uptake < full.report.uptake);
  const auto area = ring_face_area(model.mesh);
  CHECK(u.run.report.ring_uptake[0] == doctest::Approx(u.flux * area[0]).epsilon(1e-9));
  CHECK(area[0] == doctest::Approx(2 * std::numbers::pi * 3e-6 * 1e-6).epsilon(1e-9));
}

TEST_CASE("duty cycle averages the two half states") {
  const auto cfg = design(2, true);
  const auto model = prepare_model(cfg);
  const auto d = duty_cycle_average(model, cfg);
  CHECK(d.odd_active.report.ring_uptake[1] == 0.0);
  CHECK(d.even_active.report.ring_uptake[0] == 0.0);
  CHECK(d.average.ring_uptake[0] == doctest::Approx(0.5 * d.odd_active.report.ring_uptake[0]));
  CHECK(d.average.uptake ==
        doctest::Approx(0.5 * (d.odd_active.report.uptake + d.even_active.report.uptake)));
}

TEST_CASE("ring position profile on synthetic reports") {
  PowerReport r;
  r.robot_power = {5, 2, 1, 3};
  auto p = ring_position_profile(r);
  CHECK(p.max_ring == 1);
  CHECK(p.leading_max);
  CHECK(p.interior_min_ring == 3);
  CHECK(p.trailing_above_interior_min);
  r.robot_power = {5, 6, 1, 1};
  p = ring_position_profile(r);
  CHECK(!p.leading_max);
  CHECK(!p.trailing_above_interior_min);
}

TEST_CASE("burst storage uses the ideal gas law") {
  const auto cfg = design(10, true);
  const auto b = burst_storage_estimate(cfg, 5e9, 0.5, 1000, 200);
  const double n = 1000 * 101325 * 0.55e-18 / (1.380649e-23 * 310);
  CHECK(b.per_robot_molecules == doctest::Approx(n));
  CHECK(b.stored_molecules == doctest::Approx(200 * n));
  CHECK(b.supply_seconds == doctest::Approx(200 * n / 5e9));
  CHECK(b.burst_seconds == doctest::Approx(n / (6 * 3300 * 1e6)));
}

TEST_CASE("power matrix layout and threaded runs") {
  const auto rows = table4_rows();
  const auto cols = table4_columns();
  REQUIRE(rows.size() == 4);
  REQUIRE(cols.size() == 12);
  CHECK(rows[0].rings == 10);
  CHECK(rows[0].pumps);
  CHECK(!rows[1].pumps);
  CHECK(rows[2].rings == 1);
  CHECK(cols[0].inlet_concentration == 3e22);
  CHECK(cols[4].inlet_concentration == 7e22);
  CHECK(!cols[8].high_capacity);
  CHECK(cols[1].tissue_power == 6e4);
  CHECK(cols[2].pressure_gradient == 5e5);

  const auto base = preset("low_demand");
  const auto c = matrix_config(base, rows[3], cols[10]);
  CHECK(c.robot.rings == 1);
  CHECK(!c.robot.pumps);
  CHECK(c.robot.site_density == 6e19);
  CHECK(c.fluid.pressure_gradient == 5e5);
  CHECK(c.tissue.max_power == 4e3);
  CHECK(c.rbc.inlet_gap == doctest::Approx(1.27e-6));

  const std::vector<DesignRow> one_row = {rows[3]};
  const std::vector<OperatingColumn> two = {cols[8], cols[9]};
  const auto serial = run_power_matrix(base, one_row, two, 1);
  const auto threaded = run_power_matrix(base, one_row, two, 2);
  for (int k = 0; k < 2; ++k) {
    CHECK(serial.at(0, k).converged);
    CHECK(threaded.at(0, k).robot_power == serial.at(0, k).robot_power);
  }
  CHECK(serial.at(0, 0).robot_power > serial.at(0, 1).robot_power);
  std::ostringstream csv;
  write_matrix_csv(serial, csv);
  const auto text = csv.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}
