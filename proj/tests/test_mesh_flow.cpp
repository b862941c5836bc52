// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <sstream>

#include "capow/analytic.hpp"
#include "capow/core_boundary.hpp"
#include "capow/flow.hpp"
#include "capow/mesh.hpp"
#include "doctest.h"

using namespace capow;

namespace {

ScenarioConfig with_rings(const char* name, int rings) {
  auto c = preset(name);
  c.robot.rings = rings;
  validate(c);
  return c;
}

}  // namespace

TEST_CASE("mesh geometry") {
  const auto cfg = with_rings("low_demand", 10);
  const auto m = build_mesh(cfg);
  CHECK(m.vessel_radius() == doctest::Approx(4e-6));
  CHECK(m.r.nodes.back() == doctest::Approx(40e-6));
  CHECK(m.length() == doctest::Approx(100e-6));
  CHECK(m.r.nodes[m.i_robot] == doctest::Approx(3e-6));
  REQUIRE(m.rings.size() == 10);
  CHECK(m.rings.front().z_begin == doctest::Approx(45e-6));
  CHECK(m.rings.back().z_end == doctest::Approx(55e-6));
  for (const auto& s : m.rings) CHECK(s.z_end - s.z_begin == doctest::Approx(1e-6));

  double vol = 0;
  int robot_cells = 0;
  for (int j = 0; j < m.nz(); ++j) {
    for (int i = 0; i < m.nr(); ++i) {
      vol += m.volume(i, j);
      const bool band = i >= m.i_robot && i < m.i_wall;
      const bool in_ring = band && m.ring_of[m.index(i, j)] >= 0;
      if (in_ring) ++robot_cells;
      CHECK((m.at(i, j) == Region::robot) == in_ring);
      if (i >= m.i_wall) CHECK(m.at(i, j) == Region::tissue);
    }
  }
  CHECK(robot_cells > 0);
  CHECK(vol == doctest::Approx(std::numbers::pi * 1600e-12 * 100e-6).epsilon(1e-12));
  CHECK(max_robot_face_spacing(m) <= 0.1e-6 + 1e-15);

  std::ostringstream csv;
  write_mesh_csv(m, csv);
  CHECK(csv.str().find('\n') != std::string::npos);
}

TEST_CASE("mesh refinement halves spacings") {
  auto cfg = with_rings("low_demand", 1);
  const auto coarse = build_mesh(cfg);
  cfg.mesh.refine = 2;
  const auto fine = build_mesh(cfg);
  CHECK(fine.nr() >= 2 * coarse.nr() - 2);
  CHECK(fine.nz() >= 2 * coarse.nz() - 2);
  CHECK(max_robot_face_spacing(fine) <= 0.51 * max_robot_face_spacing(coarse));
}

TEST_CASE("explicit ring positions") {
  auto cfg = preset("low_demand");
  cfg.robot.rings = 2;
  cfg.robot.ring_starts = {20e-6, 70e-6};
  validate(cfg);
  const auto m = build_mesh(cfg);
  REQUIRE(m.rings.size() == 2);
  CHECK(m.rings[0].z_begin == doctest::Approx(20e-6));
  CHECK(m.rings[1].z_end == doctest::Approx(71e-6));
}

TEST_CASE("robot-free flow is Poiseuille") {
  const auto cfg = with_rings("low_demand", 0);
  const auto m = build_mesh(cfg);
  const auto f = solve_flow(m, cfg);
  const double q = std::numbers::pi * std::pow(4e-6, 4) * 1e5 / (8 * 1e-3);
  CHECK(f.flow_rate == doctest::Approx(q).epsilon(2e-3));
  CHECK(poiseuille_l2_error(f, m, cfg) < 0.005);
  CHECK(f.max_mass_imbalance < 1e-10);
  CHECK(f.flux_spread < 1e-9);
  const auto w = wall_force(f, m, cfg);
  CHECK(w.total == 0.0);
  CHECK(w.vessel_wall_shear == doctest::Approx(1e5 * 100e-6 * std::numbers::pi * 16e-12).epsilon(5e-3));
}

TEST_CASE("flow around rings: continuity, momentum and linearity") {
  const auto lo = with_rings("low_demand", 10);
  const auto hi = with_rings("high_demand", 10);
  const auto m = build_mesh(lo);
  const auto f1 = solve_flow(m, lo);
  const auto f5 = solve_flow(m, hi);
  CHECK(f1.max_mass_imbalance < 1e-10);
  CHECK(f5.flow_rate / f1.flow_rate == doctest::Approx(5.0).epsilon(1e-9));
  const auto w1 = wall_force(f1, m, lo);
  const auto w5 = wall_force(f5, m, hi);
  CHECK(w5.coefficient == doctest::Approx(w1.coefficient).epsilon(1e-9));
  // Pressure drop balances the drag on robots plus the bare wall.
  const double drive = 1e5 * 100e-6 * std::numbers::pi * 16e-12;
  CHECK(w1.total + w1.vessel_wall_shear == doctest::Approx(drive).epsilon(0.01));
  double rings = 0;
  for (double x : w1.per_ring) rings += x;
  CHECK(rings == doctest::Approx(w1.total));
  CHECK(w1.per_robot == doctest::Approx(w1.total / 200));
  CHECK(f1.flow_rate < analytic::poiseuille(lo).flow_rate);
}

TEST_CASE("core boundary follows a stream surface") {
  for (const char* name : {"low_demand", "high_demand"}) {
    CAPTURE(name);
    const auto cfg = with_rings(name, 0);
    const auto m = build_mesh(cfg);
    const auto f = solve_flow(m, cfg);
    const auto core = trace_core_boundary(f, m, cfg);
    const double rc = 4e-6 - cfg.rbc.inlet_gap;
    CHECK(core.r_cell.front() == doctest::Approx(rc).epsilon(1e-3));
    // Straight tube: the boundary stays at the inlet radius.
    for (double r : core.r_cell) CHECK(r == doctest::Approx(rc).epsilon(5e-3));
    // Poiseuille flux inside x = R_cell / R is (2x^2 - x^4) of the total.
    const double x = rc / 4e-6;
    const double h = core_hematocrit_value(cfg, core);
    CHECK(h == doctest::Approx(0.25 / (2 * x * x - x * x * x * x)).epsilon(5e-3));
    CHECK(core.core_flow() == doctest::Approx(f.flow_rate * (2 * x * x - x * x * x * x)).epsilon(5e-3));
  }

  const auto cfg = with_rings("low_demand", 10);
  const auto m = build_mesh(cfg);
  const auto f = solve_flow(m, cfg);
  const auto core = trace_core_boundary(f, m, cfg);
  double narrowest = 1;
  for (double r : core.r_cell) narrowest = std::min(narrowest, r);
  CHECK(narrowest < core.r_cell.front());
  CHECK(narrowest < 3e-6);
  const auto h = core_hematocrit(cfg, f, m, core);
  for (double v : h) CHECK(v == doctest::Approx(h.front()).epsilon(1e-6));
}
