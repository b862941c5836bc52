// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <string>

#include "capow/scenario.hpp"
#include "doctest.h"

using namespace capow;

TEST_CASE("presets differ only in gradient and demand") {
  const auto lo = preset("low_demand");
  const auto hi = preset("high_demand");
  CHECK(lo.fluid.pressure_gradient == 1e5);
  CHECK(hi.fluid.pressure_gradient == 5e5);
  CHECK(lo.tissue.max_power == 4e3);
  CHECK(hi.tissue.max_power == 6e4);
  CHECK(lo.oxygen.inlet_concentration == hi.oxygen.inlet_concentration);
  CHECK(lo.robot.rings == 10);
  CHECK_THROWS_AS(preset("medium"), ScenarioError);
}

TEST_CASE("overrides, comments and errors") {
  const auto c = load_scenario("preset = high_demand\n# comment\nrobot.rings = 1  # trailing\n");
  CHECK(c.fluid.pressure_gradient == 5e5);
  CHECK(c.robot.rings == 1);
  CHECK(load_scenario("robot.pump_mode = duty").robot.pump_mode == PumpMode::duty_cycle);
  CHECK(load_scenario("robot.pumps = false").robot.pumps == false);

  try {
    load_scenario("robot.colour = red");
    FAIL("unknown key accepted");
  } catch (const ScenarioError& e) {
    CHECK(e.key() == "robot.colour");
  }
  CHECK_THROWS_AS(load_scenario("robot.rings = 1\nrobot.rings = 2"), ScenarioError);
  CHECK_THROWS_AS(load_scenario("robot.rings"), ScenarioError);
  CHECK_THROWS_AS(load_scenario("fluid.viscosity = -1"), ScenarioError);
  CHECK_THROWS_AS(load_scenario("robot.site_density = abc"), ScenarioError);
}

TEST_CASE("text round trip is exact") {
  auto c = preset("high_demand");
  c.robot.rings = 3;
  c.robot.shell_fraction = 0.125;
  c.oxygen.inlet_concentration = 3e22;
  const auto text = to_text(c);
  const auto back = load_scenario(text);
  CHECK(to_text(back) == text);
}

TEST_CASE("inlet gap follows the pressure gradient") {
  CHECK(interpolated_inlet_gap(1e5) == doctest::Approx(0.98e-6));
  CHECK(interpolated_inlet_gap(5e5) == doctest::Approx(1.27e-6));
  CHECK(interpolated_inlet_gap(3e5) == doctest::Approx(1.125e-6));
  CHECK(interpolated_inlet_gap(1e4) == doctest::Approx(0.98e-6));
  CHECK(interpolated_inlet_gap(1e7) == doctest::Approx(1.27e-6));
  const auto c = load_scenario("flow.pressure_gradient = 3e5");
  CHECK(c.rbc.inlet_gap == doctest::Approx(1.125e-6));
}

TEST_CASE("derived robot quantities") {
  const auto c = preset("low_demand");
  const auto d = derived_quantities(c);
  const double n_sites = 3e21 * 1.1e-18;
  CHECK(d.sites_per_robot == doctest::Approx(n_sites));
  CHECK(d.max_robot_uptake == doctest::Approx(6 * n_sites * 1e6));
  CHECK(d.max_robot_power == doctest::Approx(n_sites * 1e6 * 4e-18));
  CHECK(d.sphere_radius == doctest::Approx(std::cbrt(3 * 1.1e-18 / (4 * 3.14159265358979))));
  CHECK(d.mean_speed == doctest::Approx(1e5 * 16e-12 / (8 * 1e-3)));
  CHECK(d.reynolds < 0.01);
}
