// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "capow/power.hpp"
#include "capow/thermal.hpp"
#include "doctest.h"

using namespace capow;

TEST_CASE("heat source follows the oxygen consumed") {
  auto cfg = preset("low_demand");
  cfg.robot.rings = 2;
  validate(cfg);
  const auto model = prepare_model(cfg);
  const auto run = solve_power(model, cfg, ring_conditions(cfg));
  const auto q = robot_heat_source(model.mesh, run.solution, cfg);
  double total = 0;
  const auto& m = model.mesh;
  for (int j = 0; j < m.nz(); ++j) {
    for (int i = 0; i < m.nr(); ++i) {
      const double v = q[m.index(i, j)];
      CHECK(v >= 0);
      if (m.at(i, j) != Region::robot) CHECK(v == 0.0);
      total += v * m.volume(i, j);
    }
  }
  CHECK(total == doctest::Approx(run.report.aggregate_power).epsilon(1e-9));

  const auto t = solve_heat(m, model.flow, q, cfg);
  CHECK(t.source_power == doctest::Approx(total));
  CHECK(std::abs(t.relative_residual) < 1e-6);
  CHECK(t.max_rise > 0);
  CHECK(*std::min_element(t.dt.begin(), t.dt.end()) >= -1e-12 * t.max_rise);
  CHECK(t.r_max >= 3e-6);
  CHECK(t.r_max <= 4e-6 + 1e-6);

  auto q3 = q;
  for (double& v : q3) v *= 3;
  const auto t3 = solve_heat(m, model.flow, q3, cfg);
  CHECK(t3.max_rise == doctest::Approx(3 * t.max_rise).epsilon(1e-9));

  const auto zero = solve_heat(m, model.flow, std::vector<double>(q.size(), 0.0), cfg);
  CHECK(zero.max_rise == 0.0);
}

TEST_CASE("conduction only: point source in still tissue is bounded by the sphere solution") {
  // A source concentrated in one tissue cell far from the vessel: the peak
  // rise stays below the free-space point-source value q / (4 pi k r_eff).
  auto cfg = preset("low_demand");
  cfg.robot.rings = 0;
  validate(cfg);
  const auto model = prepare_model(cfg);
  const auto& m = model.mesh;
  std::vector<double> q(m.cells(), 0.0);
  const int i = m.r.locate(20e-6), j = m.z.locate(50e-6);
  q[m.index(i, j)] = 1e-12 / m.volume(i, j);
  const auto t = solve_heat(m, model.flow, q, cfg);
  CHECK(t.source_power == doctest::Approx(1e-12));
  CHECK(std::abs(t.relative_residual) < 1e-6);
  const double r_eff = std::cbrt(3 * m.volume(i, j) / (4 * 3.14159265358979));
  CHECK(t.max_rise < 1e-12 / (4 * 3.14159265358979 * 0.6 * r_eff) * 1.5);
  CHECK(t.max_rise > 0);
}
