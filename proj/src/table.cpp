// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#include "capow/table.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <thread>
#include <tuple>
#include <utility>

#include "capow/power.hpp"

namespace capow {

std::vector<DesignRow> table4_rows() {
  return {{10, true, "10-ring pumps"},
          {10, false, "10-ring free diffusion"},
          {1, true, "1-ring pumps"},
          {1, false, "1-ring free diffusion"}};
}

std::vector<OperatingColumn> table4_columns() {
  std::vector<OperatingColumn> cols;
  const std::pair<bool, double> groups[] = {{true, 3e22}, {true, 7e22}, {false, 7e22}};
  for (const auto& [high, c] : groups) {
    for (double dp : {1e5, 5e5}) {
      for (double q : {4e3, 6e4}) cols.push_back({high, c, dp, q});
    }
  }
  return cols;
}

ScenarioConfig matrix_config(const ScenarioConfig& base, const DesignRow& row,
                             const OperatingColumn& col) {
  ScenarioConfig cfg = base;
  cfg.robot.rings = row.rings;
  cfg.robot.pumps = row.pumps;
  cfg.robot.pump_mode = PumpMode::full_absorb;
  cfg.robot.ring_starts.clear();
  cfg.robot.site_density = col.high_capacity ? 3e21 : 6e19;
  cfg.oxygen.inlet_concentration = col.inlet_concentration;
  cfg.fluid.pressure_gradient = col.pressure_gradient;
  cfg.tissue.max_power = col.tissue_power;
  cfg.rbc.inlet_gap = 0;
  cfg.rbc.narrow_gap = 0;
  validate(cfg);
  return cfg;
}

PowerMatrix run_power_matrix(const ScenarioConfig& base, const std::vector<DesignRow>& rows,
                             const std::vector<OperatingColumn>& columns, int workers) {
  PowerMatrix m;
  m.rows = rows;
  m.columns = columns;
  m.cells.resize(rows.size() * columns.size());

  // Mesh and flow depend only on the rings (count and pump design, which
  // decides shell refinement) and the gradient.
  using Key = std::tuple<int, bool, double>;
  std::map<Key, std::unique_ptr<ScenarioModel>> models;
  for (const auto& r : rows) {
    for (const auto& c : columns) models[{r.rings, r.pumps, c.pressure_gradient}] = nullptr;
  }
  std::vector<Key> keys;
  for (const auto& kv : models) keys.push_back(kv.first);

  workers = std::max(1, workers);
  auto parallel = [workers](std::size_t n, auto&& job) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
      for (std::size_t k = next++; k < n; k = next++) {
        try {
          job(k);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    const std::size_t count = std::min<std::size_t>(workers, n);
    for (std::size_t t = 1; t < count; ++t) pool.emplace_back(body);
    body();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  };

  parallel(keys.size(), [&](std::size_t k) {
    ScenarioConfig cfg = base;
    cfg.robot.rings = std::get<0>(keys[k]);
    cfg.robot.pumps = std::get<1>(keys[k]);
    cfg.robot.ring_starts.clear();
    cfg.fluid.pressure_gradient = std::get<2>(keys[k]);
    cfg.rbc.inlet_gap = 0;
    cfg.rbc.narrow_gap = 0;
    validate(cfg);
    models.at(keys[k]) = std::make_unique<ScenarioModel>(prepare_model(cfg));
  });

  parallel(m.cells.size(), [&](std::size_t k) {
    const int row = static_cast<int>(k / columns.size());
    const int col = static_cast<int>(k % columns.size());
    const auto cfg = matrix_config(base, rows[row], columns[col]);
    const auto& model = *models.at({rows[row].rings, rows[row].pumps, columns[col].pressure_gradient});
    const auto run = solve_power(model, cfg, ring_conditions(cfg));
    auto& cell = m.cells[k];
    cell.row = row;
    cell.column = col;
    cell.robot_power = run.report.average_robot_power;
    cell.uptake = run.report.uptake;
    cell.iterations = run.solution.coupling.iterations;
    cell.converged = run.solution.coupling.converged;
    cell.balance_residual = run.solution.balance.relative_residual;
  });
  return m;
}

void write_matrix_csv(const PowerMatrix& m, std::ostream& out) {
  out << "design,rings,pumps,capacity,inlet_concentration_per_m3,pressure_gradient_Pa_per_m,"
         "tissue_power_W_per_m3,robot_power_pW,uptake_per_s,iterations,balance_residual\n";
  out.precision(9);
  for (const auto& c : m.cells) {
    const auto& r = m.rows[c.row];
    const auto& k = m.columns[c.column];
    out << r.label << ',' << r.rings << ',' << (r.pumps ? 1 : 0) << ','
        << (k.high_capacity ? "high" : "low") << ',' << k.inlet_concentration << ','
        << k.pressure_gradient << ',' << k.tissue_power << ',' << c.robot_power * 1e12 << ','
        << c.uptake << ',' << c.iterations << ',' << c.balance_residual << '\n';
  }
}

}  // namespace capow
