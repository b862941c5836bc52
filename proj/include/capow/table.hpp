// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "capow/scenario.hpp"

namespace capow {

/// One design row of the power matrix.
struct DesignRow {
  int rings = 10;
  bool pumps = true;
  std::string label;
};

/// One operating column of the power matrix.
struct OperatingColumn {
  bool high_capacity = true;
  double inlet_concentration = 7e22;  // molecule/m^3
  double pressure_gradient = 1e5;     // Pa/m
  double tissue_power = 4e3;          // W/m^3
};

struct MatrixCell {
  int row = 0;
  int column = 0;
  double robot_power = 0;  // average per robot, W
  double uptake = 0;       // molecule/s
  int iterations = 0;
  bool converged = false;
  double balance_residual = 0;
};

struct PowerMatrix {
  std::vector<DesignRow> rows;
  std::vector<OperatingColumn> columns;
  std::vector<MatrixCell> cells;  // row-major
  const MatrixCell& at(int row, int column) const {
    return cells[static_cast<std::size_t>(row) * columns.size() + column];
  }
};

/// Rows: 10-ring and 1-ring, each with and without pumps. Columns: high
/// capacity at two inlet concentrations, then low capacity at the arterial
/// one, each over both pressure gradients and both tissue demands.
std::vector<DesignRow> table4_rows();
std::vector<OperatingColumn> table4_columns();

/// Configuration of one matrix cell on top of a base scenario.
ScenarioConfig matrix_config(const ScenarioConfig& base, const DesignRow& row,
                             const OperatingColumn& col);

/// Solve every cell, sharing mesh and flow between cells with the same
/// geometry and gradient. Cells run on up to `workers` threads.
PowerMatrix run_power_matrix(const ScenarioConfig& base, const std::vector<DesignRow>& rows,
                             const std::vector<OperatingColumn>& columns, int workers);

/// Long format: one line per cell with its design and operating point.
void write_matrix_csv(const PowerMatrix& m, std::ostream& out);

}  // namespace capow
