// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <vector>

#include "capow/flow.hpp"
#include "capow/mesh.hpp"
#include "capow/scenario.hpp"
#include "capow/transport.hpp"

namespace capow {

/// Temperature rise above body temperature caused by robot power alone.
struct TemperatureField {
  std::vector<double> dt;  // K, per mesh cell
  double max_rise = 0;
  double r_max = 0;
  double z_max = 0;
  double source_power = 0;      // W released into the domain
  double advected_out = 0;      // W carried out of the outlet
  double conducted_out = 0;     // W through the inlet and the tissue boundary
  double relative_residual = 0;  // (source - outflow) / source
};

/// Robot heat release density per cell, W/m^3. Pumping rings spread their
/// power uniformly over their volume; diffusion-fed rings release it where
/// the oxygen reacts.
std::vector<double> robot_heat_source(const AxiMesh& mesh, const TransportSolution& sol,
                                      const ScenarioConfig& cfg);

/// Steady advection-conduction with dT = 0 on the lumen inlet and the outer
/// tissue radius, insulated tissue ends and advective outflow.
TemperatureField solve_heat(const AxiMesh& mesh, const FlowField& flow,
                            const std::vector<double>& source, const ScenarioConfig& cfg);

/// (r, z, dT) per cell.
void write_temperature_csv(const TemperatureField& t, const AxiMesh& mesh, std::ostream& out);

}  // namespace capow
