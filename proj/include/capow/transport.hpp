// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <vector>

#include "capow/core_boundary.hpp"
#include "capow/flow.hpp"
#include "capow/mesh.hpp"
#include "capow/scenario.hpp"

namespace capow {

/// Oxygen condition on the plasma-facing faces of one ring.
enum class RingBc {
  absorb,      // pumps hold the face at zero concentration
  flux,        // pumps remove a prescribed uniform flux
  inert,       // pumps off: impermeable
  volumetric,  // no pumps: oxygen diffuses in and reacts inside
};

struct RingCondition {
  RingBc kind = RingBc::absorb;
  double flux = 0;  // molecule/m^2/s, for RingBc::flux
};

/// Per-ring conditions implied by the config (pump mode, duty phase).
std::vector<RingCondition> ring_conditions(const ScenarioConfig& cfg);

/// Thickness of the reactive shell next to the plasma-facing robot face that
/// holds the shell fraction of the robot volume (zero for uniform placement).
double shell_thickness(const ScenarioConfig& cfg);

/// Reaction-site density of robot cell (i, j) under the configured placement.
double cell_site_density(const AxiMesh& mesh, const ScenarioConfig& cfg, int i, int j);

/// One plasma-facing robot face in the transport discretisation.
struct RobotFace {
  int cell = 0;         // adjacent lumen cell
  int ring = 0;
  double area = 0;      // m^2
  double distance = 0;  // lumen cell centre to face, m
  double diffusivity = 0;
  double concentration = 0;  // reconstructed face value
  double uptake = 0;         // molecule/s into the robot
};

struct ConcentrationField {
  std::vector<double> c;        // per mesh cell, molecule/m^3 (0 in inactive robot cells)
  std::vector<double> release;  // red-cell release density, molecule/m^3/s
  std::vector<double> sink;     // consumption density (tissue, robot interiors), molecule/m^3/s
  std::vector<RobotFace> faces;
  std::vector<double> ring_uptake;  // molecule/s per ring
  double robot_uptake = 0;
  double tissue_uptake = 0;
};

struct SaturationState {
  std::vector<double> z;     // subcell centres
  std::vector<double> s;     // saturation
  std::vector<double> s_eq;  // equilibrium with the core-averaged plasma value
  std::vector<double> rate;  // core-averaged dS/dt, 1/s
  double inlet = 0;
};

struct CouplingState {
  int iterations = 0;
  double change_c = 0;  // last relative change of C (max norm / C_in)
  double change_s = 0;  // last change of S (max norm)
  double relaxation = 0;
  bool converged = false;
};

struct BalanceReport {
  double inlet_plasma = 0;  // molecule/s
  double inlet_cells = 0;
  double outlet_plasma = 0;
  double outlet_cells = 0;
  double robot_uptake = 0;
  double tissue_uptake = 0;
  double residual = 0;
  double relative_residual = 0;  // residual / total inlet influx
};

struct TransportSolution {
  ConcentrationField field;
  SaturationState saturation;
  CouplingState coupling;
  BalanceReport balance;
  std::vector<RingCondition> conditions;
  double core_hematocrit = 0;
};

/// Coupled plasma-oxygen / cell-saturation steady state by Picard iteration.
/// A previous solution on the same mesh may be passed as the starting point.
TransportSolution solve_coupled(const AxiMesh& mesh, const FlowField& flow,
                                const CoreBoundary& core, const ScenarioConfig& cfg,
                                const std::vector<RingCondition>& conditions,
                                const TransportSolution* start = nullptr);

/// Recompute the species balance of a solution from its fields.
BalanceReport species_balance_audit(const TransportSolution& sol, const AxiMesh& mesh,
                                    const FlowField& flow, const CoreBoundary& core,
                                    const ScenarioConfig& cfg);

/// (r, z, C, region, release, sink) per cell.
void write_concentration_csv(const TransportSolution& sol, const AxiMesh& mesh,
                             std::ostream& out);
/// (z, S, S_eq, S - S_eq, dS/dt) on the saturation grid.
void write_saturation_csv(const TransportSolution& sol, std::ostream& out);
/// Radial section (r, C) at axial position z.
void write_radial_section_csv(const TransportSolution& sol, const AxiMesh& mesh, double z,
                              std::ostream& out);

/// Concentration interpolated along r at axial cell row j.
double concentration_at(const TransportSolution& sol, const AxiMesh& mesh, double r, int j);

}  // namespace capow
