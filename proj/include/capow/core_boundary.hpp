// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "capow/flow.hpp"
#include "capow/mesh.hpp"
#include "capow/scenario.hpp"

namespace capow {

/// The cell-carrying core of the lumen, bounded by the stream surface
/// psi = psi_star that starts at r = R - inlet_gap on the inlet.
struct CoreBoundary {
  double psi_star = 0;        // stream function on the boundary, m^3/s
  double psi_total = 0;       // stream function on the vessel wall
  std::vector<double> r_cell;  // R_cell at every axial node, m

  /// Volumetric core flux, 2 pi psi_star.
  double core_flow() const;
  /// R_cell at z, linear between axial nodes.
  double radius_at(const AxiMesh& mesh, double z) const;
  /// Fraction of cell (i, j) inside the core.
  double cell_fraction(const AxiMesh& mesh, int i, int j) const;
  /// Fraction of the axial face (i, j) inside the core.
  double axial_face_fraction(const AxiMesh& mesh, int i, int j) const;
  /// Fraction of the radial face (i, j) inside the core.
  double radial_face_fraction(const AxiMesh& mesh, int i, int j) const;
  /// Core part of the volumetric flux through the axial face (i, j).
  double axial_core_flux(const FlowField& flow, int i, int j) const;
  /// Core part of the volumetric flux through the radial face (i, j).
  double radial_core_flux(const FlowField& flow, int i, int j) const;
};

/// Trace the iso-contour of the stream function through the inlet gap.
/// Throws SolverError if the contour leaves the fluid.
CoreBoundary trace_core_boundary(const FlowField& flow, const AxiMesh& mesh,
                                 const ScenarioConfig& cfg);

/// Core hematocrit h(z) = H R^2 v_avg / (R_cell^2 v_avg_cell) at every axial node.
std::vector<double> core_hematocrit(const ScenarioConfig& cfg, const FlowField& flow,
                                    const AxiMesh& mesh, const CoreBoundary& boundary);

/// Single core hematocrit used by transport (the inlet value; h is constant
/// along a stream surface).
double core_hematocrit_value(const ScenarioConfig& cfg, const CoreBoundary& boundary);

}  // namespace capow
