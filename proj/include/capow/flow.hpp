// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <vector>

#include "capow/mesh.hpp"
#include "capow/scenario.hpp"

namespace capow {

/// Steady Stokes solution on the lumen of an AxiMesh (staggered MAC layout).
/// Axial velocities live on axial faces, radial velocities on radial faces,
/// pressure at lumen cell centres. Faces touching solids carry zero velocity.
struct FlowField {
  int nl = 0;  // lumen columns (== mesh.i_wall)
  int nz = 0;
  int nr = 0;  // full radial cell count, for the stream-function layout
  std::vector<double> vz;   // axial face (i, j), i < nl, j <= nz: index i + nl * j
  std::vector<double> vr;   // radial face (i, j), i <= nl, j < nz: index i + (nl + 1) * j
  std::vector<double> p;    // lumen cell (i, j): index i + nl * j (zero in robots)
  std::vector<double> psi;  // node (i, j) over the full mesh: index i + (nr + 1) * j
  double viscosity = 0;
  double inlet_pressure = 0;
  double outlet_pressure = 0;
  double flow_rate = 0;        // volumetric, m^3/s
  double mean_speed = 0;       // flow_rate / (pi R^2)
  double max_mass_imbalance = 0;  // max cell |div| relative to flow_rate
  double flux_spread = 0;      // max relative deviation of cross-section flux

  double axial_velocity(int i, int j) const { return vz[i + nl * j]; }
  double radial_velocity(int i, int j) const { return vr[i + (nl + 1) * j]; }
  double pressure(int i, int j) const { return p[i + nl * j]; }
  double stream(int i, int j) const { return psi[i + (nr + 1) * j]; }

  /// Volumetric flux through the axial face (i, j) of the full mesh.
  double axial_flux(const AxiMesh& mesh, int i, int j) const;
  /// Volumetric flux through the radial face (i, j) of the full mesh.
  double radial_flux(const AxiMesh& mesh, int i, int j) const;
};

/// Solve steady axisymmetric Stokes flow with pressures dP*L and 0 at the
/// inlet and outlet. Inertia is dropped (Re ~ 1e-3).
FlowField solve_flow(const AxiMesh& mesh, const ScenarioConfig& cfg);

struct WallForce {
  double total = 0;        // axial force on all robots, N
  double per_robot = 0;
  double coefficient = 0;  // total / pressure_gradient, m^3
  double pressure_part = 0;
  double viscous_part = 0;
  std::vector<double> per_ring;
  double vessel_wall_shear = 0;  // drag on the bare vessel wall
  double momentum_balance = 0;   // dP L pi R^2 - vessel_wall_shear
};

WallForce wall_force(const FlowField& flow, const AxiMesh& mesh, const ScenarioConfig& cfg);

/// Relative L2 difference between the solved axial velocity at the middle
/// cross-section and the Poiseuille profile.
double poiseuille_l2_error(const FlowField& flow, const AxiMesh& mesh, const ScenarioConfig& cfg);

/// (r, z, v_r, v_z, p, psi) at lumen cell centres.
void write_flow_csv(const FlowField& flow, const AxiMesh& mesh, std::ostream& out);

}  // namespace capow
