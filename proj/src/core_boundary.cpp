// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#include "capow/core_boundary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "capow/linsolve.hpp"

namespace capow {
namespace {

constexpr double kPi = std::numbers::pi;

double annulus_fraction(double r0, double r1, double rc) {
  const double a = std::min(r1, rc), b = std::min(r0, rc);
  return std::max(0.0, (a * a - b * b) / (r1 * r1 - r0 * r0));
}

}  // namespace

double CoreBoundary::core_flow() const { return 2 * kPi * psi_star; }

double CoreBoundary::radius_at(const AxiMesh& mesh, double z) const {
  const int j = mesh.z.locate(z);
  const double z0 = mesh.z.nodes[j], z1 = mesh.z.nodes[j + 1];
  const double t = std::clamp((z - z0) / (z1 - z0), 0.0, 1.0);
  return r_cell[j] + t * (r_cell[j + 1] - r_cell[j]);
}

double CoreBoundary::cell_fraction(const AxiMesh& mesh, int i, int j) const {
  if (i >= mesh.i_wall || mesh.at(i, j) != Region::lumen) return 0;
  const double rc = 0.5 * (r_cell[j] + r_cell[j + 1]);
  return annulus_fraction(mesh.r.nodes[i], mesh.r.nodes[i + 1], rc);
}

double CoreBoundary::axial_face_fraction(const AxiMesh& mesh, int i, int j) const {
  if (i >= mesh.i_wall) return 0;
  return annulus_fraction(mesh.r.nodes[i], mesh.r.nodes[i + 1], r_cell[j]);
}

double CoreBoundary::radial_face_fraction(const AxiMesh& mesh, int i, int j) const {
  const double r = mesh.r.nodes[i];
  const double a = r_cell[j], b = r_cell[j + 1];
  if (a > r && b > r) return 1;
  if (a <= r && b <= r) return 0;
  const double t = (r - a) / (b - a);
  return a > r ? t : 1 - t;
}

double CoreBoundary::axial_core_flux(const FlowField& flow, int i, int j) const {
  if (i >= flow.nl) return 0;
  const double lo = std::min(flow.stream(i, j), psi_star);
  const double hi = std::min(flow.stream(i + 1, j), psi_star);
  return 2 * kPi * (hi - lo);
}

double CoreBoundary::radial_core_flux(const FlowField& flow, int i, int j) const {
  if (i == 0 || i >= flow.nl) return 0;
  const double lo = std::min(flow.stream(i, j), psi_star);
  const double hi = std::min(flow.stream(i, j + 1), psi_star);
  return -2 * kPi * (hi - lo);
}

CoreBoundary trace_core_boundary(const FlowField& flow, const AxiMesh& mesh,
                                 const ScenarioConfig& cfg) {
  CoreBoundary cb;
  const auto& rn = mesh.r.nodes;
  const double r_start = mesh.vessel_radius() - cfg.rbc.inlet_gap;
  cb.psi_total = flow.stream(flow.nl, 0);
  if (!(cb.psi_total > 0)) {
    throw SolverError("core boundary: flow field carries no flux");
  }

  // Within a column the discrete stream function is linear in r^2.
  {
    const int i = mesh.r.locate(r_start);
    const double t = (r_start * r_start - rn[i] * rn[i]) / (rn[i + 1] * rn[i + 1] - rn[i] * rn[i]);
    cb.psi_star = flow.stream(i, 0) + t * (flow.stream(i + 1, 0) - flow.stream(i, 0));
  }

  cb.r_cell.resize(mesh.z.nodes.size());
  for (int j = 0; j <= mesh.nz(); ++j) {
    int i = 0;
    while (i < flow.nl && flow.stream(i + 1, j) < cb.psi_star) ++i;
    const FaceKind kind = i < flow.nl ? mesh.axial_face(i, j) : FaceKind::vessel_wall;
    const bool fluid_face =
        kind == FaceKind::interior || kind == FaceKind::inlet || kind == FaceKind::outlet;
    if (i >= flow.nl || !fluid_face) {
      throw SolverError("core boundary streamline leaves the fluid at z = " +
                        std::to_string(mesh.z.nodes[j]) + " m");
    }
    const double p0 = flow.stream(i, j), p1 = flow.stream(i + 1, j);
    const double t = std::clamp((cb.psi_star - p0) / (p1 - p0), 0.0, 1.0);
    cb.r_cell[j] = std::sqrt(rn[i] * rn[i] + t * (rn[i + 1] * rn[i + 1] - rn[i] * rn[i]));
  }
  return cb;
}

std::vector<double> core_hematocrit(const ScenarioConfig& cfg, const FlowField& flow,
                                    const AxiMesh& mesh, const CoreBoundary& boundary) {
  std::vector<double> h(mesh.z.nodes.size());
  const auto& rn = mesh.r.nodes;
  for (int j = 0; j <= mesh.nz(); ++j) {
    const double rc = boundary.r_cell[j];
    double q = 0, q_core = 0;
    for (int i = 0; i < flow.nl; ++i) {
      const double v = flow.axial_velocity(i, j);
      q += v * kPi * (rn[i + 1] * rn[i + 1] - rn[i] * rn[i]);
      const double a = std::min(rn[i + 1], rc), b = std::min(rn[i], rc);
      q_core += v * kPi * std::max(0.0, a * a - b * b);
    }
    // H R^2 v_avg / (R_cell^2 v_cell) with v_avg = q / (pi R^2), v_cell = q_core / (pi R_cell^2).
    h[j] = cfg.fluid.hematocrit * q / q_core;
  }
  return h;
}

double core_hematocrit_value(const ScenarioConfig& cfg, const CoreBoundary& boundary) {
  return cfg.fluid.hematocrit * boundary.psi_total / boundary.psi_star;
}

}  // namespace capow
