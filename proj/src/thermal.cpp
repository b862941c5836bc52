// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#include "capow/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "capow/linsolve.hpp"
#include "convection.hpp"

namespace capow {

using detail::face_coeff;

std::vector<double> robot_heat_source(const AxiMesh& mesh, const TransportSolution& sol,
                                      const ScenarioConfig& cfg) {
  std::vector<double> q(mesh.cells(), 0.0);
  const double per_molecule = cfg.tissue.reaction_energy / 6;
  std::vector<double> ring_volume(mesh.rings.size(), 0.0);
  for (int k = 0; k < mesh.cells(); ++k) {
    if (mesh.region[k] == Region::robot) {
      ring_volume[mesh.ring_of[k]] += mesh.volume(k % mesh.nr(), k / mesh.nr());
    }
  }
  for (int k = 0; k < mesh.cells(); ++k) {
    if (mesh.region[k] != Region::robot) continue;
    const int ring = mesh.ring_of[k];
    const RingBc kind = sol.conditions[ring].kind;
    if (kind == RingBc::volumetric) {
      q[k] = sol.field.sink[k] * per_molecule;
    } else if (kind != RingBc::inert) {
      q[k] = sol.field.ring_uptake[ring] * per_molecule / ring_volume[ring];
    }
  }
  return q;
}

TemperatureField solve_heat(const AxiMesh& mesh, const FlowField& flow,
                            const std::vector<double>& source, const ScenarioConfig& cfg) {
  const int nr = mesh.nr(), nz = mesh.nz(), n = mesh.cells();
  const double k = cfg.fluid.thermal_conductivity;
  const double rc = cfg.fluid.density * cfg.fluid.heat_capacity;
  Triplets trip;
  trip.reserve(5 * static_cast<std::size_t>(n));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  // Rows are scaled by 1/k so the matrix entries are lengths.
  auto pair = [&](int p, int e, double g, double f) {
    const auto fc = face_coeff(g, f);
    trip.emplace_back(p, p, fc.a_pe);
    trip.emplace_back(p, e, -fc.a_ep);
    trip.emplace_back(e, p, -fc.a_pe);
    trip.emplace_back(e, e, fc.a_ep);
  };
  const double peclet_scale = rc / k;
  std::vector<double> inlet_g(nr, 0.0), inlet_f(nr, 0.0), outlet_f(nr, 0.0);
  for (int j = 0; j <= nz; ++j) {
    for (int i = 0; i < nr; ++i) {
      const FaceKind kind = mesh.axial_face(i, j);
      const double area = mesh.axial_area(i);
      if (kind == FaceKind::inlet) {
        const int p = mesh.index(i, 0);
        inlet_g[i] = area / (0.5 * mesh.z.width(0));
        inlet_f[i] = peclet_scale * flow.axial_flux(mesh, i, 0);
        trip.emplace_back(p, p, face_coeff(inlet_g[i], inlet_f[i]).a_ep);
        continue;
      }
      if (kind == FaceKind::outlet) {
        const int p = mesh.index(i, nz - 1);
        outlet_f[i] = peclet_scale * flow.axial_flux(mesh, i, nz);
        trip.emplace_back(p, p, std::max(outlet_f[i], 0.0));
        continue;
      }
      if (j == 0 || j == nz) continue;
      const int p = mesh.index(i, j - 1), e = mesh.index(i, j);
      const double g = area / (0.5 * (mesh.z.width(j - 1) + mesh.z.width(j)));
      const double f = kind == FaceKind::interior && mesh.region[p] == Region::lumen
                           ? peclet_scale * flow.axial_flux(mesh, i, j)
                           : 0.0;
      pair(p, e, g, f);
    }
  }
  for (int j = 0; j < nz; ++j) {
    for (int i = 1; i < nr; ++i) {
      const int p = mesh.index(i - 1, j), e = mesh.index(i, j);
      const double g = mesh.radial_area(i, j) / (mesh.r.center(i) - mesh.r.center(i - 1));
      const double f = mesh.radial_face(i, j) == FaceKind::interior && mesh.region[p] == Region::lumen
                           ? peclet_scale * flow.radial_flux(mesh, i, j)
                           : 0.0;
      pair(p, e, g, f);
    }
    const int p = mesh.index(nr - 1, j);
    trip.emplace_back(p, p, mesh.radial_area(nr, j) / (mesh.r.nodes[nr] - mesh.r.center(nr - 1)));
  }
  for (int c = 0; c < n; ++c) {
    rhs[c] = source[c] * mesh.volume(c % nr, c / nr) / k;
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(trip.begin(), trip.end());
  const Eigen::VectorXd x = solve_sparse(a, rhs);

  TemperatureField t;
  t.dt.assign(x.data(), x.data() + n);
  for (int c = 0; c < n; ++c) {
    t.source_power += source[c] * mesh.volume(c % nr, c / nr);
    if (t.dt[c] > t.max_rise) {
      t.max_rise = t.dt[c];
      t.r_max = mesh.r.center(c % nr);
      t.z_max = mesh.z.center(c / nr);
    }
  }
  for (int i = 0; i < nr; ++i) {
    if (inlet_g[i] > 0) t.conducted_out += k * face_coeff(inlet_g[i], inlet_f[i]).a_ep * t.dt[mesh.index(i, 0)];
    t.advected_out += k * std::max(outlet_f[i], 0.0) * t.dt[mesh.index(i, nz - 1)];
  }
  for (int j = 0; j < nz; ++j) {
    const double g = mesh.radial_area(nr, j) / (mesh.r.nodes[nr] - mesh.r.center(nr - 1));
    t.conducted_out += k * g * t.dt[mesh.index(nr - 1, j)];
  }
  if (t.source_power > 0) {
    t.relative_residual = (t.source_power - t.advected_out - t.conducted_out) / t.source_power;
  }
  return t;
}

void write_temperature_csv(const TemperatureField& t, const AxiMesh& mesh, std::ostream& out) {
  out << "r_m,z_m,dT_K\n";
  out.precision(9);
  for (int j = 0; j < mesh.nz(); ++j) {
    for (int i = 0; i < mesh.nr(); ++i) {
      out << mesh.r.center(i) << ',' << mesh.z.center(j) << ',' << t.dt[mesh.index(i, j)] << '\n';
    }
  }
}

}  // namespace capow
