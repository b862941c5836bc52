// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#include "capow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "capow/linsolve.hpp"

namespace capow {
namespace {

constexpr double kPi = std::numbers::pi;
// The system is assembled in micrometres with unit viscosity and a unit
// pressure gradient, then rescaled; this keeps the saddle-point matrix
// well scaled for the direct solver.
constexpr double kLengthScale = 1e-6;

struct Layout {
  const AxiMesh& mesh;
  int nl, nz;
  std::vector<double> rn, zn, rc, zc;  // scaled node and centre coordinates
  std::vector<int> vz_id, vr_id, p_id;
  int unknowns = 0;

  explicit Layout(const AxiMesh& m) : mesh(m), nl(m.i_wall), nz(m.nz()) {
    for (double x : m.r.nodes) rn.push_back(x / kLengthScale);
    for (double x : m.z.nodes) zn.push_back(x / kLengthScale);
    for (int i = 0; i < m.nr(); ++i) rc.push_back(0.5 * (rn[i] + rn[i + 1]));
    for (int j = 0; j < nz; ++j) zc.push_back(0.5 * (zn[j] + zn[j + 1]));

    vz_id.assign(static_cast<std::size_t>(nl) * (nz + 1), -1);
    vr_id.assign(static_cast<std::size_t>(nl + 1) * nz, -1);
    p_id.assign(static_cast<std::size_t>(nl) * nz, -1);
    for (int j = 0; j <= nz; ++j) {
      for (int i = 0; i < nl; ++i) {
        if (vz_active(i, j)) vz_id[i + nl * j] = unknowns++;
      }
    }
    for (int j = 0; j < nz; ++j) {
      for (int i = 1; i < nl; ++i) {
        if (fluid(i - 1, j) && fluid(i, j)) vr_id[i + (nl + 1) * j] = unknowns++;
      }
    }
    for (int j = 0; j < nz; ++j) {
      for (int i = 0; i < nl; ++i) {
        if (fluid(i, j)) p_id[i + nl * j] = unknowns++;
      }
    }
  }

  bool fluid(int i, int j) const {
    return i >= 0 && i < nl && j >= 0 && j < nz && mesh.at(i, j) == Region::lumen;
  }
  bool vz_active(int i, int j) const {
    if (j == 0) return fluid(i, 0);
    if (j == nz) return fluid(i, nz - 1);
    return fluid(i, j - 1) && fluid(i, j);
  }
  int vz(int i, int j) const {
    return (i < 0 || i >= nl || j < 0 || j > nz) ? -1 : vz_id[i + nl * j];
  }
  int vr(int i, int j) const {
    return (i < 1 || i >= nl || j < 0 || j >= nz) ? -1 : vr_id[i + (nl + 1) * j];
  }
  int p(int i, int j) const { return fluid(i, j) ? p_id[i + nl * j] : -1; }
  double area_z(int i) const { return kPi * (rn[i + 1] * rn[i + 1] - rn[i] * rn[i]); }
  double dz(int j) const { return zn[j + 1] - zn[j]; }
  double dr(int i) const { return rn[i + 1] - rn[i]; }
};

// One half-segment of a control-volume side, with the cell across it.
struct Segment {
  double length;
  int ni, nj;  // neighbouring cell
};

// Which solid a no-slip contribution acts on.
enum class Sink { none, robot, wall };

Sink solid_kind(const AxiMesh& m, int i, int j) {
  if (j < 0 || j >= m.nz() || i < 0) return Sink::none;
  if (i >= m.i_wall) return Sink::wall;
  return m.at(i, j) == Region::robot ? Sink::robot : Sink::none;
}

class Assembler {
 public:
  explicit Assembler(const Layout& lay) : lay_(lay), rhs_(Eigen::VectorXd::Zero(lay.unknowns)) {}

  void add(int row, int col, double v) {
    if (col >= 0) trip_.emplace_back(row, col, v);
  }
  void rhs(int row, double v) { rhs_[row] += v; }
  SparseMatrix matrix() const {
    SparseMatrix a(lay_.unknowns, lay_.unknowns);
    a.setFromTriplets(trip_.begin(), trip_.end());
    return a;
  }
  const Eigen::VectorXd& rhs() const { return rhs_; }

 private:
  const Layout& lay_;
  Triplets trip_;
  Eigen::VectorXd rhs_;
};

// Axial-momentum control volume around axial face (i, j).
struct VzVolume {
  double zlo, zhi;
  std::vector<Segment> outer, inner;
};

VzVolume vz_volume(const Layout& lay, int i, int j) {
  VzVolume v;
  v.zlo = j == 0 ? lay.zn[0] : lay.zc[j - 1];
  v.zhi = j == lay.nz ? lay.zn[lay.nz] : lay.zc[j];
  if (j > 0) {
    v.outer.push_back({lay.zn[j] - v.zlo, i + 1, j - 1});
    v.inner.push_back({lay.zn[j] - v.zlo, i - 1, j - 1});
  }
  if (j < lay.nz) {
    v.outer.push_back({v.zhi - lay.zn[j], i + 1, j});
    v.inner.push_back({v.zhi - lay.zn[j], i - 1, j});
  }
  return v;
}

void assemble_vz(const Layout& lay, Assembler& as, double p_in, double p_out) {
  const AxiMesh& m = lay.mesh;
  for (int j = 0; j <= lay.nz; ++j) {
    for (int i = 0; i < lay.nl; ++i) {
      const int row = lay.vz(i, j);
      if (row < 0) continue;
      const double a = lay.area_z(i);
      double diag = 0;
      if (j < lay.nz) {
        const double c = a / lay.dz(j);
        diag += c;
        as.add(row, lay.vz(i, j + 1), -c);
      }
      if (j > 0) {
        const double c = a / lay.dz(j - 1);
        diag += c;
        as.add(row, lay.vz(i, j - 1), -c);
      }
      const auto vol = vz_volume(lay, i, j);
      for (const auto& s : vol.outer) {
        const double lateral = 2 * kPi * lay.rn[i + 1] * s.length;
        if (solid_kind(m, s.ni, s.nj) != Sink::none) {
          diag += lateral / (lay.rn[i + 1] - lay.rc[i]);
        } else {
          const double c = lateral / (lay.rc[i + 1] - lay.rc[i]);
          diag += c;
          as.add(row, lay.vz(i + 1, j), -c);
        }
      }
      if (i > 0) {
        for (const auto& s : vol.inner) {
          const double lateral = 2 * kPi * lay.rn[i] * s.length;
          if (solid_kind(m, s.ni, s.nj) != Sink::none) {
            diag += lateral / (lay.rc[i] - lay.rn[i]);
          } else {
            const double c = lateral / (lay.rc[i] - lay.rc[i - 1]);
            diag += c;
            as.add(row, lay.vz(i - 1, j), -c);
          }
        }
      }
      as.add(row, row, diag);
      // + A (p_hi - p_lo)
      if (j == 0) {
        as.rhs(row, a * p_in);
      } else {
        as.add(row, lay.p(i, j - 1), -a);
      }
      if (j == lay.nz) {
        as.rhs(row, -a * p_out);
      } else {
        as.add(row, lay.p(i, j), a);
      }
    }
  }
}

void assemble_vr(const Layout& lay, Assembler& as) {
  const AxiMesh& m = lay.mesh;
  for (int j = 0; j < lay.nz; ++j) {
    for (int i = 1; i < lay.nl; ++i) {
      const int row = lay.vr(i, j);
      if (row < 0) continue;
      const double dz = lay.dz(j);
      const double rlo = lay.rc[i - 1], rhi = lay.rc[i];
      double diag = 2 * kPi * dz * std::log(rhi / rlo);
      {
        const double c = 2 * kPi * rhi * dz / lay.dr(i);
        diag += c;
        as.add(row, lay.vr(i + 1, j), -c);
      }
      {
        const double c = 2 * kPi * rlo * dz / lay.dr(i - 1);
        diag += c;
        as.add(row, lay.vr(i - 1, j), -c);
      }
      // Axial neighbours; the side is split at r_i between the two columns.
      const double a_lo = kPi * (lay.rn[i] * lay.rn[i] - rlo * rlo);
      const double a_hi = kPi * (rhi * rhi - lay.rn[i] * lay.rn[i]);
      for (int dir : {-1, 1}) {
        const int jn = j + dir;
        if (jn < 0 || jn >= lay.nz) continue;  // inlet/outlet: zero gradient
        const int nb = lay.vr(i, jn);
        const double centre_gap = std::abs(lay.zc[jn] - lay.zc[j]);
        const double wall_gap = 0.5 * lay.dz(j);
        if (nb >= 0) {
          const double c = (a_lo + a_hi) / centre_gap;
          diag += c;
          as.add(row, nb, -c);
          continue;
        }
        diag += a_lo / (solid_kind(m, i - 1, jn) != Sink::none ? wall_gap : centre_gap);
        diag += a_hi / (solid_kind(m, i, jn) != Sink::none ? wall_gap : centre_gap);
      }
      as.add(row, row, diag);
      const double ar = 2 * kPi * lay.rn[i] * dz;
      as.add(row, lay.p(i - 1, j), -ar);
      as.add(row, lay.p(i, j), ar);
    }
  }
}

void assemble_continuity(const Layout& lay, Assembler& as) {
  for (int j = 0; j < lay.nz; ++j) {
    for (int i = 0; i < lay.nl; ++i) {
      const int row = lay.p(i, j);
      if (row < 0) continue;
      const double a = lay.area_z(i);
      as.add(row, lay.vz(i, j + 1), a);
      as.add(row, lay.vz(i, j), -a);
      as.add(row, lay.vr(i + 1, j), 2 * kPi * lay.rn[i + 1] * lay.dz(j));
      as.add(row, lay.vr(i, j), -2 * kPi * lay.rn[i] * lay.dz(j));
    }
  }
}

}  // namespace

double FlowField::axial_flux(const AxiMesh& mesh, int i, int j) const {
  if (i >= nl) return 0;
  return axial_velocity(i, j) * mesh.axial_area(i);
}

double FlowField::radial_flux(const AxiMesh& mesh, int i, int j) const {
  if (i == 0 || i >= nl) return 0;
  return radial_velocity(i, j) * mesh.radial_area(i, j);
}

FlowField solve_flow(const AxiMesh& mesh, const ScenarioConfig& cfg) {
  const Layout lay(mesh);
  FlowField f;
  f.nl = lay.nl;
  f.nz = lay.nz;
  f.nr = mesh.nr();
  f.viscosity = cfg.fluid.viscosity;
  const double dp = cfg.fluid.pressure_gradient;
  const double L = mesh.length();
  f.inlet_pressure = dp * L;
  f.outlet_pressure = 0;
  f.vz.assign(static_cast<std::size_t>(f.nl) * (f.nz + 1), 0.0);
  f.vr.assign(static_cast<std::size_t>(f.nl + 1) * f.nz, 0.0);
  f.p.assign(static_cast<std::size_t>(f.nl) * f.nz, 0.0);

  if (dp > 0) {
    Assembler as(lay);
    assemble_vz(lay, as, L / kLengthScale, 0.0);
    assemble_vr(lay, as);
    assemble_continuity(lay, as);
    const Eigen::VectorXd x = solve_sparse(as.matrix(), as.rhs());
    const double u = dp * kLengthScale * kLengthScale / cfg.fluid.viscosity;
    const double pscale = dp * kLengthScale;
    for (std::size_t k = 0; k < f.vz.size(); ++k) {
      if (lay.vz_id[k] >= 0) f.vz[k] = u * x[lay.vz_id[k]];
    }
    for (std::size_t k = 0; k < f.vr.size(); ++k) {
      if (lay.vr_id[k] >= 0) f.vr[k] = u * x[lay.vr_id[k]];
    }
    for (std::size_t k = 0; k < f.p.size(); ++k) {
      if (lay.p_id[k] >= 0) f.p[k] = pscale * x[lay.p_id[k]];
    }
  }

  for (int i = 0; i < f.nl; ++i) f.flow_rate += f.axial_flux(mesh, i, 0);
  const double R = mesh.vessel_radius();
  f.mean_speed = f.flow_rate / (kPi * R * R);

  // Discrete divergence and cross-section flux checks.
  const double qref = std::max(std::abs(f.flow_rate), 1e-300);
  for (int j = 0; j < f.nz; ++j) {
    for (int i = 0; i < f.nl; ++i) {
      if (!lay.fluid(i, j)) continue;
      const double div = f.axial_flux(mesh, i, j + 1) - f.axial_flux(mesh, i, j) +
                         f.radial_flux(mesh, i + 1, j) - f.radial_flux(mesh, i, j);
      f.max_mass_imbalance = std::max(f.max_mass_imbalance, std::abs(div) / qref);
    }
  }
  for (int j = 0; j <= f.nz; ++j) {
    double q = 0;
    for (int i = 0; i < f.nl; ++i) q += f.axial_flux(mesh, i, j);
    f.flux_spread = std::max(f.flux_spread, std::abs(q - f.flow_rate) / qref);
  }

  const int nrn = f.nr + 1;
  f.psi.assign(static_cast<std::size_t>(nrn) * (f.nz + 1), 0.0);
  for (int j = 0; j <= f.nz; ++j) {
    for (int i = 0; i < f.nr; ++i) {
      f.psi[(i + 1) + nrn * j] = f.psi[i + nrn * j] + f.axial_flux(mesh, i, j) / (2 * kPi);
    }
  }
  return f;
}

WallForce wall_force(const FlowField& flow, const AxiMesh& mesh, const ScenarioConfig& cfg) {
  const Layout lay(mesh);
  const double eta = flow.viscosity;
  WallForce w;
  w.per_ring.assign(mesh.rings.size(), 0.0);
  auto credit = [&](int ring, double pressure, double viscous) {
    w.pressure_part += pressure;
    w.viscous_part += viscous;
    if (ring >= 0) w.per_ring[ring] += pressure + viscous;
  };

  // Robot end faces: the pressure of the adjacent fluid cell plus the
  // axial viscous flux towards the no-slip face.
  for (int j = 1; j < mesh.nz(); ++j) {
    for (int i = 0; i < lay.nl; ++i) {
      if (mesh.axial_face(i, j) != FaceKind::robot_plasma) continue;
      const double a = mesh.axial_area(i);
      if (lay.fluid(i, j - 1)) {
        const int ring = mesh.ring_of[mesh.index(i, j)];
        credit(ring, flow.pressure(i, j - 1) * a,
               eta * a * flow.axial_velocity(i, j - 1) / mesh.z.width(j - 1));
      } else {
        const int ring = mesh.ring_of[mesh.index(i, j - 1)];
        credit(ring, -flow.pressure(i, j) * a,
               eta * a * flow.axial_velocity(i, j + 1) / mesh.z.width(j));
      }
    }
  }

  // Shear from every axial-momentum volume whose radial side touches a
  // solid, or a no-slip face value on a robot edge.
  for (int j = 0; j <= lay.nz; ++j) {
    for (int i = 0; i < lay.nl; ++i) {
      if (lay.vz(i, j) < 0) continue;
      const double v = flow.axial_velocity(i, j);
      const auto vol = vz_volume(lay, i, j);
      for (const auto& s : vol.outer) {
        const double lateral = 2 * kPi * mesh.r.nodes[i + 1] * s.length * kLengthScale;
        const Sink kind = solid_kind(mesh, s.ni, s.nj);
        if (kind == Sink::wall) {
          w.vessel_wall_shear += eta * lateral * v / (mesh.r.nodes[i + 1] - mesh.r.center(i));
        } else if (kind == Sink::robot) {
          credit(mesh.ring_of[mesh.index(s.ni, s.nj)], 0,
                 eta * lateral * v / (mesh.r.nodes[i + 1] - mesh.r.center(i)));
        } else if (lay.vz(i + 1, j) < 0) {
          // Fluid corner cell beside a robot end face: the zero value
          // belongs to the robot surface.
          const int sj = lay.fluid(s.ni, j) ? j - 1 : j;
          const int ring = (sj >= 0 && sj < mesh.nz()) ? mesh.ring_of[mesh.index(i + 1, sj)] : -1;
          credit(ring, 0, eta * lateral * v / (mesh.r.center(i + 1) - mesh.r.center(i)));
        }
      }
    }
  }

  w.total = w.pressure_part + w.viscous_part;
  const int robots = static_cast<int>(mesh.rings.size()) * cfg.robot.per_ring;
  w.per_robot = robots > 0 ? w.total / robots : 0;
  w.coefficient = cfg.fluid.pressure_gradient > 0 ? w.total / cfg.fluid.pressure_gradient : 0;
  const double R = mesh.vessel_radius();
  w.momentum_balance =
      (flow.inlet_pressure - flow.outlet_pressure) * kPi * R * R - w.vessel_wall_shear;
  return w;
}

double poiseuille_l2_error(const FlowField& flow, const AxiMesh& mesh, const ScenarioConfig& cfg) {
  const int j = mesh.z.node_index(0.5 * mesh.length()) >= 0 ? mesh.z.node_index(0.5 * mesh.length())
                                                           : mesh.nz() / 2;
  const double R = mesh.vessel_radius();
  const double g = cfg.fluid.pressure_gradient / (4 * cfg.fluid.viscosity);
  double num = 0, den = 0;
  for (int i = 0; i < flow.nl; ++i) {
    const double rc = mesh.r.center(i);
    const double exact = g * (R * R - rc * rc);
    const double a = mesh.axial_area(i);
    num += a * std::pow(flow.axial_velocity(i, j) - exact, 2);
    den += a * exact * exact;
  }
  return den > 0 ? std::sqrt(num / den) : 0;
}

void write_flow_csv(const FlowField& flow, const AxiMesh& mesh, std::ostream& out) {
  out << "r_m,z_m,v_r_m_per_s,v_z_m_per_s,p_Pa,psi_m3_per_s\n";
  out.precision(9);
  const int nrn = flow.nr + 1;
  for (int j = 0; j < flow.nz; ++j) {
    for (int i = 0; i < flow.nl; ++i) {
      if (mesh.at(i, j) != Region::lumen) continue;
      const double vz = 0.5 * (flow.axial_velocity(i, j) + flow.axial_velocity(i, j + 1));
      const double vr = 0.5 * (flow.radial_velocity(i, j) + flow.radial_velocity(i + 1, j));
      const double psi = 0.25 * (flow.psi[i + nrn * j] + flow.psi[i + 1 + nrn * j] +
                                 flow.psi[i + nrn * (j + 1)] + flow.psi[i + 1 + nrn * (j + 1)]);
      out << mesh.r.center(i) << ',' << mesh.z.center(j) << ',' << vr << ',' << vz << ','
          << flow.pressure(i, j) << ',' << psi << '\n';
    }
  }
}

}  // namespace capow
