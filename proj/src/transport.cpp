// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#include "capow/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "capow/kernels.hpp"
#include "capow/kinetics.hpp"
#include "capow/linsolve.hpp"
#include "convection.hpp"

namespace capow {
namespace {

constexpr double kPi = std::numbers::pi;

using detail::face_coeff;

// Geometry and physics shared by assembly and the audit.
class Discretisation {
 public:
  Discretisation(const AxiMesh& mesh, const FlowField& flow, const CoreBoundary& core,
                 const ScenarioConfig& cfg, const std::vector<RingCondition>& cond)
      : mesh_(mesh), flow_(flow), core_(core), cfg_(cfg), cond_(cond) {
    h_ = core_hematocrit_value(cfg, core);
    const int n = mesh.cells();
    id_.assign(n, -1);
    for (int k = 0; k < n; ++k) {
      if (active(k)) {
        id_[k] = nc_;
        cell_of_.push_back(k);
        ++nc_;
      }
    }
    phi_.assign(n, 0.0);
    for (int j = 0; j < mesh.nz(); ++j) {
      for (int i = 0; i < mesh.i_wall; ++i) phi_[mesh.index(i, j)] = core.cell_fraction(mesh, i, j);
    }
    sites_.assign(n, 0.0);
    for (int j = 0; j < mesh.nz(); ++j) {
      for (int i = mesh.i_robot; i < mesh.i_wall; ++i) {
        if (mesh.at(i, j) == Region::robot) sites_[mesh.index(i, j)] = cell_site_density(mesh, cfg, i, j);
      }
    }
    build_saturation_grid();
  }

  const AxiMesh& mesh() const { return mesh_; }
  double hematocrit() const { return h_; }
  int nc() const { return nc_; }
  int ns() const { return ns_; }
  int n_sub() const { return n_sub_; }
  int id(int cell) const { return id_[cell]; }
  int cell_of(int unknown) const { return cell_of_[unknown]; }
  double phi(int cell) const { return phi_[cell]; }
  double sites(int cell) const { return sites_[cell]; }
  const std::vector<double>& sat_z() const { return sz_; }
  const std::vector<double>& sat_faces() const { return sf_; }
  double core_area(double z) const {
    const double r = core_.radius_at(mesh_, z);
    return kPi * r * r;
  }

  RingBc ring_kind(int ring) const { return cond_[ring].kind; }
  double ring_flux(int ring) const { return cond_[ring].flux; }

  bool active(int cell) const {
    switch (mesh_.region[cell]) {
      case Region::lumen:
      case Region::tissue: return true;
      case Region::robot: return cond_[mesh_.ring_of[cell]].kind == RingBc::volumetric;
    }
    return false;
  }

  // Effective free-oxygen diffusivity on one side of a face.
  double diffusivity(Region g, double core_fraction) const {
    switch (g) {
      case Region::lumen: {
        const double d = cfg_.oxygen.diffusivity;
        return d * (1 - core_fraction) + core_fraction * (1 - h_) * cfg_.core_diffusivity();
      }
      case Region::robot: return cfg_.robot_diffusivity();
      case Region::tissue: return cfg_.oxygen.diffusivity;
    }
    return 0;
  }

  /// Visit every face carrying oxygen. The visitor receives
  ///   pair(P, E, g, f)       between two unknown cells
  ///   inlet(P, g, f)         Dirichlet C_in upstream of P
  ///   outlet(P, f)           advective outflow from P
  ///   robot(RobotFace)       plasma face of a pumping ring
  template <class V>
  void for_each_face(V&& v) const {
    const auto& m = mesh_;
    const double h = h_;
    for (int j = 0; j <= m.nz(); ++j) {
      for (int i = 0; i < m.nr(); ++i) {
        const FaceKind kind = m.axial_face(i, j);
        const double area = m.axial_area(i);
        if (kind == FaceKind::inlet || kind == FaceKind::outlet) {
          const double f = flow_.axial_flux(m, i, j) - h * core_.axial_core_flux(flow_, i, j);
          const int cell = m.index(i, kind == FaceKind::inlet ? 0 : m.nz() - 1);
          if (kind == FaceKind::outlet) {
            v.outlet(cell, f);
            continue;
          }
          const double d = diffusivity(Region::lumen, core_.axial_face_fraction(m, i, j));
          v.inlet(cell, d * area / (0.5 * m.z.width(0)), f);
          continue;
        }
        if (j == 0 || j == m.nz()) continue;
        const int p = m.index(i, j - 1), e = m.index(i, j);
        const double dp = 0.5 * m.z.width(j - 1), de = 0.5 * m.z.width(j);
        double f = 0;
        if (kind == FaceKind::interior && m.region[p] == Region::lumen) {
          f = flow_.axial_flux(m, i, j) - h * core_.axial_core_flux(flow_, i, j);
        }
        visit_pair(v, p, e, area, dp, de, f, core_.axial_face_fraction(m, i, j), true);
      }
    }
    for (int j = 0; j < m.nz(); ++j) {
      for (int i = 1; i < m.nr(); ++i) {
        const FaceKind kind = m.radial_face(i, j);
        const int p = m.index(i - 1, j), e = m.index(i, j);
        const double area = m.radial_area(i, j);
        const double dp = m.r.nodes[i] - m.r.center(i - 1), de = m.r.center(i) - m.r.nodes[i];
        double f = 0;
        if (kind == FaceKind::interior && m.region[p] == Region::lumen) {
          f = flow_.radial_flux(m, i, j) - h * core_.radial_core_flux(flow_, i, j);
        }
        visit_pair(v, p, e, area, dp, de, f, core_.radial_face_fraction(m, i, j), false);
      }
    }
  }

 private:
  template <class V>
  void visit_pair(V& v, int p, int e, double area, double dp, double de, double f,
                  double phi_f, bool axial) const {
    const Region gp = mesh_.region[p], ge = mesh_.region[e];
    if ((gp == Region::robot && ge == Region::tissue) || (gp == Region::tissue && ge == Region::robot)) {
      return;  // robots never exchange oxygen with the tissue directly
    }
    // Only the curved plasma-facing surface is active; the flat ring ends are walls.
    if (axial && (gp == Region::robot) != (ge == Region::robot)) return;
    const bool ap = active(p), ae = active(e);
    if (ap && ae) {
      const double rp = dp / diffusivity(gp, phi_f), re = de / diffusivity(ge, phi_f);
      v.pair(p, e, area / (rp + re), f);
      return;
    }
    if (ap == ae) return;
    // One side is a pumping robot.
    const int fluid = ap ? p : e, robot = ap ? e : p;
    if (mesh_.region[fluid] != Region::lumen) return;
    RobotFace rf;
    rf.cell = fluid;
    rf.ring = mesh_.ring_of[robot];
    rf.area = area;
    rf.distance = ap ? dp : de;
    rf.diffusivity = diffusivity(Region::lumen, phi_f);
    v.robot(rf);
  }

  void build_saturation_grid() {
    const int nz = mesh_.nz();
    n_sub_ = std::max(1, (cfg_.mesh.saturation_points + nz - 1) / nz);
    ns_ = n_sub_ * nz;
    sf_.reserve(ns_ + 1);
    for (int j = 0; j < nz; ++j) {
      for (int q = 0; q < n_sub_; ++q) {
        sf_.push_back(mesh_.z.nodes[j] + mesh_.z.width(j) * q / n_sub_);
      }
    }
    sf_.push_back(mesh_.z.nodes.back());
    for (int k = 0; k < ns_; ++k) sz_.push_back(0.5 * (sf_[k] + sf_[k + 1]));
  }

  const AxiMesh& mesh_;
  const FlowField& flow_;
  const CoreBoundary& core_;
  const ScenarioConfig& cfg_;
  const std::vector<RingCondition>& cond_;
  double h_ = 0;
  int nc_ = 0, ns_ = 0, n_sub_ = 1;
  std::vector<int> id_, cell_of_;
  std::vector<double> phi_, sites_;
  std::vector<double> sz_, sf_;  // saturation subcell centres and faces
};

double equilibrium_slope(double s, const ScenarioConfig& cfg) {
  s = clamp_saturation(s);
  return equilibrium_concentration(s, cfg) / (cfg.rbc.hill_n * s * (1 - s));
}

class CoupledSolver {
 public:
  CoupledSolver(const Discretisation& disc, const ScenarioConfig& cfg, double core_flow)
      : disc_(disc), cfg_(cfg), c_ref_(cfg.oxygen.inlet_concentration), core_flow_(core_flow) {
    const auto& m = disc.mesh();
    s_in_ = hill_equilibrium(partial_pressure_ratio(cfg.oxygen.inlet_concentration, cfg),
                             cfg.rbc.hill_n);
    // Core cells per axial column, for the release coupling.
    col_ptr_.assign(m.nz() + 1, 0);
    for (int j = 0; j < m.nz(); ++j) {
      for (int i = 0; i < m.i_wall; ++i) {
        const int cell = m.index(i, j);
        if (disc.phi(cell) > 0 && disc.id(cell) >= 0) col_cells_.push_back(cell);
      }
      col_ptr_[j + 1] = static_cast<int>(col_cells_.size());
    }
    assemble_fixed();
  }

  double inlet_saturation() const { return s_in_; }

  TransportSolution run(const std::vector<RingCondition>& cond, const TransportSolution* start) {
    const int nc = disc_.nc(), ns = disc_.ns();
    std::vector<double> c(nc), s(ns, s_in_);
    for (int u = 0; u < nc; ++u) {
      const int cell = disc_.cell_of(u);
      c[u] = start && !start->field.c.empty() ? start->field.c[cell] : c_ref_;
    }
    if (start && static_cast<int>(start->saturation.s.size()) == ns) s = start->saturation.s;

    TransportSolution sol;
    sol.conditions = cond;
    sol.core_hematocrit = disc_.hematocrit();
    auto& cs = sol.coupling;
    cs.relaxation = cfg_.solver.relaxation;
    SparseLu lu;
    std::vector<double> c_new(nc), s_new(ns);
    bool pattern = false;
    for (int it = 1; it <= cfg_.solver.max_iterations; ++it) {
      Triplets trip = fixed_;
      Eigen::VectorXd rhs = fixed_rhs_;
      add_sinks(c, trip);
      add_release(c, s, trip, rhs);
      SparseMatrix a(nc + ns, nc + ns);
      a.setFromTriplets(trip.begin(), trip.end());
      lu.factorize(a, pattern);
      pattern = true;
      const Eigen::VectorXd x = lu.solve(rhs);
      for (int u = 0; u < nc; ++u) c_new[u] = x[u] * c_ref_;
      for (int k = 0; k < ns; ++k) s_new[k] = clamp_saturation(x[nc + k]);
      cs.iterations = it;
      cs.change_c = kernels::max_abs_diff(c_new.data(), c.data(), nc) / c_ref_;
      cs.change_s = kernels::max_abs_diff(s_new.data(), s.data(), ns);
      if (cs.change_c < cfg_.solver.tolerance && cs.change_s < cfg_.solver.tolerance) {
        cs.converged = true;
        c = c_new;
        s = s_new;
        break;
      }
      kernels::relax(c.data(), c_new.data(), cs.relaxation, nc);
      kernels::relax(s.data(), s_new.data(), cs.relaxation, ns);
      for (auto& v : s) v = clamp_saturation(v);
    }
    finish(c, s, sol);
    return sol;
  }

 private:
  void assemble_fixed() {
    const int nc = disc_.nc(), ns = disc_.ns();
    fixed_rhs_ = Eigen::VectorXd::Zero(nc + ns);
    struct Visitor {
      CoupledSolver& self;
      void pair(int p, int e, double g, double f) {
        const auto fc = face_coeff(g, f);
        const int up = self.disc_.id(p), ue = self.disc_.id(e);
        const double cr = self.c_ref_;
        self.fixed_.emplace_back(up, up, fc.a_pe * cr);
        self.fixed_.emplace_back(up, ue, -fc.a_ep * cr);
        self.fixed_.emplace_back(ue, up, -fc.a_pe * cr);
        self.fixed_.emplace_back(ue, ue, fc.a_ep * cr);
      }
      void inlet(int p, double g, double f) {
        const auto fc = face_coeff(g, f);
        const int up = self.disc_.id(p);
        self.fixed_.emplace_back(up, up, fc.a_ep * self.c_ref_);
        self.fixed_rhs_[up] += fc.a_pe * self.cfg_.oxygen.inlet_concentration;
      }
      void outlet(int p, double f) {
        const int up = self.disc_.id(p);
        self.fixed_.emplace_back(up, up, f * self.c_ref_);
      }
      void robot(const RobotFace& rf) {
        const int up = self.disc_.id(rf.cell);
        switch (self.disc_.ring_kind(rf.ring)) {
          case RingBc::absorb:
            self.fixed_.emplace_back(up, up, rf.diffusivity * rf.area / rf.distance * self.c_ref_);
            break;
          case RingBc::flux: self.fixed_rhs_[up] -= self.disc_.ring_flux(rf.ring) * rf.area; break;
          case RingBc::inert:
          case RingBc::volumetric: break;
        }
      }
    };
    disc_.for_each_face(Visitor{*this});

    // Cell-bound oxygen along the core: h C_max (Q_core S - D_heme A_core dS/dz).
    const double hb = disc_.hematocrit() * cfg_.rbc.c_max;
    const double q = core_flow_;
    const auto& zf = disc_.sat_faces();
    const auto& zc = disc_.sat_z();
    const double dh = cfg_.rbc.heme_diffusivity;
    for (int k = 1; k < ns; ++k) {
      const auto fc = face_coeff(dh * disc_.core_area(zf[k]) / (zc[k] - zc[k - 1]), q);
      const int up = nc + k - 1, ue = nc + k;
      fixed_.emplace_back(up, up, hb * fc.a_pe);
      fixed_.emplace_back(up, ue, -hb * fc.a_ep);
      fixed_.emplace_back(ue, up, -hb * fc.a_pe);
      fixed_.emplace_back(ue, ue, hb * fc.a_ep);
    }
    {
      const auto fc = face_coeff(dh * disc_.core_area(zf[0]) / (zc[0] - zf[0]), q);
      fixed_.emplace_back(nc, nc, hb * fc.a_ep);
      fixed_rhs_[nc] += hb * fc.a_pe * s_in_;
    }
    fixed_.emplace_back(nc + ns - 1, nc + ns - 1, hb * q);
  }

  void add_sinks(const std::vector<double>& c, Triplets& trip) {
    const auto& m = disc_.mesh();
    const int nc = disc_.nc();
    tissue_coef_.resize(nc);
    robot_coef_.resize(nc);
    // 1 / (K + C_prev) for both saturating sinks.
    kernels::saturating_coefficient(c.data(), 1.0, cfg_.tissue.k_half, tissue_coef_.data(), nc);
    kernels::saturating_coefficient(c.data(), 1.0, cfg_.robot.k_half, robot_coef_.data(), nc);
    const double qt = 6 * cfg_.tissue.max_power / cfg_.tissue.reaction_energy;
    const double rate = 6 * cfg_.robot.site_rate;
    for (int u = 0; u < nc; ++u) {
      const int cell = disc_.cell_of(u);
      const int i = cell % m.nr(), j = cell / m.nr();
      const double vol = m.volume(i, j);
      double coef = 0;
      if (m.region[cell] == Region::tissue) {
        coef = qt * tissue_coef_[u];
      } else if (m.region[cell] == Region::robot) {
        coef = rate * disc_.sites(cell) * robot_coef_[u];
      } else {
        continue;
      }
      trip.emplace_back(u, u, vol * coef * c_ref_);
    }
  }

  void add_release(const std::vector<double>& c, const std::vector<double>& s, Triplets& trip,
                   Eigen::VectorXd& rhs) {
    const auto& m = disc_.mesh();
    const int nc = disc_.nc(), nsub = disc_.n_sub();
    const double h = disc_.hematocrit();
    for (int j = 0; j < m.nz(); ++j) {
      for (int q = 0; q < nsub; ++q) {
        const int k = j * nsub + q;
        const double s0 = s[k];
        const double c_eq = equilibrium_concentration(s0, cfg_);
        const double dc_eq = equilibrium_slope(s0, cfg_);
        for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
          const int cell = col_cells_[p];
          const int u = disc_.id(cell);
          const int i = cell % m.nr();
          const double w = disc_.phi(cell) * m.volume(i, j) / nsub;
          const double kappa = release_coefficient(c[u], s0, h, cfg_);
          const double wk = w * kappa;
          const double lin = wk * (c_eq - dc_eq * s0);
          trip.emplace_back(u, u, wk * c_ref_);
          trip.emplace_back(u, nc + k, -wk * dc_eq);
          rhs[u] += lin;
          trip.emplace_back(nc + k, nc + k, wk * dc_eq);
          trip.emplace_back(nc + k, u, -wk * c_ref_);
          rhs[nc + k] -= lin;
        }
      }
    }
  }

  void finish(const std::vector<double>& c, const std::vector<double>& s, TransportSolution& sol) {
    const auto& m = disc_.mesh();
    const int n = m.cells(), nsub = disc_.n_sub();
    auto& fld = sol.field;
    fld.c.assign(n, 0.0);
    fld.release.assign(n, 0.0);
    fld.sink.assign(n, 0.0);
    for (int u = 0; u < disc_.nc(); ++u) fld.c[disc_.cell_of(u)] = c[u];

    const double h = disc_.hematocrit();
    auto& sat = sol.saturation;
    sat.z = disc_.sat_z();
    sat.s = s;
    sat.inlet = s_in_;
    sat.s_eq.assign(s.size(), 0.0);
    sat.rate.assign(s.size(), 0.0);
    // Core-averaged plasma concentration per column.
    std::vector<double> col_c(m.nz(), 0.0), col_vol(m.nz(), 0.0);
    for (int j = 0; j < m.nz(); ++j) {
      double ca = 0;
      for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
        const int cell = col_cells_[p];
        const double w = disc_.phi(cell) * m.volume(cell % m.nr(), j);
        col_vol[j] += w;
        ca += w * fld.c[cell];
      }
      col_c[j] = col_vol[j] > 0 ? ca / col_vol[j] : 0.0;
    }
    auto c_at = [&](double z) {
      const int j = m.z.locate(z);
      int j0 = j, j1 = j;
      if (z < m.z.center(j)) {
        j0 = std::max(j - 1, 0);
      } else {
        j1 = std::min(j + 1, m.nz() - 1);
      }
      if (j0 == j1) return col_c[j];
      const double t = (z - m.z.center(j0)) / (m.z.center(j1) - m.z.center(j0));
      return col_c[j0] + t * (col_c[j1] - col_c[j0]);
    };
    for (int j = 0; j < m.nz(); ++j) {
      const double vol = col_vol[j];
      for (int q = 0; q < nsub; ++q) {
        const int k = j * nsub + q;
        sat.s_eq[k] = hill_equilibrium(partial_pressure_ratio(c_at(sat.z[k]), cfg_), cfg_.rbc.hill_n);
        double rate = 0;
        for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
          const int cell = col_cells_[p];
          const double w = disc_.phi(cell) * m.volume(cell % m.nr(), j);
          const double g = release_coefficient(fld.c[cell], s[k], h, cfg_) *
                           (equilibrium_concentration(s[k], cfg_) - fld.c[cell]);
          fld.release[cell] += g * disc_.phi(cell) / nsub;
          rate += w * g;
        }
        // Release density per core volume equals -h C_max dS/dt.
        sat.rate[k] = vol > 0 ? -rate / (vol * h * cfg_.rbc.c_max) : 0.0;
      }
    }

    const double qt = 6 * cfg_.tissue.max_power / cfg_.tissue.reaction_energy;
    const double rate = 6 * cfg_.robot.site_rate;
    fld.ring_uptake.assign(m.rings.size(), 0.0);
    for (int cell = 0; cell < n; ++cell) {
      if (disc_.id(cell) < 0) continue;
      const int i = cell % m.nr(), j = cell / m.nr();
      const double cc = std::max(fld.c[cell], 0.0);
      if (m.region[cell] == Region::tissue) {
        fld.sink[cell] = qt * cc / (cfg_.tissue.k_half + cc);
        fld.tissue_uptake += fld.sink[cell] * m.volume(i, j);
      } else if (m.region[cell] == Region::robot) {
        fld.sink[cell] = rate * disc_.sites(cell) * cc / (cfg_.robot.k_half + cc);
        fld.ring_uptake[m.ring_of[cell]] += fld.sink[cell] * m.volume(i, j);
      }
    }
    struct FaceCollector {
      const Discretisation& d;
      ConcentrationField& f;
      void pair(int, int, double, double) {}
      void inlet(int, double, double) {}
      void outlet(int, double) {}
      void robot(RobotFace rf) {
        const double cp = f.c[rf.cell];
        switch (d.ring_kind(rf.ring)) {
          case RingBc::absorb:
            rf.concentration = 0;
            rf.uptake = rf.diffusivity * rf.area * cp / rf.distance;
            break;
          case RingBc::flux: {
            const double phi = d.ring_flux(rf.ring);
            rf.uptake = phi * rf.area;
            rf.concentration = cp - phi * rf.distance / rf.diffusivity;
            break;
          }
          case RingBc::inert:
          case RingBc::volumetric:
            rf.uptake = 0;
            rf.concentration = cp;
            break;
        }
        f.ring_uptake[rf.ring] += rf.uptake;
        f.faces.push_back(rf);
      }
    };
    disc_.for_each_face(FaceCollector{disc_, fld});
    fld.robot_uptake = 0;
    for (double u : fld.ring_uptake) fld.robot_uptake += u;
  }

 private:
  const Discretisation& disc_;
  const ScenarioConfig& cfg_;
  double c_ref_;
  double core_flow_;
  double s_in_ = 0;
  Triplets fixed_;
  Eigen::VectorXd fixed_rhs_;
  std::vector<int> col_ptr_, col_cells_;
  std::vector<double> tissue_coef_, robot_coef_;
};

}  // namespace

std::vector<RingCondition> ring_conditions(const ScenarioConfig& cfg) {
  std::vector<RingCondition> out(cfg.robot.rings);
  for (int q = 0; q < cfg.robot.rings; ++q) {
    auto& c = out[q];
    if (!cfg.robot.pumps) {
      c.kind = RingBc::volumetric;
      continue;
    }
    switch (cfg.robot.pump_mode) {
      case PumpMode::full_absorb: c.kind = RingBc::absorb; break;
      case PumpMode::uniform_flux:
        c.kind = RingBc::flux;
        c.flux = cfg.robot.uniform_flux;
        break;
      case PumpMode::duty_cycle: {
        const bool odd = (q % 2) == 0;  // ring 1 is index 0
        const bool on = cfg.robot.duty_phase == DutyPhase::odd_active ? odd : !odd;
        c.kind = on ? RingBc::absorb : RingBc::inert;
        break;
      }
    }
  }
  return out;
}

double shell_thickness(const ScenarioConfig& cfg) {
  const double f = cfg.robot.shell_fraction;
  if (f <= 0 || f >= 1) return cfg.robot.size * (f >= 1 ? 1 : 0);
  const double R = cfg.geometry.vessel_radius;
  const double ri = R - cfg.robot.size;
  return std::sqrt(ri * ri + f * (R * R - ri * ri)) - ri;
}

double cell_site_density(const AxiMesh& mesh, const ScenarioConfig& cfg, int i, int j) {
  if (mesh.at(i, j) != Region::robot) return 0;
  const double nd = cfg.robot.site_density;
  const double f = cfg.robot.shell_fraction;
  if (f <= 0 || f >= 1) return nd;
  const double ri = cfg.geometry.vessel_radius - cfg.robot.size;
  const double ro = ri + shell_thickness(cfg);
  const double r0 = mesh.r.nodes[i], r1 = mesh.r.nodes[i + 1];
  const double a = std::min(r1, ro), b = std::max(r0, ri);
  const double overlap = a > b ? (a * a - b * b) / (r1 * r1 - r0 * r0) : 0.0;
  return nd / f * overlap;
}

TransportSolution solve_coupled(const AxiMesh& mesh, const FlowField& flow,
                                const CoreBoundary& core, const ScenarioConfig& cfg,
                                const std::vector<RingCondition>& conditions,
                                const TransportSolution* start) {
  if (conditions.size() != mesh.rings.size()) {
    throw SolverError("solve_coupled: one ring condition per ring required");
  }
  for (const auto& c : conditions) {
    if (c.kind == RingBc::flux && !(c.flux >= 0)) {
      throw SolverError("solve_coupled: uniform pump flux must be non-negative");
    }
  }
  const Discretisation disc(mesh, flow, core, cfg, conditions);
  CoupledSolver solver(disc, cfg, core.core_flow());
  auto sol = solver.run(conditions, start);
  sol.balance = species_balance_audit(sol, mesh, flow, core, cfg);
  return sol;
}

BalanceReport species_balance_audit(const TransportSolution& sol, const AxiMesh& mesh,
                                    const FlowField& flow, const CoreBoundary& core,
                                    const ScenarioConfig& cfg) {
  const Discretisation disc(mesh, flow, core, cfg, sol.conditions);
  BalanceReport b;
  const auto& c = sol.field.c;
  const double c_in = cfg.oxygen.inlet_concentration;
  struct Visitor {
    const ScenarioConfig& cfg;
    const std::vector<double>& c;
    double c_in;
    const Discretisation& d;
    BalanceReport& b;
    void pair(int, int, double, double) {}
    void inlet(int p, double g, double f) {
      const auto fc = face_coeff(g, f);
      b.inlet_plasma += fc.a_pe * c_in - fc.a_ep * c[p];
    }
    void outlet(int p, double f) { b.outlet_plasma += f * c[p]; }
    void robot(const RobotFace& rf) {
      switch (d.ring_kind(rf.ring)) {
        case RingBc::absorb: b.robot_uptake += rf.diffusivity * rf.area * c[rf.cell] / rf.distance; break;
        case RingBc::flux: b.robot_uptake += d.ring_flux(rf.ring) * rf.area; break;
        default: break;
      }
    }
  };
  disc.for_each_face(Visitor{cfg, c, c_in, disc, b});

  const double qt = 6 * cfg.tissue.max_power / cfg.tissue.reaction_energy;
  const double rate = 6 * cfg.robot.site_rate;
  for (int j = 0; j < mesh.nz(); ++j) {
    for (int i = 0; i < mesh.nr(); ++i) {
      const int cell = mesh.index(i, j);
      if (disc.id(cell) < 0) continue;
      const double cc = std::max(c[cell], 0.0);
      if (mesh.region[cell] == Region::tissue) {
        b.tissue_uptake += mesh.volume(i, j) * qt * cc / (cfg.tissue.k_half + cc);
      } else if (mesh.region[cell] == Region::robot) {
        b.robot_uptake += mesh.volume(i, j) * rate * disc.sites(cell) * cc / (cfg.robot.k_half + cc);
      }
    }
  }

  const auto& s = sol.saturation.s;
  if (!s.empty()) {
    const double hb = disc.hematocrit() * cfg.rbc.c_max;
    const double q = core.core_flow();
    const auto& zf = disc.sat_faces();
    const auto& zc = disc.sat_z();
    const auto fc = face_coeff(cfg.rbc.heme_diffusivity * disc.core_area(zf[0]) / (zc[0] - zf[0]), q);
    b.inlet_cells = hb * (fc.a_pe * sol.saturation.inlet - fc.a_ep * s.front());
    b.outlet_cells = hb * q * s.back();
  }
  const double in = b.inlet_plasma + b.inlet_cells;
  b.residual = in - b.outlet_plasma - b.outlet_cells - b.robot_uptake - b.tissue_uptake;
  b.relative_residual = in != 0 ? b.residual / in : 0.0;
  return b;
}

double concentration_at(const TransportSolution& sol, const AxiMesh& mesh, double r, int j) {
  const int nr = mesh.nr();
  if (r <= mesh.r.center(0)) return sol.field.c[mesh.index(0, j)];
  if (r >= mesh.r.center(nr - 1)) return sol.field.c[mesh.index(nr - 1, j)];
  int i = mesh.r.locate(r);
  if (r < mesh.r.center(i)) --i;
  const double r0 = mesh.r.center(i), r1 = mesh.r.center(i + 1);
  const double t = (r - r0) / (r1 - r0);
  return (1 - t) * sol.field.c[mesh.index(i, j)] + t * sol.field.c[mesh.index(i + 1, j)];
}

void write_concentration_csv(const TransportSolution& sol, const AxiMesh& mesh, std::ostream& out) {
  static const char* names[] = {"lumen", "robot", "tissue"};
  out << "r_m,z_m,C_molecule_per_m3,region,release_molecule_per_m3_s,sink_molecule_per_m3_s\n";
  out.precision(9);
  for (int j = 0; j < mesh.nz(); ++j) {
    for (int i = 0; i < mesh.nr(); ++i) {
      const int k = mesh.index(i, j);
      out << mesh.r.center(i) << ',' << mesh.z.center(j) << ',' << sol.field.c[k] << ','
          << names[static_cast<int>(mesh.region[k])] << ',' << sol.field.release[k] << ','
          << sol.field.sink[k] << '\n';
    }
  }
}

void write_saturation_csv(const TransportSolution& sol, std::ostream& out) {
  const auto& s = sol.saturation;
  out << "z_m,S,S_eq,S_minus_S_eq,dS_dt_per_s\n";
  out.precision(9);
  for (std::size_t k = 0; k < s.s.size(); ++k) {
    out << s.z[k] << ',' << s.s[k] << ',' << s.s_eq[k] << ',' << s.s[k] - s.s_eq[k] << ','
        << s.rate[k] << '\n';
  }
}

void write_radial_section_csv(const TransportSolution& sol, const AxiMesh& mesh, double z,
                              std::ostream& out) {
  const int j = mesh.z.locate(z);
  out << "r_m,C_molecule_per_m3,region\n";
  out.precision(9);
  static const char* names[] = {"lumen", "robot", "tissue"};
  for (int i = 0; i < mesh.nr(); ++i) {
    const int k = mesh.index(i, j);
    out << mesh.r.center(i) << ',' << sol.field.c[k] << ','
        << names[static_cast<int>(mesh.region[k])] << '\n';
  }
}

}  // namespace capow
