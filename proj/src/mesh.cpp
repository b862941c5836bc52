// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#include "capow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

namespace capow {
namespace {

struct Spacings {
  double face, normal, lumen, axial, wall, tissue, growth;
};

Spacings spacings_for(const ScenarioConfig& cfg) {
  const auto& m = cfg.mesh;
  const double k = m.refine;
  Spacings s{};
  s.face = m.face_spacing > 0 ? m.face_spacing : (cfg.robot.rings == 1 ? 0.01e-6 : 0.1e-6);
  s.normal = m.normal_spacing > 0 ? m.normal_spacing : std::min(0.025e-6, s.face);
  s.face /= k;
  s.normal /= k;
  s.lumen = m.lumen_spacing / k;
  s.axial = m.axial_spacing / k;
  s.wall = m.wall_spacing / k;
  s.tissue = m.tissue_spacing / k;
  s.growth = std::pow(m.growth, 1.0 / k);
  return s;
}

void append_segment(std::vector<double>& nodes, double a, double b, double h_a, double h_b,
                    double h_max, double growth) {
  auto seg = graded_nodes(a, b, h_a, h_b, h_max, growth);
  if (nodes.empty()) {
    nodes = std::move(seg);
  } else {
    nodes.insert(nodes.end(), seg.begin() + 1, seg.end());
  }
}

}  // namespace

int Grid1D::node_index(double x) const {
  const double tol = 1e-9 * (nodes.back() - nodes.front());
  const auto it = std::lower_bound(nodes.begin(), nodes.end(), x - tol);
  if (it == nodes.end() || std::abs(*it - x) > tol) return -1;
  return static_cast<int>(it - nodes.begin());
}

int Grid1D::locate(double x) const {
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  const int i = static_cast<int>(it - nodes.begin()) - 1;
  return std::clamp(i, 0, cells() - 1);
}

std::vector<double> graded_nodes(double a, double b, double h_a, double h_b, double h_max,
                                 double growth) {
  if (!(b > a)) throw MeshError("graded_nodes: empty interval");
  h_a = std::min(h_a, h_max);
  h_b = std::min(h_b, h_max);
  const double c = growth - 1;
  auto h = [&](double x) { return std::min({h_max, h_a + c * (x - a), h_b + c * (b - x)}); };

  // Fine sampling of the node-density integral I(x) = int dx / h(x).
  std::vector<double> xs{a}, cum{0.0};
  double x = a;
  while (x < b) {
    const double step = std::min(h(x) / 16, b - x);
    const double xn = (b - x - step < 1e-6 * step) ? b : x + step;
    cum.push_back(cum.back() + 0.5 * (xn - x) * (1 / h(x) + 1 / h(xn)));
    xs.push_back(xn);
    x = xn;
  }
  const double total = cum.back();
  const int n = std::max(1, static_cast<int>(std::ceil(total * 1.001)));
  std::vector<double> nodes(n + 1);
  nodes.front() = a;
  nodes.back() = b;
  std::size_t s = 0;
  for (int k = 1; k < n; ++k) {
    const double target = total * k / n;
    while (cum[s + 1] < target) ++s;
    const double t = (target - cum[s]) / (cum[s + 1] - cum[s]);
    nodes[k] = xs[s] + t * (xs[s + 1] - xs[s]);
  }
  return nodes;
}

std::vector<double> ring_starts(const ScenarioConfig& cfg) {
  const auto& rb = cfg.robot;
  if (!rb.ring_starts.empty()) {
    auto s = rb.ring_starts;
    std::sort(s.begin(), s.end());
    return s;
  }
  std::vector<double> s;
  const double z0 = 0.5 * (cfg.geometry.vessel_length - rb.rings * rb.size);
  for (int k = 0; k < rb.rings; ++k) s.push_back(z0 + k * rb.size);
  return s;
}

double AxiMesh::volume(int i, int j) const {
  const double r0 = r.nodes[i], r1 = r.nodes[i + 1];
  return std::numbers::pi * (r1 * r1 - r0 * r0) * z.width(j);
}

double AxiMesh::axial_area(int i) const {
  const double r0 = r.nodes[i], r1 = r.nodes[i + 1];
  return std::numbers::pi * (r1 * r1 - r0 * r0);
}

double AxiMesh::radial_area(int i, int j) const {
  return 2 * std::numbers::pi * r.nodes[i] * z.width(j);
}

FaceKind AxiMesh::axial_face(int i, int j) const {
  if (j == 0 || j == nz()) {
    const Region g = at(i, j == 0 ? 0 : nz() - 1);
    if (g == Region::lumen) return j == 0 ? FaceKind::inlet : FaceKind::outlet;
    return g == Region::tissue ? FaceKind::tissue_end : FaceKind::robot_end;
  }
  const Region a = at(i, j - 1), b = at(i, j);
  if (a == b) return a == Region::robot ? FaceKind::robot_robot : FaceKind::interior;
  if (a == Region::lumen || b == Region::lumen) return FaceKind::robot_plasma;
  return FaceKind::robot_tissue;
}

FaceKind AxiMesh::radial_face(int i, int j) const {
  if (i == 0) return FaceKind::axis;
  if (i == nr()) return FaceKind::tissue_outer;
  const Region a = at(i - 1, j), b = at(i, j);
  if (a == b) return a == Region::robot ? FaceKind::robot_robot : FaceKind::interior;
  if (a == Region::lumen && b == Region::robot) return FaceKind::robot_plasma;
  if (a == Region::lumen && b == Region::tissue) return FaceKind::vessel_wall;
  return FaceKind::robot_tissue;
}

AxiMesh build_mesh(const ScenarioConfig& cfg) {
  const auto sp = spacings_for(cfg);
  const double R = cfg.geometry.vessel_radius;
  const double Rt = cfg.geometry.tissue_radius;
  const double L = cfg.geometry.vessel_length;
  const double size = cfg.robot.size;
  const bool robots = cfg.robot.rings > 0;

  AxiMesh mesh;
  if (robots) {
    append_segment(mesh.r.nodes, 0, R - size, sp.lumen, sp.normal, sp.lumen, sp.growth);
    const double f = cfg.robot.shell_fraction;
    if (!cfg.robot.pumps && f > 0 && f < 1) {
      // Resolve the reactive shell with a node on its inner edge.
      const double ri = R - size;
      const double t = std::sqrt(ri * ri + f * (R * R - ri * ri)) - ri;
      const double h = std::min(sp.normal, t / 3);
      append_segment(mesh.r.nodes, ri, ri + t, h, h, h, sp.growth);
      append_segment(mesh.r.nodes, ri + t, R, h, sp.normal, sp.face, sp.growth);
    } else {
      append_segment(mesh.r.nodes, R - size, R, sp.normal, sp.normal, sp.face, sp.growth);
    }
  } else {
    append_segment(mesh.r.nodes, 0, R, sp.lumen, sp.wall, sp.lumen, sp.growth);
  }
  append_segment(mesh.r.nodes, R, Rt, sp.wall, sp.tissue, sp.tissue, sp.growth);

  const auto starts = ring_starts(cfg);
  auto in_robot = [&](double zm) {
    for (double s : starts) {
      if (zm > s && zm < s + size) return true;
    }
    return false;
  };
  std::vector<double> breaks{0.0, L};
  for (double s : starts) {
    breaks.push_back(s);
    breaks.push_back(s + size);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [&](double a, double b) { return std::abs(a - b) < 1e-9 * L; }),
               breaks.end());
  const double probe = 1e-6 * size;
  auto end_spacing = [&](double x) {
    const bool lo = x > 0 && in_robot(x - probe);
    const bool hi = x < L && in_robot(x + probe);
    if (lo && hi) return sp.face;
    if (lo || hi) return sp.normal;
    return sp.axial;
  };
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double a = breaks[k], b = breaks[k + 1];
    const double h_max = in_robot(0.5 * (a + b)) ? sp.face : sp.axial;
    append_segment(mesh.z.nodes, a, b, end_spacing(a), end_spacing(b), h_max, sp.growth);
  }

  const long long cells = static_cast<long long>(mesh.r.cells()) * mesh.z.cells();
  if (cells > cfg.mesh.max_cells) {
    throw MeshError("mesh needs " + std::to_string(cells) + " cells to meet the face spacing, over " +
                    "the mesh.max_cells budget of " + std::to_string(cfg.mesh.max_cells));
  }

  mesh.i_wall = mesh.r.node_index(R);
  mesh.i_robot = robots ? mesh.r.node_index(R - size) : mesh.i_wall;
  for (double s : starts) {
    RingSpan span;
    span.z_begin = s;
    span.z_end = s + size;
    span.j_begin = mesh.z.node_index(s);
    span.j_end = mesh.z.node_index(s + size);
    mesh.rings.push_back(span);
  }

  const int nr = mesh.nr(), nz = mesh.nz();
  mesh.region.assign(static_cast<std::size_t>(nr) * nz, Region::lumen);
  mesh.ring_of.assign(mesh.region.size(), -1);
  for (int j = 0; j < nz; ++j) {
    for (int i = mesh.i_wall; i < nr; ++i) mesh.region[mesh.index(i, j)] = Region::tissue;
  }
  for (int q = 0; q < static_cast<int>(mesh.rings.size()); ++q) {
    const auto& span = mesh.rings[q];
    for (int j = span.j_begin; j < span.j_end; ++j) {
      for (int i = mesh.i_robot; i < mesh.i_wall; ++i) {
        mesh.region[mesh.index(i, j)] = Region::robot;
        mesh.ring_of[mesh.index(i, j)] = q;
      }
    }
  }
  return mesh;
}

double max_robot_face_spacing(const AxiMesh& mesh) {
  double worst = 0;
  for (int j = 0; j <= mesh.nz(); ++j) {
    for (int i = 0; i < mesh.nr(); ++i) {
      if (mesh.axial_face(i, j) == FaceKind::robot_plasma) worst = std::max(worst, mesh.r.width(i));
    }
  }
  for (int j = 0; j < mesh.nz(); ++j) {
    for (int i = 1; i < mesh.nr(); ++i) {
      if (mesh.radial_face(i, j) == FaceKind::robot_plasma) worst = std::max(worst, mesh.z.width(j));
    }
  }
  return worst;
}

void write_mesh_csv(const AxiMesh& mesh, std::ostream& out) {
  out << "i,j,r_center_m,z_center_m,dr_m,dz_m,region,ring\n";
  out.precision(9);
  static const char* names[] = {"lumen", "robot", "tissue"};
  for (int j = 0; j < mesh.nz(); ++j) {
    for (int i = 0; i < mesh.nr(); ++i) {
      const int k = mesh.index(i, j);
      out << i << ',' << j << ',' << mesh.r.center(i) << ',' << mesh.z.center(j) << ','
          << mesh.r.width(i) << ',' << mesh.z.width(j) << ','
          << names[static_cast<int>(mesh.region[k])] << ',' << mesh.ring_of[k] << '\n';
    }
  }
}

}  // namespace capow
