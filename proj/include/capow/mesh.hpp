// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "capow/scenario.hpp"

namespace capow {

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor-product axis: nodes[0] < nodes[1] < ... ; cell i spans
/// [nodes[i], nodes[i+1]].
struct Grid1D {
  std::vector<double> nodes;

  int cells() const { return static_cast<int>(nodes.size()) - 1; }
  double center(int i) const { return 0.5 * (nodes[i] + nodes[i + 1]); }
  double width(int i) const { return nodes[i + 1] - nodes[i]; }
  /// Index of the node equal to x (within a relative 1e-9 of the span).
  int node_index(double x) const;
  /// Cell containing x, clamped to the grid.
  int locate(double x) const;
};

/// Graded nodes on [a, b]: spacing grows from h_a at a and h_b at b by the
/// growth factor and is capped at h_max.
std::vector<double> graded_nodes(double a, double b, double h_a, double h_b, double h_max,
                                 double growth);

enum class Region : std::uint8_t { lumen, robot, tissue };

/// Classification of a cell face for boundary-condition assembly.
enum class FaceKind : std::uint8_t {
  interior,      // both sides in the same physical medium
  inlet,
  outlet,
  axis,
  vessel_wall,   // lumen | tissue
  robot_plasma,  // lumen | robot
  robot_tissue,  // robot | tissue
  robot_robot,   // between two robot cells
  tissue_outer,
  tissue_end,
  robot_end,     // robot cell at z = 0 or z = L
};

struct RingSpan {
  int j_begin = 0;  // first axial cell
  int j_end = 0;    // one past the last axial cell
  double z_begin = 0;
  double z_end = 0;
};

/// Structured axisymmetric (r, z) grid over lumen, robot rings and tissue.
/// Cells are indexed k = i + nr * j with i radial and j axial.
class AxiMesh {
 public:
  Grid1D r;
  Grid1D z;
  int i_robot = 0;  // first radial cell of the robot band (== i_wall without robots)
  int i_wall = 0;   // first tissue cell; lumen columns are 0 .. i_wall-1
  std::vector<RingSpan> rings;
  std::vector<Region> region;  // per cell
  std::vector<int> ring_of;    // per cell, ring index or -1

  int nr() const { return r.cells(); }
  int nz() const { return z.cells(); }
  int cells() const { return nr() * nz(); }
  std::size_t nodes() const { return r.nodes.size() * z.nodes.size(); }
  int index(int i, int j) const { return i + nr() * j; }
  Region at(int i, int j) const { return region[index(i, j)]; }

  /// Cell volume 2 pi r_c dr dz (exact annulus volume).
  double volume(int i, int j) const;
  /// Area of the axial face at z-node j within column i.
  double axial_area(int i) const;
  /// Area of the radial face at r-node i within row j.
  double radial_area(int i, int j) const;

  /// Kind of the axial face between cells (i, j-1) and (i, j); j in [0, nz].
  FaceKind axial_face(int i, int j) const;
  /// Kind of the radial face between cells (i-1, j) and (i, j); i in [0, nr].
  FaceKind radial_face(int i, int j) const;

  double vessel_radius() const { return r.nodes[i_wall]; }
  double length() const { return z.nodes.back(); }
};

/// Build the mesh; throws MeshError if face-spacing constraints cannot be
/// met within mesh.max_cells.
AxiMesh build_mesh(const ScenarioConfig& cfg);

/// Ring upstream edges for the config (explicit list or a centred block).
std::vector<double> ring_starts(const ScenarioConfig& cfg);

/// Largest node spacing along any robot_plasma face (tangential direction).
double max_robot_face_spacing(const AxiMesh& mesh);

/// Node coordinates and cell tags for plotting.
void write_mesh_csv(const AxiMesh& mesh, std::ostream& out);

}  // namespace capow
