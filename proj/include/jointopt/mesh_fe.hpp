#pragma once

#include <jointopt/types.hpp>

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace jointopt {

// Structured grid of square bilinear elements for one part. Elements and
// nodes are numbered row-major from the lower-left corner. Every part owns
// its node set; parts never share nodes.
struct PartMesh {
  int part_id = 0;
  int nx = 0;
  int ny = 0;
  double element_size = 1.0;
  Vec2 origin = Vec2::Zero();
  std::vector<Vec2> node_coords;
  std::vector<Vec2> element_centers;
  int dof_offset = 0;      // first global DOF of this part
  int element_offset = 0;  // first global element index of this part

  int num_nodes() const { return (nx + 1) * (ny + 1); }
  int num_elements() const { return nx * ny; }
  int num_dofs() const { return 2 * num_nodes(); }
  double element_volume() const { return element_size * element_size; }
  double width() const { return nx * element_size; }
  double height() const { return ny * element_size; }

  int node_index(int col, int row) const { return row * (nx + 1) + col; }
  // Corner order: lower-left, lower-right, upper-right, upper-left.
  std::array<int, 4> element_nodes(int local_element) const;
  // Global DOFs (x, y per corner) in corner order.
  std::array<int, 8> element_dofs(int local_element) const;
  int node_dof(int local_node, int component) const {
    return dof_offset + 2 * local_node + component;
  }
};

PartMesh build_part_mesh(int nx, int ny, double element_size, Vec2 origin,
                         int part_id);

// All parts of an assembly with contiguous global DOF and element offsets.
class MultiPartMesh {
 public:
  MultiPartMesh() = default;
  explicit MultiPartMesh(std::vector<PartMesh> parts);

  const std::vector<PartMesh>& parts() const { return parts_; }
  const PartMesh& part(int i) const { return parts_.at(i); }
  int num_parts() const { return static_cast<int>(parts_.size()); }
  int num_elements() const { return num_elements_; }
  int num_dofs() const { return num_dofs_; }
  int part_of_element(int global_element) const;
  const std::vector<Vec2>& element_centers() const { return centers_; }
  Vector element_volumes() const;

 private:
  std::vector<PartMesh> parts_;
  std::vector<Vec2> centers_;
  std::vector<int> element_part_;
  int num_elements_ = 0;
  int num_dofs_ = 0;
};

// Position of a point inside a part: owning element and local coordinates
// in [-1, 1]^2. Cells are half-open [x, x+h) except at the outer boundary.
struct ElementLocation {
  int local_element = 0;
  Vec2 xi = Vec2::Zero();
};
std::optional<ElementLocation> locate_point(const PartMesh& mesh, const Vec2& p);

// Bilinear shape functions and their xi-derivatives in corner order.
std::array<double, 4> bilinear_shape(const Vec2& xi);
std::array<Vec2, 4> bilinear_shape_gradient(const Vec2& xi);

struct ElementStiffness {
  Eigen::Matrix<double, 8, 8> ke;
  double nu = 0.3;
};

// Unit-modulus, unit-thickness plane-stress Q4 stiffness of a square
// element (2x2 Gauss). Independent of the element size in 2D.
ElementStiffness element_stiffness_q4(double nu);

SparseMatrix assemble_material_block(const MultiPartMesh& mesh,
                                     const Vector& young_per_element,
                                     const ElementStiffness& stiffness);

// Block matrix [[K_m, 0, G_m^T], [0, K_c, G_c^T], [G_m, G_c, 0]].
// DOF order: part DOFs, joint-spring DOFs, Lagrange multipliers.
struct AugmentedSystem {
  SparseMatrix material_block;
  SparseMatrix joint_block;
  SparseMatrix coupling_block;  // rows: coupling eqs, cols: material + joint DOFs

  int num_material_dofs() const { return static_cast<int>(material_block.rows()); }
  int num_joint_dofs() const { return static_cast<int>(joint_block.rows()); }
  int num_multipliers() const { return static_cast<int>(coupling_block.rows()); }
  int size() const {
    return num_material_dofs() + num_joint_dofs() + num_multipliers();
  }
  SparseMatrix assembled() const;
};

struct AugmentedSolution {
  Vector u_m;
  Vector u_c;
  Vector lambda;

  Vector displacements() const;  // [u_m; u_c]
  Vector stacked() const;        // [u_m; u_c; lambda]
};

struct SolveReport {
  double relative_residual = 0.0;
  double coupling_residual = 0.0;  // ||G u||_inf / ||u||_inf
};

// Solves K~ u~ = [f_m; 0; 0] with homogeneous Dirichlet conditions on
// fixed_dofs (material DOFs only). When every coupling row ties exactly one
// joint DOF with coefficient -1 the joint DOFs are condensed and the SPD
// remainder is factorized with Cholesky; otherwise the full saddle-point
// matrix is factorized with sparse LU.
AugmentedSolution solve_augmented(const AugmentedSystem& sys, const Vector& f_m,
                                  std::span<const int> fixed_dofs,
                                  SolveReport* report = nullptr);

// Sparse LU of the full saddle-point matrix with row/column elimination of
// the fixed DOFs. Slow; kept as an independent route.
AugmentedSolution solve_augmented_direct(const AugmentedSystem& sys,
                                         const Vector& f_m,
                                         std::span<const int> fixed_dofs,
                                         SolveReport* report = nullptr);

SolveReport check_solution(const AugmentedSystem& sys, const Vector& f_m,
                           std::span<const int> fixed_dofs,
                           const AugmentedSolution& sol);

}  // namespace jointopt
