#pragma once

// Element-wise hot loops. Each kernel exists twice: `serial` is the plain
// reference loop used by the tests, `parallel` is the OpenMP version the
// library calls. Both produce bitwise-identical results: every output entry
// is computed by exactly one thread with a fixed summation order.

#include <jointopt/mesh_fe.hpp>

namespace jointopt::kernels {

struct CircleMaskOutput {
  Vector values;
  Vector d_dx;
  Vector d_dy;
};

namespace serial {

// e_j = u_e^T ke u_e for every element of every part.
Vector element_energies(const MultiPartMesh& mesh, const ElementStiffness& ke,
                        const Vector& u_m);

// y = A x for a row-major sparse matrix.
Vector row_apply(const RowSparseMatrix& a, const Vector& x);

// Tanh-smoothed indicator of the disc |c - ref| < radius evaluated at
// centers[begin, end); entries outside the range are left untouched.
void circle_mask(const Vec2& ref, double radius, double alpha,
                 const std::vector<Vec2>& centers, int begin, int end,
                 CircleMaskOutput& out);

// Scaled element stiffness values in triplet order (element-major, 64 each).
void material_values(const MultiPartMesh& mesh, const Vector& young,
                     const ElementStiffness& ke, std::vector<double>& values);

}  // namespace serial

namespace parallel {

Vector element_energies(const MultiPartMesh& mesh, const ElementStiffness& ke,
                        const Vector& u_m);
Vector row_apply(const RowSparseMatrix& a, const Vector& x);
void circle_mask(const Vec2& ref, double radius, double alpha,
                 const std::vector<Vec2>& centers, int begin, int end,
                 CircleMaskOutput& out);
void material_values(const MultiPartMesh& mesh, const Vector& young,
                     const ElementStiffness& ke, std::vector<double>& values);

}  // namespace parallel

int max_threads();

}  // namespace jointopt::kernels
