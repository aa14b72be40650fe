#include <jointopt/kernels.hpp>

#include <omp.h>

#include <cmath>

namespace jointopt::kernels {

namespace {

// Element-local DOFs for element e of `part`, global numbering.
inline std::array<int, 8> dofs_of(const PartMesh& part, int e) {
  return part.element_dofs(e);
}

inline double energy_of(const PartMesh& part, int e, const ElementStiffness& ke,
                        const Vector& u) {
  const auto d = dofs_of(part, e);
  Eigen::Matrix<double, 8, 1> ue;
  for (int i = 0; i < 8; ++i) ue[i] = u[d[i]];
  return ue.dot(ke.ke * ue);
}

inline void mask_entry(const Vec2& ref, double inv_r2, double alpha,
                       const Vec2& c, double& value, double& ddx, double& ddy) {
  const double dx = c.x() - ref.x();
  const double dy = c.y() - ref.y();
  const double shape = (dx * dx + dy * dy) * inv_r2 - 1.0;
  const double t = std::tanh(alpha * shape);
  value = 0.5 * (t + 1.0);
  // d/dref of 0.5 tanh(alpha E): 0.5 alpha sech^2 * dE/dref, dE/dref = -2 d / r^2
  const double sech2 = 1.0 - t * t;
  ddx = -alpha * dx * inv_r2 * sech2;
  ddy = -alpha * dy * inv_r2 * sech2;
}

}  // namespace

namespace serial {

Vector element_energies(const MultiPartMesh& mesh, const ElementStiffness& ke,
                        const Vector& u_m) {
  Vector out(mesh.num_elements());
  for (const auto& part : mesh.parts()) {
    for (int e = 0; e < part.num_elements(); ++e) {
      out[part.element_offset + e] = energy_of(part, e, ke, u_m);
    }
  }
  return out;
}

Vector row_apply(const RowSparseMatrix& a, const Vector& x) {
  Vector y(a.rows());
  for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
    double s = 0.0;
    for (RowSparseMatrix::InnerIterator it(a, r); it; ++it) {
      s += it.value() * x[it.col()];
    }
    y[r] = s;
  }
  return y;
}

void circle_mask(const Vec2& ref, double radius, double alpha,
                 const std::vector<Vec2>& centers, int begin, int end,
                 CircleMaskOutput& out) {
  const double inv_r2 = 1.0 / (radius * radius);
  for (int j = begin; j < end; ++j) {
    mask_entry(ref, inv_r2, alpha, centers[j], out.values[j], out.d_dx[j],
               out.d_dy[j]);
  }
}

void material_values(const MultiPartMesh& mesh, const Vector& young,
                     const ElementStiffness& ke, std::vector<double>& values) {
  values.resize(static_cast<std::size_t>(mesh.num_elements()) * 64);
  for (int g = 0; g < mesh.num_elements(); ++g) {
    const double e = young[g];
    double* dst = values.data() + static_cast<std::size_t>(g) * 64;
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) dst[i * 8 + j] = e * ke.ke(i, j);
  }
}

}  // namespace serial

namespace parallel {

Vector element_energies(const MultiPartMesh& mesh, const ElementStiffness& ke,
                        const Vector& u_m) {
  Vector out(mesh.num_elements());
  for (const auto& part : mesh.parts()) {
    const int n = part.num_elements();
#pragma omp parallel for schedule(static)
    for (int e = 0; e < n; ++e) {
      out[part.element_offset + e] = energy_of(part, e, ke, u_m);
    }
  }
  return out;
}

Vector row_apply(const RowSparseMatrix& a, const Vector& x) {
  Vector y(a.rows());
  const int rows = static_cast<int>(a.outerSize());
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows; ++r) {
    double s = 0.0;
    for (RowSparseMatrix::InnerIterator it(a, r); it; ++it) {
      s += it.value() * x[it.col()];
    }
    y[r] = s;
  }
  return y;
}

void circle_mask(const Vec2& ref, double radius, double alpha,
                 const std::vector<Vec2>& centers, int begin, int end,
                 CircleMaskOutput& out) {
  const double inv_r2 = 1.0 / (radius * radius);
#pragma omp parallel for schedule(static)
  for (int j = begin; j < end; ++j) {
    mask_entry(ref, inv_r2, alpha, centers[j], out.values[j], out.d_dx[j],
               out.d_dy[j]);
  }
}

void material_values(const MultiPartMesh& mesh, const Vector& young,
                     const ElementStiffness& ke, std::vector<double>& values) {
  values.resize(static_cast<std::size_t>(mesh.num_elements()) * 64);
  const int n = mesh.num_elements();
#pragma omp parallel for schedule(static)
  for (int g = 0; g < n; ++g) {
    const double e = young[g];
    double* dst = values.data() + static_cast<std::size_t>(g) * 64;
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) dst[i * 8 + j] = e * ke.ke(i, j);
  }
}

}  // namespace parallel

int max_threads() { return omp_get_max_threads(); }

}  // namespace jointopt::kernels
