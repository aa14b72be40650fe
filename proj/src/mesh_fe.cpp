#include <jointopt/kernels.hpp>
#include <jointopt/mesh_fe.hpp>

#include <Eigen/CholmodSupport>
#include <Eigen/SparseLU>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

namespace jointopt {

std::array<int, 4> PartMesh::element_nodes(int local_element) const {
  const int row = local_element / nx;
  const int col = local_element % nx;
  return {node_index(col, row), node_index(col + 1, row),
          node_index(col + 1, row + 1), node_index(col, row + 1)};
}

std::array<int, 8> PartMesh::element_dofs(int local_element) const {
  const auto n = element_nodes(local_element);
  std::array<int, 8> d{};
  for (int a = 0; a < 4; ++a) {
    d[2 * a] = node_dof(n[a], 0);
    d[2 * a + 1] = node_dof(n[a], 1);
  }
  return d;
}

PartMesh build_part_mesh(int nx, int ny, double element_size, Vec2 origin,
                         int part_id) {
  if (nx < 1 || ny < 1) {
    throw InputError("part mesh needs at least one element in each direction");
  }
  if (!(element_size > 0.0)) {
    throw InputError("element size must be positive");
  }
  PartMesh m;
  m.part_id = part_id;
  m.nx = nx;
  m.ny = ny;
  m.element_size = element_size;
  m.origin = origin;
  m.node_coords.reserve(static_cast<std::size_t>(m.num_nodes()));
  for (int row = 0; row <= ny; ++row)
    for (int col = 0; col <= nx; ++col)
      m.node_coords.emplace_back(origin.x() + col * element_size,
                                 origin.y() + row * element_size);
  m.element_centers.reserve(static_cast<std::size_t>(m.num_elements()));
  for (int row = 0; row < ny; ++row)
    for (int col = 0; col < nx; ++col)
      m.element_centers.emplace_back(origin.x() + (col + 0.5) * element_size,
                                     origin.y() + (row + 0.5) * element_size);
  return m;
}

MultiPartMesh::MultiPartMesh(std::vector<PartMesh> parts)
    : parts_(std::move(parts)) {
  for (auto& p : parts_) {
    p.dof_offset = num_dofs_;
    p.element_offset = num_elements_;
    num_dofs_ += p.num_dofs();
    num_elements_ += p.num_elements();
    centers_.insert(centers_.end(), p.element_centers.begin(),
                    p.element_centers.end());
    element_part_.insert(element_part_.end(), p.num_elements(),
                         static_cast<int>(&p - parts_.data()));
  }
}

int MultiPartMesh::part_of_element(int global_element) const {
  return element_part_.at(global_element);
}

Vector MultiPartMesh::element_volumes() const {
  Vector v(num_elements_);
  for (const auto& p : parts_)
    v.segment(p.element_offset, p.num_elements()).setConstant(p.element_volume());
  return v;
}

std::optional<ElementLocation> locate_point(const PartMesh& mesh, const Vec2& p) {
  const double h = mesh.element_size;
  const double sx = (p.x() - mesh.origin.x()) / h;
  const double sy = (p.y() - mesh.origin.y()) / h;
  if (sx < 0.0 || sy < 0.0 || sx > mesh.nx || sy > mesh.ny) return std::nullopt;
  const int col = std::min(static_cast<int>(std::floor(sx)), mesh.nx - 1);
  const int row = std::min(static_cast<int>(std::floor(sy)), mesh.ny - 1);
  ElementLocation loc;
  loc.local_element = row * mesh.nx + col;
  loc.xi = Vec2(2.0 * (sx - col) - 1.0, 2.0 * (sy - row) - 1.0);
  return loc;
}

std::array<double, 4> bilinear_shape(const Vec2& xi) {
  const double a = xi.x(), b = xi.y();
  return {0.25 * (1 - a) * (1 - b), 0.25 * (1 + a) * (1 - b),
          0.25 * (1 + a) * (1 + b), 0.25 * (1 - a) * (1 + b)};
}

std::array<Vec2, 4> bilinear_shape_gradient(const Vec2& xi) {
  const double a = xi.x(), b = xi.y();
  return {Vec2(-0.25 * (1 - b), -0.25 * (1 - a)),
          Vec2(0.25 * (1 - b), -0.25 * (1 + a)),
          Vec2(0.25 * (1 + b), 0.25 * (1 + a)),
          Vec2(-0.25 * (1 + b), 0.25 * (1 - a))};
}

ElementStiffness element_stiffness_q4(double nu) {
  if (!(nu > -1.0 && nu < 0.5)) {
    throw InputError("Poisson ratio must lie in (-1, 0.5)");
  }
  Eigen::Matrix3d d;
  d << 1, nu, 0, nu, 1, 0, 0, 0, 0.5 * (1 - nu);
  d /= (1 - nu * nu);

  // Square of side h: dN/dx = (2/h) dN/dxi and det J = h^2/4, so h cancels.
  const double g = 1.0 / std::sqrt(3.0);
  ElementStiffness out;
  out.nu = nu;
  out.ke.setZero();
  for (double gx : {-g, g}) {
    for (double gy : {-g, g}) {
      const auto dn = bilinear_shape_gradient(Vec2(gx, gy));
      Eigen::Matrix<double, 3, 8> b = Eigen::Matrix<double, 3, 8>::Zero();
      for (int a = 0; a < 4; ++a) {
        const double nx = 2.0 * dn[a].x(), ny = 2.0 * dn[a].y();
        b(0, 2 * a) = nx;
        b(1, 2 * a + 1) = ny;
        b(2, 2 * a) = ny;
        b(2, 2 * a + 1) = nx;
      }
      out.ke += 0.25 * b.transpose() * d * b;
    }
  }
  out.ke = 0.5 * (out.ke + out.ke.transpose()).eval();
  return out;
}

SparseMatrix assemble_material_block(const MultiPartMesh& mesh,
                                     const Vector& young_per_element,
                                     const ElementStiffness& stiffness) {
  if (young_per_element.size() != mesh.num_elements()) {
    throw InputError("modulus vector length does not match element count");
  }
  std::vector<double> values;
  kernels::parallel::material_values(mesh, young_per_element, stiffness, values);
  std::vector<Triplet> trips;
  trips.reserve(values.size());
  for (const auto& part : mesh.parts()) {
    for (int e = 0; e < part.num_elements(); ++e) {
      const auto d = part.element_dofs(e);
      const double* v =
          values.data() + static_cast<std::size_t>(part.element_offset + e) * 64;
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) trips.emplace_back(d[i], d[j], v[i * 8 + j]);
    }
  }
  SparseMatrix k(mesh.num_dofs(), mesh.num_dofs());
  k.setFromTriplets(trips.begin(), trips.end());
  return k;
}

SparseMatrix AugmentedSystem::assembled() const {
  const int nm = num_material_dofs(), nc = num_joint_dofs(), nl = num_multipliers();
  const int n = nm + nc + nl;
  std::vector<Triplet> t;
  t.reserve(material_block.nonZeros() + joint_block.nonZeros() +
            2 * coupling_block.nonZeros());
  for (int k = 0; k < material_block.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(material_block, k); it; ++it)
      t.emplace_back(it.row(), it.col(), it.value());
  for (int k = 0; k < joint_block.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(joint_block, k); it; ++it)
      t.emplace_back(nm + it.row(), nm + it.col(), it.value());
  for (int k = 0; k < coupling_block.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(coupling_block, k); it; ++it) {
      t.emplace_back(nm + nc + it.row(), it.col(), it.value());
      t.emplace_back(it.col(), nm + nc + it.row(), it.value());
    }
  SparseMatrix k(n, n);
  k.setFromTriplets(t.begin(), t.end());
  return k;
}

Vector AugmentedSolution::displacements() const {
  Vector u(u_m.size() + u_c.size());
  u << u_m, u_c;
  return u;
}

Vector AugmentedSolution::stacked() const {
  Vector u(u_m.size() + u_c.size() + lambda.size());
  u << u_m, u_c, lambda;
  return u;
}

namespace {

std::vector<char> fixed_flags(int n, std::span<const int> fixed_dofs) {
  std::vector<char> fixed(static_cast<std::size_t>(n), 0);
  for (int d : fixed_dofs) {
    if (d < 0 || d >= n) throw InputError("fixed DOF index out of range");
    fixed[static_cast<std::size_t>(d)] = 1;
  }
  return fixed;
}

// Selection matrix P (free x n) so that P * x extracts the free entries.
SparseMatrix selection(const std::vector<char>& fixed, int n_total_rows_extra = 0) {
  std::vector<Triplet> t;
  int row = 0;
  const int n = static_cast<int>(fixed.size());
  for (int i = 0; i < n; ++i)
    if (!fixed[static_cast<std::size_t>(i)]) t.emplace_back(row++, i, 1.0);
  for (int i = 0; i < n_total_rows_extra; ++i) t.emplace_back(row++, n + i, 1.0);
  SparseMatrix p(row, n + n_total_rows_extra);
  p.setFromTriplets(t.begin(), t.end());
  return p;
}

// True when the joint columns of G form -I (one slave DOF per row).
bool has_slave_structure(const AugmentedSystem& sys) {
  const int nm = sys.num_material_dofs(), nc = sys.num_joint_dofs();
  if (sys.num_multipliers() != nc) return false;
  const SparseMatrix gc = sys.coupling_block.rightCols(nc);
  if (gc.nonZeros() != nc) return false;
  for (int k = 0; k < gc.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(gc, k); it; ++it)
      if (it.row() != it.col() || it.value() != -1.0) return false;
  (void)nm;
  return true;
}

std::atomic<bool> g_supernodal_usable{true};

// Cholesky solve with one refinement step. False if the factorization fails
// or the refined residual is not small.
template <class Solver>
bool factor_and_solve(Solver& chol, const SparseMatrix& k, const Vector& f, Vector& u) {
  chol.cholmod().print = 0;
  chol.compute(k);
  if (chol.info() != Eigen::Success) return false;
  u = chol.solve(f);
  u += chol.solve(Vector(f - k * u));
  const double fn = f.norm();
  return u.allFinite() && (k * u - f).norm() <= 1e-10 * (fn > 0.0 ? fn : 1.0);
}

void enforce_accuracy(const SolveReport& r, const char* route) {
  if (!(r.relative_residual <= 1e-8) || !(r.coupling_residual <= 1e-8)) {
    std::ostringstream os;
    os << route << " solve inaccurate: relative residual " << r.relative_residual
       << ", coupling residual " << r.coupling_residual;
    throw NumericalError(os.str());
  }
}

}  // namespace

SolveReport check_solution(const AugmentedSystem& sys, const Vector& f_m,
                           std::span<const int> fixed_dofs,
                           const AugmentedSolution& sol) {
  const int nm = sys.num_material_dofs();
  const auto fixed = fixed_flags(nm, fixed_dofs);
  const Vector u = sol.displacements();
  const SparseMatrix gm = sys.coupling_block.leftCols(nm);
  const SparseMatrix gc = sys.coupling_block.rightCols(sys.num_joint_dofs());
  Vector r_m = sys.material_block * sol.u_m + gm.transpose() * sol.lambda - f_m;
  for (int i = 0; i < nm; ++i)
    if (fixed[static_cast<std::size_t>(i)]) r_m[i] = 0.0;
  const Vector r_c = sys.joint_block * sol.u_c + gc.transpose() * sol.lambda;
  const Vector r_l = sys.coupling_block * u;
  const double rnorm =
      std::sqrt(r_m.squaredNorm() + r_c.squaredNorm() + r_l.squaredNorm());
  const double fnorm = f_m.norm();
  SolveReport rep;
  rep.relative_residual = fnorm > 0.0 ? rnorm / fnorm : rnorm;
  const double umax = u.size() ? u.cwiseAbs().maxCoeff() : 0.0;
  const double gmax = r_l.size() ? r_l.cwiseAbs().maxCoeff() : 0.0;
  rep.coupling_residual = umax > 0.0 ? gmax / umax : gmax;
  return rep;
}

AugmentedSolution solve_augmented(const AugmentedSystem& sys, const Vector& f_m,
                                  std::span<const int> fixed_dofs,
                                  SolveReport* report) {
  if (!has_slave_structure(sys)) {
    return solve_augmented_direct(sys, f_m, fixed_dofs, report);
  }
  const int nm = sys.num_material_dofs();
  if (f_m.size() != nm) throw InputError("load vector length mismatch");
  const auto fixed = fixed_flags(nm, fixed_dofs);

  // u_c = W u_m exactly, so K~ reduces to K_m + W^T K_c W on part DOFs.
  const SparseMatrix w = sys.coupling_block.leftCols(nm);
  SparseMatrix k = sys.material_block;
  if (w.rows() > 0) {
    const SparseMatrix wt = w.transpose();
    const SparseMatrix kcw = sys.joint_block * w;
    k += wt * kcw;
  }
  const SparseMatrix p = selection(fixed);
  const SparseMatrix pt = p.transpose();
  const SparseMatrix kff = p * k * pt;
  if (kff.rows() == 0) throw NumericalError("no free degrees of freedom");

  const Vector ff = p * f_m;
  Vector uf;
  bool solved = false;
  if (g_supernodal_usable.load()) {
    Eigen::CholmodSupernodalLLT<SparseMatrix, Eigen::Lower> chol;
    solved = factor_and_solve(chol, kff, ff, uf);
    // A supernodal failure on a matrix the simplicial path accepts points at
    // the BLAS backend; stop using it for the rest of the process.
    if (!solved) g_supernodal_usable.store(false);
  }
  if (!solved) {
    Eigen::CholmodSimplicialLLT<SparseMatrix, Eigen::Lower> chol;
    solved = factor_and_solve(chol, kff, ff, uf);
  }
  if (!solved) {
    throw NumericalError(
        "material/joint block is singular: supports do not remove all rigid "
        "body modes of the coupled assembly");
  }
  if (!uf.allFinite()) throw NumericalError("non-finite displacement solution");

  AugmentedSolution sol;
  sol.u_m = pt * uf;
  sol.u_c = w * sol.u_m;
  sol.lambda = sys.joint_block * sol.u_c;
  const SolveReport rep = check_solution(sys, f_m, fixed_dofs, sol);
  if (report) *report = rep;
  enforce_accuracy(rep, "condensed");
  return sol;
}

AugmentedSolution solve_augmented_direct(const AugmentedSystem& sys,
                                         const Vector& f_m,
                                         std::span<const int> fixed_dofs,
                                         SolveReport* report) {
  const int nm = sys.num_material_dofs(), nc = sys.num_joint_dofs(),
            nl = sys.num_multipliers();
  if (f_m.size() != nm) throw InputError("load vector length mismatch");
  const auto fixed = fixed_flags(nm, fixed_dofs);
  const SparseMatrix p = selection(fixed, nc + nl);
  const SparseMatrix pt = p.transpose();
  SparseMatrix a = p * sys.assembled() * pt;
  a.makeCompressed();
  Vector f = Vector::Zero(nm + nc + nl);
  f.head(nm) = f_m;

  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) {
    throw NumericalError("saddle-point factorization failed: " + lu.lastErrorMessage());
  }
  const Vector rhs = p * f;
  Vector x = lu.solve(rhs);
  x += lu.solve(Vector(rhs - a * x));
  if (!x.allFinite()) throw NumericalError("non-finite saddle-point solution");
  const Vector full = pt * x;

  AugmentedSolution sol;
  sol.u_m = full.head(nm);
  sol.u_c = full.segment(nm, nc);
  sol.lambda = full.tail(nl);
  const SolveReport rep = check_solution(sys, f_m, fixed_dofs, sol);
  if (report) *report = rep;
  enforce_accuracy(rep, "saddle-point");
  return sol;
}

}  // namespace jointopt
