#pragma once

#include <jointopt/mesh_fe.hpp>

namespace jointopt {

// Conic-weight density filter, block-diagonal over parts. Rows are
// normalized, so every row sums to one.
class DensityFilter {
 public:
  DensityFilter() = default;
  explicit DensityFilter(RowSparseMatrix weights);

  Vector apply(const Vector& rho) const;
  Vector apply_transpose(const Vector& g) const;
  const RowSparseMatrix& weights() const { return weights_; }
  int size() const { return static_cast<int>(weights_.rows()); }

 private:
  RowSparseMatrix weights_;
  RowSparseMatrix transposed_;  // kept row-major for a deterministic parallel apply
};

// Filter of a single part; indices are local to the part.
DensityFilter build_filter(const PartMesh& mesh, double radius);
// Filter over all parts. Elements of different parts never interact.
DensityFilter build_filter(const MultiPartMesh& mesh, double radius);

Vector project(const Vector& rho_tilde, double beta, double eta);
Vector projection_derivative(const Vector& rho_tilde, double beta, double eta);

struct SimpLaw {
  double e0 = 1.0;
  double e_min = 1e-9;
  double p = 3.0;

  void validate() const;
};

Vector simp_modulus(const Vector& rho_hat, const SimpLaw& law);
// dE/d(rho_hat), elementwise.
Vector simp_modulus_derivative(const Vector& rho_hat, const SimpLaw& law);

// Design, filtered and projected fields. The modified field rho_hat lives
// with the joint masks; chain_to_design takes its diagonal partial.
class DensityState {
 public:
  DensityState(const DensityFilter& filter, double eta = 0.5);

  void update(const Vector& rho, double beta);
  bool ready() const { return ready_; }

  const Vector& rho() const { return rho_; }
  const Vector& rho_tilde() const { return rho_tilde_; }
  const Vector& rho_bar() const { return rho_bar_; }
  double beta() const { return beta_; }
  double eta() const { return eta_; }

  // d/d(rho) given d/d(rho_hat) and the diagonal d(rho_hat)/d(rho_bar).
  Vector chain_to_design(const Vector& d_per_rho_hat,
                         const Vector& d_rho_hat_d_rho_bar) const;

 private:
  const DensityFilter* filter_;
  double eta_;
  double beta_ = 1.0;
  bool ready_ = false;
  Vector rho_, rho_tilde_, rho_bar_, d_bar_d_tilde_;
};

}  // namespace jointopt
