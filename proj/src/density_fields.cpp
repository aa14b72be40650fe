#include <jointopt/density_fields.hpp>
#include <jointopt/kernels.hpp>

#include <algorithm>
#include <cmath>

namespace jointopt {

DensityFilter::DensityFilter(RowSparseMatrix weights)
    : weights_(std::move(weights)), transposed_(weights_.transpose()) {
  weights_.makeCompressed();
  transposed_.makeCompressed();
}

Vector DensityFilter::apply(const Vector& rho) const {
  return kernels::parallel::row_apply(weights_, rho);
}

Vector DensityFilter::apply_transpose(const Vector& g) const {
  return kernels::parallel::row_apply(transposed_, g);
}

namespace {

void append_part_filter(const PartMesh& mesh, double radius, int offset,
                        std::vector<Triplet>& trips) {
  if (!(radius > 0.0)) throw InputError("filter radius must be positive");
  const double h = mesh.element_size;
  const int reach = static_cast<int>(std::ceil(radius / h));
  const double v = mesh.element_volume();
  std::vector<std::pair<int, double>> row;
  for (int r = 0; r < mesh.ny; ++r) {
    for (int c = 0; c < mesh.nx; ++c) {
      row.clear();
      double sum = 0.0;
      for (int rr = std::max(0, r - reach); rr <= std::min(mesh.ny - 1, r + reach); ++rr) {
        for (int cc = std::max(0, c - reach); cc <= std::min(mesh.nx - 1, c + reach); ++cc) {
          const double dist = h * std::hypot(double(cc - c), double(rr - r));
          const double w = std::max(radius - dist, 0.0) * v;
          if (w > 0.0) {
            row.emplace_back(rr * mesh.nx + cc, w);
            sum += w;
          }
        }
      }
      const int i = offset + r * mesh.nx + c;
      for (const auto& [j, w] : row) trips.emplace_back(i, offset + j, w / sum);
    }
  }
}

}  // namespace

DensityFilter build_filter(const PartMesh& mesh, double radius) {
  std::vector<Triplet> trips;
  append_part_filter(mesh, radius, 0, trips);
  RowSparseMatrix w(mesh.num_elements(), mesh.num_elements());
  w.setFromTriplets(trips.begin(), trips.end());
  return DensityFilter(std::move(w));
}

DensityFilter build_filter(const MultiPartMesh& mesh, double radius) {
  std::vector<Triplet> trips;
  for (const auto& part : mesh.parts())
    append_part_filter(part, radius, part.element_offset, trips);
  RowSparseMatrix w(mesh.num_elements(), mesh.num_elements());
  w.setFromTriplets(trips.begin(), trips.end());
  return DensityFilter(std::move(w));
}

Vector project(const Vector& rho_tilde, double beta, double eta) {
  const double den = std::tanh(beta * eta) + std::tanh(beta * (1.0 - eta));
  const double t0 = std::tanh(beta * eta);
  return rho_tilde.unaryExpr(
      [&](double r) { return (t0 + std::tanh(beta * (r - eta))) / den; });
}

Vector projection_derivative(const Vector& rho_tilde, double beta, double eta) {
  const double den = std::tanh(beta * eta) + std::tanh(beta * (1.0 - eta));
  return rho_tilde.unaryExpr([&](double r) {
    const double t = std::tanh(beta * (r - eta));
    return beta * (1.0 - t * t) / den;
  });
}

void SimpLaw::validate() const {
  if (!(e0 > 0.0)) throw InputError("solid modulus must be positive");
  if (!(e_min > 0.0) || e_min > 1e-6 * e0)
    throw InputError("void modulus must satisfy 0 < E_min <= 1e-6 E_0");
  if (!(p >= 1.0)) throw InputError("SIMP penalty must be >= 1");
}

Vector simp_modulus(const Vector& rho_hat, const SimpLaw& law) {
  return rho_hat.unaryExpr([&](double r) {
    return law.e_min + (law.e0 - law.e_min) * std::pow(r, law.p);
  });
}

Vector simp_modulus_derivative(const Vector& rho_hat, const SimpLaw& law) {
  return rho_hat.unaryExpr([&](double r) {
    return law.p * (law.e0 - law.e_min) * std::pow(r, law.p - 1.0);
  });
}

DensityState::DensityState(const DensityFilter& filter, double eta)
    : filter_(&filter), eta_(eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw InputError("projection threshold must lie in (0,1)");
}

void DensityState::update(const Vector& rho, double beta) {
  if (!(beta > 0.0)) throw InputError("projection steepness must be positive");
  if (rho.size() != filter_->size()) throw InputError("design vector length mismatch");
  beta_ = beta;
  rho_ = rho;
  rho_tilde_ = filter_->apply(rho_);
  rho_bar_ = project(rho_tilde_, beta_, eta_);
  d_bar_d_tilde_ = projection_derivative(rho_tilde_, beta_, eta_);
  ready_ = true;
}

Vector DensityState::chain_to_design(const Vector& d_per_rho_hat,
                                     const Vector& d_rho_hat_d_rho_bar) const {
  if (!ready_) throw std::logic_error("density state used before a forward pass");
  const Vector g = d_per_rho_hat.cwiseProduct(d_rho_hat_d_rho_bar)
                       .cwiseProduct(d_bar_d_tilde_);
  return filter_->apply_transpose(g);
}

}  // namespace jointopt
