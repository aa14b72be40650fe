#include <jointopt/kernels.hpp>
#include <jointopt/masks.hpp>

namespace jointopt {

void MaskSpec::validate() const {
  if (!(radius > 0.0)) throw InputError("mask radius must be positive");
  if (!(alpha > 0.0)) throw InputError("mask sharpness must be positive");
}

MaskField MaskField::ones(int n) {
  return {Vector::Ones(n), Vector::Zero(n), Vector::Zero(n)};
}

MaskField single_mask(const Vec2& ref_point, const MaskSpec& spec,
                      const std::vector<Vec2>& centers) {
  const std::pair<int, int> all{0, static_cast<int>(centers.size())};
  return single_mask(ref_point, spec, centers, std::span(&all, 1));
}

MaskField single_mask(const Vec2& ref_point, const MaskSpec& spec,
                      const std::vector<Vec2>& centers,
                      std::span<const std::pair<int, int>> element_ranges) {
  spec.validate();
  const int n = static_cast<int>(centers.size());
  kernels::CircleMaskOutput out{Vector::Ones(n), Vector::Zero(n), Vector::Zero(n)};
  for (const auto& [b, e] : element_ranges) {
    kernels::parallel::circle_mask(ref_point, spec.radius, spec.alpha, centers, b,
                                   e, out);
  }
  return {std::move(out.values), std::move(out.d_dx), std::move(out.d_dy)};
}

CombinedMask combine(std::span<const MaskField> masks, int n) {
  CombinedMask out;
  out.values = Vector::Ones(n);
  for (const auto& m : masks) {
    if (m.size() != n) throw InputError("mask lengths differ");
    out.values.array() *= m.values.array();
  }
  for (std::size_t i = 0; i < masks.size(); ++i) {
    Vector others = Vector::Ones(n);
    for (std::size_t j = 0; j < masks.size(); ++j)
      if (j != i) others.array() *= masks[j].values.array();
    out.d_dx.push_back(masks[i].d_dx.cwiseProduct(others));
    out.d_dy.push_back(masks[i].d_dy.cwiseProduct(others));
  }
  return out;
}

NdsResult apply_nds(const Vector& rho_bar, std::span<const JointMasks> joints) {
  const int n = static_cast<int>(rho_bar.size());
  const int nj = static_cast<int>(joints.size());

  // Joints without a given feature contribute a neutral mask so that the
  // combined partials stay indexed by joint.
  std::vector<MaskField> solids, holes;
  solids.reserve(joints.size());
  holes.reserve(joints.size());
  for (const auto& j : joints) {
    const bool has_solid = j.mode != NdsMode::Hole;
    const bool has_hole = j.mode != NdsMode::Solid;
    if (has_solid && j.solid.size() != n) throw InputError("solid mask length mismatch");
    if (has_hole && j.hole.size() != n) throw InputError("hole mask length mismatch");
    solids.push_back(has_solid ? j.solid : MaskField::ones(n));
    holes.push_back(has_hole ? j.hole : MaskField::ones(n));
  }
  const CombinedMask plus = combine(solids, n);
  const CombinedMask minus = combine(holes, n);

  NdsResult r;
  const Eigen::ArrayXd rb = rho_bar.array();
  const Eigen::ArrayXd pp = plus.values.array();
  const Eigen::ArrayXd pm = minus.values.array();
  const Eigen::ArrayXd with_solid = (1.0 - pp) + rb * pp;
  r.rho_hat = (with_solid * pm).matrix();
  r.d_rho_hat_d_rho_bar = (pp * pm).matrix();
  for (int i = 0; i < nj; ++i) {
    r.d_rho_hat_dx.push_back(((rb - 1.0) * plus.d_dx[i].array() * pm +
                              with_solid * minus.d_dx[i].array())
                                 .matrix());
    r.d_rho_hat_dy.push_back(((rb - 1.0) * plus.d_dy[i].array() * pm +
                              with_solid * minus.d_dy[i].array())
                                 .matrix());
  }
  return r;
}

}  // namespace jointopt
