#pragma once

#include <jointopt/types.hpp>

#include <span>
#include <utility>
#include <vector>

namespace jointopt {

// Circular feature of radius `radius` mapped to a smooth field via
// psi = (tanh(alpha * E) + 1) / 2 with E = |c - x|^2 / r^2 - 1.
struct MaskSpec {
  double radius = 1.0;
  double alpha = 10.0;

  void validate() const;
};

// Per-element mask values and partials with respect to the owning joint's
// reference coordinates.
struct MaskField {
  Vector values;
  Vector d_dx;
  Vector d_dy;

  int size() const { return static_cast<int>(values.size()); }
  static MaskField ones(int n);
};

// Evaluated over all centers.
MaskField single_mask(const Vec2& ref_point, const MaskSpec& spec,
                      const std::vector<Vec2>& centers);

// Evaluated over centers[begin, end) only; elsewhere psi = 1 with zero
// partials. Used to restrict a joint's features to the parts it connects.
MaskField single_mask(const Vec2& ref_point, const MaskSpec& spec,
                      const std::vector<Vec2>& centers,
                      std::span<const std::pair<int, int>> element_ranges);

// Product of masks. partials[i] is d(psi)/d(x^i) for the i-th input mask.
struct CombinedMask {
  Vector values;
  std::vector<Vector> d_dx;
  std::vector<Vector> d_dy;
};

// An empty list yields the all-ones mask of length n.
CombinedMask combine(std::span<const MaskField> masks, int n);
inline Vector complement(const Vector& psi) { return 1.0 - psi.array(); }

enum class NdsMode { Hole, Solid, Ring };

// One joint's features: `solid` is used by Solid/Ring, `hole` by Hole/Ring.
struct JointMasks {
  NdsMode mode = NdsMode::Ring;
  MaskField solid;
  MaskField hole;
};

struct NdsResult {
  Vector rho_hat;
  Vector d_rho_hat_d_rho_bar;     // diagonal
  std::vector<Vector> d_rho_hat_dx;  // one field per joint
  std::vector<Vector> d_rho_hat_dy;
};

// rho_hat = (psi+_comp + rho_bar o psi+) o psi-, where psi+ combines the
// solid masks of Solid/Ring joints and psi- the hole masks of Hole/Ring
// joints. A single joint reduces to the hole, disc or ring construction.
NdsResult apply_nds(const Vector& rho_bar, std::span<const JointMasks> joints);

}  // namespace jointopt
