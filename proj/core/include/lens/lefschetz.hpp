#pragma once

// Fixed-point form of the lens equation, its projective extension, and the
// holomorphic Lefschetz bookkeeping: affine index sum + indices at infinity = 1.

#include <Eigen/Core>

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lens/catalog.hpp"
#include "lens/imaging.hpp"
#include "lens/polycore.hpp"

namespace lens {

/// f(z) = z - eta(z) + zeta. Its fixed points are the images.
struct FixedPointMap {
  ModelId model_id = ModelId::fold;
  std::array<BiPoly, 2> f;
  std::array<BiPoly, 2> eta;
  CPair zeta{};
  std::array<int, 2> eta_degrees{0, 0};
  int m = 0;

  CPair operator()(const CPair& z) const { return {f[0](z), f[1](z)}; }
  Eigen::Matrix2cd derivative(const CPair& z) const;
  /// det(I - D_f) evaluated from D_f.
  cplx det_identity_minus_derivative(const CPair& z) const;
  /// det(I - D_f) as a polynomial.
  BiPoly det_identity_minus_derivative_poly() const;
};

/// zeta defaults to the model's real source position.
FixedPointMap fixed_point_map(const CatastropheModel& model);
FixedPointMap fixed_point_map(const CatastropheModel& model, const CPair& zeta);

/// det J_eta as a polynomial.
BiPoly jacobian_det_poly(const CatastropheModel& model);

/// Sum of 1/det(I - D_f) over the solutions. Throws Error(incomplete) if the
/// set is incomplete and Error(internal) if it disagrees with sum mu.
cplx affine_lefschetz_sum(const FixedPointMap& fm, const SolutionSet& ss);

/// Binary form sum_k coeffs[k] Z1^(d-k) Z2^k.
struct BinaryForm {
  int degree = 0;
  std::vector<cplx> coeffs;

  cplx operator()(cplx Z1, cplx Z2) const;
  bool is_zero() const;
  /// g(1, u) and g(v, 1).
  UniPoly chart_u() const;
  UniPoly chart_v() const;
};

/// Projective point; representatives are scaled so the largest-modulus
/// coordinate equals 1.
struct ProjectivePoint {
  std::vector<cplx> coords;

  std::string to_string() const;
};

/// Zeros of a binary form on the projective line, each listed once.
std::vector<ProjectivePoint> binary_form_zeros(const BinaryForm& g);

/// Homogeneous polynomial in (Z0, Z1, Z2).
class TriForm {
public:
  using Exponent = std::array<int, 3>;

  TriForm() = default;
  explicit TriForm(int degree) : degree_(degree) {}

  void add_term(const Exponent& e, cplx c);
  int degree() const noexcept { return degree_; }
  const std::map<Exponent, cplx>& terms() const noexcept { return terms_; }
  cplx operator()(cplx Z0, cplx Z1, cplx Z2) const;

  /// Z0 = 1.
  BiPoly affine_restriction() const;
  /// Z0 = 0.
  BinaryForm at_infinity() const;

private:
  int degree_ = 0;
  std::map<Exponent, cplx> terms_;
};

struct ProjectiveMap {
  std::array<TriForm, 3> components;
  int m = 0;
  std::array<int, 2> eta_degrees{0, 0};
  bool equal_degrees = false;
};

ProjectiveMap homogenize(const FixedPointMap& fm);

/// Points on Z0 = 0 where F0 = F1 = F2 = 0.
std::vector<ProjectivePoint> indeterminacy_points(const ProjectiveMap& pm);

struct InfinityFixedPoint {
  /// (Z1 : Z2), largest-modulus coordinate 1.
  std::array<cplx, 2> point{};
  cplx multiplier{};
  cplx index{};
  /// 'u' for u = Z2/Z1, 'v' for v = Z1/Z2.
  char chart = 'u';
  cplx chart_coordinate{};
  double chart_residual = 0.0;  ///< |g(u*) - u*|
};

/// Fixed points of the induced map on the line at infinity. Throws
/// Error(unequal_degrees) for maps whose restriction at infinity is not a
/// self-map of CP1, and Error(degenerate_multiplier) if some multiplier is 1.
std::vector<InfinityFixedPoint> infinity_fixed_points(const ProjectiveMap& pm);

struct LefschetzReport {
  cplx affine_sum{};
  cplx infinity_sum{};
  cplx total{};
  double expected = 1.0;
  std::vector<InfinityFixedPoint> infinity_points;
  SolutionSet solutions;
};

/// Throws Error(unequal_degrees) for fold, cusp and swallowtail and
/// Error(incomplete_solve) / Error(caustic_source) when the affine side
/// cannot be solved reliably.
LefschetzReport lefschetz_total(const CatastropheModel& model);

struct PolynomialFixedPoint {
  cplx point{};
  cplx multiplier{};
  cplx index{};
};

/// Finite fixed points of u -> g(u) with multipliers and indices.
std::vector<PolynomialFixedPoint> polynomial_fixed_points(const UniPoly& g, double tol = 1e-10);

/// Sum of 1/(1 - g'(u*)) over all fixed points of the polynomial map on the
/// Riemann sphere, including infinity (multiplier 0, index 1). Requires
/// deg g >= 2; throws Error(degenerate_multiplier) if |1 - g'(u*)| <= tol.
cplx rational_fixed_point_check(const UniPoly& g, double tol = 1e-10);

}  // namespace lens
