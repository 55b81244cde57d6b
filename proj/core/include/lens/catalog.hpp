#pragma once

// The seven polynomial lens maps: five generic catastrophe normal forms and
// the two umbilic maps of gravitational lensing.

#include <Eigen/Core>

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lens/polycore.hpp"

namespace lens {

enum class ModelId {
  fold,
  cusp,
  swallowtail,
  elliptic_umbilic,
  hyperbolic_umbilic,
  elliptic_umbilic_lensing,
  hyperbolic_umbilic_lensing,
};

/// Fixed catalog order; also the iteration order of `--model all`.
inline constexpr std::array<ModelId, 7> kAllModels = {
    ModelId::fold,
    ModelId::cusp,
    ModelId::swallowtail,
    ModelId::elliptic_umbilic,
    ModelId::hyperbolic_umbilic,
    ModelId::elliptic_umbilic_lensing,
    ModelId::hyperbolic_umbilic_lensing,
};

std::string_view to_string(ModelId id) noexcept;
/// Canonical CLI names ("elliptic-umbilic", ...). Throws Error(unknown_model).
ModelId parse_model(std::string_view name);

bool uses_c(ModelId id) noexcept;
bool uses_p(ModelId id) noexcept;

using Vec2 = std::array<double, 2>;

struct ControlParams {
  std::optional<double> c;
  std::optional<double> p;
  Vec2 y{0.0, 0.0};
};

struct ComplexJacobian {
  Eigen::Matrix2cd matrix;
  cplx det;
};

struct RealHessian {
  Eigen::Matrix2d matrix;
  double det;
};

class CatastropheModel {
public:
  ModelId id() const noexcept { return id_; }
  const ControlParams& params() const noexcept { return params_; }
  const Vec2& source() const noexcept { return params_.y; }
  /// c or p, whichever the model carries; 0 for fold and cusp.
  double shape_parameter() const noexcept;

  /// eta components with the control parameter substituted (no source term).
  const std::array<BiPoly, 2>& eta() const noexcept { return eta_; }
  /// Generating potential with source and shape parameter substituted.
  const BiPoly& phi() const noexcept { return phi_; }
  /// eta(z) - y, the system whose common zeros are the images.
  std::array<BiPoly, 2> system() const;

  std::array<int, 2> degrees() const noexcept { return degrees_; }
  int bezout() const noexcept { return degrees_[0] * degrees_[1]; }
  int max_degree() const noexcept { return std::max(degrees_[0], degrees_[1]); }

  CPair eta_at(const CPair& z) const noexcept { return {eta_[0](z), eta_[1](z)}; }

  /// Same model and shape parameter, new source position.
  CatastropheModel with_source(const Vec2& y) const;

private:
  friend CatastropheModel instantiate(ModelId id, const ControlParams& params);
  CatastropheModel() = default;

  ModelId id_ = ModelId::fold;
  ControlParams params_;
  std::array<BiPoly, 2> eta_;
  BiPoly phi_;
  std::array<int, 2> degrees_{0, 0};
};

/// Throws Error(invalid_params) if a parameter the model does not define is
/// set, or a required one is missing.
CatastropheModel instantiate(ModelId id, const ControlParams& params);

/// The Bezout table (deg eta1, deg eta2) that every instantiation must match.
std::array<int, 2> expected_degrees(ModelId id) noexcept;

double fermat_potential(const CatastropheModel& model, const Vec2& x);

/// Closed-form gradient of phi, written in terms of eta(x) - y so that it
/// vanishes exactly on the image set.
Vec2 stationarity_form(const CatastropheModel& model, const Vec2& x);

/// Central-difference gradient of phi.
Vec2 fd_gradient(const CatastropheModel& model, const Vec2& x, double h = 1e-6);

/// max_k |fd_gradient_k - stationarity_form_k|.
double gradient_check(const CatastropheModel& model, const Vec2& x);

ComplexJacobian jacobian(const CatastropheModel& model, const CPair& z);

/// Exact Hessian of phi from its polynomial form.
RealHessian hessian_phi(const CatastropheModel& model, const Vec2& x);

/// Central-difference Hessian of phi (independent check of hessian_phi).
RealHessian fd_hessian_phi(const CatastropheModel& model, const Vec2& x, double h = 1e-4);

struct EliminationRecipe {
  /// Variable recovered by back-substitution.
  Var eliminated_variable = Var::z1;
  /// Variable of the eliminant.
  Var solved_variable = Var::z2;
  UniPoly eliminant;
  std::function<CPair(cplx)> back_substitution;
  /// Back-substitution divides by guard(root); constant 1 when it never does.
  UniPoly guard{1.0};
  std::string guard_description;
  /// Fallback for roots where the guard vanishes or the eliminant root is
  /// multiple: every pair (root, w) with w a root of a component equation.
  std::function<std::vector<CPair>(cplx)> alternate;
};

/// Closed-form reduction to one variable. Throws
/// Error(degenerate_parameters) when the shape parameter makes the
/// back-substitution undefined for every root (c = 0 or p = 0 where it
/// appears as a divisor).
EliminationRecipe eliminate(const CatastropheModel& model);

}  // namespace lens
