#include "lens/catalog.hpp"

#include <Eigen/LU>

#include <cmath>
#include <string>

#include "lens/error.hpp"

namespace lens {

namespace {

struct Names {
  ModelId id;
  std::string_view name;
};

constexpr std::array<Names, 7> kNames = {{
    {ModelId::fold, "fold"},
    {ModelId::cusp, "cusp"},
    {ModelId::swallowtail, "swallowtail"},
    {ModelId::elliptic_umbilic, "elliptic-umbilic"},
    {ModelId::hyperbolic_umbilic, "hyperbolic-umbilic"},
    {ModelId::elliptic_umbilic_lensing, "elliptic-umbilic-lensing"},
    {ModelId::hyperbolic_umbilic_lensing, "hyperbolic-umbilic-lensing"},
}};

BiPoly term(int i, int j, double c) {
  BiPoly p;
  p.add_term(i, j, c);
  return p;
}

std::vector<cplx> roots_with_multiplicity(const UniPoly& p) {
  std::vector<cplx> out;
  if (p.degree() < 1) return out;
  for (const RootCluster& r : aberth_roots(p))
    for (int k = 0; k < r.multiplicity_estimate; ++k) out.push_back(r.value);
  return out;
}

}  // namespace

std::string_view to_string(ModelId id) noexcept {
  for (const auto& n : kNames)
    if (n.id == id) return n.name;
  return "unknown";
}

ModelId parse_model(std::string_view name) {
  for (const auto& n : kNames)
    if (n.name == name) return n.id;
  throw Error(ErrorCode::unknown_model, "unknown model '" + std::string(name) + "'");
}

bool uses_c(ModelId id) noexcept {
  return id == ModelId::swallowtail || id == ModelId::elliptic_umbilic ||
         id == ModelId::hyperbolic_umbilic;
}

bool uses_p(ModelId id) noexcept {
  return id == ModelId::elliptic_umbilic_lensing || id == ModelId::hyperbolic_umbilic_lensing;
}

std::array<int, 2> expected_degrees(ModelId id) noexcept {
  switch (id) {
    case ModelId::fold: return {1, 2};
    case ModelId::cusp: return {1, 3};
    case ModelId::swallowtail: return {4, 1};
    default: return {2, 2};
  }
}

double CatastropheModel::shape_parameter() const noexcept {
  if (params_.c) return *params_.c;
  if (params_.p) return *params_.p;
  return 0.0;
}

std::array<BiPoly, 2> CatastropheModel::system() const {
  return {eta_[0] - BiPoly::constant(params_.y[0]), eta_[1] - BiPoly::constant(params_.y[1])};
}

CatastropheModel CatastropheModel::with_source(const Vec2& y) const {
  ControlParams p = params_;
  p.y = y;
  return instantiate(id_, p);
}

CatastropheModel instantiate(ModelId id, const ControlParams& params) {
  const std::string name(to_string(id));
  if (params.c && !uses_c(id))
    throw Error(ErrorCode::invalid_params, "model " + name + " does not take parameter c");
  if (params.p && !uses_p(id))
    throw Error(ErrorCode::invalid_params, "model " + name + " does not take parameter p");
  if (uses_c(id) && !params.c)
    throw Error(ErrorCode::invalid_params, "model " + name + " requires parameter c");
  if (uses_p(id) && !params.p)
    throw Error(ErrorCode::invalid_params, "model " + name + " requires parameter p");
  if (!std::isfinite(params.y[0]) || !std::isfinite(params.y[1]) ||
      (params.c && !std::isfinite(*params.c)) || (params.p && !std::isfinite(*params.p)))
    throw Error(ErrorCode::invalid_params, "non-finite parameter for model " + name);

  CatastropheModel m;
  m.id_ = id;
  m.params_ = params;
  const double y1 = params.y[0], y2 = params.y[1];
  const double c = params.c.value_or(0.0);
  const double p = params.p.value_or(0.0);

  // Every phi below starts with the source term y.x.
  BiPoly phi = term(1, 0, y1) + term(0, 1, y2);

  switch (id) {
    case ModelId::fold:
      m.eta_ = {term(1, 0, 1.0), term(0, 2, 1.0)};
      phi += term(2, 0, -0.5) + term(0, 3, -1.0 / 3.0);
      break;
    case ModelId::cusp:
      m.eta_ = {term(1, 0, 1.0), term(1, 1, 1.0) + term(0, 3, 1.0)};
      phi += term(2, 0, -0.5) + term(0, 2, -0.5 * y1) + term(0, 4, -0.25);
      break;
    case ModelId::swallowtail:
      m.eta_ = {term(1, 1, 1.0) + term(2, 0, c) + term(4, 0, 1.0), term(0, 1, 1.0)};
      phi += term(2, 0, -0.5 * y2) + term(0, 2, -0.5) + term(3, 0, -c / 3.0) + term(5, 0, -0.2);
      break;
    case ModelId::elliptic_umbilic:
      m.eta_ = {term(0, 2, 3.0) + term(2, 0, -3.0) + term(1, 0, -2.0 * c),
                term(1, 1, 6.0) + term(0, 1, -2.0 * c)};
      phi += term(2, 0, c) + term(0, 2, c) + term(3, 0, 1.0) + term(1, 2, -3.0);
      break;
    case ModelId::hyperbolic_umbilic:
      m.eta_ = {term(2, 0, -3.0) + term(0, 1, -c), term(0, 2, -3.0) + term(1, 0, -c)};
      phi += term(1, 1, c) + term(3, 0, 1.0) + term(0, 3, 1.0);
      break;
    case ModelId::elliptic_umbilic_lensing:
      m.eta_ = {term(2, 0, 1.0) + term(0, 2, -1.0), term(1, 1, -2.0) + term(0, 1, 4.0 * p)};
      // eta is the gradient of x1^3/3 - x1 x2^2 + 2p x2^2.
      phi += term(3, 0, -1.0 / 3.0) + term(1, 2, 1.0) + term(0, 2, -2.0 * p);
      break;
    case ModelId::hyperbolic_umbilic_lensing:
      m.eta_ = {term(2, 0, 1.0) + term(0, 1, 2.0 * p), term(0, 2, 1.0) + term(1, 0, 2.0 * p)};
      // eta is the gradient of x1^3/3 + x2^3/3 + 2p x1 x2.
      phi += term(3, 0, -1.0 / 3.0) + term(0, 3, -1.0 / 3.0) + term(1, 1, -2.0 * p);
      break;
  }
  m.phi_ = std::move(phi);
  m.degrees_ = {m.eta_[0].total_degree(), m.eta_[1].total_degree()};

  // c = 0 or p = 0 can drop a term but never the top-degree one.
  if (m.degrees_ != expected_degrees(id))
    throw Error(ErrorCode::internal, "degree table mismatch for model " + name);
  return m;
}

double fermat_potential(const CatastropheModel& model, const Vec2& x) {
  return model.phi()(cplx{x[0]}, cplx{x[1]}).real();
}

Vec2 stationarity_form(const CatastropheModel& model, const Vec2& x) {
  const CPair e = model.eta_at({cplx{x[0]}, cplx{x[1]}});
  const Vec2& y = model.source();
  const double r1 = y[0] - e[0].real();
  const double r2 = y[1] - e[1].real();
  switch (model.id()) {
    case ModelId::cusp: return {r1, r2 - r1 * x[1]};
    case ModelId::swallowtail: return {r1 - r2 * x[0], r2};
    default: return {r1, r2};
  }
}

Vec2 fd_gradient(const CatastropheModel& model, const Vec2& x, double h) {
  const double g1 = (fermat_potential(model, {x[0] + h, x[1]}) -
                     fermat_potential(model, {x[0] - h, x[1]})) / (2.0 * h);
  const double g2 = (fermat_potential(model, {x[0], x[1] + h}) -
                     fermat_potential(model, {x[0], x[1] - h})) / (2.0 * h);
  return {g1, g2};
}

double gradient_check(const CatastropheModel& model, const Vec2& x) {
  const Vec2 fd = fd_gradient(model, x);
  const Vec2 st = stationarity_form(model, x);
  return std::max(std::abs(fd[0] - st[0]), std::abs(fd[1] - st[1]));
}

ComplexJacobian jacobian(const CatastropheModel& model, const CPair& z) {
  const auto& eta = model.eta();
  ComplexJacobian j;
  j.matrix << eta[0].derivative(Var::z1)(z), eta[0].derivative(Var::z2)(z),
      eta[1].derivative(Var::z1)(z), eta[1].derivative(Var::z2)(z);
  j.det = j.matrix(0, 0) * j.matrix(1, 1) - j.matrix(0, 1) * j.matrix(1, 0);
  return j;
}

RealHessian hessian_phi(const CatastropheModel& model, const Vec2& x) {
  const BiPoly g1 = model.phi().derivative(Var::z1);
  const BiPoly g2 = model.phi().derivative(Var::z2);
  const CPair z{cplx{x[0]}, cplx{x[1]}};
  RealHessian h;
  h.matrix << g1.derivative(Var::z1)(z).real(), g1.derivative(Var::z2)(z).real(),
      g2.derivative(Var::z1)(z).real(), g2.derivative(Var::z2)(z).real();
  h.det = h.matrix.determinant();
  return h;
}

RealHessian fd_hessian_phi(const CatastropheModel& model, const Vec2& x, double h) {
  auto f = [&](double a, double b) { return fermat_potential(model, {x[0] + a, x[1] + b}); };
  const double f0 = f(0, 0);
  const double h11 = (f(h, 0) - 2.0 * f0 + f(-h, 0)) / (h * h);
  const double h22 = (f(0, h) - 2.0 * f0 + f(0, -h)) / (h * h);
  const double h12 = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
  RealHessian out;
  out.matrix << h11, h12, h12, h22;
  out.det = out.matrix.determinant();
  return out;
}

EliminationRecipe eliminate(const CatastropheModel& model) {
  const double y1 = model.source()[0], y2 = model.source()[1];
  const double c = model.params().c.value_or(0.0);
  const double p = model.params().p.value_or(0.0);

  EliminationRecipe r;
  switch (model.id()) {
    case ModelId::fold:
      r.eliminated_variable = Var::z1;
      r.solved_variable = Var::z2;
      r.eliminant = UniPoly{-y2, 0.0, 1.0};
      r.back_substitution = [y1](cplx w) { return CPair{cplx{y1}, w}; };
      r.guard_description = "none";
      break;
    case ModelId::cusp:
      r.eliminated_variable = Var::z1;
      r.solved_variable = Var::z2;
      r.eliminant = UniPoly{-y2, y1, 0.0, 1.0};
      r.back_substitution = [y1](cplx w) { return CPair{cplx{y1}, w}; };
      r.guard_description = "none";
      break;
    case ModelId::swallowtail:
      r.eliminated_variable = Var::z2;
      r.solved_variable = Var::z1;
      r.eliminant = UniPoly{-y1, y2, c, 0.0, 1.0};
      r.back_substitution = [y2](cplx w) { return CPair{w, cplx{y2}}; };
      r.guard_description = "none";
      break;
    case ModelId::elliptic_umbilic: {
      // eta2 = 2 z2 (3 z1 - c) gives z2; substitute into eta1.
      const UniPoly a{y1, 2.0 * c, 3.0};
      const UniPoly b{-2.0 * c, 6.0};
      r.eliminated_variable = Var::z2;
      r.solved_variable = Var::z1;
      r.eliminant = UniPoly{3.0 * y2 * y2} - a * b * b;
      r.guard = b;
      r.back_substitution = [y2, c](cplx w) { return CPair{w, y2 / (6.0 * w - 2.0 * c)}; };
      r.guard_description = "6 z1 - 2c = 0 (z1 = c/3); z2 then solves eta1 = y1 directly";
      break;
    }
    case ModelId::hyperbolic_umbilic: {
      if (c == 0.0)
        throw Error(ErrorCode::degenerate_parameters,
                    "hyperbolic-umbilic elimination divides by c; c = 0 decouples the system");
      const UniPoly a{y1, 0.0, 3.0};
      r.eliminated_variable = Var::z2;
      r.solved_variable = Var::z1;
      r.eliminant = 3.0 * (a * a) + UniPoly{c * c * y2, c * c * c};
      r.guard = UniPoly{c};
      r.back_substitution = [y1, c](cplx w) { return CPair{w, -(y1 + 3.0 * w * w) / c}; };
      r.guard_description = "c = 0";
      break;
    }
    case ModelId::elliptic_umbilic_lensing: {
      // eta2 = z2 (4p - 2 z1) gives z2; substitute into eta1.
      const UniPoly a{-y1, 0.0, 1.0};
      const UniPoly b{4.0 * p, -2.0};
      r.eliminated_variable = Var::z2;
      r.solved_variable = Var::z1;
      r.eliminant = a * b * b - UniPoly{y2 * y2};
      r.guard = b;
      r.back_substitution = [y2, p](cplx w) { return CPair{w, y2 / (4.0 * p - 2.0 * w)}; };
      r.guard_description = "4p - 2 z1 = 0 (z1 = 2p); z2 then solves eta1 = y1 directly";
      break;
    }
    case ModelId::hyperbolic_umbilic_lensing: {
      if (p == 0.0)
        throw Error(ErrorCode::degenerate_parameters,
                    "hyperbolic-umbilic-lensing elimination divides by p; p = 0 decouples the system");
      const UniPoly a{y1, 0.0, -1.0};
      r.eliminated_variable = Var::z2;
      r.solved_variable = Var::z1;
      r.eliminant = a * a + UniPoly{-4.0 * p * p * y2, 8.0 * p * p * p};
      r.guard = UniPoly{2.0 * p};
      r.back_substitution = [y1, p](cplx w) { return CPair{w, (y1 - w * w) / (2.0 * p)}; };
      r.guard_description = "p = 0";
      break;
    }
  }

  const auto sys = model.system();
  const Var solved = r.solved_variable;
  const Var elim = r.eliminated_variable;
  r.alternate = [sys, solved, elim](cplx root) {
    std::vector<CPair> out;
    for (const BiPoly& f : sys) {
      const UniPoly g = f.restrict(elim, root);
      if (g.degree() < 1) continue;
      for (const cplx& w : roots_with_multiplicity(g))
        out.push_back(solved == Var::z1 ? CPair{root, w} : CPair{w, root});
    }
    return out;
  };
  return r;
}

}  // namespace lens
