#include "lens/lefschetz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "lens/error.hpp"

namespace lens {

namespace {

// Two Newton steps on a polynomial; Aberth output is already close.
cplx polish_root(const UniPoly& p, cplx z) {
  const UniPoly dp = p.derivative();
  for (int k = 0; k < 2; ++k) {
    const cplx d = dp(z);
    if (d == cplx{0.0}) break;
    z -= p(z) / d;
  }
  return z;
}

std::string format_complex(cplx z) {
  char buf[64];
  const double re = z.real() == 0.0 ? 0.0 : z.real();
  const double im = z.imag() == 0.0 ? 0.0 : z.imag();
  if (im == 0.0)
    std::snprintf(buf, sizeof buf, "%.12g", re);
  else
    std::snprintf(buf, sizeof buf, "%.12g%+.12gi", re, im);
  return buf;
}

void normalize(std::vector<cplx>& coords) {
  std::size_t arg = 0;
  for (std::size_t k = 1; k < coords.size(); ++k)
    if (std::abs(coords[k]) > std::abs(coords[arg])) arg = k;
  const cplx s = coords[arg];
  for (cplx& c : coords) {
    c /= s;
    // Roots of a multiple factor at 0 come back at rounding level.
    if (std::abs(c.real()) <= 1e-14) c.real(0.0);
    if (std::abs(c.imag()) <= 1e-14) c.imag(0.0);
  }
  coords[arg] = 1.0;
}

}  // namespace

// ---------------------------------------------------------- fixed-point map

Eigen::Matrix2cd FixedPointMap::derivative(const CPair& z) const {
  Eigen::Matrix2cd d;
  d << f[0].derivative(Var::z1)(z), f[0].derivative(Var::z2)(z), f[1].derivative(Var::z1)(z),
      f[1].derivative(Var::z2)(z);
  return d;
}

cplx FixedPointMap::det_identity_minus_derivative(const CPair& z) const {
  const Eigen::Matrix2cd a = Eigen::Matrix2cd::Identity() - derivative(z);
  return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
}

BiPoly FixedPointMap::det_identity_minus_derivative_poly() const {
  const BiPoly one = BiPoly::constant(1.0);
  const BiPoly a = one - f[0].derivative(Var::z1);
  const BiPoly b = BiPoly{} - f[0].derivative(Var::z2);
  const BiPoly c = BiPoly{} - f[1].derivative(Var::z1);
  const BiPoly d = one - f[1].derivative(Var::z2);
  return a * d - b * c;
}

FixedPointMap fixed_point_map(const CatastropheModel& model) {
  return fixed_point_map(model, {cplx{model.source()[0]}, cplx{model.source()[1]}});
}

FixedPointMap fixed_point_map(const CatastropheModel& model, const CPair& zeta) {
  FixedPointMap fm;
  fm.model_id = model.id();
  fm.eta = model.eta();
  fm.zeta = zeta;
  fm.eta_degrees = model.degrees();
  fm.m = model.max_degree();
  fm.f[0] = BiPoly::variable(Var::z1) - fm.eta[0] + BiPoly::constant(zeta[0]);
  fm.f[1] = BiPoly::variable(Var::z2) - fm.eta[1] + BiPoly::constant(zeta[1]);
  return fm;
}

BiPoly jacobian_det_poly(const CatastropheModel& model) {
  const auto& e = model.eta();
  return e[0].derivative(Var::z1) * e[1].derivative(Var::z2) -
         e[0].derivative(Var::z2) * e[1].derivative(Var::z1);
}

cplx affine_lefschetz_sum(const FixedPointMap& fm, const SolutionSet& ss) {
  if (!ss.complete)
    throw Error(ErrorCode::incomplete, "affine_lefschetz_sum: incomplete solution set");
  cplx sum = 0.0, mu_sum = 0.0;
  double scale = 0.0;
  for (const Solution& s : ss.solutions) {
    sum += 1.0 / fm.det_identity_minus_derivative(s.position);
    mu_sum += s.magnification;
    scale += std::abs(s.magnification);
  }
  if (std::abs(sum - mu_sum) > 1e-10 * std::max(1.0, scale))
    throw Error(ErrorCode::internal,
                "affine_lefschetz_sum: index sum disagrees with magnification sum");
  return sum;
}

// ------------------------------------------------------------ binary forms

cplx BinaryForm::operator()(cplx Z1, cplx Z2) const {
  cplx acc = 0.0;
  for (int k = 0; k <= degree; ++k)
    acc += coeffs[static_cast<std::size_t>(k)] * std::pow(Z1, degree - k) * std::pow(Z2, k);
  return acc;
}

bool BinaryForm::is_zero() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](cplx c) { return c == cplx{0.0}; });
}

UniPoly BinaryForm::chart_u() const { return UniPoly(coeffs); }

UniPoly BinaryForm::chart_v() const { return UniPoly(std::vector<cplx>(coeffs.rbegin(), coeffs.rend())); }

std::string ProjectivePoint::to_string() const {
  std::string s = "(";
  for (std::size_t k = 0; k < coords.size(); ++k) {
    if (k) s += ":";
    s += format_complex(coords[k]);
  }
  return s + ")";
}

std::vector<ProjectivePoint> binary_form_zeros(const BinaryForm& g) {
  if (g.is_zero())
    throw Error(ErrorCode::degenerate_system, "binary_form_zeros: form vanishes identically");
  std::vector<ProjectivePoint> out;
  const UniPoly u = g.chart_u();
  if (u.degree() >= 1) {
    for (const RootCluster& r : aberth_roots(u)) {
      ProjectivePoint p{{cplx{1.0}, r.value}};
      normalize(p.coords);
      out.push_back(p);
    }
  }
  if (u.degree() < g.degree) out.push_back({{cplx{0.0}, cplx{1.0}}});
  return out;
}

// ---------------------------------------------------------------- TriForm

void TriForm::add_term(const Exponent& e, cplx c) {
  if (c == cplx{0.0}) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == cplx{0.0}) terms_.erase(it);
  }
}

cplx TriForm::operator()(cplx Z0, cplx Z1, cplx Z2) const {
  cplx acc = 0.0;
  for (const auto& [e, c] : terms_) acc += c * std::pow(Z0, e[0]) * std::pow(Z1, e[1]) * std::pow(Z2, e[2]);
  return acc;
}

BiPoly TriForm::affine_restriction() const {
  BiPoly p;
  for (const auto& [e, c] : terms_) p.add_term(e[1], e[2], c);
  return p;
}

BinaryForm TriForm::at_infinity() const {
  BinaryForm g;
  g.degree = degree_;
  g.coeffs.assign(static_cast<std::size_t>(degree_) + 1, 0.0);
  for (const auto& [e, c] : terms_)
    if (e[0] == 0) g.coeffs[static_cast<std::size_t>(e[2])] += c;
  return g;
}

ProjectiveMap homogenize(const FixedPointMap& fm) {
  const int m = fm.m;
  if (m < 2) throw Error(ErrorCode::invalid_params, "homogenize: requires m >= 2");

  ProjectiveMap pm;
  pm.m = m;
  pm.eta_degrees = fm.eta_degrees;
  pm.equal_degrees = fm.eta_degrees[0] == fm.eta_degrees[1];

  pm.components[0] = TriForm(m);
  pm.components[0].add_term({m, 0, 0}, 1.0);
  for (int k = 0; k < 2; ++k) {
    TriForm F(m);
    // Z_k Z0^(m-1)
    F.add_term(k == 0 ? TriForm::Exponent{m - 1, 1, 0} : TriForm::Exponent{m - 1, 0, 1}, 1.0);
    // - Z0^(m - deg eta_k) * homogenized eta_k
    const int dk = fm.eta_degrees[static_cast<std::size_t>(k)];
    for (const auto& [e, c] : fm.eta[static_cast<std::size_t>(k)].terms())
      F.add_term({m - dk + (dk - e.first - e.second), e.first, e.second}, -c);
    // + zeta_k Z0^m
    F.add_term({m, 0, 0}, fm.zeta[static_cast<std::size_t>(k)]);
    pm.components[static_cast<std::size_t>(k) + 1] = std::move(F);
  }
  return pm;
}

std::vector<ProjectivePoint> indeterminacy_points(const ProjectiveMap& pm) {
  const BinaryForm g1 = pm.components[1].at_infinity();
  const BinaryForm g2 = pm.components[2].at_infinity();
  std::vector<ProjectivePoint> out;
  if (g1.is_zero() && g2.is_zero()) return out;  // not reachable for m >= 2 models

  const BinaryForm& base = g1.is_zero() ? g2 : g1;
  const BinaryForm& other = g1.is_zero() ? g1 : g2;
  double scale = 0.0;
  for (const cplx& c : other.coeffs) scale = std::max(scale, std::abs(c));
  for (const ProjectivePoint& p : binary_form_zeros(base)) {
    if (std::abs(other(p.coords[0], p.coords[1])) <= 1e-10 * std::max(1.0, scale))
      out.push_back({{cplx{0.0}, p.coords[0], p.coords[1]}});
  }
  return out;
}

std::vector<InfinityFixedPoint> infinity_fixed_points(const ProjectiveMap& pm) {
  if (!pm.equal_degrees)
    throw Error(ErrorCode::unequal_degrees,
                "infinity_fixed_points: eta components have unequal degrees (" +
                    std::to_string(pm.eta_degrees[0]) + "," + std::to_string(pm.eta_degrees[1]) +
                    "); the map at infinity has an indeterminacy point");
  const auto bad = indeterminacy_points(pm);
  if (!bad.empty())
    throw Error(ErrorCode::unequal_degrees,
                "infinity_fixed_points: indeterminacy point " + bad.front().to_string());

  const BinaryForm g1 = pm.components[1].at_infinity();
  const BinaryForm g2 = pm.components[2].at_infinity();
  const int m = pm.m;

  // Fixed points of (Z1:Z2) -> (g1:g2) are the zeros of Z1 g2 - Z2 g1.
  BinaryForm fix;
  fix.degree = m + 1;
  fix.coeffs.assign(static_cast<std::size_t>(m) + 2, 0.0);
  for (int k = 0; k <= m; ++k) {
    fix.coeffs[static_cast<std::size_t>(k)] += g2.coeffs[static_cast<std::size_t>(k)];
    fix.coeffs[static_cast<std::size_t>(k) + 1] -= g1.coeffs[static_cast<std::size_t>(k)];
  }
  if (fix.is_zero())
    throw Error(ErrorCode::degenerate_multiplier, "infinity_fixed_points: identity map at infinity");

  const UniPoly fix_u = fix.chart_u(), fix_v = fix.chart_v();
  const UniPoly num_u = g2.chart_u(), den_u = g1.chart_u();
  const UniPoly num_v = g1.chart_v(), den_v = g2.chart_v();

  std::vector<InfinityFixedPoint> out;
  int total_multiplicity = 0;
  const auto zeros = binary_form_zeros(fix);
  for (const ProjectivePoint& p : zeros) {
    InfinityFixedPoint fp;
    const bool use_u = std::abs(p.coords[0]) >= std::abs(p.coords[1]);
    fp.chart = use_u ? 'u' : 'v';
    const UniPoly& num = use_u ? num_u : num_v;
    const UniPoly& den = use_u ? den_u : den_v;
    cplx t = use_u ? p.coords[1] / p.coords[0] : p.coords[0] / p.coords[1];
    t = polish_root(use_u ? fix_u : fix_v, t);
    const cplx n = num(t), d = den(t);
    const cplx dn = num.derivative()(t), dd = den.derivative()(t);
    fp.chart_coordinate = t;
    fp.chart_residual = std::abs(n / d - t);
    fp.multiplier = (dn * d - n * dd) / (d * d);
    if (std::abs(1.0 - fp.multiplier) <= 1e-10)
      throw Error(ErrorCode::degenerate_multiplier,
                  "infinity_fixed_points: multiplier 1 at " + p.to_string());
    fp.index = 1.0 / (1.0 - fp.multiplier);
    fp.point = use_u ? std::array<cplx, 2>{cplx{1.0}, t} : std::array<cplx, 2>{t, cplx{1.0}};
    out.push_back(fp);
    ++total_multiplicity;
  }
  if (total_multiplicity != m + 1)
    throw Error(ErrorCode::degenerate_multiplier,
                "infinity_fixed_points: multiple fixed point at infinity (" +
                    std::to_string(total_multiplicity) + " distinct of " + std::to_string(m + 1) + ")");

  std::sort(out.begin(), out.end(), [](const InfinityFixedPoint& a, const InfinityFixedPoint& b) {
    for (int k = 0; k < 2; ++k) {
      if (a.point[k].real() != b.point[k].real()) return a.point[k].real() > b.point[k].real();
      if (a.point[k].imag() != b.point[k].imag()) return a.point[k].imag() < b.point[k].imag();
    }
    return false;
  });
  return out;
}

LefschetzReport lefschetz_total(const CatastropheModel& model) {
  const FixedPointMap fm = fixed_point_map(model);
  const ProjectiveMap pm = homogenize(fm);
  if (!pm.equal_degrees) {
    std::string pts;
    for (const ProjectivePoint& p : indeterminacy_points(pm)) pts += " " + p.to_string();
    throw Error(ErrorCode::unequal_degrees,
                "model " + std::string(to_string(model.id())) +
                    " has unequal component degrees; indeterminacy points at infinity:" + pts);
  }

  LefschetzReport rep;
  rep.solutions = solve_images(model);
  if (rep.solutions.status == SolveStatus::caustic)
    throw Error(ErrorCode::caustic_source, "lefschetz_total: source lies on or near a caustic");
  if (rep.solutions.status == SolveStatus::incomplete)
    throw Error(ErrorCode::incomplete_solve,
                "lefschetz_total: found " + std::to_string(rep.solutions.solutions.size()) + " of " +
                    std::to_string(model.bezout()) + " solutions");
  rep.affine_sum = affine_lefschetz_sum(fm, rep.solutions);
  rep.infinity_points = infinity_fixed_points(pm);
  for (const InfinityFixedPoint& p : rep.infinity_points) rep.infinity_sum += p.index;
  rep.total = rep.affine_sum + rep.infinity_sum;
  return rep;
}

std::vector<PolynomialFixedPoint> polynomial_fixed_points(const UniPoly& g, double tol) {
  if (g.degree() < 2)
    throw Error(ErrorCode::invalid_params, "rational_fixed_point_check: degree must be >= 2");
  const UniPoly h = g - UniPoly{0.0, 1.0};
  const UniPoly dg = g.derivative();
  std::vector<PolynomialFixedPoint> out;
  for (const RootCluster& r : aberth_roots(h)) {
    if (r.multiplicity_estimate > 1)
      throw Error(ErrorCode::degenerate_multiplier,
                  "rational_fixed_point_check: multiple fixed point (multiplier 1)");
    PolynomialFixedPoint fp;
    fp.point = polish_root(h, r.value);
    fp.multiplier = dg(fp.point);
    if (std::abs(1.0 - fp.multiplier) <= tol)
      throw Error(ErrorCode::degenerate_multiplier, "rational_fixed_point_check: multiplier 1");
    fp.index = 1.0 / (1.0 - fp.multiplier);
    out.push_back(fp);
  }
  return out;
}

cplx rational_fixed_point_check(const UniPoly& g, double tol) {
  cplx sum = 1.0;  // the fixed point at infinity: multiplier 0
  for (const PolynomialFixedPoint& fp : polynomial_fixed_points(g, tol)) sum += fp.index;
  return sum;
}

}  // namespace lens
