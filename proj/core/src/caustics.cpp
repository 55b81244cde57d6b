#include "lens/caustics.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lens/error.hpp"
#include "lens/imaging.hpp"
#include "lens/lefschetz.hpp"
#include "lens/parallel.hpp"

namespace lens {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Parameter ranges for the unbounded critical curves.
constexpr double kFoldHalfLength = 2.0;
constexpr double kCubicHalfRange = 1.5;
constexpr double kHyperbolaLogRange = 3.0;

[[noreturn]] void empty_set(const CatastropheModel& m, const char* why) {
  throw Error(ErrorCode::empty_critical_set,
              "critical set of " + std::string(to_string(m.id())) + " is degenerate: " + why);
}

std::vector<CurveBranch> hyperbola(double a) {
  std::vector<CurveBranch> out;
  for (double sign : {1.0, -1.0}) {
    out.push_back({[a, sign](double s) {
                     const double u = -kHyperbolaLogRange + 2.0 * kHyperbolaLogRange * s;
                     return Vec2{sign * a * std::exp(u), sign * a * std::exp(-u)};
                   },
                   false});
  }
  return out;
}

std::vector<CurveBranch> closed_form_branches(const CatastropheModel& m) {
  const double c = m.params().c.value_or(0.0);
  const double p = m.params().p.value_or(0.0);
  switch (m.id()) {
    case ModelId::fold:
      return {{[](double s) { return Vec2{kFoldHalfLength * (2.0 * s - 1.0), 0.0}; }, false}};
    case ModelId::cusp:
      return {{[](double s) {
                 const double t = kCubicHalfRange * (2.0 * s - 1.0);
                 return Vec2{-3.0 * t * t, t};
               },
               false}};
    case ModelId::swallowtail:
      return {{[c](double s) {
                 const double t = kCubicHalfRange * (2.0 * s - 1.0);
                 return Vec2{t, -2.0 * c * t - 4.0 * t * t * t};
               },
               false}};
    case ModelId::elliptic_umbilic: {
      if (c == 0.0) empty_set(m, "c = 0 collapses the critical circle to the umbilic point");
      const double r = std::abs(c) / 3.0;
      return {{[r](double s) { return Vec2{r * std::cos(kTwoPi * s), r * std::sin(kTwoPi * s)}; },
               true}};
    }
    case ModelId::hyperbolic_umbilic:
      if (c == 0.0) empty_set(m, "c = 0 makes the critical set singular at the umbilic point");
      return hyperbola(std::abs(c) / 6.0);
    case ModelId::elliptic_umbilic_lensing: {
      if (p == 0.0) empty_set(m, "p = 0 collapses the critical circle to the umbilic point");
      const double r = std::abs(p);
      return {{[p, r](double s) {
                 return Vec2{p + r * std::cos(kTwoPi * s), r * std::sin(kTwoPi * s)};
               },
               true}};
    }
    case ModelId::hyperbolic_umbilic_lensing:
      if (p == 0.0) empty_set(m, "p = 0 makes the critical set singular at the umbilic point");
      return hyperbola(std::abs(p));
  }
  return {};
}

Window contour_window(const CatastropheModel& m) {
  // Sized from the closed forms: 3x their bounding box about its centre.
  double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
  for (const CurveBranch& b : closed_form_branches(m)) {
    for (int k = 0; k <= 200; ++k) {
      const Vec2 x = b.point(k / 200.0);
      x_lo = std::min(x_lo, x[0]);
      x_hi = std::max(x_hi, x[0]);
      y_lo = std::min(y_lo, x[1]);
      y_hi = std::max(y_hi, x[1]);
    }
  }
  const double cx = 0.5 * (x_lo + x_hi), cy = 0.5 * (y_lo + y_hi);
  double hx = 0.5 * (x_hi - x_lo), hy = 0.5 * (y_hi - y_lo);
  const double floor = 0.1 * std::max({hx, hy, 1e-3});
  hx = std::max(hx, floor);
  hy = std::max(hy, floor);
  return {cx - 3.0 * hx, cx + 3.0 * hx, cy - 3.0 * hy, cy + 3.0 * hy};
}

CurveBranch polyline_branch(Polyline line) {
  if (line.closed) line.points.push_back(line.points.front());
  std::vector<double> arc{0.0};
  for (std::size_t k = 1; k < line.points.size(); ++k)
    arc.push_back(arc.back() + std::hypot(line.points[k][0] - line.points[k - 1][0],
                                          line.points[k][1] - line.points[k - 1][1]));
  const double length = arc.back();
  const bool closed = line.closed;
  auto pts = std::move(line.points);
  return {[pts, arc, length, closed](double s) {
            if (closed)
              s -= std::floor(s);
            else
              s = std::clamp(s, 0.0, 1.0);
            const double target = s * length;
            auto it = std::upper_bound(arc.begin(), arc.end(), target);
            std::size_t k = it == arc.begin() ? 0 : static_cast<std::size_t>(it - arc.begin()) - 1;
            k = std::min(k, pts.size() - 2);
            const double span = arc[k + 1] - arc[k];
            const double w = span > 0.0 ? (target - arc[k]) / span : 0.0;
            return Vec2{pts[k][0] + w * (pts[k + 1][0] - pts[k][0]),
                        pts[k][1] + w * (pts[k + 1][1] - pts[k][1])};
          },
          closed};
}

std::vector<CurveBranch> contour_branches(const CatastropheModel& m, int grid) {
  const BiPoly det = jacobian_det_poly(m);
  const Window w = contour_window(m);
  auto field = [&det](double a, double b) { return det(cplx{a}, cplx{b}).real(); };
  std::vector<CurveBranch> out;
  for (Polyline& line : marching_squares(field, w, grid, grid)) {
    if (line.points.size() < 3) continue;
    out.push_back(polyline_branch(std::move(line)));
  }
  if (out.empty()) empty_set(m, "no zero contour of det J in the window");
  return out;
}

struct DetField {
  BiPoly det, d1, d2;
  explicit DetField(const CatastropheModel& m)
      : det(jacobian_det_poly(m)), d1(det.derivative(Var::z1)), d2(det.derivative(Var::z2)) {}
  double value(const Vec2& x) const { return det(cplx{x[0]}, cplx{x[1]}).real(); }
  Vec2 grad(const Vec2& x) const {
    return {d1(cplx{x[0]}, cplx{x[1]}).real(), d2(cplx{x[0]}, cplx{x[1]}).real()};
  }
};

Vec2 polish_onto_critical_set(const DetField& f, Vec2 x) {
  for (int it = 0; it < 12; ++it) {
    const double d = f.value(x);
    const Vec2 g = f.grad(x);
    const double g2 = g[0] * g[0] + g[1] * g[1];
    if (g2 == 0.0) break;
    const Vec2 step{d * g[0] / g2, d * g[1] / g2};
    x[0] -= step[0];
    x[1] -= step[1];
    if (std::hypot(step[0], step[1]) <= 1e-15 * (1.0 + std::hypot(x[0], x[1]))) break;
  }
  return x;
}

bool crossing(double a, double b) {
  return (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0) || (b == 0.0 && a != 0.0);
}

}  // namespace

CriticalPoint evaluate_critical_point(const CatastropheModel& model, const CurveBranch& branch,
                                      int branch_index, double s, const Vec2* kernel_ref) {
  const DetField field(model);
  CriticalPoint cp;
  cp.branch = branch_index;
  cp.parameter_t = branch_index + (branch.closed ? s - std::floor(s) : s);
  cp.x = polish_onto_critical_set(field, branch.point(s));
  cp.det_j = field.value(cp.x);

  const Vec2 g = field.grad(cp.x);
  const double gn = std::hypot(g[0], g[1]);
  cp.tangent = gn > 0.0 ? Vec2{-g[1] / gn, g[0] / gn} : Vec2{0.0, 0.0};
  constexpr double delta = 1e-6;
  const double s_lo = branch.closed ? s - delta : std::max(0.0, s - delta);
  const double s_hi = branch.closed ? s + delta : std::min(1.0, s + delta);
  const Vec2 a = branch.point(s_lo), b = branch.point(s_hi);
  if (cp.tangent[0] * (b[0] - a[0]) + cp.tangent[1] * (b[1] - a[1]) < 0.0)
    cp.tangent = {-cp.tangent[0], -cp.tangent[1]};

  const ComplexJacobian jc = jacobian(model, {cplx{cp.x[0]}, cplx{cp.x[1]}});
  const Eigen::Matrix2d J = jc.matrix.real();
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(J, Eigen::ComputeFullV);
  Vec2 k{svd.matrixV()(0, 1), svd.matrixV()(1, 1)};
  if (kernel_ref) {
    if (k[0] * (*kernel_ref)[0] + k[1] * (*kernel_ref)[1] < 0.0) k = {-k[0], -k[1]};
  } else if ((std::abs(k[0]) >= std::abs(k[1]) ? k[0] : k[1]) < 0.0) {
    k = {-k[0], -k[1]};
  }
  cp.kernel_dir = k;
  cp.signed_alignment = cp.tangent[0] * k[1] - cp.tangent[1] * k[0];
  const double dot = cp.tangent[0] * k[0] + cp.tangent[1] * k[1];
  cp.beta = std::atan2(std::abs(cp.signed_alignment), std::abs(dot));
  return cp;
}

CriticalCurve critical_curve(const CatastropheModel& model, int samples,
                             const CriticalCurveOptions& opts) {
  CriticalCurve curve;
  curve.branches = opts.method == CriticalMethod::contour ? contour_branches(model, opts.grid)
                                                          : closed_form_branches(model);
  if (samples <= 0) return curve;

  const int nb = static_cast<int>(curve.branches.size());
  for (int b = 0; b < nb; ++b) {
    const CurveBranch& br = curve.branches[static_cast<std::size_t>(b)];
    const int n = samples / nb + (b < samples % nb ? 1 : 0);
    const Vec2* ref = nullptr;
    Vec2 last_kernel{};
    for (int k = 0; k < n; ++k) {
      const double s = br.closed ? double(k) / n : (n == 1 ? 0.5 : double(k) / (n - 1));
      CriticalPoint cp = evaluate_critical_point(model, br, b, s, ref);
      // Rank-0 points have no one-dimensional kernel.
      const ComplexJacobian jc = jacobian(model, {cplx{cp.x[0]}, cplx{cp.x[1]}});
      if (jc.matrix.cwiseAbs().maxCoeff() < 1e-12) continue;
      last_kernel = cp.kernel_dir;
      ref = &last_kernel;
      curve.points.push_back(cp);
    }
  }
  return curve;
}

void caustic_map(const CatastropheModel& model, std::vector<CriticalPoint>& points) {
  for (CriticalPoint& p : points) {
    const CPair e = model.eta_at({cplx{p.x[0]}, cplx{p.x[1]}});
    p.caustic_y = {e[0].real(), e[1].real()};
  }
}

std::vector<CuspLocation> beta_cusp_detect(const CatastropheModel& model, const CriticalCurve& curve,
                                           double tol) {
  std::vector<CuspLocation> cusps;
  const auto& pts = curve.points;

  auto locate = [&](int b, double lo, double hi, double f_lo, const Vec2& k_ref) {
    const CurveBranch& br = curve.branches[static_cast<std::size_t>(b)];
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      const double fm = evaluate_critical_point(model, br, b, mid, &k_ref).signed_alignment;
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fm < 0.0) == (f_lo < 0.0)) {
        lo = mid;
        f_lo = fm;
      } else {
        hi = mid;
      }
    }
    const double s = 0.5 * (lo + hi);
    const CriticalPoint cp = evaluate_critical_point(model, br, b, s, &k_ref);
    CuspLocation c;
    c.parameter_t = cp.parameter_t;
    c.x = cp.x;
    const CPair e = model.eta_at({cplx{c.x[0]}, cplx{c.x[1]}});
    c.caustic_y = {e[0].real(), e[1].real()};
    cusps.push_back(c);
  };

  std::size_t begin = 0;
  while (begin < pts.size()) {
    const int b = pts[begin].branch;
    std::size_t end = begin;
    while (end < pts.size() && pts[end].branch == b) ++end;
    const CurveBranch& br = curve.branches[static_cast<std::size_t>(b)];

    for (std::size_t i = begin; i + 1 < end; ++i) {
      const double sa = pts[i].signed_alignment, sb = pts[i + 1].signed_alignment;
      if (!crossing(sa, sb)) continue;
      const double lo = pts[i].parameter_t - b, hi = pts[i + 1].parameter_t - b;
      if (sb == 0.0)
        locate(b, hi, hi, sa, pts[i].kernel_dir);
      else
        locate(b, lo, hi, sa, pts[i].kernel_dir);
    }
    if (br.closed && end - begin >= 2) {
      // The kernel line field may come back reversed after one loop.
      const CriticalPoint& last = pts[end - 1];
      const CriticalPoint& first = pts[begin];
      const double flip =
          last.kernel_dir[0] * first.kernel_dir[0] + last.kernel_dir[1] * first.kernel_dir[1] < 0.0
              ? -1.0
              : 1.0;
      const double sa = last.signed_alignment, sb = flip * first.signed_alignment;
      if (crossing(sa, sb)) {
        const double lo = last.parameter_t - b;
        const double hi = 1.0 + (first.parameter_t - b);
        if (sb == 0.0)
          locate(b, hi, hi, sa, last.kernel_dir);
        else
          locate(b, lo, hi, sa, last.kernel_dir);
      }
    }
    begin = end;
  }

  for (CuspLocation& c : cusps) {
    double best = 1e300;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (pts[i].branch != static_cast<int>(std::floor(c.parameter_t))) continue;
      double d = std::abs(pts[i].parameter_t - c.parameter_t);
      if (curve.branches[static_cast<std::size_t>(pts[i].branch)].closed) d = std::min(d, 1.0 - d);
      if (d < best) {
        best = d;
        c.nearest_sample = i;
      }
    }
  }
  std::sort(cusps.begin(), cusps.end(),
            [](const CuspLocation& a, const CuspLocation& b) { return a.parameter_t < b.parameter_t; });
  return cusps;
}

Vec2 ImageCountGrid::cell_center(int i, int j) const {
  return {window.x_lo + (i + 0.5) * (window.x_hi - window.x_lo) / nx,
          window.y_lo + (j + 0.5) * (window.y_hi - window.y_lo) / ny};
}

ImageCountGrid image_count_grid(const CatastropheModel& model, const Window& window, int nx, int ny) {
  if (nx < 1 || ny < 1) throw Error(ErrorCode::invalid_params, "image_count_grid: empty resolution");
  ImageCountGrid g;
  g.window = window;
  g.nx = nx;
  g.ny = ny;
  g.bezout = model.bezout();
  const std::size_t n = static_cast<std::size_t>(nx) * ny;
  g.counts.assign(n, 0);
  g.rejected.assign(n, 0);
  g.sum_real_mu.assign(n, 0.0);
  g.real_defect.assign(n, 0.0);

  parallel_for(n, [&](std::size_t idx) {
    const int i = static_cast<int>(idx % nx), j = static_cast<int>(idx / nx);
    const SolutionSet ss = solve_images(model.with_source(g.cell_center(i, j)));
    int n_real = 0;
    for (const Solution& s : ss.solutions) n_real += s.is_real ? 1 : 0;
    g.counts[idx] = n_real;
    if (ss.status != SolveStatus::complete) {
      g.rejected[idx] = 1;
      return;
    }
    const InvariantReport r = invariant_report(ss);
    g.sum_real_mu[idx] = r.sum_real;
    g.real_defect[idx] = normalized_real_defect(r);
  });
  return g;
}

}  // namespace lens
