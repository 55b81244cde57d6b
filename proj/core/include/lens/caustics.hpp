#pragma once

// Critical curves (det J = 0), their caustics, beta-angle cusp detection and
// real-image counts over the source plane.

#include <functional>
#include <vector>

#include "lens/catalog.hpp"
#include "lens/contour.hpp"

namespace lens {

struct CriticalPoint {
  Vec2 x{};
  Vec2 caustic_y{};
  Vec2 tangent{};
  Vec2 kernel_dir{};
  /// Unsigned angle between tangent and kernel, in [0, pi/2].
  double beta = 0.0;
  /// det[tangent, kernel_dir]; changes sign at cusps.
  double signed_alignment = 0.0;
  /// Global parameter: branch index + local parameter in [0, 1).
  double parameter_t = 0.0;
  double det_j = 0.0;
  int branch = 0;
};

enum class CriticalMethod { automatic, closed_form, contour };

struct CriticalCurveOptions {
  CriticalMethod method = CriticalMethod::automatic;
  /// Marching-squares cells per axis.
  int grid = 512;
};

struct CurveBranch {
  /// Local parameter s in [0, 1] -> point on the critical set (unpolished).
  std::function<Vec2(double)> point;
  bool closed = false;
};

struct CriticalCurve {
  std::vector<CurveBranch> branches;
  /// Ordered by parameter_t.
  std::vector<CriticalPoint> points;
};

/// Throws Error(empty_critical_set) when the real critical set is empty or
/// degenerates to an umbilic point (c = 0 or p = 0).
CriticalCurve critical_curve(const CatastropheModel& model, int samples,
                             const CriticalCurveOptions& opts = {});

/// Fills caustic_y = eta(x).
void caustic_map(const CatastropheModel& model, std::vector<CriticalPoint>& points);

/// Critical point at local parameter s of a branch, polished onto det J = 0.
/// The kernel direction is oriented to agree with `kernel_ref` when given.
CriticalPoint evaluate_critical_point(const CatastropheModel& model, const CurveBranch& branch,
                                      int branch_index, double s, const Vec2* kernel_ref = nullptr);

struct CuspLocation {
  double parameter_t = 0.0;
  Vec2 x{};
  Vec2 caustic_y{};
  std::size_t nearest_sample = 0;
};

/// Zeros of the signed tangent/kernel alignment, refined by bisection to
/// parameter tolerance `tol`.
std::vector<CuspLocation> beta_cusp_detect(const CatastropheModel& model, const CriticalCurve& curve,
                                           double tol = 1e-8);

struct ImageCountGrid {
  Window window;
  int nx = 0;
  int ny = 0;
  int bezout = 0;
  /// Row-major, index j * nx + i with i along y1 and j along y2.
  std::vector<int> counts;
  std::vector<char> rejected;
  std::vector<double> sum_real_mu;
  std::vector<double> real_defect;  ///< |sum_real mu| / max(1, sum |mu|)

  Vec2 cell_center(int i, int j) const;
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
};

/// Solves at every cell centre of the source-plane window. Cells whose solve
/// is not complete (near-caustic or unseparated) are flagged as rejected.
ImageCountGrid image_count_grid(const CatastropheModel& model, const Window& window, int nx, int ny);

}  // namespace lens
