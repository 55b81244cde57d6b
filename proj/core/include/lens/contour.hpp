#pragma once

#include <array>
#include <functional>
#include <vector>

namespace lens {

/// Axis-aligned rectangle [x_lo, x_hi] x [y_lo, y_hi].
struct Window {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double y_lo = 0.0;
  double y_hi = 0.0;
};

struct Polyline {
  std::vector<std::array<double, 2>> points;
  bool closed = false;
};

/// Level set f = level by marching squares on an nx x ny cell grid, stitched
/// into polylines. Saddle cells are resolved by the cell-centre average.
std::vector<Polyline> marching_squares(const std::function<double(double, double)>& f,
                                       const Window& window, int nx, int ny, double level = 0.0);

}  // namespace lens
