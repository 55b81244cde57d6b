#include "lens/contour.hpp"

#include <cstdint>
#include <unordered_map>

namespace lens {

std::vector<Polyline> marching_squares(const std::function<double(double, double)>& f,
                                       const Window& window, int nx, int ny, double level) {
  std::vector<Polyline> lines;
  if (nx < 1 || ny < 1) return lines;

  const double hx = (window.x_hi - window.x_lo) / nx;
  const double hy = (window.y_hi - window.y_lo) / ny;
  auto X = [&](int i) { return window.x_lo + i * hx; };
  auto Y = [&](int j) { return window.y_lo + j * hy; };

  std::vector<double> v(static_cast<std::size_t>(nx + 1) * (ny + 1));
  auto at = [&](int i, int j) -> double& { return v[static_cast<std::size_t>(j) * (nx + 1) + i]; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) at(i, j) = f(X(i), Y(j)) - level;

  const std::int64_t n_horizontal = static_cast<std::int64_t>(nx) * (ny + 1);
  auto h_edge = [&](int i, int j) { return static_cast<std::int64_t>(j) * nx + i; };
  auto v_edge = [&](int i, int j) { return n_horizontal + static_cast<std::int64_t>(j) * (nx + 1) + i; };

  auto above = [](double x) { return x >= 0.0; };
  auto cross = [](double a, double b) { return a / (a - b); };

  auto edge_point = [&](std::int64_t id) -> std::array<double, 2> {
    if (id < n_horizontal) {
      const int j = static_cast<int>(id / nx), i = static_cast<int>(id % nx);
      const double t = cross(at(i, j), at(i + 1, j));
      return {X(i) + t * hx, Y(j)};
    }
    const std::int64_t k = id - n_horizontal;
    const int j = static_cast<int>(k / (nx + 1)), i = static_cast<int>(k % (nx + 1));
    const double t = cross(at(i, j), at(i, j + 1));
    return {X(i), Y(j) + t * hy};
  };

  std::vector<std::array<std::int64_t, 2>> segments;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double a = at(i, j), b = at(i + 1, j), c = at(i + 1, j + 1), d = at(i, j + 1);
      const bool sa = above(a), sb = above(b), sc = above(c), sd = above(d);
      const std::int64_t bottom = h_edge(i, j), right = v_edge(i + 1, j);
      const std::int64_t top = h_edge(i, j + 1), left = v_edge(i, j);
      std::vector<std::int64_t> hits;
      if (sa != sb) hits.push_back(bottom);
      if (sb != sc) hits.push_back(right);
      if (sc != sd) hits.push_back(top);
      if (sd != sa) hits.push_back(left);
      if (hits.size() == 2) {
        segments.push_back({hits[0], hits[1]});
      } else if (hits.size() == 4) {
        const bool centre = above(0.25 * (a + b + c + d));
        if (centre == sa) {
          segments.push_back({bottom, right});
          segments.push_back({top, left});
        } else {
          segments.push_back({left, bottom});
          segments.push_back({right, top});
        }
      }
    }
  }

  std::unordered_map<std::int64_t, std::vector<std::size_t>> incident;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    incident[segments[s][0]].push_back(s);
    incident[segments[s][1]].push_back(s);
  }
  std::vector<char> used(segments.size(), 0);

  auto walk = [&](std::size_t first, std::int64_t start_edge) {
    Polyline line;
    std::int64_t edge = start_edge;
    std::size_t seg = first;
    line.points.push_back(edge_point(edge));
    while (true) {
      used[seg] = 1;
      edge = segments[seg][0] == edge ? segments[seg][1] : segments[seg][0];
      if (edge == start_edge) {
        line.closed = true;
        break;
      }
      line.points.push_back(edge_point(edge));
      std::size_t next = segments.size();
      for (std::size_t cand : incident[edge])
        if (!used[cand]) next = cand;
      if (next == segments.size()) break;
      seg = next;
    }
    lines.push_back(std::move(line));
  };

  // Open chains start at edges touched by a single segment (grid boundary).
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (used[s]) continue;
    for (std::int64_t e : segments[s]) {
      if (incident[e].size() == 1) {
        walk(s, e);
        break;
      }
    }
  }
  for (std::size_t s = 0; s < segments.size(); ++s)
    if (!used[s]) walk(s, segments[s][0]);
  return lines;
}

}  // namespace lens
