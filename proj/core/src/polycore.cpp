#include "lens/polycore.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "lens/error.hpp"

namespace lens {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// splitmix64 finalizer; only used to place the initial Aberth circle.
std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// sum |a_i| |z|^i, the scale of the Horner rounding error at z.
double abs_horner(const std::vector<cplx>& a, double r) noexcept {
  double acc = 0.0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * r + std::abs(*it);
  return acc;
}

}  // namespace

// ---------------------------------------------------------------- UniPoly

UniPoly::UniPoly(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  trim();
}

UniPoly::UniPoly(std::initializer_list<cplx> coeffs)
    : UniPoly(std::vector<cplx>(coeffs)) {}

UniPoly UniPoly::monomial(int k, cplx c) {
  std::vector<cplx> v(static_cast<std::size_t>(k) + 1, 0.0);
  v.back() = c;
  return UniPoly(std::move(v));
}

UniPoly UniPoly::from_roots(std::span<const cplx> roots, cplx leading) {
  std::vector<cplx> c{leading};
  for (const cplx& r : roots) {
    std::vector<cplx> next(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= r * c[k];
    }
    c = std::move(next);
  }
  return UniPoly(std::move(c));
}

void UniPoly::trim() {
  while (coeffs_.size() > 1 && coeffs_.back() == cplx{0.0}) coeffs_.pop_back();
}

bool UniPoly::is_zero() const noexcept {
  return coeffs_.size() == 1 && coeffs_[0] == cplx{0.0};
}

cplx UniPoly::operator[](int k) const noexcept {
  if (k < 0 || k > degree()) return 0.0;
  return coeffs_[static_cast<std::size_t>(k)];
}

double UniPoly::max_abs_coeff() const noexcept {
  double m = 0.0;
  for (const cplx& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

cplx UniPoly::operator()(cplx z) const noexcept {
  cplx acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

cplx eval_uni(const UniPoly& p, cplx z) noexcept { return p(z); }

UniPoly UniPoly::derivative() const {
  if (degree() == 0) return UniPoly{};
  std::vector<cplx> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k)
    d[k - 1] = coeffs_[k] * static_cast<double>(k);
  return UniPoly(std::move(d));
}

UniPoly& UniPoly::operator+=(const UniPoly& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), 0.0);
  for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
  trim();
  return *this;
}

UniPoly& UniPoly::operator-=(const UniPoly& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), 0.0);
  for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
  trim();
  return *this;
}

UniPoly& UniPoly::operator*=(cplx s) {
  for (cplx& c : coeffs_) c *= s;
  trim();
  return *this;
}

UniPoly operator*(const UniPoly& a, const UniPoly& b) {
  std::vector<cplx> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return UniPoly(std::move(c));
}

// ----------------------------------------------------------------- BiPoly

BiPoly::BiPoly(std::initializer_list<std::pair<const Exponent, cplx>> terms) {
  for (const auto& [e, c] : terms) add_term(e.first, e.second, c);
}

BiPoly BiPoly::constant(cplx c) {
  BiPoly p;
  p.add_term(0, 0, c);
  return p;
}

BiPoly BiPoly::variable(Var v) {
  BiPoly p;
  if (v == Var::z1)
    p.add_term(1, 0, 1.0);
  else
    p.add_term(0, 1, 1.0);
  return p;
}

void BiPoly::add_term(int i, int j, cplx c) {
  if (c == cplx{0.0}) return;
  auto [it, inserted] = terms_.try_emplace({i, j}, c);
  if (!inserted) {
    it->second += c;
    if (it->second == cplx{0.0}) terms_.erase(it);
  }
}

cplx BiPoly::coefficient(int i, int j) const noexcept {
  auto it = terms_.find({i, j});
  return it == terms_.end() ? cplx{0.0} : it->second;
}

int BiPoly::total_degree() const noexcept {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e.first + e.second);
  return d;
}

int BiPoly::degree_in(Var v) const noexcept {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, v == Var::z1 ? e.first : e.second);
  return d;
}

cplx BiPoly::operator()(cplx z1, cplx z2) const noexcept {
  // Degrees here are tiny; explicit power tables keep it exact for integers.
  int d1 = degree_in(Var::z1), d2 = degree_in(Var::z2);
  std::array<cplx, 16> p1{}, p2{};
  std::vector<cplx> big1, big2;
  cplx* w1 = p1.data();
  cplx* w2 = p2.data();
  if (d1 >= 16) { big1.resize(d1 + 1); w1 = big1.data(); }
  if (d2 >= 16) { big2.resize(d2 + 1); w2 = big2.data(); }
  w1[0] = 1.0;
  w2[0] = 1.0;
  for (int k = 1; k <= d1; ++k) w1[k] = w1[k - 1] * z1;
  for (int k = 1; k <= d2; ++k) w2[k] = w2[k - 1] * z2;
  cplx acc = 0.0;
  for (const auto& [e, c] : terms_) acc += c * w1[e.first] * w2[e.second];
  return acc;
}

BiPoly BiPoly::derivative(Var v) const {
  BiPoly d;
  for (const auto& [e, c] : terms_) {
    if (v == Var::z1 && e.first > 0) d.add_term(e.first - 1, e.second, c * double(e.first));
    if (v == Var::z2 && e.second > 0) d.add_term(e.first, e.second - 1, c * double(e.second));
  }
  return d;
}

BiPoly BiPoly::homogeneous_part(int k) const {
  BiPoly h;
  for (const auto& [e, c] : terms_)
    if (e.first + e.second == k) h.add_term(e.first, e.second, c);
  return h;
}

UniPoly BiPoly::restrict(Var free, cplx value) const {
  std::vector<cplx> c(static_cast<std::size_t>(degree_in(free)) + 1, 0.0);
  for (const auto& [e, coef] : terms_) {
    int kf = free == Var::z1 ? e.first : e.second;
    int ko = free == Var::z1 ? e.second : e.first;
    c[static_cast<std::size_t>(kf)] += coef * std::pow(value, ko);
  }
  return UniPoly(std::move(c));
}

double BiPoly::max_abs_coeff() const noexcept {
  double m = 0.0;
  for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

BiPoly& BiPoly::operator+=(const BiPoly& o) {
  for (const auto& [e, c] : o.terms_) add_term(e.first, e.second, c);
  return *this;
}

BiPoly& BiPoly::operator-=(const BiPoly& o) {
  for (const auto& [e, c] : o.terms_) add_term(e.first, e.second, -c);
  return *this;
}

BiPoly& BiPoly::operator*=(cplx s) {
  if (s == cplx{0.0}) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

BiPoly operator*(const BiPoly& a, const BiPoly& b) {
  BiPoly r;
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_)
      r.add_term(ea.first + eb.first, ea.second + eb.second, ca * cb);
  return r;
}

double max_coeff_difference(const BiPoly& a, const BiPoly& b) {
  return (a - b).max_abs_coeff();
}

// ------------------------------------------------------------------ Aberth

std::vector<cplx> aberth_iterate(const UniPoly& p, const AberthOptions& opts) {
  const int n = p.degree();
  if (n < 1 || p.leading() == cplx{0.0})
    throw Error(ErrorCode::invalid_params, "aberth_roots: polynomial must have degree >= 1");

  // Work on the polynomial scaled to unit max coefficient.
  const double scale = p.max_abs_coeff();
  std::vector<cplx> a = p.coeffs();
  for (cplx& c : a) c /= scale;

  if (n == 1) return {-a[0] / a[1]};

  const UniPoly q(a);
  const UniPoly dq = q.derivative();

  double cauchy = 0.0;
  for (int k = 0; k < n; ++k) cauchy = std::max(cauchy, std::abs(a[k] / a[n]));
  const double radius = 1.0 + cauchy;

  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const double theta0 =
      2.0 * std::numbers::pi * static_cast<double>(mix64(opts.seed) >> 11) * 0x1.0p-53;
  std::vector<cplx> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) z[k] = std::polar(radius, theta0 + golden * k);

  std::vector<char> done(static_cast<std::size_t>(n), 0);
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    bool all_done = true;
    for (int k = 0; k < n; ++k) {
      if (done[k]) continue;
      const cplx pz = q(z[k]);
      if (std::abs(pz) <= 4.0 * kEps * abs_horner(a, std::abs(z[k]))) {
        done[k] = 1;
        continue;
      }
      all_done = false;
      cplx dpz = dq(z[k]);
      if (dpz == cplx{0.0}) dpz = cplx{kEps, kEps};
      const cplx ratio = pz / dpz;
      cplx s = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == k) continue;
        cplx diff = z[k] - z[j];
        if (diff == cplx{0.0}) diff = cplx{kEps * (1.0 + std::abs(z[k])), 0.0};
        s += 1.0 / diff;
      }
      const cplx w = ratio / (1.0 - ratio * s);
      z[k] -= w;
      if (std::abs(w) <= kEps * std::abs(z[k])) done[k] = 1;
    }
    if (all_done) break;
  }

  const double bound = opts.tol * (1.0 + p.max_abs_coeff());
  for (const cplx& r : z) {
    const double growth = std::pow(std::max(1.0, std::abs(r)), n);
    if (!(std::abs(p(r)) <= bound * growth))
      throw Error(ErrorCode::non_convergence,
                  "aberth_roots: no convergence after " + std::to_string(it) + " iterations");
  }
  return z;
}

namespace {

// An m-fold root is a simple root of the (m-1)-th derivative.
cplx refine_multiple(const UniPoly& p, cplx z0, int m, double radius) {
  UniPoly q = p;
  for (int k = 1; k < m; ++k) q = q.derivative();
  const UniPoly dq = q.derivative();
  cplx z = z0;
  for (int it = 0; it < 20; ++it) {
    const cplx d = dq(z);
    if (d == cplx{0.0}) break;
    const cplx step = q(z) / d;
    z -= step;
    if (std::abs(step) <= kEps * (1.0 + std::abs(z))) break;
  }
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return z0;
  if (std::abs(z - z0) > 2.0 * radius + 1e-12 * (1.0 + std::abs(z0))) return z0;
  const double floor = 64.0 * kEps * abs_horner(p.coeffs(), std::abs(z));
  if (std::abs(p(z)) > std::max(std::abs(p(z0)), floor)) return z0;
  return z;
}

}  // namespace

std::vector<RootCluster> cluster_roots(const UniPoly& p, std::span<const cplx> roots) {
  struct Group {
    cplx sum;
    std::vector<cplx> members;
    cplx mean() const { return sum / static_cast<double>(members.size()); }
  };
  std::vector<Group> groups;
  groups.reserve(roots.size());
  for (const cplx& r : roots) groups.push_back({r, {r}});

  auto merge = [&](std::size_t i, std::size_t j) {
    groups[i].sum += groups[j].sum;
    groups[i].members.insert(groups[i].members.end(), groups[j].members.begin(),
                             groups[j].members.end());
    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(j));
  };

  // Tier 1: tight radius; Aberth leaves double roots ~sqrt(eps) apart.
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < groups.size() && !changed; ++i)
      for (std::size_t j = i + 1; j < groups.size() && !changed; ++j) {
        const cplx a = groups[i].mean(), b = groups[j].mean();
        if (std::abs(a - b) <= 1e-6 * (1.0 + std::max(std::abs(a), std::abs(b)))) {
          merge(i, j);
          changed = true;
        }
      }
  }

  // Tier 2: higher multiplicities spread as eps^(1/k); merge nearby groups
  // only if their common mean is a root at the rounding level. The whole
  // neighbourhood is tried first since partial means of a k-fold root miss.
  const std::vector<cplx>& a = p.coeffs();
  auto near = [](cplx x, cplx y) {
    return std::abs(x - y) <= 1e-4 * (1.0 + std::max(std::abs(x), std::abs(y)));
  };
  // Coefficients may carry absolute noise at eps * max|a| (interpolated resultants).
  const double noise = p.max_abs_coeff();
  auto is_root = [&](cplx m) {
    return std::abs(p(m)) <= 64.0 * kEps * (abs_horner(a, std::abs(m)) + noise);
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < groups.size() && !changed; ++i) {
      const cplx gi = groups[i].mean();
      std::vector<std::size_t> hood;
      cplx sum = groups[i].sum;
      std::size_t count = groups[i].members.size();
      for (std::size_t j = i + 1; j < groups.size(); ++j)
        if (near(gi, groups[j].mean())) {
          hood.push_back(j);
          sum += groups[j].sum;
          count += groups[j].members.size();
        }
      if (hood.empty()) continue;
      if (hood.size() > 1 && is_root(sum / static_cast<double>(count))) {
        for (auto it = hood.rbegin(); it != hood.rend(); ++it) merge(i, *it);
        changed = true;
        break;
      }
      for (std::size_t j : hood) {
        const cplx m = (groups[i].sum + groups[j].sum) /
                       static_cast<double>(groups[i].members.size() + groups[j].members.size());
        if (is_root(m)) {
          merge(i, j);
          changed = true;
          break;
        }
      }
    }
  }

  std::vector<RootCluster> out;
  out.reserve(groups.size());
  for (const Group& g : groups) {
    RootCluster c;
    c.value = g.mean();
    c.multiplicity_estimate = static_cast<int>(g.members.size());
    for (const cplx& m : g.members) c.radius = std::max(c.radius, std::abs(m - c.value));
    if (c.multiplicity_estimate > 1) c.value = refine_multiple(p, c.value, c.multiplicity_estimate, c.radius);
    c.residual = std::abs(p(c.value));
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const RootCluster& x, const RootCluster& y) {
    if (x.value.real() != y.value.real()) return x.value.real() < y.value.real();
    return x.value.imag() < y.value.imag();
  });
  return out;
}

std::vector<RootCluster> aberth_roots(const UniPoly& p, double tol, int max_iter,
                                      std::uint64_t seed) {
  const std::vector<cplx> raw = aberth_iterate(p, {tol, max_iter, seed});
  return cluster_roots(p, raw);
}

// ------------------------------------------------------------------ Newton

NewtonResult newton_polish2(const BiPoly& f1, const BiPoly& f2, CPair x0,
                            const NewtonOptions& opts) {
  const BiPoly d11 = f1.derivative(Var::z1), d12 = f1.derivative(Var::z2);
  const BiPoly d21 = f2.derivative(Var::z1), d22 = f2.derivative(Var::z2);

  NewtonResult res;
  res.x = x0;
  CPair best = x0;
  double best_r = std::numeric_limits<double>::infinity();

  for (int it = 0;; ++it) {
    const cplx F1 = f1(res.x), F2 = f2(res.x);
    const double r = std::max(std::abs(F1), std::abs(F2));
    res.history.push_back(r);
    if (r < best_r) {
      best_r = r;
      best = res.x;
    }
    res.iterations = it;
    if (r <= opts.tol) {
      res.status = NewtonStatus::converged;
      break;
    }
    if (it >= opts.max_iter) {
      res.status = NewtonStatus::not_converged;
      break;
    }
    const cplx a = d11(res.x), b = d12(res.x), c = d21(res.x), d = d22(res.x);
    const cplx det = a * d - b * c;
    if (std::abs(det) < opts.singular_guard) {
      res.status = NewtonStatus::singular_jacobian;
      break;
    }
    const cplx dx1 = (d * F1 - b * F2) / det;
    const cplx dx2 = (a * F2 - c * F1) / det;
    res.x[0] -= dx1;
    res.x[1] -= dx2;
    const double step = std::max(std::abs(dx1), std::abs(dx2));
    const double size = 1.0 + std::max(std::abs(res.x[0]), std::abs(res.x[1]));
    if (step <= 4.0 * kEps * size) {
      // At the rounding floor: another step cannot improve the iterate.
      const double r2 = std::max(std::abs(f1(res.x)), std::abs(f2(res.x)));
      res.history.push_back(r2);
      if (r2 < best_r) {
        best_r = r2;
        best = res.x;
      }
      res.iterations = it + 1;
      res.status = NewtonStatus::converged;
      break;
    }
  }
  res.x = best;
  res.residual = best_r;
  return res;
}

// --------------------------------------------------------------- Resultant

cplx sylvester_determinant(std::span<const cplx> p, std::span<const cplx> q) {
  const int m = static_cast<int>(p.size()) - 1;
  const int n = static_cast<int>(q.size()) - 1;
  const int size = m + n;
  if (size <= 0) return 1.0;
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(size, size);
  for (int r = 0; r < n; ++r)
    for (int k = 0; k <= m; ++k) s(r, r + k) = p[static_cast<std::size_t>(m - k)];
  for (int r = 0; r < m; ++r)
    for (int k = 0; k <= n; ++k) s(n + r, r + k) = q[static_cast<std::size_t>(n - k)];
  return s.partialPivLu().determinant();
}

UniPoly sylvester_resultant(const BiPoly& p, const BiPoly& q, Var eliminate) {
  const int a = p.degree_in(eliminate);
  const int b = q.degree_in(eliminate);
  if (a + b == 0)
    throw Error(ErrorCode::degenerate_system,
                "sylvester_resultant: neither polynomial involves the eliminated variable");

  // Bezout bound on the degree of the resultant in the remaining variable.
  const int bound = std::max(1, p.total_degree() * q.total_degree());
  const int nodes = bound + 1;

  auto coeffs_at = [eliminate](const BiPoly& f, int formal, cplx w) {
    std::vector<cplx> c(static_cast<std::size_t>(formal) + 1, 0.0);
    for (const auto& [e, coef] : f.terms()) {
      const int ke = eliminate == Var::z1 ? e.first : e.second;
      const int ko = eliminate == Var::z1 ? e.second : e.first;
      c[static_cast<std::size_t>(ke)] += coef * std::pow(w, ko);
    }
    return c;
  };

  std::vector<cplx> values(static_cast<std::size_t>(nodes));
  for (int k = 0; k < nodes; ++k) {
    const cplx w = std::polar(1.0, 2.0 * std::numbers::pi * k / nodes);
    values[k] = sylvester_determinant(coeffs_at(p, a, w), coeffs_at(q, b, w));
  }

  // Inverse DFT on roots of unity recovers the coefficients exactly.
  std::vector<cplx> c(static_cast<std::size_t>(nodes), 0.0);
  for (int j = 0; j < nodes; ++j) {
    cplx acc = 0.0;
    for (int k = 0; k < nodes; ++k)
      acc += values[k] * std::polar(1.0, -2.0 * std::numbers::pi * double(j) * k / nodes);
    c[j] = acc / static_cast<double>(nodes);
  }

  double cmax = 0.0;
  for (const cplx& v : c) cmax = std::max(cmax, std::abs(v));
  const double ref = std::pow(1.0 + p.max_abs_coeff(), b) * std::pow(1.0 + q.max_abs_coeff(), a);
  if (cmax <= 1e-12 * ref)
    throw Error(ErrorCode::degenerate_system,
                "sylvester_resultant: resultant vanishes identically (common factor)");
  for (cplx& v : c) {
    if (std::abs(v.real()) <= 1e-13 * cmax) v.real(0.0);
    if (std::abs(v.imag()) <= 1e-13 * cmax) v.imag(0.0);
  }
  return UniPoly(std::move(c));
}

}  // namespace lens
