#pragma once

// Complex polynomial arithmetic and root finding: dense univariate
// polynomials, sparse bivariate polynomials, Aberth-Ehrlich simultaneous
// iteration, 2-D Newton polishing and Sylvester resultants.

#include <array>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace lens {

using cplx = std::complex<double>;
using CPair = std::array<cplx, 2>;

/// Dense univariate polynomial, coefficients in ascending degree.
/// Trailing zeros are trimmed on construction; the zero polynomial is
/// stored as a single zero coefficient and reports degree 0.
class UniPoly {
public:
  UniPoly() : coeffs_{cplx{0.0}} {}
  explicit UniPoly(std::vector<cplx> coeffs);
  UniPoly(std::initializer_list<cplx> coeffs);

  static UniPoly monomial(int k, cplx c = 1.0);
  /// leading * prod (z - r_i)
  static UniPoly from_roots(std::span<const cplx> roots, cplx leading = 1.0);

  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const noexcept;
  const std::vector<cplx>& coeffs() const noexcept { return coeffs_; }
  cplx operator[](int k) const noexcept;
  cplx leading() const noexcept { return coeffs_.back(); }
  double max_abs_coeff() const noexcept;

  /// Horner evaluation.
  cplx operator()(cplx z) const noexcept;
  UniPoly derivative() const;

  UniPoly& operator+=(const UniPoly& o);
  UniPoly& operator-=(const UniPoly& o);
  UniPoly& operator*=(cplx s);
  friend UniPoly operator+(UniPoly a, const UniPoly& b) { return a += b; }
  friend UniPoly operator-(UniPoly a, const UniPoly& b) { return a -= b; }
  friend UniPoly operator*(const UniPoly& a, const UniPoly& b);
  friend UniPoly operator*(UniPoly a, cplx s) { return a *= s; }
  friend UniPoly operator*(cplx s, UniPoly a) { return a *= s; }

private:
  void trim();
  std::vector<cplx> coeffs_;
};

cplx eval_uni(const UniPoly& p, cplx z) noexcept;

enum class Var { z1, z2 };

constexpr Var other(Var v) noexcept { return v == Var::z1 ? Var::z2 : Var::z1; }

/// Sparse polynomial in (z1, z2). Keys are exponent pairs (i, j) for
/// z1^i z2^j; zero coefficients are never stored.
class BiPoly {
public:
  using Exponent = std::pair<int, int>;
  using TermMap = std::map<Exponent, cplx>;

  BiPoly() = default;
  BiPoly(std::initializer_list<std::pair<const Exponent, cplx>> terms);

  static BiPoly constant(cplx c);
  static BiPoly variable(Var v);

  void add_term(int i, int j, cplx c);
  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  cplx coefficient(int i, int j) const noexcept;

  int total_degree() const noexcept;
  int degree_in(Var v) const noexcept;

  cplx operator()(cplx z1, cplx z2) const noexcept;
  cplx operator()(const CPair& z) const noexcept { return (*this)(z[0], z[1]); }

  BiPoly derivative(Var v) const;
  /// Terms of total degree exactly k.
  BiPoly homogeneous_part(int k) const;
  /// Polynomial in `free` with the other variable fixed at `value`.
  UniPoly restrict(Var free, cplx value) const;
  /// Largest coefficient modulus; 0 for the zero polynomial.
  double max_abs_coeff() const noexcept;

  BiPoly& operator+=(const BiPoly& o);
  BiPoly& operator-=(const BiPoly& o);
  BiPoly& operator*=(cplx s);
  friend BiPoly operator+(BiPoly a, const BiPoly& b) { return a += b; }
  friend BiPoly operator-(BiPoly a, const BiPoly& b) { return a -= b; }
  friend BiPoly operator*(const BiPoly& a, const BiPoly& b);
  friend BiPoly operator*(BiPoly a, cplx s) { return a *= s; }
  friend BiPoly operator*(cplx s, BiPoly a) { return a *= s; }

private:
  TermMap terms_;
};

/// max over exponents of |a_e - b_e|.
double max_coeff_difference(const BiPoly& a, const BiPoly& b);

struct RootCluster {
  cplx value;
  int multiplicity_estimate = 1;
  double radius = 0.0;
  double residual = 0.0;
};

struct AberthOptions {
  double tol = 1e-12;
  int max_iter = 500;
  std::uint64_t seed = 0;
};

/// Raw Aberth-Ehrlich iterates: exactly degree() approximations, unclustered.
/// Throws Error(non_convergence) if the scaled residual test fails.
std::vector<cplx> aberth_iterate(const UniPoly& p, const AberthOptions& opts = {});

/// Groups approximations of the same (possibly multiple) root.
std::vector<RootCluster> cluster_roots(const UniPoly& p, std::span<const cplx> roots);

/// All roots of p as clusters whose multiplicities sum to deg p.
std::vector<RootCluster> aberth_roots(const UniPoly& p, double tol = 1e-12,
                                      int max_iter = 500, std::uint64_t seed = 0);

enum class NewtonStatus { converged, not_converged, singular_jacobian };

struct NewtonResult {
  CPair x{};
  double residual = 0.0;
  int iterations = 0;
  NewtonStatus status = NewtonStatus::not_converged;
  /// max(|f1|, |f2|) at every visited iterate, starting with x0.
  std::vector<double> history;

  bool converged() const noexcept { return status == NewtonStatus::converged; }
};

struct NewtonOptions {
  double tol = 1e-13;
  int max_iter = 60;
  double singular_guard = 1e-10;
};

/// Newton's method on the square system (f1, f2) = 0 from x0.
NewtonResult newton_polish2(const BiPoly& f1, const BiPoly& f2, CPair x0,
                            const NewtonOptions& opts = {});

/// Resultant of p and q with respect to `eliminate`, as a polynomial in the
/// remaining variable. Built by evaluating the Sylvester determinant on the
/// unit circle at deg+1 nodes and interpolating. Throws
/// Error(degenerate_system) if the resultant vanishes identically.
UniPoly sylvester_resultant(const BiPoly& p, const BiPoly& q, Var eliminate);

/// Sylvester determinant of two univariate polynomials with formal degrees
/// (coefficient vectors are used as given, including zero leading terms).
cplx sylvester_determinant(std::span<const cplx> p, std::span<const cplx> q);

}  // namespace lens
