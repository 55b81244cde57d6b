#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lens/error.hpp"
#include "lens/polycore.hpp"
#include "support.hpp"

using namespace lens;

namespace {

std::vector<cplx> expand(const std::vector<RootCluster>& clusters) {
  std::vector<cplx> out;
  for (const RootCluster& c : clusters)
    for (int k = 0; k < c.multiplicity_estimate; ++k) out.push_back(c.value);
  return out;
}

// Product formula lc(p)^deg(q) * prod q(r_i) over the roots of p.
cplx product_resultant(const UniPoly& p, const UniPoly& q) {
  cplx acc = std::pow(p.leading(), q.degree());
  for (const cplx& r : aberth_iterate(p)) acc *= q(r);
  return acc;
}

}  // namespace

TEST_SUITE("polycore") {

TEST_CASE("horner evaluation") {
  CHECK(eval_uni(UniPoly{-1.0, 0.0, 1.0}, 1.0) == cplx{0.0});
  CHECK(eval_uni(UniPoly{0.0, -3.0, 0.0, 1.0}, 2.0) == cplx{2.0});
  const UniPoly one{1.0};
  CHECK(one(cplx{3.7, -2.0}) == cplx{1.0});
  CHECK(one.degree() == 0);
}

TEST_CASE("trailing zeros are trimmed and the zero polynomial has degree 0") {
  const UniPoly p{1.0, 2.0, 0.0, 0.0};
  CHECK(p.degree() == 1);
  CHECK(UniPoly{}.is_zero());
  CHECK(UniPoly{}.degree() == 0);
}

TEST_CASE("arithmetic and derivative") {
  const UniPoly a{1.0, 1.0};   // 1 + z
  const UniPoly b{-1.0, 1.0};  // -1 + z
  const UniPoly ab = a * b;
  CHECK(ab.degree() == 2);
  CHECK(ab[0] == cplx{-1.0});
  CHECK(ab[1] == cplx{0.0});
  CHECK(ab[2] == cplx{1.0});
  CHECK((ab.derivative())[1] == cplx{2.0});
  CHECK((a - a).is_zero());
}

TEST_CASE("aberth roots of small polynomials") {
  SUBCASE("z^2 - 1") {
    const auto r = aberth_roots(UniPoly{-1.0, 0.0, 1.0});
    REQUIRE(r.size() == 2);
    CHECK(test::close(r[0].value, -1.0, 1e-12));
    CHECK(test::close(r[1].value, 1.0, 1e-12));
    CHECK(r[0].multiplicity_estimate == 1);
    CHECK(r[1].multiplicity_estimate == 1);
  }
  SUBCASE("z^3 - 3z") {
    const auto r = aberth_roots(UniPoly{0.0, -3.0, 0.0, 1.0});
    REQUIRE(r.size() == 3);
    CHECK(test::close(r[0].value, -std::sqrt(3.0), 1e-12));
    CHECK(test::close(r[1].value, 0.0, 1e-12));
    CHECK(test::close(r[2].value, std::sqrt(3.0), 1e-12));
  }
  SUBCASE("(z - 1)^2 is one cluster of multiplicity 2") {
    const auto r = aberth_roots(UniPoly{1.0, -2.0, 1.0});
    REQUIRE(r.size() == 1);
    CHECK(r[0].multiplicity_estimate == 2);
    CHECK(test::close(r[0].value, 1.0, 1e-7));
  }
  SUBCASE("triple root") {
    const std::vector<cplx> roots{2.0, 2.0, 2.0, -1.0};
    const auto r = aberth_roots(UniPoly::from_roots(roots));
    REQUIRE(r.size() == 2);
    CHECK(r[1].multiplicity_estimate == 3);
    CHECK(test::close(r[1].value, 2.0, 1e-6));
  }
}

TEST_CASE("aberth rejects constants") {
  CHECK_THROWS_AS(aberth_roots(UniPoly{3.0}), Error);
  try {
    aberth_roots(UniPoly{});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_params);
  }
}

TEST_CASE("aberth is deterministic for a fixed seed") {
  const UniPoly p{cplx{0.3, -1.0}, 2.0, cplx{0.0, 1.0}, -1.0, 0.5};
  const auto a = aberth_iterate(p, {.seed = 7});
  const auto b = aberth_iterate(p, {.seed = 7});
  CHECK(a == b);
}

TEST_CASE("root count and reconstruction over random polynomials") {
  test::Rng rng(20240601);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = rng.integer(2, 6);
    std::vector<cplx> c(static_cast<std::size_t>(n) + 1);
    for (cplx& a : c) a = rng.in_unit_disc();
    if (std::abs(c.back()) < 1e-3) c.back() = 0.5;
    const UniPoly p(c);
    const auto clusters = aberth_roots(p);
    const auto roots = expand(clusters);
    REQUIRE(static_cast<int>(roots.size()) == n);

    const UniPoly back = UniPoly::from_roots(roots, p.leading());
    double worst = 0.0;
    for (int k = 0; k <= n; ++k) worst = std::max(worst, std::abs(back[k] - p[k]));
    CHECK(worst <= 1e-8 * p.max_abs_coeff());
  }
}

TEST_CASE("newton polish examples") {
  SUBCASE("linear system converges in one step") {
    const BiPoly f1{{{1, 0}, 1.0}, {{0, 0}, -1.0}};
    const BiPoly f2{{{0, 1}, 1.0}, {{0, 0}, -2.0}};
    const NewtonResult r = newton_polish2(f1, f2, {cplx{0.9}, cplx{2.1}});
    CHECK(r.converged());
    CHECK(test::close(r.x[0], 1.0, 1e-14));
    CHECK(test::close(r.x[1], 2.0, 1e-14));
    CHECK(r.iterations <= 2);
  }
  SUBCASE("rank-0 jacobian at the root") {
    const BiPoly f1{{{2, 0}, 1.0}};
    const BiPoly f2{{{0, 2}, 1.0}};
    const NewtonResult r = newton_polish2(f1, f2, {cplx{1e-6}, cplx{-1e-6}});
    CHECK(r.status == NewtonStatus::singular_jacobian);
  }
  SUBCASE("cusp system") {
    const BiPoly f1{{{1, 0}, 1.0}, {{0, 0}, 3.0}};
    const BiPoly f2{{{1, 1}, 1.0}, {{0, 3}, 1.0}};
    const NewtonResult r = newton_polish2(f1, f2, {cplx{-3.01}, cplx{1.72}});
    CHECK(r.converged());
    CHECK(r.residual < 1e-12);
    CHECK(test::close(r.x[0], -3.0, 1e-12));
    CHECK(test::close(r.x[1], std::sqrt(3.0), 1e-12));
  }
}

TEST_CASE("newton converges quadratically near a simple root") {
  test::Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    // Random root (a, b) of z1^2 + z2 - s1, z1 z2 + z2^3 - s2.
    const cplx a = rng.in_box(1.5), b = rng.in_box(1.5);
    const BiPoly f1{{{2, 0}, 1.0}, {{0, 1}, 1.0}, {{0, 0}, -(a * a + b)}};
    const BiPoly f2{{{1, 1}, 1.0}, {{0, 3}, 1.0}, {{0, 0}, -(a * b + b * b * b)}};
    // Skip near-singular roots.
    const cplx det = 2.0 * a * (a + 3.0 * b * b) - b;
    if (std::abs(det) < 0.5) continue;
    const CPair x0{a + 0.007 * rng.in_unit_disc(), b + 0.007 * rng.in_unit_disc()};
    const NewtonResult r = newton_polish2(f1, f2, x0);
    REQUIRE(r.converged());
    const auto& h = r.history;
    REQUIRE(h.size() >= 3);
    for (std::size_t k = h.size() - 3; k + 1 < h.size(); ++k) {
      if (h[k] < 1e-12) continue;
      CHECK(h[k + 1] <= std::max(50.0 * h[k] * h[k], 1e-13));
    }
  }
}

TEST_CASE("sylvester determinant matches the product formula") {
  CHECK(test::close(sylvester_determinant(std::vector<cplx>{-2.0, 1.0}, std::vector<cplx>{-5.0, 1.0}),
                    -3.0, 1e-14));
  test::Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<cplx> a(static_cast<std::size_t>(rng.integer(2, 5))), b(static_cast<std::size_t>(rng.integer(2, 5)));
    for (cplx& c : a) c = rng.in_unit_disc();
    for (cplx& c : b) c = rng.in_unit_disc();
    a.back() = b.back() = 1.0;
    const UniPoly p(a), q(b);
    const cplx det = sylvester_determinant(a, b);
    const cplx ref = product_resultant(p, q);
    CHECK(std::abs(det - ref) <= 1e-9 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("sylvester resultant examples") {
  SUBCASE("substitution case") {
    const cplx a{0.4, 0.0}, b{2.0, 0.0};
    const BiPoly p{{{1, 0}, 1.0}, {{0, 0}, -a}};
    const BiPoly q{{{0, 2}, 1.0}, {{0, 0}, -b}};
    const UniPoly r = sylvester_resultant(p, q, Var::z1);
    REQUIRE(r.degree() == 2);
    const cplx scale = r.leading();
    CHECK(test::close(r[0] / scale, -b, 1e-12));
    CHECK(test::close(r[1] / scale, 0.0, 1e-12));
  }
  SUBCASE("fold system gives two roots in z1") {
    const double y1 = 0.7, y2 = 1.3;
    const BiPoly p{{{1, 0}, 1.0}, {{0, 0}, -y1}};
    const BiPoly q{{{0, 2}, 1.0}, {{0, 0}, -y2}};
    const UniPoly r = sylvester_resultant(p, q, Var::z2);
    CHECK(r.degree() == 2);
    const auto roots = expand(aberth_roots(r));
    REQUIRE(roots.size() == 2);
    for (const cplx& z : roots) CHECK(test::close(z, y1, 1e-7));
  }
  SUBCASE("hyperbolic umbilic at c = 1 gives a quartic") {
    const double y1 = 0.3, y2 = -0.8;
    const BiPoly p{{{2, 0}, -3.0}, {{0, 1}, -1.0}, {{0, 0}, -y1}};
    const BiPoly q{{{0, 2}, -3.0}, {{1, 0}, -1.0}, {{0, 0}, -y2}};
    const UniPoly r = sylvester_resultant(p, q, Var::z2);
    CHECK(r.degree() == 4);
    for (const RootCluster& c : aberth_roots(r)) {
      // Each z1 root admits a z2 solving both equations.
      const cplx z2 = -3.0 * c.value * c.value - y1;
      CHECK(std::abs(q(c.value, z2)) <= 1e-9);
    }
  }
  SUBCASE("identically zero resultant") {
    const BiPoly p{{{1, 0}, 1.0}, {{0, 1}, 1.0}};
    CHECK_THROWS_AS(sylvester_resultant(p, p, Var::z1), Error);
  }
}

TEST_CASE("bivariate polynomial basics") {
  BiPoly p{{{2, 1}, 3.0}, {{0, 0}, -1.0}};
  CHECK(p.total_degree() == 3);
  CHECK(p.degree_in(Var::z1) == 2);
  CHECK(p.degree_in(Var::z2) == 1);
  CHECK(p(cplx{2.0}, cplx{1.0}) == cplx{11.0});
  const BiPoly d = p.derivative(Var::z1);
  CHECK(d.coefficient(1, 1) == cplx{6.0});
  CHECK(p.homogeneous_part(3).terms().size() == 1);
  const UniPoly r = p.restrict(Var::z2, 2.0);
  CHECK(r.degree() == 1);
  CHECK(r[1] == cplx{12.0});
  p.add_term(2, 1, -3.0);
  CHECK(p.total_degree() == 0);
}

}  // TEST_SUITE
