#include <doctest.h>

#include <random>

#include "bpv/fgl.hpp"
#include "bpv/weierstrass.hpp"

using namespace bpv;

namespace {
CtxPtr xt(int D = 8) {
  return make_context({"x0", "t"}, D, ScalarRing::prime_field(2), 1, 1);
}
}  // namespace

TEST_CASE("division by a plain power of t") {
  auto ctx = xt();
  TruncatedSeries t = TruncatedSeries::variable(ctx, 1);
  TruncatedSeries f = t * t * t;
  auto [q, r] = weierstrass_divrem(f, t * t, 2, 1);
  CHECK(q == t);
  CHECK(r.is_zero());
}

TEST_CASE("division with a nilpotent lower coefficient") {
  auto ctx = xt();
  TruncatedSeries t = TruncatedSeries::variable(ctx, 1);
  TruncatedSeries x = TruncatedSeries::variable(ctx, 0);
  TruncatedSeries phi = t * t - x * t;
  auto [q, r] = weierstrass_divrem(t * t, phi, 2, 1);
  CHECK(t * t == q * phi + r);
  // remainder is a polynomial of t-degree < 2
  for (const auto& [m, c] : r.terms()) CHECK(m[1] < 2);
  // q = 1 + x t^{-1}(...)-free check: q*phi recovers everything
  CHECK(q.coeff({0, 0}) == VPolynomial::constant(ctx->ring, 1, 1, 1));
}

TEST_CASE("unit constant required at degree d") {
  auto ctx = xt();
  TruncatedSeries t = TruncatedSeries::variable(ctx, 1);
  TruncatedSeries x = TruncatedSeries::variable(ctx, 0);
  CHECK_THROWS_AS(weierstrass_divrem(t, x * t * t, 2, 1), precondition_error);
  // non-nilpotent lower coefficient: constant term 1 at t^0
  TruncatedSeries one =
      TruncatedSeries::constant(ctx, VPolynomial::constant(ctx->ring, 1, 1, 1));
  CHECK_THROWS_AS(weierstrass_divrem(t, t * t + one, 2, 1), precondition_error);
}

TEST_CASE("degree beyond the truncation short-circuits") {
  auto ctx = xt(4);
  TruncatedSeries t = TruncatedSeries::variable(ctx, 1);
  auto [q, r] = weierstrass_divrem(t, t * t, 7, 1);
  CHECK(q.is_zero());
  CHECK(r == t);
}

TEST_CASE("randomized recombination over F_2 and Z/9") {
  for (auto ring : {ScalarRing::prime_field(2), ScalarRing::integers_mod(3, 2)}) {
    auto ctx = make_context({"x0", "t"}, 7, ring, 1, 2);
    std::mt19937 rng(99);
    long M = ring.modulus();
    auto random_series = [&](bool unit_at, int d) {
      TruncatedSeries f = TruncatedSeries::zero(ctx);
      for (int reps = 0; reps < 12; ++reps) {
        XMon m{static_cast<int>(rng() % 4), static_cast<int>(rng() % 6)};
        VPolynomial c = VPolynomial::constant(ring, 1, 2, static_cast<long>(rng() % M));
        if (rng() % 2)
          c = c * VPolynomial::generator(ring, 1, 2, 1 + static_cast<int>(rng() % 2));
        f.add_term(m, c);
      }
      if (unit_at) {
        // force a unit t^d coefficient and nilpotent lower ones
        TruncatedSeries g = TruncatedSeries::zero(ctx);
        for (const auto& [m, c] : f.terms()) {
          if (m[1] >= d || m[0] > 0)
            g.add_term(m, c);
          else
            g.add_term({m[0] + 1, m[1]}, c);
        }
        XMon lead{0, d};
        g.set_term(lead, VPolynomial::constant(ring, 1, 2, 1));
        return g;
      }
      return f;
    };
    for (int trial = 0; trial < 25; ++trial) {
      int d = 1 + static_cast<int>(rng() % 4);
      TruncatedSeries phi = random_series(true, d);
      TruncatedSeries f = random_series(false, 0);
      auto [q, r] = weierstrass_divrem(f, phi, d, 1);
      CHECK(f == q * phi + r);
      for (const auto& [m, c] : r.terms()) CHECK(m[1] < d);
    }
  }
}

TEST_CASE("basis coordinates recombine") {
  // c(t) with phi = t^2 - x0 t over F_2, d = 2
  auto ctx = xt(6);
  TruncatedSeries t = TruncatedSeries::variable(ctx, 1);
  TruncatedSeries x = TruncatedSeries::variable(ctx, 0);
  TruncatedSeries phi = t * t + x * t;  // char 2
  for (const TruncatedSeries& c :
       {t * t * t, t * t + x * t * t * t, x * x * t + t * t * t * t}) {
    BasisCoords bc = weierstrass_basis_coords(c, phi, 2, 1);
    CHECK(weierstrass_recombine(bc, phi) == c);
  }
}

TEST_CASE("basis coordinates against a formal-group phi") {
  // phi_1-style divisor: t^2 (t -_F x_0)^2 would have degree 4; use the
  // p-series itself as dividend over (2,1,1)
  FormalGroupLaw L = build_fgl(2, 1, Flavor::Araki, 6, 1);
  ELaw E = reduce_law(L, 1);
  auto ctx = make_context({"x0", "t"}, 6, E.stage.ring, 1, 1);
  TruncatedSeries t = TruncatedSeries::variable(ctx, 1);
  TruncatedSeries pt = E.p_series.compose({t});
  auto [q, r] = weierstrass_divrem(pt, t * t, 2, 1);
  CHECK(r.is_zero());
  CHECK(q == TruncatedSeries::constant(
                 ctx, VPolynomial::generator(E.stage.ring, 1, 1, 1)));
}
