#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bpv/series.hpp"

namespace bpv {

// True when every monomial of the coefficient lies in the ideal of
// definition (some x-variable, some v-generator, or p over Z/p^N).
inline bool topologically_nilpotent(const TruncatedSeries& a) {
  for (const auto& [m, c] : a.terms()) {
    bool has_x = false;
    for (int e : m)
      if (e > 0) { has_x = true; break; }
    if (has_x) continue;
    for (const auto& [ve, s] : c.terms()) {
      if (!ve.empty()) continue;
      if (a.ctx()->ring.kind == ScalarKind::IntegersMod && s.p_valuation() >= 1) continue;
      return false;
    }
  }
  return true;
}

// Inverse of a unit in a truncated series ring.  The unit part must be a
// scalar plus topologically nilpotent terms of positive variable order, so
// the geometric series terminates inside the truncation.
inline TruncatedSeries invert_unit(const TruncatedSeries& u) {
  const auto& ctx = u.ctx();
  Scalar c = u.constant_coeff().scalar_part();
  if (!c.is_unit()) throw precondition_error("series constant term is not a unit");
  Scalar cinv = c.inverse();
  TruncatedSeries one =
      TruncatedSeries::constant(ctx, VPolynomial::constant(ctx->ring, ctx->vlo, ctx->vhi, 1));
  TruncatedSeries e = u * cinv - one;
  TruncatedSeries acc = one, term = one;
  int cap = (ctx->trunc + 2) * (ctx->ring.N + 2);
  for (int i = 0; i < cap && !term.is_zero(); ++i) {
    term = -(term * e);
    acc = acc + term;
  }
  if (!term.is_zero()) throw internal_error("unit inversion did not terminate");
  return acc * cinv;
}

struct DivRem {
  TruncatedSeries q, r;
};

// Weierstrass division f = q*phi + r with deg_t(r) < d, computed by
// successive approximation; each pass pushes the defect deeper into the
// ideal of definition, and the truncation bounds the number of passes.
// When d exceeds the truncation degree the quotient is indistinguishable
// from zero below the cutoff, so (0, f) is returned.
inline DivRem weierstrass_divrem(const TruncatedSeries& f, const TruncatedSeries& phi, int d,
                                 int tvar) {
  const auto& ctx = f.ctx();
  if (!ctx->compatible(*phi.ctx())) throw config_error("weierstrass: context mismatch");
  if (d > ctx->trunc) return {TruncatedSeries::zero(ctx), f};

  auto parts = phi.as_poly_in(tvar);
  TruncatedSeries high = TruncatedSeries::zero(ctx);
  for (const auto& [i, a] : parts) {
    if (i < d) {
      if (!topologically_nilpotent(a))
        throw precondition_error("coefficient of " + ctx->vars[tvar] + "^" + std::to_string(i) +
                                 " is not topologically nilpotent");
    }
  }
  // u = phi / t^d restricted to degrees >= d; its t-constant term is a_d
  for (const auto& [m, c] : phi.terms())
    if (m[tvar] >= d) high.add_term(m, c);
  TruncatedSeries u = high.div_var_pow(tvar, d);
  auto ad = u.as_poly_in(tvar);
  auto it = ad.find(0);
  if (it == ad.end() || !it->second.constant_coeff().is_unit())
    throw precondition_error("coefficient of " + ctx->vars[tvar] + "^" + std::to_string(d) +
                             " is not a unit");
  TruncatedSeries uinv = invert_unit(u);

  TruncatedSeries q = TruncatedSeries::zero(ctx);
  TruncatedSeries r = f;
  int cap = (ctx->trunc + 2) * (ctx->ring.N + 2);
  for (int pass = 0; pass < cap; ++pass) {
    TruncatedSeries h = TruncatedSeries::zero(ctx);
    for (const auto& [m, c] : r.terms())
      if (m[tvar] >= d) h.add_term(m, c);
    if (h.is_zero()) return {q, r};
    TruncatedSeries qstep = h.div_var_pow(tvar, d) * uinv;
    q = q + qstep;
    r = r - qstep * phi;
  }
  throw internal_error("weierstrass division did not terminate");
}

struct BasisCoords {
  CtxPtr yctx;                        // x-variables plus y, |y| = deg(phi)
  std::vector<TruncatedSeries> b;     // b_0(y)..b_{d-1}(y)
  int tvar;
  int d;
};

// c(t) = sum_i b_i(phi(t)) t^i, the free-module coordinates with respect to
// the basis {t^i : i < d} over the subring generated by phi.
inline BasisCoords weierstrass_basis_coords(const TruncatedSeries& c, const TruncatedSeries& phi,
                                            int d, int tvar) {
  const auto& ctx = c.ctx();
  std::vector<std::string> yvars;
  std::vector<long> ycoh;
  std::vector<int> ytw;
  for (size_t i = 0; i < ctx->vars.size(); ++i) {
    if (static_cast<int>(i) == tvar) continue;
    yvars.push_back(ctx->vars[i]);
    ycoh.push_back(ctx->coh_weight[i]);
    ytw.push_back(ctx->trunc_weight[i]);
  }
  long phideg = phi.homogeneous_degree().value_or(2 * d);
  yvars.push_back("y");
  ycoh.push_back(phideg);
  // y stands for phi, so it must carry phi's weight order: a larger weight
  // would truncate y-powers whose phi-expansions are still visible.
  ytw.push_back(static_cast<int>(std::max(1L, phi.order())));
  CtxPtr yctx = make_context(yvars, ctx->trunc, ctx->ring, ctx->vlo, ctx->vhi, ycoh, ytw);
  int yidx = static_cast<int>(yvars.size()) - 1;

  // source var -> yctx var for the t-free remainders
  std::vector<int> vmap(ctx->vars.size(), 0);
  {
    int j = 0;
    for (size_t i = 0; i < ctx->vars.size(); ++i) {
      if (static_cast<int>(i) == tvar) {
        vmap[i] = yidx;  // never used: remainder coefficients are t-free
        continue;
      }
      vmap[i] = j++;
    }
  }

  BasisCoords out;
  out.yctx = yctx;
  out.tvar = tvar;
  out.d = d;
  out.b.assign(d, TruncatedSeries::zero(yctx));

  // Every term of phi must carry variable weight or a factor of p for the
  // level recursion to stabilize: then phi^L * (residual) has each term of
  // weight > trunc or p-valuation >= N once L is large, so a nonzero
  // residual at the cap is invisible in the truncated ring and the
  // coordinates are already complete.  A pure v-generator constant term
  // instead needs v-adic completion, which this ring does not model.
  bool decays = true;
  for (const auto& [mo, co] : phi.terms()) {
    bool has_var = false;
    for (int e : mo)
      if (e > 0) { has_var = true; break; }
    if (has_var) continue;
    for (const auto& [ve, sc] : co.terms())
      if (sc.p_valuation() < 1) decays = false;
  }

  TruncatedSeries cur = c;
  int cap = (ctx->trunc + 2) * (ctx->ring.N + 2);
  for (int level = 0; level < cap && !cur.is_zero(); ++level) {
    auto [q, r] = weierstrass_divrem(cur, phi, d, tvar);
    auto rparts = r.as_poly_in(tvar);
    for (const auto& [i, ri] : rparts) {
      if (i >= d) throw internal_error("weierstrass remainder too wide");
      out.b[i] = out.b[i] + ri.transport(yctx, vmap).mul_var_pow(yidx, level);
    }
    cur = q;
  }
  if (!cur.is_zero() && !decays)
    throw internal_error("basis coordinate recursion did not terminate");
  return out;
}

// Evaluate sum_i b_i(phi(t)) t^i back in phi's context.
inline TruncatedSeries weierstrass_recombine(const BasisCoords& bc, const TruncatedSeries& phi) {
  const auto& ctx = phi.ctx();
  std::vector<TruncatedSeries> args;
  for (size_t i = 0; i < ctx->vars.size(); ++i) {
    if (static_cast<int>(i) == bc.tvar) continue;
    args.push_back(TruncatedSeries::variable(ctx, static_cast<int>(i)));
  }
  args.push_back(phi);
  TruncatedSeries t = TruncatedSeries::variable(ctx, bc.tvar);
  TruncatedSeries acc = TruncatedSeries::zero(ctx);
  TruncatedSeries tp =
      TruncatedSeries::constant(ctx, VPolynomial::constant(ctx->ring, ctx->vlo, ctx->vhi, 1));
  for (int i = 0; i < bc.d; ++i) {
    if (!bc.b[i].is_zero()) acc = acc + bc.b[i].compose(args) * tp;
    tp = tp * t;
  }
  return acc;
}

}  // namespace bpv
