#pragma once

#include <string>
#include <vector>

#include "bpv/series.hpp"

namespace bpv {

enum class Flavor { Hazewinkel, Araki };

inline std::string flavor_name(Flavor f) {
  return f == Flavor::Hazewinkel ? "hazewinkel" : "araki";
}

inline Flavor flavor_from_name(const std::string& s) {
  if (s == "hazewinkel") return Flavor::Hazewinkel;
  if (s == "araki") return Flavor::Araki;
  throw config_error("unknown flavor: " + s);
}

inline long ipow(long b, long e) {
  long r = 1;
  for (long i = 0; i < e; ++i) r *= b;
  return r;
}

// Default truncation: x-degree of the torsion generator plus slack.
inline int default_trunc(long p, int m, int n) {
  int w = n + 1 - m;
  long d = ipow(p, m) * (ipow(p, w) - 1) / (p - 1);
  return static_cast<int>(d + ipow(p, n) + 2);
}

// A p-typical formal group law, staged: exact rationals first (log/exp),
// then reduced to the modular coefficient ring once every series has been
// checked p-integral.
struct FormalGroupLaw {
  long p = 2;
  int n = 1;
  Flavor flavor = Flavor::Araki;
  int D = 0, N = 1;

  ScalarRing rat, mod;
  CtxPtr tctx_rat, stctx_rat, tctx, stctx;

  std::vector<VPolynomial> log_coeffs;     // l_0..l_L over the rationals
  TruncatedSeries log_t, exp_t;            // rational stage, one variable
  TruncatedSeries F_rat, inv_rat, ps_rat;  // rational stage
  TruncatedSeries F, inverse, p_series;    // modular stage over Z/p^N[v_1..v_n]

  FormalGroupLaw()
      : rat(ScalarRing::rationals(2)),
        mod(ScalarRing::prime_field(2)),
        log_t(make_context({"t"}, 0, rat, 1, 1)),
        exp_t(log_t.ctx()),
        F_rat(log_t.ctx()),
        inv_rat(log_t.ctx()),
        ps_rat(log_t.ctx()),
        F(log_t.ctx()),
        inverse(log_t.ctx()),
        p_series(log_t.ctx()) {}
};

// Functional inverse of f = t + (higher), coefficient by coefficient.
inline TruncatedSeries series_reversion(const TruncatedSeries& f) {
  const auto& ctx = f.ctx();
  TruncatedSeries g = TruncatedSeries::variable(ctx, 0);
  for (int d = 2; d <= ctx->trunc; ++d) {
    TruncatedSeries err = g.compose({f}) - TruncatedSeries::variable(ctx, 0);
    XMon m{d};
    VPolynomial c = err.coeff(m);
    if (!c.is_zero()) g.add_term(m, -c);
  }
  if (!(g.compose({f}) == TruncatedSeries::variable(ctx, 0)))
    throw internal_error("series reversion failed");
  return g;
}

inline FormalGroupLaw build_fgl(long p, int n, Flavor flavor, int D, int N) {
  if (n < 1 || D < 1 || N < 1) throw config_error("build_fgl: need n, D, N >= 1");
  {
    bool prime = p >= 2;
    for (long q = 2; q * q <= p; ++q)
      if (p % q == 0) prime = false;
    if (!prime) throw config_error("build_fgl: p must be prime");
  }
  if (ipow(p, n) > D)
    throw config_error("truncation degree " + std::to_string(D) + " too small to express t^(p^n)");

  FormalGroupLaw L;
  L.p = p;
  L.n = n;
  L.flavor = flavor;
  L.D = D;
  L.N = N;
  L.rat = ScalarRing::rationals(p);
  L.mod = (N == 1) ? ScalarRing::prime_field(p) : ScalarRing::integers_mod(p, N);

  L.tctx_rat = make_context({"t"}, D, L.rat, 1, n);
  L.stctx_rat = make_context({"s", "t"}, D, L.rat, 1, n);
  L.tctx = make_context({"t"}, D, L.mod, 1, n);
  L.stctx = make_context({"s", "t"}, D, L.mod, 1, n);

  // log coefficients by the defining recursion for the chosen generators
  int top = 0;
  while (ipow(p, top + 1) <= D) ++top;
  L.log_coeffs.assign(top + 1, VPolynomial::zero(L.rat, 1, n));
  L.log_coeffs[0] = VPolynomial::constant(L.rat, 1, n, 1);
  for (int r = 1; r <= top; ++r) {
    VPolynomial rhs = VPolynomial::zero(L.rat, 1, n);
    for (int i = 0; i < r; ++i) {
      int gen = r - i;
      if (gen > n) continue;
      rhs = rhs + L.log_coeffs[i] * VPolynomial::generator(L.rat, 1, n, gen,
                                                           static_cast<int>(ipow(p, i)));
    }
    mpq_class denom;
    if (flavor == Flavor::Hazewinkel) {
      denom = p;
    } else {
      // p*l_r = sum_{i<=r} l_i v_{r-i}^{p^i} with v_0 = p pulls the i=r
      // term to the left: l_r * (p - p^(p^r)) = rhs
      mpz_class ppr;
      mpz_ui_pow_ui(ppr.get_mpz_t(), p, ipow(p, r));
      denom = mpq_class(p) - mpq_class(ppr);
    }
    L.log_coeffs[r] = rhs * Scalar(L.rat, mpq_class(1) / denom);
  }

  // log, exp, F, inverse, p-series at the rational stage
  L.log_t = TruncatedSeries::zero(L.tctx_rat);
  for (int i = 0; i <= top; ++i)
    L.log_t.add_term({static_cast<int>(ipow(p, i))}, L.log_coeffs[i]);
  L.exp_t = series_reversion(L.log_t);

  TruncatedSeries logs = L.log_t.compose({TruncatedSeries::variable(L.stctx_rat, 0)});
  TruncatedSeries logt = L.log_t.compose({TruncatedSeries::variable(L.stctx_rat, 1)});
  L.F_rat = L.exp_t.compose({logs + logt});
  L.inv_rat = L.exp_t.compose({-L.log_t});
  L.ps_rat = L.exp_t.compose({L.log_t * Scalar(L.rat, p)});

  for (const TruncatedSeries* s : {&L.F_rat, &L.inv_rat, &L.ps_rat})
    for (const auto& [m, c] : s->terms())
      if (!c.p_integral())
        throw internal_error("non-p-integral coefficient in constructed law: " + c.render());

  L.F = L.F_rat.map_coeffs(L.mod, 1, n, L.stctx);
  L.inverse = L.inv_rat.map_coeffs(L.mod, 1, n, L.tctx);
  L.p_series = L.ps_rat.map_coeffs(L.mod, 1, n, L.tctx);
  return L;
}

// F(a, b) for series a, b in a common context.
inline TruncatedSeries formal_plus(const TruncatedSeries& F, const TruncatedSeries& a,
                                   const TruncatedSeries& b) {
  return F.compose({a, b});
}

inline TruncatedSeries formal_sum(const TruncatedSeries& F,
                                  const std::vector<TruncatedSeries>& xs) {
  if (xs.empty()) throw config_error("formal_sum of nothing");
  TruncatedSeries acc = xs[0];
  for (size_t i = 1; i < xs.size(); ++i) acc = formal_plus(F, acc, xs[i]);
  return acc;
}

inline TruncatedSeries formal_diff(const TruncatedSeries& F, const TruncatedSeries& iota,
                                   const TruncatedSeries& a, const TruncatedSeries& b) {
  return formal_plus(F, a, iota.compose({b}));
}

// [c](s) for an integer c and a series argument with zero constant term.
inline TruncatedSeries int_series(const TruncatedSeries& F, const TruncatedSeries& iota,
                                  long c, const TruncatedSeries& arg) {
  if (!arg.constant_coeff().is_zero())
    throw precondition_error("int_series argument has nonzero constant term");
  if (c < 0) return iota.compose({int_series(F, iota, -c, arg)});
  TruncatedSeries acc = TruncatedSeries::zero(arg.ctx());
  for (long i = 0; i < c; ++i) acc = formal_plus(F, arg, acc);
  return acc;
}

// Coefficient data of E* = BP<m,n>*, the target of the reduction maps.
struct CoeffStage {
  long p = 2;
  int m = 0, n = 1;
  ScalarRing ring;
  int vlo = 1, vhi = 1;

  CoeffStage() : ring(ScalarRing::prime_field(2)) {}
  CoeffStage(const FormalGroupLaw& L, int m_) : p(L.p), m(m_), n(L.n), ring(L.mod) {
    if (m < 0 || m > n) throw config_error("need 0 <= m <= n");
    if (m >= 1) ring = ScalarRing::prime_field(p);
    vlo = std::max(1, m);
    vhi = n;
  }
};

// The law pushed forward to E*: for m >= 1 this sets p = 0 and v_i = 0 for
// i < m; for m = 0 it is the modular stage itself.
struct ELaw {
  CoeffStage stage;
  CtxPtr tctx, stctx;
  TruncatedSeries F, inverse, p_series;
  std::vector<TruncatedSeries> pis;  // pi_0..pi_n over the m=0 stage ring

  ELaw() : tctx(), stctx(), F(make_context({"t"}, 0, stage.ring, 1, 1)), inverse(F.ctx()), p_series(F.ctx()) {}
};

// Unique decomposition [p](t) = sum_k v_k pi_k(t) at the m=0 stage; the
// v_0 part is p*t and every other monomial must carry some v-generator.
inline std::vector<TruncatedSeries> pi_decompose(const FormalGroupLaw& L) {
  const auto& ctx = L.tctx;
  std::vector<TruncatedSeries> pis(L.n + 1, TruncatedSeries::zero(ctx));
  pis[0] = TruncatedSeries::variable(ctx, 0);
  TruncatedSeries rest = L.p_series - pis[0] * Scalar(L.mod, L.p);
  for (const auto& [m, c] : rest.terms()) {
    for (auto& [k, part] : c.split_top()) {
      if (k == 0)
        throw internal_error("p-series has a v-free monomial beyond p*t at t^" +
                             std::to_string(m[0]));
      pis[k].add_term(m, part);
    }
  }
  // exact reassembly
  TruncatedSeries acc = pis[0] * Scalar(L.mod, L.p);
  for (int k = 1; k <= L.n; ++k)
    acc = acc + pis[k] * VPolynomial::generator(L.mod, 1, L.n, k);
  if (!(acc == L.p_series)) throw internal_error("pi decomposition does not reassemble");
  return pis;
}

inline ELaw reduce_law(const FormalGroupLaw& L, int m) {
  ELaw E;
  E.stage = CoeffStage(L, m);
  E.tctx = make_context({"t"}, L.D, E.stage.ring, E.stage.vlo, E.stage.vhi);
  E.stctx = make_context({"s", "t"}, L.D, E.stage.ring, E.stage.vlo, E.stage.vhi);
  E.F = L.F.map_coeffs(E.stage.ring, E.stage.vlo, E.stage.vhi, E.stctx);
  E.inverse = L.inverse.map_coeffs(E.stage.ring, E.stage.vlo, E.stage.vhi, E.tctx);
  E.p_series = L.p_series.map_coeffs(E.stage.ring, E.stage.vlo, E.stage.vhi, E.tctx);
  E.pis = pi_decompose(L);
  return E;
}

}  // namespace bpv
