#pragma once

#include <map>
#include <utility>
#include <vector>

#include "bpv/linalg.hpp"
#include "bpv/series.hpp"

namespace bpv {

// Ordered basis of one graded slice: monomials v^a x^b of cohomological
// degree d with x-degree at most xcap.  Finite because the v-weight is
// pinned by the x-degree.
struct SliceBasis {
  CtxPtr ctx;
  long d = 0;
  int xcap = 0;
  std::vector<std::pair<VExp, XMon>> monos;
  std::map<std::pair<VExp, XMon>, int> index;

  int dim() const { return static_cast<int>(monos.size()); }
};

inline long ipow_slice(long b, int e) {
  long r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

namespace detail {

inline void enum_vexp(const CtxPtr& ctx, int k, long remaining, VExp& cur,
                      std::vector<VExp>& out) {
  if (remaining == 0) {
    out.push_back(cur);
    if (k > ctx->vhi) return;
  }
  if (k > ctx->vhi || remaining <= 0) return;
  long wk = 2 * (ipow_slice(ctx->ring.p, k) - 1);
  enum_vexp(ctx, k + 1, remaining, cur, out);
  if (wk <= 0) return;
  int e = 0;
  long used = 0;
  while (used + wk <= remaining) {
    used += wk;
    ++e;
    cur.emplace_back(k, e);
    if (used == remaining)
      out.push_back(cur);
    else
      enum_vexp(ctx, k + 1, remaining - used, cur, out);
    cur.pop_back();
  }
}

inline void enum_xmon(const CtxPtr& ctx, size_t var, int budget, XMon& cur,
                      std::vector<XMon>& out) {
  if (var == ctx->vars.size()) {
    out.push_back(cur);
    return;
  }
  int tw = ctx->trunc_weight[var];
  for (int e = 0; e * tw <= budget; ++e) {
    cur[var] = e;
    enum_xmon(ctx, var + 1, budget - e * tw, cur, out);
  }
  cur[var] = 0;
}

}  // namespace detail

inline SliceBasis slice_basis(const CtxPtr& ctx, long d, int xcap) {
  SliceBasis sb;
  sb.ctx = ctx;
  sb.d = d;
  sb.xcap = xcap;
  std::vector<XMon> xms;
  XMon cur(ctx->vars.size(), 0);
  detail::enum_xmon(ctx, 0, xcap, cur, xms);
  MonCmp cmp{ctx.get()};
  std::sort(xms.begin(), xms.end(), cmp);
  for (const auto& m : xms) {
    long cohx = 0;
    for (size_t i = 0; i < m.size(); ++i) cohx += m[i] * ctx->coh_weight[i];
    long W = cohx - d;  // v-weight to burn: v^a contributes -W
    if (W < 0 || W % 2 != 0) continue;
    std::vector<VExp> ves;
    VExp ve;
    int lo = std::max(1, ctx->vlo);
    detail::enum_vexp(ctx, lo, W, ve, ves);
    // enum_vexp pushes the empty solution only when remaining == 0 upfront
    for (const auto& e : ves) {
      sb.index.emplace(std::make_pair(e, m), sb.dim());
      sb.monos.emplace_back(e, m);
    }
  }
  return sb;
}

inline ModArith slice_arith(const ScalarRing& r) {
  return ModArith(r.p, r.kind == ScalarKind::PrimeField ? 1 : r.N);
}

inline long scalar_to_long(const Scalar& s) {
  return s.value().get_num().get_si();
}

// Coordinates of a homogeneous series on a slice basis; terms beyond the
// x-degree cap are outside the certified window and are dropped.
inline std::vector<long> series_to_vec(const TruncatedSeries& s, const SliceBasis& sb) {
  std::vector<long> out(sb.dim(), 0);
  ModArith R = slice_arith(sb.ctx->ring);
  MonCmp cmp{sb.ctx.get()};
  for (const auto& [m, c] : s.terms()) {
    if (cmp.wdeg(m) > sb.xcap) continue;
    for (const auto& [e, sc] : c.terms()) {
      auto it = sb.index.find(std::make_pair(e, m));
      if (it == sb.index.end())
        throw internal_error("monomial outside slice: inhomogeneous input to series_to_vec");
      out[it->second] = R.add(out[it->second], R.norm(scalar_to_long(sc)));
    }
  }
  return out;
}

inline TruncatedSeries basis_element(const SliceBasis& sb, int i, long coeff = 1) {
  const auto& [ve, xm] = sb.monos[i];
  VPolynomial c(sb.ctx->ring, sb.ctx->vlo, sb.ctx->vhi);
  c.add_term(ve, Scalar(sb.ctx->ring, coeff));
  return TruncatedSeries::monomial(sb.ctx, xm, c);
}

inline TruncatedSeries vec_to_series(const std::vector<long>& v, const SliceBasis& sb) {
  TruncatedSeries s = TruncatedSeries::zero(sb.ctx);
  for (int i = 0; i < sb.dim(); ++i)
    if (v[i] != 0) s = s + basis_element(sb, i, v[i]);
  return s;
}

}  // namespace bpv
