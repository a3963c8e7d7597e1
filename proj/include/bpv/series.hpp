#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bpv/errors.hpp"
#include "bpv/vpoly.hpp"

namespace bpv {

// Ambient data for a truncated series ring: variable names, the truncation
// bound D on total variable degree, and the coefficient ring.  Weights allow
// auxiliary variables (like the y of a Weierstrass basis expansion) to carry
// a cohomological degree other than 2 and to consume more than one unit of
// the truncation budget.
struct SeriesContext {
  std::vector<std::string> vars;
  std::vector<long> coh_weight;
  std::vector<int> trunc_weight;
  int trunc = 0;
  ScalarRing ring;
  int vlo = 0, vhi = 0;

  bool compatible(const SeriesContext& o) const {
    return vars == o.vars && coh_weight == o.coh_weight &&
           trunc_weight == o.trunc_weight && trunc == o.trunc && ring == o.ring &&
           vlo == o.vlo && vhi == o.vhi;
  }
};

using CtxPtr = std::shared_ptr<const SeriesContext>;

inline CtxPtr make_context(std::vector<std::string> vars, int trunc, ScalarRing ring,
                           int vlo, int vhi, std::vector<long> coh_weight = {},
                           std::vector<int> trunc_weight = {}) {
  auto ctx = std::make_shared<SeriesContext>();
  ctx->vars = std::move(vars);
  ctx->coh_weight = coh_weight.empty() ? std::vector<long>(ctx->vars.size(), 2)
                                       : std::move(coh_weight);
  ctx->trunc_weight = trunc_weight.empty() ? std::vector<int>(ctx->vars.size(), 1)
                                           : std::move(trunc_weight);
  ctx->trunc = trunc;
  ctx->ring = ring;
  ctx->vlo = vlo;
  ctx->vhi = vhi;
  return ctx;
}

using XMon = std::vector<int>;

struct MonCmp {
  const SeriesContext* ctx = nullptr;
  long wdeg(const XMon& m) const {
    long d = 0;
    for (size_t i = 0; i < m.size(); ++i) d += static_cast<long>(m[i]) * ctx->trunc_weight[i];
    return d;
  }
  bool operator()(const XMon& a, const XMon& b) const {
    long da = wdeg(a), db = wdeg(b);
    if (da != db) return da < db;
    return a < b;  // lexicographic tie-break
  }
};

// Multivariate power series truncated at total variable degree D, with
// VPolynomial coefficients.  Values are immutable in spirit: every operation
// returns a fresh series.
class TruncatedSeries {
public:
  using TermMap = std::map<XMon, VPolynomial, MonCmp>;

  explicit TruncatedSeries(CtxPtr ctx)
      : ctx_(std::move(ctx)), terms_(MonCmp{ctx_.get()}) {}

  static TruncatedSeries zero(const CtxPtr& ctx) { return TruncatedSeries(ctx); }

  static TruncatedSeries variable(const CtxPtr& ctx, int i) {
    TruncatedSeries r(ctx);
    XMon m(ctx->vars.size(), 0);
    m[i] = 1;
    r.set_term(m, VPolynomial::constant(ctx->ring, ctx->vlo, ctx->vhi, 1));
    return r;
  }

  static TruncatedSeries constant(const CtxPtr& ctx, const VPolynomial& c) {
    TruncatedSeries r(ctx);
    r.set_term(XMon(ctx->vars.size(), 0), c);
    return r;
  }

  static TruncatedSeries monomial(const CtxPtr& ctx, const XMon& m, const VPolynomial& c) {
    TruncatedSeries r(ctx);
    r.set_term(m, c);
    return r;
  }

  const CtxPtr& ctx() const { return ctx_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  long tdeg(const XMon& m) const { return MonCmp{ctx_.get()}.wdeg(m); }

  void set_term(const XMon& m, const VPolynomial& c) {
    if (m.size() != ctx_->vars.size()) throw internal_error("monomial arity mismatch");
    if (c.is_zero() || tdeg(m) > ctx_->trunc) return;
    terms_[m] = c;
  }

  void add_term(const XMon& m, const VPolynomial& c) {
    if (c.is_zero() || tdeg(m) > ctx_->trunc) return;
    auto [it, fresh] = terms_.emplace(m, c);
    if (!fresh) {
      it->second = it->second + c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  VPolynomial coeff(const XMon& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? VPolynomial::zero(ctx_->ring, ctx_->vlo, ctx_->vhi)
                              : it->second;
  }

  VPolynomial constant_coeff() const { return coeff(XMon(ctx_->vars.size(), 0)); }

  TruncatedSeries operator+(const TruncatedSeries& o) const {
    check(o);
    TruncatedSeries r = *this;
    for (const auto& [m, c] : o.terms_) r.add_term(m, c);
    return r;
  }

  TruncatedSeries operator-() const {
    TruncatedSeries r(ctx_);
    for (const auto& [m, c] : terms_) r.terms_[m] = -c;
    return r;
  }

  TruncatedSeries operator-(const TruncatedSeries& o) const { return *this + (-o); }

  TruncatedSeries operator*(const TruncatedSeries& o) const {
    check(o);
    TruncatedSeries r(ctx_);
    const int D = ctx_->trunc;
    for (const auto& [ma, ca] : terms_) {
      long da = tdeg(ma);
      for (const auto& [mb, cb] : o.terms_) {
        if (da + tdeg(mb) > D) break;  // terms sorted by weighted degree
        XMon m(ma);
        for (size_t i = 0; i < m.size(); ++i) m[i] += mb[i];
        r.add_term(m, ca * cb);
      }
    }
    return r;
  }

  TruncatedSeries operator*(const VPolynomial& c) const {
    TruncatedSeries r(ctx_);
    for (const auto& [m, cc] : terms_) r.add_term(m, cc * c);
    return r;
  }

  TruncatedSeries operator*(const Scalar& s) const {
    TruncatedSeries r(ctx_);
    for (const auto& [m, cc] : terms_) r.add_term(m, cc * s);
    return r;
  }

  TruncatedSeries pow(int e) const {
    TruncatedSeries r = constant(ctx_, VPolynomial::constant(ctx_->ring, ctx_->vlo, ctx_->vhi, 1));
    TruncatedSeries b = *this;
    while (e > 0) {
      if (e & 1) r = r * b;
      e >>= 1;
      if (e) b = b * b;
    }
    return r;
  }

  bool operator==(const TruncatedSeries& o) const {
    if (!ctx_->compatible(*o.ctx_)) return false;
    if (terms_.size() != o.terms_.size()) return false;
    auto it = terms_.begin(), jt = o.terms_.begin();
    for (; it != terms_.end(); ++it, ++jt)
      if (it->first != jt->first || it->second != jt->second) return false;
    return true;
  }
  bool operator!=(const TruncatedSeries& o) const { return !(*this == o); }

  // minimal weighted total degree of a term; trunc+1 for the zero series
  long order() const {
    long o = ctx_->trunc + 1;
    for (const auto& [m, c] : terms_) o = std::min(o, tdeg(m));
    return terms_.empty() ? ctx_->trunc + 1 : o;
  }

  std::optional<long> homogeneous_degree() const {
    std::optional<long> d;
    for (const auto& [m, c] : terms_) {
      long base = 0;
      for (size_t i = 0; i < m.size(); ++i) base += m[i] * ctx_->coh_weight[i];
      auto cd = c.homogeneous_degree();
      if (!cd) return std::nullopt;
      long w = base + *cd;
      if (!d)
        d = w;
      else if (*d != w)
        return std::nullopt;
    }
    return d;
  }

  // View as a polynomial in one variable: exponent -> series with that
  // variable's exponent set to zero.
  std::map<int, TruncatedSeries> as_poly_in(int var) const {
    std::map<int, TruncatedSeries> r;
    for (const auto& [m, c] : terms_) {
      int e = m[var];
      auto it = r.find(e);
      if (it == r.end()) it = r.emplace(e, TruncatedSeries(ctx_)).first;
      XMon mm = m;
      mm[var] = 0;
      it->second.set_term(mm, c);
    }
    return r;
  }

  TruncatedSeries mul_var_pow(int var, int e) const {
    TruncatedSeries r(ctx_);
    for (const auto& [m, c] : terms_) {
      XMon mm = m;
      mm[var] += e;
      r.add_term(mm, c);
    }
    return r;
  }

  TruncatedSeries div_var_pow(int var, int e) const {
    TruncatedSeries r(ctx_);
    for (const auto& [m, c] : terms_) {
      if (m[var] < e)
        throw internal_error("series not divisible by " + ctx_->vars[var] + "^" +
                             std::to_string(e));
      XMon mm = m;
      mm[var] -= e;
      r.terms_[mm] = c;
    }
    return r;
  }

  // Substitute: one series per variable of this series, all in a common
  // target context.  Arguments must have zero constant term.
  TruncatedSeries compose(const std::vector<TruncatedSeries>& args) const {
    if (args.size() != ctx_->vars.size())
      throw config_error("compose: argument count mismatch");
    if (args.empty()) throw config_error("compose: no variables");
    CtxPtr tgt = args[0].ctx_;
    for (const auto& a : args) {
      if (!a.ctx_->compatible(*tgt)) throw config_error("compose: argument context mismatch");
      if (!a.constant_coeff().is_zero())
        throw precondition_error("compose: argument has nonzero constant term");
    }
    if (!(tgt->ring == ctx_->ring) || tgt->vlo != ctx_->vlo || tgt->vhi != ctx_->vhi)
      throw config_error("compose: coefficient ring mismatch");
    std::vector<std::vector<TruncatedSeries>> pows(args.size());
    auto arg_pow = [&](size_t i, int e) -> const TruncatedSeries& {
      auto& cache = pows[i];
      if (cache.empty())
        cache.push_back(TruncatedSeries::constant(
            tgt, VPolynomial::constant(tgt->ring, tgt->vlo, tgt->vhi, 1)));
      while (static_cast<int>(cache.size()) <= e) cache.push_back(cache.back() * args[i]);
      return cache[e];
    };
    TruncatedSeries r(tgt);
    for (const auto& [m, c] : terms_) {
      TruncatedSeries term = TruncatedSeries::constant(tgt, c);
      for (size_t i = 0; i < m.size(); ++i)
        if (m[i] > 0) term = term * arg_pow(i, m[i]);
      r = r + term;
    }
    return r;
  }

  // Re-house the series in another context; var_map[i] is the index in the
  // target of source variable i.  Unmapped target variables get exponent 0.
  TruncatedSeries transport(const CtxPtr& tgt, const std::vector<int>& var_map) const {
    if (var_map.size() != ctx_->vars.size())
      throw config_error("transport: variable map arity mismatch");
    TruncatedSeries r(tgt);
    for (const auto& [m, c] : terms_) {
      XMon mm(tgt->vars.size(), 0);
      for (size_t i = 0; i < m.size(); ++i) mm[var_map[i]] += m[i];
      r.add_term(mm, c.reduce_to(tgt->ring, tgt->vlo, tgt->vhi));
    }
    return r;
  }

  TruncatedSeries reduce_ideal(int j) const {
    TruncatedSeries r(ctx_);
    for (const auto& [m, c] : terms_) r.add_term(m, c.reduce_ideal(j));
    return r;
  }

  TruncatedSeries map_coeffs(ScalarRing ring, int vlo, int vhi, const CtxPtr& tgt) const {
    TruncatedSeries r(tgt);
    for (const auto& [m, c] : terms_)
      r.add_term(m, c.kill_generators_below(vlo).reduce_to(ring, vlo, vhi));
    return r;
  }

  // Canonical rendering: sorted "[e0,e1,...]: coeff" lines.
  std::string render() const {
    std::string out;
    for (const auto& [m, c] : terms_) {
      out += "[";
      for (size_t i = 0; i < m.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(m[i]);
      }
      out += "]: " + c.render() + "\n";
    }
    return out;
  }

private:
  void check(const TruncatedSeries& o) const {
    if (!ctx_->compatible(*o.ctx_)) throw config_error("series context mismatch");
  }

  CtxPtr ctx_;
  TermMap terms_;
};

inline TruncatedSeries operator*(const VPolynomial& c, const TruncatedSeries& s) { return s * c; }

}  // namespace bpv
