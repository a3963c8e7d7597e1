#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bpv/errors.hpp"
#include "bpv/scalar.hpp"

namespace bpv {

// Sparse exponent vector for the v-generators: sorted (index, exponent>0).
using VExp = std::vector<std::pair<int, int>>;

inline long vexp_weight(const VExp& e, long p) {
  // cohomological degree of v^e is -2 * sum e_k (p^k - 1)
  long w = 0;
  for (auto [k, ek] : e) {
    long pk = 1;
    for (int i = 0; i < k; ++i) pk *= p;
    w += static_cast<long>(ek) * (pk - 1);
  }
  return -2 * w;
}

// Graded sparse polynomial in v_lo..v_hi over a ScalarRing.
class VPolynomial {
public:
  VPolynomial() = default;
  VPolynomial(ScalarRing ring, int lo, int hi) : ring_(ring), lo_(lo), hi_(hi) {}

  static VPolynomial zero(ScalarRing ring, int lo, int hi) { return VPolynomial(ring, lo, hi); }

  static VPolynomial constant(ScalarRing ring, int lo, int hi, const Scalar& c) {
    VPolynomial r(ring, lo, hi);
    if (!c.is_zero()) r.terms_[{}] = c;
    return r;
  }

  static VPolynomial constant(ScalarRing ring, int lo, int hi, long c) {
    return constant(ring, lo, hi, Scalar(ring, c));
  }

  static VPolynomial generator(ScalarRing ring, int lo, int hi, int k, int exp = 1) {
    if (k < lo || k > hi)
      throw config_error("v" + std::to_string(k) + " outside generator range");
    VPolynomial r(ring, lo, hi);
    r.terms_[{{k, exp}}] = Scalar::one(ring);
    return r;
  }

  const ScalarRing& ring() const { return ring_; }
  int lo() const { return lo_; }
  int hi() const { return hi_; }
  const std::map<VExp, Scalar>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  bool is_scalar() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
  }
  Scalar scalar_part() const {
    auto it = terms_.find({});
    return it == terms_.end() ? Scalar::zero(ring_) : it->second;
  }

  // A unit of E*: scalar part is a unit (the ring is local, non-scalar terms
  // lie in the maximal ideal).
  bool is_unit() const { return scalar_part().is_unit(); }

  void add_term(const VExp& e, const Scalar& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = terms_.emplace(e, c);
    if (!fresh) {
      it->second = it->second + c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  VPolynomial operator+(const VPolynomial& o) const {
    check(o);
    VPolynomial r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
  }

  VPolynomial operator-() const {
    VPolynomial r(ring_, lo_, hi_);
    for (const auto& [e, c] : terms_) r.terms_[e] = -c;
    return r;
  }

  VPolynomial operator-(const VPolynomial& o) const { return *this + (-o); }

  VPolynomial operator*(const VPolynomial& o) const {
    check(o);
    VPolynomial r(ring_, lo_, hi_);
    for (const auto& [ea, ca] : terms_)
      for (const auto& [eb, cb] : o.terms_) r.add_term(mul_exp(ea, eb), ca * cb);
    return r;
  }

  VPolynomial operator*(const Scalar& s) const {
    VPolynomial r(ring_, lo_, hi_);
    if (s.is_zero()) return r;
    for (const auto& [e, c] : terms_) r.add_term(e, c * s);
    return r;
  }

  bool operator==(const VPolynomial& o) const {
    return ring_ == o.ring_ && lo_ == o.lo_ && hi_ == o.hi_ && terms_ == o.terms_;
  }
  bool operator!=(const VPolynomial& o) const { return !(*this == o); }

  // Reduction modulo I_j = (v_0, ..., v_{j-1}).  Over Z/p^N with j >= 1 the
  // generator v_0 = p also acts, so scalars are reduced mod p.
  VPolynomial reduce_ideal(int j) const {
    VPolynomial r(ring_, lo_, hi_);
    for (const auto& [e, c] : terms_) {
      bool killed = false;
      for (auto [k, ek] : e)
        if (k < j) { killed = true; break; }
      if (killed) continue;
      Scalar cc = c;
      if (j >= 1 && ring_.kind == ScalarKind::IntegersMod) {
        mpz_class m(ring_.p), red;
        mpz_mod(red.get_mpz_t(), c.value().get_num().get_mpz_t(), m.get_mpz_t());
        cc = Scalar(ring_, mpq_class(red));
      }
      if (j >= 1 && ring_.kind == ScalarKind::Rationals)
        throw config_error("I_j reduction with j >= 1 is undefined over the rationals");
      r.add_term(e, cc);
    }
    return r;
  }

  // Partition by largest occurring v-index.  Parts for k >= 1 are divided by
  // v_k; a v-free part, if any, is reported under k = 0 undivided.
  std::vector<std::pair<int, VPolynomial>> split_top() const {
    std::map<int, VPolynomial> parts;
    for (const auto& [e, c] : terms_) {
      int top = e.empty() ? 0 : e.back().first;
      auto it = parts.find(top);
      if (it == parts.end())
        it = parts.emplace(top, VPolynomial(ring_, lo_, hi_)).first;
      if (top == 0) {
        it->second.add_term(e, c);
      } else {
        VExp d = e;
        if (d.back().second == 1)
          d.pop_back();
        else
          d.back().second -= 1;
        it->second.add_term(d, c);
      }
    }
    return {parts.begin(), parts.end()};
  }

  VPolynomial kill_generators_below(int m) const {
    VPolynomial r(ring_, lo_, hi_);
    for (const auto& [e, c] : terms_) {
      bool killed = false;
      for (auto [k, ek] : e)
        if (k < m) { killed = true; break; }
      if (!killed) r.add_term(e, c);
    }
    return r;
  }

  // Coefficient-wise ring map into a modular ring, optionally narrowing the
  // generator range (generators outside survive only if absent).
  VPolynomial reduce_to(ScalarRing target, int newlo, int newhi) const {
    VPolynomial r(target, newlo, newhi);
    for (const auto& [e, c] : terms_) {
      for (auto [k, ek] : e)
        if (k < newlo || k > newhi)
          throw internal_error("generator v" + std::to_string(k) +
                               " outside target range in reduction");
      r.add_term(e, c.reduce_to(target));
    }
    return r;
  }

  bool p_integral() const {
    for (const auto& [e, c] : terms_)
      if (!c.p_integral()) return false;
    return true;
  }

  std::optional<long> homogeneous_degree() const {
    std::optional<long> d;
    for (const auto& [e, c] : terms_) {
      long w = vexp_weight(e, ring_.p);
      if (!d)
        d = w;
      else if (*d != w)
        return std::nullopt;
    }
    return d;
  }

  std::string render() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [e, c] : terms_) {
      if (!first) out += "+";
      first = false;
      std::string mono;
      for (auto [k, ek] : e) {
        if (!mono.empty()) mono += "*";
        mono += "v" + std::to_string(k);
        if (ek > 1) mono += "^" + std::to_string(ek);
      }
      if (mono.empty())
        out += c.str();
      else if (c.value() == 1)
        out += mono;
      else
        out += c.str() + "*" + mono;
    }
    return out;
  }

  static VPolynomial parse(const std::string& s, ScalarRing ring, int lo, int hi) {
    VPolynomial r(ring, lo, hi);
    if (s == "0") return r;
    size_t pos = 0;
    while (pos < s.size()) {
      size_t end = s.find('+', pos + 1);  // a leading '-' belongs to the term
      if (end == std::string::npos) end = s.size();
      std::string term = s.substr(pos, end - pos);
      pos = end + 1;
      Scalar coeff = Scalar::one(ring);
      VExp e;
      size_t tp = 0;
      bool have_coeff = false;
      while (tp < term.size()) {
        size_t fend = term.find('*', tp);
        if (fend == std::string::npos) fend = term.size();
        std::string f = term.substr(tp, fend - tp);
        tp = fend + 1;
        if (f.empty()) throw config_error("empty factor in polynomial text");
        if (f[0] == 'v') {
          size_t caret = f.find('^');
          int idx = std::stoi(f.substr(1, caret == std::string::npos
                                              ? std::string::npos
                                              : caret - 1));
          int exp = caret == std::string::npos ? 1 : std::stoi(f.substr(caret + 1));
          e.emplace_back(idx, exp);
        } else {
          if (have_coeff) throw config_error("two numeric factors in one term");
          coeff = Scalar(ring, mpq_class(f));
          have_coeff = true;
        }
      }
      std::sort(e.begin(), e.end());
      r.add_term(e, coeff);
    }
    return r;
  }

private:
  void check(const VPolynomial& o) const {
    if (ring_ != o.ring_ || lo_ != o.lo_ || hi_ != o.hi_)
      throw config_error("VPolynomial ring/range mismatch");
  }

  static VExp mul_exp(const VExp& a, const VExp& b) {
    VExp r;
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      if (j == b.size() || (i < a.size() && a[i].first < b[j].first))
        r.push_back(a[i++]);
      else if (i == a.size() || b[j].first < a[i].first)
        r.push_back(b[j++]);
      else {
        r.emplace_back(a[i].first, a[i].second + b[j].second);
        ++i, ++j;
      }
    }
    return r;
  }

  ScalarRing ring_{};
  int lo_ = 0, hi_ = 0;
  std::map<VExp, Scalar> terms_;
};

inline VPolynomial operator*(const Scalar& s, const VPolynomial& a) { return a * s; }

}  // namespace bpv
