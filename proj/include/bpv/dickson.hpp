#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bpv/errors.hpp"

namespace bpv {

// An element of the mod-p cohomology of a rank-k elementary abelian group:
// exterior algebra on a_0..a_{k-1} (degree 1) tensor polynomials in
// x_0..x_{k-1} (degree 2).  Exterior parts are bitmasks with generators in
// ascending order; reordering signs are folded into the coefficient.
class SignedPoly {
public:
  using Key = std::pair<unsigned, std::vector<int>>;

  SignedPoly() = default;
  SignedPoly(long p, int k) : p_(p), k_(k) {}

  static SignedPoly zero(long p, int k) { return SignedPoly(p, k); }

  static SignedPoly constant(long p, int k, long c) {
    SignedPoly r(p, k);
    r.add_term(0u, std::vector<int>(k, 0), c);
    return r;
  }

  static SignedPoly a(long p, int k, int i) {
    SignedPoly r(p, k);
    r.add_term(1u << i, std::vector<int>(k, 0), 1);
    return r;
  }

  static SignedPoly x(long p, int k, int i, int e = 1) {
    SignedPoly r(p, k);
    std::vector<int> m(k, 0);
    m[i] = e;
    r.add_term(0u, m, 1);
    return r;
  }

  long p() const { return p_; }
  int k() const { return k_; }
  const std::map<Key, long>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(unsigned mask, const std::vector<int>& xe, long c) {
    c %= p_;
    if (c < 0) c += p_;
    if (c == 0) return;
    auto [it, fresh] = terms_.emplace(Key{mask, xe}, c);
    if (!fresh) {
      it->second = (it->second + c) % p_;
      if (it->second == 0) terms_.erase(it);
    }
  }

  SignedPoly operator+(const SignedPoly& o) const {
    check(o);
    SignedPoly r = *this;
    for (const auto& [key, c] : o.terms_) r.add_term(key.first, key.second, c);
    return r;
  }

  SignedPoly operator-() const { return *this * (p_ - 1); }
  SignedPoly operator-(const SignedPoly& o) const { return *this + (-o); }

  SignedPoly operator*(long s) const {
    SignedPoly r(p_, k_);
    for (const auto& [key, c] : terms_) r.add_term(key.first, key.second, c * s);
    return r;
  }

  SignedPoly operator*(const SignedPoly& o) const {
    check(o);
    SignedPoly r(p_, k_);
    for (const auto& [ka, ca] : terms_)
      for (const auto& [kb, cb] : o.terms_) {
        if (ka.first & kb.first) continue;  // repeated exterior generator
        int sign = merge_sign(ka.first, kb.first);
        std::vector<int> xe = ka.second;
        for (int i = 0; i < k_; ++i) xe[i] += kb.second[i];
        r.add_term(ka.first | kb.first, xe, ca * cb * sign);
      }
    return r;
  }

  SignedPoly pow(long e) const {
    SignedPoly r = constant(p_, k_, 1), b = *this;
    while (e > 0) {
      if (e & 1) r = r * b;
      e >>= 1;
      if (e) b = b * b;
    }
    return r;
  }

  bool operator==(const SignedPoly& o) const {
    return p_ == o.p_ && k_ == o.k_ && terms_ == o.terms_;
  }
  bool operator!=(const SignedPoly& o) const { return !(*this == o); }

  std::string render() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [key, c] : terms_) {
      if (!first) out += "+";
      first = false;
      std::string mono;
      for (int i = 0; i < k_; ++i)
        if (key.first & (1u << i)) {
          if (!mono.empty()) mono += "*";
          mono += "a" + std::to_string(i);
        }
      for (int i = 0; i < k_; ++i)
        if (key.second[i] > 0) {
          if (!mono.empty()) mono += "*";
          mono += "x" + std::to_string(i);
          if (key.second[i] > 1) mono += "^" + std::to_string(key.second[i]);
        }
      if (mono.empty())
        out += std::to_string(c);
      else if (c == 1)
        out += mono;
      else
        out += std::to_string(c) + "*" + mono;
    }
    return out;
  }

  static SignedPoly parse(const std::string& s, long p, int k) {
    SignedPoly r(p, k);
    if (s == "0") return r;
    size_t pos = 0;
    while (pos < s.size()) {
      size_t end = s.find('+', pos + 1);
      if (end == std::string::npos) end = s.size();
      std::string term = s.substr(pos, end - pos);
      pos = end + 1;
      long coeff = 1;
      unsigned mask = 0;
      std::vector<int> xe(k, 0);
      size_t tp = 0;
      while (tp < term.size()) {
        size_t fend = term.find('*', tp);
        if (fend == std::string::npos) fend = term.size();
        std::string f = term.substr(tp, fend - tp);
        tp = fend + 1;
        if (f.empty()) throw config_error("empty factor in cohomology text");
        if (f[0] == 'a') {
          mask |= 1u << std::stoi(f.substr(1));
        } else if (f[0] == 'x') {
          size_t caret = f.find('^');
          int idx = std::stoi(f.substr(1, caret == std::string::npos ? std::string::npos
                                                                     : caret - 1));
          xe[idx] += caret == std::string::npos ? 1 : std::stoi(f.substr(caret + 1));
        } else {
          coeff = std::stol(f);
        }
      }
      r.add_term(mask, xe, coeff);
    }
    return r;
  }

private:
  void check(const SignedPoly& o) const {
    if (p_ != o.p_ || k_ != o.k_) throw config_error("cohomology algebra mismatch");
  }

  // Koszul sign for moving mask b across mask a into ascending order:
  // (-1)^(number of pairs i in a, j in b with i > j).
  static int merge_sign(unsigned a, unsigned b) {
    int inv = 0;
    for (int j = 0; j < 32; ++j) {
      if (!(b & (1u << j))) continue;
      unsigned higher = a >> (j + 1);
      inv += __builtin_popcount(higher);
    }
    return (inv % 2 == 0) ? 1 : -1;
  }

  long p_ = 2;
  int k_ = 0;
  std::map<Key, long> terms_;
};

inline long dpow(long b, long e) {
  long r = 1;
  for (long i = 0; i < e; ++i) r *= b;
  return r;
}

// Milnor primitive Q_i: the derivation with Q_i(a_j) = x_j^(p^i) and
// Q_i(x_j) = 0, signs by the Koszul rule through the odd generators.
inline SignedPoly q_op(int i, const SignedPoly& e) {
  SignedPoly r(e.p(), e.k());
  long q = dpow(e.p(), i);
  for (const auto& [key, c] : e.terms()) {
    int sign = 1;
    for (int j = 0; j < e.k(); ++j) {
      if (!(key.first & (1u << j))) continue;
      std::vector<int> xe = key.second;
      xe[j] += static_cast<int>(q);
      r.add_term(key.first & ~(1u << j), xe, c * sign);
      sign = -sign;  // crossed one more odd generator
    }
  }
  return r;
}

// Product over all vectors with last nonzero entry 1 of the linear form
// sum lambda_i x_i.
inline SignedPoly dickson_beta(long p, int k) {
  SignedPoly prod = SignedPoly::constant(p, k, 1);
  std::vector<int> lam(k, 0);
  while (true) {
    int last = -1;
    for (int i = 0; i < k; ++i)
      if (lam[i] != 0) last = i;
    if (last >= 0 && lam[last] == 1) {
      SignedPoly form(p, k);
      for (int i = 0; i < k; ++i)
        if (lam[i]) form = form + SignedPoly::x(p, k, i) * lam[i];
      prod = prod * form;
    }
    int i = 0;
    while (i < k && ++lam[i] == p) lam[i++] = 0;
    if (i == k) break;
  }
  return prod;
}

// det(x_i^(p^j)) for 0 <= i, j < k.
inline SignedPoly dickson_beta_prime(long p, int k) {
  SignedPoly acc = SignedPoly::zero(p, k);
  std::vector<int> perm(k);
  for (int i = 0; i < k; ++i) perm[i] = i;
  do {
    int inv = 0;
    for (int a = 0; a < k; ++a)
      for (int b = a + 1; b < k; ++b)
        if (perm[a] > perm[b]) ++inv;
    SignedPoly term = SignedPoly::constant(p, k, inv % 2 ? -1 : 1);
    for (int i = 0; i < k; ++i)
      term = term * SignedPoly::x(p, k, i, static_cast<int>(dpow(p, perm[i])));
    acc = acc + term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return acc;
}

// Q_{m+k-1} ... Q_m (a_0 a_1 ... a_{k-1}).
inline SignedPoly dickson_beta_sec(long p, int m, int k) {
  SignedPoly e = SignedPoly::constant(p, k, 1);
  for (int i = 0; i < k; ++i) e = e * SignedPoly::a(p, k, i);
  for (int i = m; i < m + k; ++i) e = q_op(i, e);
  return e;
}

// Frobenius twist: identity on the a_i, p-th power on the x_i.
inline SignedPoly frobenius_twist(const SignedPoly& e) {
  SignedPoly r(e.p(), e.k());
  for (const auto& [key, c] : e.terms()) {
    std::vector<int> xe = key.second;
    for (auto& v : xe) v *= static_cast<int>(e.p());
    r.add_term(key.first, xe, c);
  }
  return r;
}

inline long fp_det(const std::vector<std::vector<long>>& g, long p) {
  auto a = g;
  int n = static_cast<int>(a.size());
  long det = 1;
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int r = c; r < n; ++r)
      if (a[r][c] % p != 0) { piv = r; break; }
    if (piv < 0) return 0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    long inv = 1;  // inverse of a[c][c] mod p by Fermat
    for (long e = 0; e < p - 2; ++e) inv = inv * a[c][c] % p;
    det = det * a[c][c] % p;
    for (int r = c + 1; r < n; ++r) {
      long f = a[r][c] % p * inv % p;
      for (int cc = c; cc < n; ++cc) a[r][cc] = ((a[r][cc] - f * a[c][cc]) % p + p) % p;
    }
  }
  return ((det % p) + p) % p;
}

// Substitution a_j -> sum_i g[i][j] a_i, x_j -> sum_i g[i][j] x_i.
inline SignedPoly gl_act(const std::vector<std::vector<long>>& g, const SignedPoly& e) {
  long p = e.p();
  int k = e.k();
  std::vector<SignedPoly> A, X;
  for (int j = 0; j < k; ++j) {
    SignedPoly aj(p, k), xj(p, k);
    for (int i = 0; i < k; ++i) {
      aj = aj + SignedPoly::a(p, k, i) * g[i][j];
      xj = xj + SignedPoly::x(p, k, i) * g[i][j];
    }
    A.push_back(aj);
    X.push_back(xj);
  }
  SignedPoly r(p, k);
  for (const auto& [key, c] : e.terms()) {
    SignedPoly term = SignedPoly::constant(p, k, c);
    for (int j = 0; j < k; ++j)
      if (key.first & (1u << j)) term = term * A[j];
    for (int j = 0; j < k; ++j)
      if (key.second[j] > 0) term = term * X[j].pow(key.second[j]);
    r = r + term;
  }
  return r;
}

}  // namespace bpv
