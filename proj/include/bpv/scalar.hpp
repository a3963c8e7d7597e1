#pragma once

#include <gmpxx.h>

#include <string>

#include "bpv/errors.hpp"

namespace bpv {

enum class ScalarKind { PrimeField, IntegersMod, Rationals };

// Coefficient ring descriptor: F_p, Z/p^N, or exact rationals.  The prime p
// is carried even in the rational case, so that p-integrality can be checked
// before any modular reduction happens.
struct ScalarRing {
  ScalarKind kind = ScalarKind::Rationals;
  long p = 2;
  int N = 1;  // p-adic precision, used only for IntegersMod

  static ScalarRing prime_field(long p) { return {ScalarKind::PrimeField, p, 1}; }
  static ScalarRing integers_mod(long p, int N) {
    if (N < 1) throw config_error("integers-mod requires N >= 1");
    return {ScalarKind::IntegersMod, p, N};
  }
  static ScalarRing rationals(long p) { return {ScalarKind::Rationals, p, 1}; }

  bool modular() const { return kind != ScalarKind::Rationals; }

  long modulus() const {
    long m = 1;
    int e = (kind == ScalarKind::PrimeField) ? 1 : N;
    for (int i = 0; i < e; ++i) m *= p;
    return m;
  }

  bool operator==(const ScalarRing& o) const {
    if (kind != o.kind || p != o.p) return false;
    if (kind == ScalarKind::IntegersMod && N != o.N) return false;
    return true;
  }
  bool operator!=(const ScalarRing& o) const { return !(*this == o); }

  std::string describe() const {
    switch (kind) {
      case ScalarKind::PrimeField: return "F_" + std::to_string(p);
      case ScalarKind::IntegersMod:
        return "Z/" + std::to_string(p) + "^" + std::to_string(N);
      default: return "Q(p=" + std::to_string(p) + ")";
    }
  }
};

// One exact scalar.  Modular values are kept as canonical representatives in
// [0, modulus); rational values are reduced fractions.
class Scalar {
public:
  Scalar() = default;
  Scalar(ScalarRing ring, const mpq_class& v) : ring_(ring), v_(v) { normalize(); }
  Scalar(ScalarRing ring, long v) : ring_(ring), v_(v) { normalize(); }

  static Scalar zero(ScalarRing ring) { return Scalar(ring, 0); }
  static Scalar one(ScalarRing ring) { return Scalar(ring, 1); }

  const ScalarRing& ring() const { return ring_; }
  const mpq_class& value() const { return v_; }

  bool is_zero() const { return v_ == 0; }

  bool is_unit() const {
    if (is_zero()) return false;
    if (!ring_.modular()) return true;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), v_.get_num().get_mpz_t(), mpz_class(ring_.p).get_mpz_t());
    return g == 1;
  }

  Scalar operator+(const Scalar& o) const { check(o); return Scalar(ring_, v_ + o.v_); }
  Scalar operator-(const Scalar& o) const { check(o); return Scalar(ring_, v_ - o.v_); }
  Scalar operator*(const Scalar& o) const { check(o); return Scalar(ring_, v_ * o.v_); }
  Scalar operator-() const { return Scalar(ring_, -v_); }

  Scalar inverse() const {
    if (!ring_.modular()) {
      if (is_zero()) throw precondition_error("division by zero rational scalar");
      return Scalar(ring_, 1 / v_);
    }
    mpz_class r, m(ring_.modulus());
    if (mpz_invert(r.get_mpz_t(), v_.get_num().get_mpz_t(), m.get_mpz_t()) == 0)
      throw precondition_error("scalar " + str() + " is not a unit in " + ring_.describe());
    return Scalar(ring_, mpq_class(r));
  }

  Scalar pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    Scalar r = one(ring_), b = *this;
    while (e > 0) {
      if (e & 1) r = r * b;
      b = b * b;
      e >>= 1;
    }
    return r;
  }

  // p-adic valuation of a modular scalar; modulus-exponent for zero.
  int p_valuation() const {
    if (!ring_.modular()) throw internal_error("p_valuation on rational scalar");
    if (is_zero()) return (ring_.kind == ScalarKind::PrimeField) ? 1 : ring_.N;
    int v = 0;
    mpz_class n = v_.get_num();
    while (mpz_divisible_ui_p(n.get_mpz_t(), ring_.p)) {
      n /= ring_.p;
      ++v;
    }
    return v;
  }

  bool p_integral() const {
    if (ring_.modular()) return true;
    return !mpz_divisible_ui_p(v_.get_den().get_mpz_t(), ring_.p);
  }

  // Push a p-integral rational into F_p or Z/p^N.
  Scalar reduce_to(ScalarRing target) const {
    if (target == ring_) return *this;
    if (ring_.modular()) {
      if (target == ring_) return *this;
      if (target.p != ring_.p) throw config_error("cannot change prime in reduction");
      return Scalar(target, mpq_class(v_.get_num()));
    }
    if (!p_integral())
      throw internal_error("non-p-integral coefficient " + str() + " surfaced in reduction");
    mpz_class m(target.modulus()), dinv, r;
    if (mpz_invert(dinv.get_mpz_t(), v_.get_den().get_mpz_t(), m.get_mpz_t()) == 0)
      throw internal_error("denominator not invertible in " + target.describe());
    r = v_.get_num() * dinv;
    return Scalar(target, mpq_class(r));
  }

  bool operator==(const Scalar& o) const { return ring_ == o.ring_ && v_ == o.v_; }
  bool operator!=(const Scalar& o) const { return !(*this == o); }

  std::string str() const { return v_.get_str(); }

private:
  void check(const Scalar& o) const {
    if (ring_ != o.ring_)
      throw config_error("scalar ring mismatch: " + ring_.describe() + " vs " + o.ring_.describe());
  }

  void normalize() {
    v_.canonicalize();
    if (ring_.modular()) {
      if (v_.get_den() != 1) throw internal_error("fraction in modular scalar ring");
      mpz_class m(ring_.modulus()), r;
      mpz_mod(r.get_mpz_t(), v_.get_num().get_mpz_t(), m.get_mpz_t());
      v_ = mpq_class(r);
    }
  }

  ScalarRing ring_{};
  mpq_class v_{0};
};

}  // namespace bpv
