#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bpv/errors.hpp"

namespace bpv {

// Z/p^N arithmetic on machine integers (N = 1 gives F_p).  Moduli here are
// tiny; everything fits comfortably in long.
struct ModArith {
  long p = 2;
  int N = 1;
  long M = 2;

  ModArith() = default;
  ModArith(long p_, int N_) : p(p_), N(N_) {
    M = 1;
    for (int i = 0; i < N; ++i) M *= p;
  }

  long norm(long a) const {
    a %= M;
    return a < 0 ? a + M : a;
  }
  long add(long a, long b) const { return norm(a + b); }
  long sub(long a, long b) const { return norm(a - b); }
  long mul(long a, long b) const { return norm(a * b); }

  int val(long a) const {
    if (a == 0) return N;
    int v = 0;
    while (a % p == 0) a /= p, ++v;
    return v;
  }

  long unit_inv(long a) const {
    long t = 0, newt = 1, r = M, newr = norm(a);
    while (newr != 0) {
      long q = r / newr;
      std::swap(t -= q * newt, newt);
      std::swap(r -= q * newr, newr);
    }
    if (r != 1) throw precondition_error("non-unit inverse requested mod p^N");
    return norm(t);
  }

  long ppow(int v) const {
    long r = 1;
    for (int i = 0; i < v; ++i) r *= p;
    return r;
  }
};

// Row-major sparse matrix over Z/p^N; no stored zeros.
struct SparseMatrix {
  ModArith ring;
  int ncols = 0;
  std::vector<std::vector<std::pair<int, long>>> rows;

  SparseMatrix() = default;
  SparseMatrix(ModArith r, int nrows, int ncols_) : ring(r), ncols(ncols_), rows(nrows) {}

  int nrows() const { return static_cast<int>(rows.size()); }

  void set(int i, int j, long v) {
    v = ring.norm(v);
    auto& row = rows[i];
    for (auto& [c, x] : row)
      if (c == j) {
        x = v;
        return;
      }
    if (v != 0) row.emplace_back(j, v);
  }

  std::vector<long> dense_row(int i) const {
    std::vector<long> r(ncols, 0);
    for (auto [c, x] : rows[i]) r[c] = x;
    return r;
  }

  static std::vector<std::pair<int, long>> sparsify(const std::vector<long>& d) {
    std::vector<std::pair<int, long>> r;
    for (int j = 0; j < static_cast<int>(d.size()); ++j)
      if (d[j] != 0) r.emplace_back(j, d[j]);
    return r;
  }
};

// Howell (for N = 1: reduced row echelon) form with optional transformation
// tracking.  Pivots are p^v; entries above a pivot are reduced mod the
// pivot; for v > 0 the closure row p^(N-v) * row is folded back in, so the
// row span is canonical and complete.
struct HowellForm {
  ModArith ring;
  int ncols = 0;
  std::vector<std::vector<long>> rows;   // nonzero rows, by pivot column
  std::vector<int> pivot_col;
  std::vector<int> pivot_val;            // valuation v, pivot entry = p^v
  std::vector<std::vector<long>> trans;  // tracking parts of `rows`
  std::vector<std::vector<long>> kernel_trans;  // tracking parts of zero rows
};

inline HowellForm howell_form(const SparseMatrix& A, bool track = false) {
  const ModArith& R = A.ring;
  HowellForm H;
  H.ring = R;
  H.ncols = A.ncols;

  struct WRow {
    std::vector<long> v, t;
  };
  std::vector<WRow> active;
  int tn = A.nrows();
  for (int i = 0; i < A.nrows(); ++i) {
    WRow w;
    w.v = A.dense_row(i);
    if (track) {
      w.t.assign(tn, 0);
      w.t[i] = 1;
    }
    active.push_back(std::move(w));
  }

  auto axpy = [&](WRow& dst, const WRow& src, long c) {
    if (c == 0) return;
    for (int j = 0; j < H.ncols; ++j) dst.v[j] = R.add(dst.v[j], R.mul(c, src.v[j]));
    if (track)
      for (int j = 0; j < tn; ++j) dst.t[j] = R.add(dst.t[j], R.mul(c, src.t[j]));
  };
  auto scale = [&](WRow& r, long c) {
    for (auto& x : r.v) x = R.mul(x, c);
    if (track)
      for (auto& x : r.t) x = R.mul(x, c);
  };

  std::vector<WRow> done;
  for (int col = 0; col < H.ncols; ++col) {
    int best = -1, bestv = R.N;
    for (int i = 0; i < static_cast<int>(active.size()); ++i) {
      long e = active[i].v[col];
      if (e == 0) continue;
      int v = R.val(e);
      if (v < bestv) {
        bestv = v;
        best = i;
      }
    }
    if (best < 0) continue;
    WRow piv = std::move(active[best]);
    active.erase(active.begin() + best);
    int v = bestv;
    long unit = piv.v[col] / R.ppow(v);
    scale(piv, R.unit_inv(unit));
    // entry is now exactly p^v
    for (auto& r : active) {
      long e = r.v[col];
      if (e == 0) continue;
      axpy(r, piv, R.sub(0, e / R.ppow(v)));
    }
    for (auto& r : done) {
      long e = r.v[col];
      if (e == 0) continue;
      axpy(r, piv, R.sub(0, e / R.ppow(v)));  // reduce above mod p^v
    }
    if (v > 0) {
      WRow closure = piv;
      scale(closure, R.ppow(R.N - v));
      bool nonzero = false;
      for (long x : closure.v)
        if (x != 0) nonzero = true;
      if (nonzero || track) active.push_back(std::move(closure));
    }
    H.pivot_col.push_back(col);
    H.pivot_val.push_back(v);
    done.push_back(std::move(piv));
  }

  for (auto& r : done) {
    H.rows.push_back(std::move(r.v));
    if (track) H.trans.push_back(std::move(r.t));
  }
  if (track)
    for (auto& r : active) H.kernel_trans.push_back(std::move(r.t));
  return H;
}

struct SolveResult {
  bool consistent = false;
  std::vector<long> particular;
  std::vector<std::vector<long>> kernel;
};

// Solve A x = b with a full description of the solution set.  The right
// kernel of A is the left kernel of A^T, read off from the Howell
// transformation rows that map to zero.
inline SolveResult solve(const SparseMatrix& A, const std::vector<long>& b) {
  const ModArith& R = A.ring;
  if (static_cast<int>(b.size()) != A.nrows()) throw config_error("solve: dimension mismatch");

  SparseMatrix At(R, A.ncols, A.nrows());
  for (int i = 0; i < A.nrows(); ++i)
    for (auto [j, v] : A.rows[i]) At.set(j, i, v);
  HowellForm H = howell_form(At, /*track=*/true);

  SolveResult res;
  for (auto& kt : H.kernel_trans) {
    bool nz = false;
    for (long x : kt)
      if (x != 0) nz = true;
    if (nz) res.kernel.push_back(kt);
  }

  std::vector<long> cur(b);
  for (auto& x : cur) x = R.norm(x);
  std::vector<long> coeffs(A.ncols, 0);
  for (size_t r = 0; r < H.rows.size(); ++r) {
    int c = H.pivot_col[r];
    long e = cur[c];
    if (e == 0) continue;
    int v = H.pivot_val[r];
    if (R.val(e) < v) return res;  // inconsistent
    long q = e / R.ppow(v);
    for (int j = 0; j < H.ncols; ++j) cur[j] = R.sub(cur[j], R.mul(q, H.rows[r][j]));
    for (int j = 0; j < A.ncols; ++j) coeffs[j] = R.add(coeffs[j], R.mul(q, H.trans[r][j]));
  }
  for (long x : cur)
    if (x != 0) return res;  // inconsistent
  res.consistent = true;
  res.particular = std::move(coeffs);
  return res;
}

struct RankProfile {
  int rank = 0;
  std::vector<int> pivot_cols;
  HowellForm form;
};

inline RankProfile rank_profile(const SparseMatrix& A) {
  RankProfile r;
  r.form = howell_form(A);
  r.rank = static_cast<int>(r.form.rows.size());
  r.pivot_cols = r.form.pivot_col;
  return r;
}

// Does row lie in the row span of H?  (Howell reduction to zero.)
inline bool in_row_span(const HowellForm& H, std::vector<long> row) {
  const ModArith& R = H.ring;
  for (auto& x : row) x = R.norm(x);
  for (size_t r = 0; r < H.rows.size(); ++r) {
    int c = H.pivot_col[r];
    long e = row[c];
    if (e == 0) continue;
    int v = H.pivot_val[r];
    if (R.val(e) < v) return false;
    long q = e / R.ppow(v);
    for (int j = 0; j < H.ncols; ++j) row[j] = R.sub(row[j], R.mul(q, H.rows[r][j]));
  }
  for (long x : row)
    if (x != 0) return false;
  return true;
}

}  // namespace bpv
