#include <doctest.h>

#include <random>

#include "bpv/linalg.hpp"

using namespace bpv;

namespace {

std::vector<long> apply(const SparseMatrix& A, const std::vector<long>& x) {
  std::vector<long> y(A.nrows(), 0);
  for (int i = 0; i < A.nrows(); ++i)
    for (auto [j, v] : A.rows[i]) y[i] = A.ring.add(y[i], A.ring.mul(v, x[j]));
  return y;
}

// brute force: does Ax = b have a solution, and how many x solve Ax = 0?
std::pair<bool, long> brute(const SparseMatrix& A, const std::vector<long>& b) {
  long M = A.ring.M;
  long total = 1;
  for (int i = 0; i < A.ncols; ++i) total *= M;
  bool ok = false;
  long kernel = 0;
  for (long code = 0; code < total; ++code) {
    std::vector<long> x(A.ncols);
    long c = code;
    for (int i = 0; i < A.ncols; ++i) {
      x[i] = c % M;
      c /= M;
    }
    auto y = apply(A, x);
    bool zero = true, hit = true;
    for (size_t i = 0; i < y.size(); ++i) {
      if (y[i] != 0) zero = false;
      if (y[i] != A.ring.norm(b[i])) hit = false;
    }
    if (zero) ++kernel;
    if (hit) ok = true;
  }
  return {ok, kernel};
}

long span_size(const HowellForm& H) {
  // number of distinct module elements in the row span = prod p^(N - val_i)
  long s = 1;
  for (int v : H.pivot_val) s *= H.ring.ppow(H.ring.N - v);
  return s;
}

}  // namespace

TEST_CASE("solve: simple exact cases") {
  ModArith z4(2, 2);
  SparseMatrix A(z4, 1, 1);
  A.set(0, 0, 2);
  auto r = solve(A, {2});
  REQUIRE(r.consistent);
  CHECK(z4.mul(2, r.particular[0]) == 2);
  REQUIRE(r.kernel.size() == 1);
  CHECK(r.kernel[0][0] == 2);

  ModArith f2(2, 1);
  SparseMatrix B(f2, 2, 2);
  B.set(0, 0, 1);
  B.set(0, 1, 1);
  B.set(1, 0, 1);
  B.set(1, 1, 1);
  CHECK_FALSE(solve(B, {1, 0}).consistent);
}

TEST_CASE("solve agrees with brute force over Z/4 and Z/9") {
  for (auto [p, N] : {std::pair<long, int>{2, 2}, {3, 2}}) {
    ModArith R(p, N);
    std::mt19937 rng(42 + p);
    for (int trial = 0; trial < 60; ++trial) {
      int nr = 1 + static_cast<int>(rng() % 3);
      int nc = 1 + static_cast<int>(rng() % 3);
      SparseMatrix A(R, nr, nc);
      for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j) A.set(i, j, static_cast<long>(rng() % R.M));
      std::vector<long> b(nr);
      for (auto& x : b) x = static_cast<long>(rng() % R.M);

      auto got = solve(A, b);
      auto [want_ok, want_kernel] = brute(A, b);
      CHECK(got.consistent == want_ok);
      if (got.consistent) {
        auto y = apply(A, got.particular);
        for (int i = 0; i < nr; ++i) CHECK(y[i] == R.norm(b[i]));
      }
      for (const auto& kv : got.kernel) {
        auto y = apply(A, kv);
        for (long v : y) CHECK(v == 0);
      }
      // the kernel basis spans the full solution space of Ax = 0
      SparseMatrix K(R, static_cast<int>(got.kernel.size()), nc);
      for (size_t i = 0; i < got.kernel.size(); ++i)
        K.rows[i] = SparseMatrix::sparsify(got.kernel[i]);
      CHECK(span_size(howell_form(K)) == want_kernel);
    }
  }
}

TEST_CASE("howell form is canonical under row operations") {
  ModArith z8(2, 3);
  std::mt19937 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    int nr = 2 + static_cast<int>(rng() % 3);
    int nc = 2 + static_cast<int>(rng() % 3);
    SparseMatrix A(z8, nr, nc);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nc; ++j) A.set(i, j, static_cast<long>(rng() % z8.M));
    HowellForm H1 = howell_form(A);

    // random row-equivalent matrix: unit scalings, swaps, additions
    SparseMatrix B = A;
    for (int op = 0; op < 10; ++op) {
      int i = static_cast<int>(rng() % nr), j = static_cast<int>(rng() % nr);
      auto di = B.dense_row(i);
      auto dj = B.dense_row(j);
      switch (rng() % 3) {
        case 0: {
          long u = 1 + 2 * static_cast<long>(rng() % 4);  // odd = unit mod 8
          for (auto& x : di) x = z8.mul(x, u);
          break;
        }
        case 1:
          if (i != j)
            for (size_t c = 0; c < di.size(); ++c) di[c] = z8.add(di[c], dj[c]);
          break;
        default:
          std::swap(di, dj);
          B.rows[j] = SparseMatrix::sparsify(dj);
          break;
      }
      B.rows[i] = SparseMatrix::sparsify(di);
    }
    HowellForm H2 = howell_form(B);
    CHECK(H1.rows == H2.rows);
    CHECK(H1.pivot_col == H2.pivot_col);
  }
}

TEST_CASE("rank profile basics") {
  ModArith f5(5, 1);
  SparseMatrix Z(f5, 3, 3);
  CHECK(rank_profile(Z).rank == 0);
  SparseMatrix I(f5, 3, 3);
  for (int i = 0; i < 3; ++i) I.set(i, i, 1);
  CHECK(rank_profile(I).rank == 3);
  ModArith z4(2, 2);
  SparseMatrix S(z4, 1, 1);
  S.set(0, 0, 2);
  CHECK(rank_profile(S).rank == 1);
}

TEST_CASE("in_row_span") {
  ModArith z4(2, 2);
  SparseMatrix A(z4, 1, 2);
  A.set(0, 0, 2);
  A.set(0, 1, 2);
  HowellForm H = howell_form(A);
  CHECK(in_row_span(H, {2, 2}));
  CHECK_FALSE(in_row_span(H, {1, 1}));
  CHECK_FALSE(in_row_span(H, {2, 0}));
}
