#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ordist/zlinalg/int_matrix.hpp"

namespace ordist::modp {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 p) { return static_cast<u64>(static_cast<u128>(a) * b % p); }
inline u64 addmod(u64 a, u64 b, u64 p) {
  u64 s = a + b;
  return s >= p ? s - p : s;
}
inline u64 submod(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + p - b; }

inline u64 powmod(u64 a, u64 e, u64 p) {
  u64 r = 1 % p;
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

inline u64 invmod(u64 a, u64 p) { return powmod(a, p - 2, p); }

inline u64 reduce(const Int& v, u64 p) {
  Int r;
  mpz_fdiv_r_ui(r.get_mpz_t(), v.get_mpz_t(), p);
  return r.get_ui();
}

/* Descending list of primes just below 2^62, generated once. */
inline const std::vector<u64>& large_primes() {
  static const std::vector<u64> primes = [] {
    std::vector<u64> out;
    Int c = (Int(1) << 62) - 1;
    while (out.size() < 64) {
      if (mpz_probab_prime_p(c.get_mpz_t(), 30)) out.push_back(c.get_ui());
      c -= 2;
    }
    return out;
  }();
  return primes;
}

struct Rref {
  std::vector<std::size_t> pivots;     // pivot column per row
  std::vector<std::vector<u64>> rows;  // reduced rows, length = cols
};

/* Reduced row echelon form of A mod p; pivots are the leftmost possible. */
inline Rref rref(const IntMatrix& a, u64 p) {
  std::size_t m = a.rows(), n = a.cols();
  std::vector<std::vector<u64>> mat(m, std::vector<u64>(n, 0));
  for (std::size_t i = 0; i < m; ++i)
    for (const auto& [c, v] : a.row_entries(i)) mat[i][c] = reduce(v, p);
  Rref out;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < m; ++c) {
    std::size_t piv = m;
    for (std::size_t i = r; i < m; ++i)
      if (mat[i][c]) {
        piv = i;
        break;
      }
    if (piv == m) continue;
    std::swap(mat[piv], mat[r]);
    u64 inv = invmod(mat[r][c], p);
    for (std::size_t j = c; j < n; ++j) mat[r][j] = mulmod(mat[r][j], inv, p);
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || mat[i][c] == 0) continue;
      u64 f = mat[i][c];
      auto& ri = mat[i];
      const auto& rr = mat[r];
      for (std::size_t j = c; j < n; ++j)
        if (rr[j]) ri[j] = submod(ri[j], mulmod(f, rr[j], p), p);
    }
    out.pivots.push_back(c);
    ++r;
  }
  mat.resize(r);
  out.rows = std::move(mat);
  return out;
}

/* Rank of A mod p; p may be any prime below 2^63. */
inline std::size_t rank(const std::vector<SparseVec>& rows, std::size_t cols, u64 p) {
  std::size_t m = rows.size();
  std::vector<std::vector<u64>> mat(m, std::vector<u64>(cols, 0));
  for (std::size_t i = 0; i < m; ++i)
    for (const auto& [c, v] : rows[i]) mat[i][c] = reduce(v, p);
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m; ++c) {
    std::size_t piv = m;
    for (std::size_t i = r; i < m; ++i)
      if (mat[i][c]) {
        piv = i;
        break;
      }
    if (piv == m) continue;
    std::swap(mat[piv], mat[r]);
    u64 inv = invmod(mat[r][c], p);
    for (std::size_t i = r + 1; i < m; ++i) {
      if (mat[i][c] == 0) continue;
      u64 f = mulmod(mat[i][c], inv, p);
      for (std::size_t j = c; j < cols; ++j)
        if (mat[r][j]) mat[i][j] = submod(mat[i][j], mulmod(f, mat[r][j], p), p);
    }
    ++r;
  }
  return r;
}

inline std::size_t rank(const IntMatrix& a, u64 p) { return rank(a.sparse_rows(), a.cols(), p); }

/* Rational reconstruction of x mod M with numerator and denominator bounded by
   sqrt(M/2). */
inline std::optional<Rat> rational_reconstruct(const Int& x, const Int& M) {
  Int bound;
  Int half = M / 2;
  mpz_sqrt(bound.get_mpz_t(), half.get_mpz_t());
  Int r0 = M, r1 = x % M;
  if (r1 < 0) r1 += M;
  Int t0 = 0, t1 = 1;
  while (r1 > bound) {
    Int q = r0 / r1;
    Int r2 = r0 - q * r1;
    Int t2 = t0 - q * t1;
    r0 = r1;
    r1 = r2;
    t0 = t1;
    t1 = t2;
  }
  if (t1 == 0 || abs(t1) > bound) return std::nullopt;
  Int g = gcd(t1, M);
  if (g != 1) return std::nullopt;
  Rat out(r1, t1);
  out.canonicalize();
  return out;
}

/* Elementary divisors of an integer matrix over Z/p^k: how many equal p^a for
   each a < k, and how many vanish mod p^k. Sparse elimination in machine
   words; p^k must stay below 2^62. */
struct LocalDivisors {
  std::vector<std::size_t> count;  // count[a] pivots of valuation a
  std::size_t zeros = 0;           // columns with no pivot
};

inline LocalDivisors local_divisors(const std::vector<SparseVec>& rows, std::size_t cols, u64 p, unsigned k) {
  u64 q = 1;
  for (unsigned i = 0; i < k; ++i) {
    if (q > (u64(1) << 62) / p) throw Error(Errc::modulus_too_large, "p^k too large for local elimination");
    q *= p;
  }
  using Row = std::vector<std::pair<std::uint32_t, u64>>;
  std::vector<Row> mat;
  for (const auto& r : rows) {
    Row x;
    for (const auto& [c, v] : r) {
      u64 y = reduce(v, q);
      if (y) x.emplace_back(static_cast<std::uint32_t>(c), y);
    }
    if (!x.empty()) mat.push_back(std::move(x));
  }
  auto valuation = [p](u64 x) {
    unsigned v = 0;
    while (x % p == 0) {
      x /= p;
      ++v;
    }
    return v;
  };
  auto inverse = [q](u64 u) {
    Int inv, g = Int(u);
    mpz_invert(inv.get_mpz_t(), g.get_mpz_t(), Int(q).get_mpz_t());
    return inv.get_ui();
  };
  LocalDivisors out;
  out.count.assign(k, 0);
  std::vector<char> alive(mat.size(), 1);
  Row tmp;
  u64 pa = 1;
  for (unsigned a = 0; a < k; ++a, pa *= p) {
    for (std::size_t i = 0; i < mat.size(); ++i) {
      if (!alive[i]) continue;
      std::size_t at = mat[i].size();
      for (std::size_t t = 0; t < mat[i].size(); ++t)
        if (valuation(mat[i][t].second) == a) {
          at = t;
          break;
        }
      if (at == mat[i].size()) continue;
      const Row piv = mat[i];
      const std::uint32_t c = piv[at].first;
      const u64 uinv = inverse(piv[at].second / pa);
      alive[i] = 0;
      ++out.count[a];
      for (std::size_t j = 0; j < mat.size(); ++j) {
        if (!alive[j]) continue;
        auto& r = mat[j];
        auto it = std::lower_bound(r.begin(), r.end(), c, [](const auto& e, std::uint32_t col) { return e.first < col; });
        if (it == r.end() || it->first != c) continue;
        const u64 f = mulmod(it->second / pa, uinv, q);
        tmp.clear();
        std::size_t x = 0, y = 0;
        while (x < r.size() || y < piv.size()) {
          if (y == piv.size() || (x < r.size() && r[x].first < piv[y].first)) {
            tmp.push_back(r[x++]);
          } else {
            u64 sub = mulmod(f, piv[y].second, q);
            u64 v = 0;
            std::uint32_t col = piv[y].first;
            if (x < r.size() && r[x].first == col) v = r[x++].second;
            v = submod(v, sub, q);
            if (v) tmp.emplace_back(col, v);
            ++y;
          }
        }
        r.swap(tmp);
      }
    }
  }
  std::size_t pivots = 0;
  for (auto n : out.count) pivots += n;
  out.zeros = cols - pivots;
  return out;
}

}  // namespace ordist::modp
