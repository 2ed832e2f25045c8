#pragma once

#include <algorithm>
#include <future>
#include <map>
#include <vector>

#include "ordist/zlinalg/ab_group.hpp"
#include "ordist/zlinalg/int_matrix.hpp"
#include "ordist/zlinalg/modular.hpp"

namespace ordist {

struct HnfResult {
  IntMatrix H;  // same shape as the input, zero rows last
  IntMatrix U;  // unimodular, H = U * A (empty when not requested)
  std::vector<std::size_t> pivots;
  std::size_t rank() const { return pivots.size(); }
};

/* Row Hermite normal form: pivots positive, entries above a pivot reduced
   into [0, pivot). */
inline HnfResult hnf(const IntMatrix& a, bool with_transform = true) {
  const std::size_t m = a.rows(), n = a.cols();
  std::vector<IntVec> h = a.dense_rows();
  std::vector<IntVec> u;
  if (with_transform) u = IntMatrix::identity(m).dense_rows();

  auto row_sub = [](IntVec& x, const Int& q, const IntVec& y) {
    for (std::size_t j = 0; j < x.size(); ++j)
      if (y[j] != 0) x[j] -= q * y[j];
  };

  HnfResult res;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < m; ++c) {
    bool found = false;
    for (;;) {
      std::size_t best = m;
      for (std::size_t i = r; i < m; ++i)
        if (h[i][c] != 0 && (best == m || abs(h[i][c]) < abs(h[best][c]))) best = i;
      if (best == m) break;
      found = true;
      std::swap(h[best], h[r]);
      if (with_transform) std::swap(u[best], u[r]);
      bool clean = true;
      for (std::size_t i = r + 1; i < m; ++i) {
        if (h[i][c] == 0) continue;
        Int q = floor_div(h[i][c], h[r][c]);
        row_sub(h[i], q, h[r]);
        if (with_transform) row_sub(u[i], q, u[r]);
        if (h[i][c] != 0) clean = false;
      }
      if (clean) break;
    }
    if (!found) continue;
    if (h[r][c] < 0) {
      for (auto& x : h[r]) x = -x;
      if (with_transform)
        for (auto& x : u[r]) x = -x;
    }
    for (std::size_t i = 0; i < r; ++i) {
      Int q = floor_div(h[i][c], h[r][c]);
      if (q == 0) continue;
      row_sub(h[i], q, h[r]);
      if (with_transform) row_sub(u[i], q, u[r]);
    }
    res.pivots.push_back(c);
    ++r;
  }
  res.H = IntMatrix::from_rows(h, n);
  if (with_transform) res.U = IntMatrix::from_rows(u, m);
  return res;
}

struct SnfResult {
  std::vector<Int> diagonal;  // length min(rows, cols), divisibility chain, zeros last
  IntMatrix L;                // rows x rows
  IntMatrix R;                // cols x cols
  IntMatrix R_inverse;
};

/* Smith normal form with transforms, L * A * R = diag(diagonal). Dense; meant
   for the small presentations built by the ray class machinery. */
inline SnfResult snf(const IntMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  std::vector<IntVec> M = a.dense_rows();
  std::vector<IntVec> L = IntMatrix::identity(m).dense_rows();
  std::vector<IntVec> R = IntMatrix::identity(n).dense_rows();
  std::vector<IntVec> Ri = IntMatrix::identity(n).dense_rows();

  auto swap_rows = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    std::swap(M[i], M[j]);
    std::swap(L[i], L[j]);
  };
  auto swap_cols = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (auto& row : M) std::swap(row[i], row[j]);
    for (auto& row : R) std::swap(row[i], row[j]);
    std::swap(Ri[i], Ri[j]);
  };
  // row_i -= q * row_t
  auto row_op = [&](std::size_t i, std::size_t t, const Int& q) {
    for (std::size_t k = 0; k < n; ++k)
      if (M[t][k] != 0) M[i][k] -= q * M[t][k];
    for (std::size_t k = 0; k < m; ++k)
      if (L[t][k] != 0) L[i][k] -= q * L[t][k];
  };
  // col_j -= q * col_t
  auto col_op = [&](std::size_t j, std::size_t t, const Int& q) {
    for (std::size_t k = 0; k < m; ++k)
      if (M[k][t] != 0) M[k][j] -= q * M[k][t];
    for (std::size_t k = 0; k < n; ++k)
      if (R[k][t] != 0) R[k][j] -= q * R[k][t];
    for (std::size_t k = 0; k < n; ++k)
      if (Ri[j][k] != 0) Ri[t][k] += q * Ri[j][k];
  };

  const std::size_t lim = std::min(m, n);
  SnfResult res;
  res.diagonal.assign(lim, Int(0));
  for (std::size_t t = 0; t < lim; ++t) {
    std::size_t bi = m, bj = n;
    for (std::size_t i = t; i < m; ++i)
      for (std::size_t j = t; j < n; ++j)
        if (M[i][j] != 0 && (bi == m || abs(M[i][j]) < abs(M[bi][bj]))) {
          bi = i;
          bj = j;
        }
    if (bi == m) break;
    swap_rows(t, bi);
    swap_cols(t, bj);
    for (;;) {
      bool dirty = false;
      for (std::size_t i = t + 1; i < m; ++i)
        if (M[i][t] != 0) {
          row_op(i, t, round_div(M[i][t], M[t][t]));
          if (M[i][t] != 0) dirty = true;
        }
      for (std::size_t j = t + 1; j < n; ++j)
        if (M[t][j] != 0) {
          col_op(j, t, round_div(M[t][j], M[t][t]));
          if (M[t][j] != 0) dirty = true;
        }
      if (dirty) {
        std::size_t bi2 = t, bj2 = t;
        for (std::size_t i = t + 1; i < m; ++i)
          if (M[i][t] != 0 && abs(M[i][t]) < abs(M[bi2][bj2])) {
            bi2 = i;
            bj2 = t;
          }
        for (std::size_t j = t + 1; j < n; ++j)
          if (M[t][j] != 0 && abs(M[t][j]) < abs(M[bi2][bj2])) {
            bi2 = t;
            bj2 = j;
          }
        swap_rows(t, bi2);
        swap_cols(t, bj2);
        continue;
      }
      std::size_t fi = m;
      for (std::size_t i = t + 1; i < m && fi == m; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (M[i][j] % M[t][t] != 0) {
            fi = i;
            break;
          }
      if (fi == m) break;
      row_op(t, fi, Int(-1));
    }
    if (M[t][t] < 0) {
      for (auto& x : M[t]) x = -x;
      for (auto& x : L[t]) x = -x;
    }
    res.diagonal[t] = M[t][t];
  }
  res.L = IntMatrix::from_rows(L, m);
  res.R = IntMatrix::from_rows(R, n);
  res.R_inverse = IntMatrix::from_rows(Ri, n);
  return res;
}

namespace detail {

using Row = std::vector<std::pair<std::uint32_t, Int>>;

/* x -= q * y over sparse rows. */
inline void sparse_axpy(Row& x, const Int& q, const Row& y, Row& scratch) {
  scratch.clear();
  scratch.reserve(x.size() + y.size());
  std::size_t a = 0, b = 0;
  while (a < x.size() || b < y.size()) {
    if (b == y.size() || (a < x.size() && x[a].first < y[b].first)) {
      scratch.push_back(std::move(x[a++]));
    } else if (a == x.size() || y[b].first < x[a].first) {
      scratch.emplace_back(y[b].first, -q * y[b].second);
      ++b;
    } else {
      Int v = x[a].second - q * y[b].second;
      if (v != 0) scratch.emplace_back(x[a].first, std::move(v));
      ++a;
      ++b;
    }
  }
  x.swap(scratch);
}

inline const Int* find_entry(const Row& r, std::uint32_t c) {
  auto it = std::lower_bound(r.begin(), r.end(), c,
                             [](const std::pair<std::uint32_t, Int>& e, std::uint32_t k) { return e.first < k; });
  if (it != r.end() && it->first == c) return &it->second;
  return nullptr;
}

/* Pivots of the sparse elimination; nonzero absolute values, not yet a
   divisibility chain. */
inline std::vector<Int> sparse_elimination_pivots(const IntMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  std::vector<Row> rows(m);
  for (std::size_t i = 0; i < m; ++i)
    for (auto& [c, v] : a.row_entries(i)) rows[i].emplace_back(static_cast<std::uint32_t>(c), v);
  std::vector<char> alive(m, 1);
  std::vector<std::vector<std::uint32_t>> col_rows(n);
  for (std::size_t i = 0; i < m; ++i)
    for (auto& e : rows[i]) col_rows[e.first].push_back(static_cast<std::uint32_t>(i));
  std::vector<std::size_t> col_count(n);
  std::vector<Int> pivots;
  Row scratch;

  for (;;) {
    std::fill(col_count.begin(), col_count.end(), 0);
    bool any = false;
    for (std::size_t i = 0; i < m; ++i)
      if (alive[i])
        for (auto& e : rows[i]) {
          ++col_count[e.first];
          any = true;
        }
    if (!any) break;
    // cheapest pivot: smallest magnitude, then Markowitz cost
    std::size_t pr = m;
    std::uint32_t pc = 0;
    std::size_t best_cost = 0;
    const Int* best_val = nullptr;
    for (std::size_t i = 0; i < m; ++i) {
      if (!alive[i] || rows[i].empty()) continue;
      std::size_t rl = rows[i].size() - 1;
      for (auto& e : rows[i]) {
        std::size_t cost = rl * (col_count[e.first] - 1);
        int cmp = best_val ? cmpabs(e.second, *best_val) : -1;
        if (cmp < 0 || (cmp == 0 && cost < best_cost)) {
          pr = i;
          pc = e.first;
          best_cost = cost;
          best_val = &e.second;
        }
      }
    }
    std::size_t r = pr;
    std::uint32_t c = pc;
    for (;;) {
      Int p = *find_entry(rows[r], c);
      // clear column c in the other live rows
      std::vector<std::uint32_t> cr = std::move(col_rows[c]);
      std::sort(cr.begin(), cr.end());
      cr.erase(std::unique(cr.begin(), cr.end()), cr.end());
      std::vector<std::uint32_t> keep;
      std::size_t rem_row = m;
      for (auto i : cr) {
        if (!alive[i]) continue;
        const Int* v = find_entry(rows[i], c);
        if (!v) continue;
        keep.push_back(i);
        if (i == r) continue;
        Int q = round_div(*v, p);
        if (q != 0) {
          sparse_axpy(rows[i], q, rows[r], scratch);
          for (auto& e : rows[r]) col_rows[e.first].push_back(i);
        }
        const Int* nv = find_entry(rows[i], c);
        if (nv && (rem_row == m || cmpabs(*nv, *find_entry(rows[rem_row], c)) < 0)) rem_row = i;
      }
      col_rows[c] = std::move(keep);
      if (rem_row != m) {
        r = rem_row;
        continue;
      }
      bool divisible = true;
      for (auto& e : rows[r])
        if (e.first != c && !mpz_divisible_p(e.second.get_mpz_t(), p.get_mpz_t())) {
          divisible = false;
          break;
        }
      if (divisible) {
        pivots.push_back(abs(p));
        alive[r] = 0;
        break;
      }
      // column operations against column c only touch row r
      Row reduced;
      std::uint32_t nc = c;
      const Int* nbest = nullptr;
      for (auto& e : rows[r]) {
        if (e.first == c) {
          reduced.push_back(e);
          continue;
        }
        Int v = e.second - round_div(e.second, p) * p;
        if (v != 0) reduced.emplace_back(e.first, v);
      }
      rows[r] = std::move(reduced);
      for (auto& e : rows[r])
        if (e.first != c && (!nbest || cmpabs(e.second, *nbest) < 0)) {
          nbest = &e.second;
          nc = e.first;
        }
      c = nc;
    }
  }
  return pivots;
}

inline std::vector<std::uint64_t> small_prime_factors(Int n) {
  std::vector<std::uint64_t> out;
  n = abs(n);
  for (std::uint64_t p = 2; n > 1; ++p) {
    if (Int(p) * p > n) {
      if (!n.fits_ulong_p() || n.get_ui() >= (std::uint64_t(1) << 62))
        throw Error(Errc::invalid_argument, "invariant factor too large to verify modularly");
      out.push_back(n.get_ui());
      break;
    }
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      out.push_back(p);
      while (mpz_divisible_ui_p(n.get_mpz_t(), p)) n /= p;
    }
  }
  return out;
}

}  // namespace detail

/* Matrices with more rows or columns than this also go through the modular
   verification pass. */
inline constexpr std::size_t kModularCheckThreshold = 500;

struct InvariantFactors {
  std::vector<Int> nonzero;  // divisibility chain, including ones
  std::size_t rank() const { return nonzero.size(); }
  std::vector<Int> nontrivial() const {
    std::vector<Int> out;
    for (const auto& d : nonzero)
      if (d != 1) out.push_back(d);
    return out;
  }
};

/* Independent check of an elimination result: rank modulo a prime q must be
   the number of invariant factors q does not divide. Ranks mod the different
   primes are computed concurrently and merged in prime order. */
inline void verify_invariants_modular(const IntMatrix& a, const InvariantFactors& f) {
  std::vector<std::uint64_t> primes;
  for (const auto& d : f.nonzero)
    for (auto p : detail::small_prime_factors(d))
      if (std::find(primes.begin(), primes.end(), p) == primes.end()) primes.push_back(p);
  std::sort(primes.begin(), primes.end());
  const auto& big = modp::large_primes();
  auto rows = a.sparse_rows();
  std::vector<std::future<std::size_t>> jobs;
  std::vector<std::uint64_t> all = {big[0], big[1]};
  all.insert(all.end(), primes.begin(), primes.end());
  for (auto p : all)
    jobs.push_back(std::async(std::launch::async, [&rows, &a, p] { return modp::rank(rows, a.cols(), p); }));
  std::vector<std::size_t> ranks;
  for (auto& j : jobs) ranks.push_back(j.get());
  if (std::max(ranks[0], ranks[1]) != f.rank())
    throw Error(Errc::oracle_mismatch, "rank over a large prime disagrees with the elimination");
  for (std::size_t k = 0; k < primes.size(); ++k) {
    std::size_t expect = 0;
    for (const auto& d : f.nonzero)
      if (!mpz_divisible_ui_p(d.get_mpz_t(), primes[k])) ++expect;
    if (ranks[k + 2] != expect)
      throw Error(Errc::oracle_mismatch, "rank mod " + std::to_string(primes[k]) + " disagrees with the elimination");
  }
}

/* Invariant factors without transforms, by sparse elimination with
   smallest-pivot selection. */
inline InvariantFactors invariant_factors(const IntMatrix& a, bool force_verify = false) {
  auto piv = detail::sparse_elimination_pivots(a);
  std::sort(piv.begin(), piv.end());
  std::vector<Int> nontriv;
  std::size_t ones = 0;
  for (auto& p : piv)
    if (p == 1)
      ++ones;
    else
      nontriv.push_back(p);
  AbGroup g = AbGroup::from_diagonal(nontriv);
  InvariantFactors out;
  out.nonzero.assign(ones + (piv.size() - ones - g.invariants().size()), Int(1));
  for (const auto& d : g.invariants()) out.nonzero.push_back(d);
  if (force_verify || std::max(a.rows(), a.cols()) > kModularCheckThreshold) verify_invariants_modular(a, out);
  return out;
}

}  // namespace ordist
