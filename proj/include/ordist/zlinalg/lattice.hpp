#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

#include "ordist/zlinalg/ab_group.hpp"
#include "ordist/zlinalg/modular.hpp"
#include "ordist/zlinalg/normal_form.hpp"

namespace ordist {

/* Z^ambient_rank modulo the row span of A. */
inline AbGroup cokernel(const IntMatrix& a, std::size_t ambient_rank) {
  if (a.cols() != ambient_rank) throw Error(Errc::invalid_argument, "cokernel: column count differs from ambient rank");
  auto f = invariant_factors(a);
  std::vector<Int> diag = f.nonzero;
  diag.resize(ambient_rank, Int(0));
  return AbGroup::from_diagonal(diag);
}

/* A lattice kept as the nonzero rows of its HNF. */
class Lattice {
 public:
  Lattice() = default;
  explicit Lattice(const IntMatrix& generators) : dim_(generators.cols()) {
    auto h = hnf(generators, false);
    pivots_ = h.pivots;
    std::vector<std::size_t> idx(pivots_.size());
    std::iota(idx.begin(), idx.end(), 0);
    basis_ = h.H.select_rows(idx);
  }

  const IntMatrix& basis() const { return basis_; }
  std::size_t rank() const { return pivots_.size(); }
  std::size_t dim() const { return dim_; }

  /* Coordinates of v with respect to the HNF basis, if v lies in the lattice. */
  std::optional<IntVec> coordinates(IntVec v) const {
    if (v.size() != dim_) throw Error(Errc::invalid_argument, "dimension mismatch");
    IntVec c(pivots_.size());
    for (std::size_t k = 0; k < pivots_.size(); ++k) {
      const Int& pv = basis_.at(k, pivots_[k]);
      const Int& x = v[pivots_[k]];
      if (x == 0) continue;
      if (!mpz_divisible_p(x.get_mpz_t(), pv.get_mpz_t())) return std::nullopt;
      c[k] = x / pv;
      for (const auto& [j, b] : basis_.row_entries(k)) v[j] -= c[k] * b;
    }
    for (const auto& x : v)
      if (x != 0) return std::nullopt;
    return c;
  }

  bool contains(const IntVec& v) const { return coordinates(v).has_value(); }

  friend bool operator==(const Lattice& a, const Lattice& b) { return a.dim_ == b.dim_ && a.basis_ == b.basis_; }

 private:
  std::size_t dim_ = 0;
  IntMatrix basis_;
  std::vector<std::size_t> pivots_;
};

/* Basis of {x : x A = 0}, for small dense inputs. */
inline IntMatrix left_kernel(const IntMatrix& a) {
  auto h = hnf(a, true);
  std::vector<std::size_t> idx;
  for (std::size_t i = h.rank(); i < a.rows(); ++i) idx.push_back(i);
  return h.U.select_rows(idx);
}

namespace detail {

inline void normalize_sign(IntVec& v) {
  for (const auto& x : v)
    if (x != 0) {
      if (x < 0)
        for (auto& y : v) y = -y;
      return;
    }
}

inline void make_primitive(IntVec& v) {
  Int g = 0;
  for (const auto& x : v) g = gcd(g, x);
  if (g > 1)
    for (auto& x : v) x /= g;
}

/* A * w == 0 exactly. Uses 128-bit accumulation when the sizes allow it. */
inline bool annihilates(const std::vector<SparseVec>& arows, const IntVec& w) {
  Int amax = 0, wmax = 0;
  for (const auto& r : arows)
    for (const auto& e : r)
      if (cmpabs(e.second, amax) > 0) amax = abs(e.second);
  for (const auto& x : w)
    if (cmpabs(x, wmax) > 0) wmax = abs(x);
  std::size_t width = 1;
  for (const auto& r : arows) width = std::max(width, r.size());
  Int bound = amax * wmax * Int(static_cast<unsigned long>(width));
  if (bound < (Int(1) << 120) && amax < (Int(1) << 62) && wmax < (Int(1) << 62)) {
    std::vector<__int128> wi(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) wi[i] = w[i].get_si();
    for (const auto& r : arows) {
      __int128 acc = 0;
      for (const auto& [c, v] : r) acc += static_cast<__int128>(v.get_si()) * wi[c];
      if (acc != 0) return false;
    }
    return true;
  }
  for (const auto& r : arows) {
    Int acc = 0;
    for (const auto& [c, v] : r) acc += v * w[c];
    if (acc != 0) return false;
  }
  return true;
}

/* Enlarge the lattice spanned by the rows of b until it is saturated at p. */
inline void saturate_at(std::vector<IntVec>& b, std::uint64_t p) {
  const std::size_t k = b.size();
  if (k == 0) return;
  const std::size_t n = b[0].size();
  for (;;) {
    std::vector<std::vector<std::uint64_t>> m(k, std::vector<std::uint64_t>(n));
    std::vector<std::vector<std::uint64_t>> t(k, std::vector<std::uint64_t>(k, 0));
    for (std::size_t i = 0; i < k; ++i) {
      t[i][i] = 1;
      for (std::size_t j = 0; j < n; ++j) m[i][j] = modp::reduce(b[i][j], p);
    }
    std::vector<char> is_pivot_row(k, 0);
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t piv = k;
      for (std::size_t i = 0; i < k; ++i)
        if (!is_pivot_row[i] && m[i][c]) {
          piv = i;
          break;
        }
      if (piv == k) continue;
      is_pivot_row[piv] = 1;
      std::uint64_t inv = modp::invmod(m[piv][c], p);
      for (std::size_t i = 0; i < k; ++i) {
        if (i == piv || is_pivot_row[i] || m[i][c] == 0) continue;
        std::uint64_t f = modp::mulmod(m[i][c], inv, p);
        for (std::size_t j = c; j < n; ++j)
          if (m[piv][j]) m[i][j] = modp::submod(m[i][j], modp::mulmod(f, m[piv][j], p), p);
        for (std::size_t j = 0; j < k; ++j)
          if (t[piv][j]) t[i][j] = modp::submod(t[i][j], modp::mulmod(f, t[piv][j], p), p);
      }
    }
    bool changed = false;
    std::vector<IntVec> nb = b;
    for (std::size_t i = 0; i < k; ++i) {
      if (is_pivot_row[i]) continue;
      // row i is zero mod p; t[i] has a 1 in position i and touches pivot rows only
      IntVec acc(n);
      for (std::size_t j = 0; j < k; ++j) {
        if (!t[i][j]) continue;
        Int coef(static_cast<unsigned long>(t[i][j]));
        for (std::size_t c = 0; c < n; ++c)
          if (b[j][c] != 0) acc[c] += coef * b[j][c];
      }
      for (auto& x : acc) {
        if (!mpz_divisible_ui_p(x.get_mpz_t(), p)) throw Error(Errc::oracle_mismatch, "saturation step not exact");
        x /= p;
      }
      nb[i] = std::move(acc);
      changed = true;
    }
    b = std::move(nb);
    if (!changed) return;
  }
}

}  // namespace detail

/* Saturated integer basis of the kernel {v : A v = 0}. Computed from reduced
   echelon forms modulo large primes, rational reconstruction, an exact
   check, and saturation at the primes dividing the denominators. */
inline IntMatrix rational_kernel(const IntMatrix& a) {
  const std::size_t n = a.cols();
  const auto& primes = modp::large_primes();
  auto arows = a.sparse_rows();

  std::vector<std::size_t> pivots;
  std::vector<std::vector<Int>> residues;  // per pivot row, values at free columns
  Int modulus = 1;
  std::vector<std::size_t> free_cols;

  for (std::size_t pi = 0; pi < primes.size(); ++pi) {
    std::uint64_t p = primes[pi];
    auto rr = modp::rref(a, p);
    if (pi == 0 || rr.pivots.size() > pivots.size()) {
      pivots = rr.pivots;
      modulus = 1;
      free_cols.clear();
      std::vector<char> is_piv(n, 0);
      for (auto c : pivots) is_piv[c] = 1;
      for (std::size_t c = 0; c < n; ++c)
        if (!is_piv[c]) free_cols.push_back(c);
      residues.assign(pivots.size(), std::vector<Int>(free_cols.size(), Int(0)));
    } else if (rr.pivots != pivots) {
      continue;
    }
    // CRT merge
    Int pm(static_cast<unsigned long>(p));
    Int inv;
    mpz_invert(inv.get_mpz_t(), Int(modulus % pm).get_mpz_t(), pm.get_mpz_t());
    for (std::size_t i = 0; i < pivots.size(); ++i)
      for (std::size_t f = 0; f < free_cols.size(); ++f) {
        Int r(static_cast<unsigned long>(rr.rows[i][free_cols[f]]));
        Int& x = residues[i][f];
        Int delta = ((r - x) % pm) * inv % pm;
        if (delta < 0) delta += pm;
        x += modulus * delta;
      }
    modulus *= pm;

    // reconstruct kernel vectors v_f = e_f - sum_i R[i][f] e_{pivot_i}
    std::vector<IntVec> basis;
    bool ok = true;
    for (std::size_t f = 0; f < free_cols.size() && ok; ++f) {
      std::vector<Rat> v(n, Rat(0));
      v[free_cols[f]] = 1;
      for (std::size_t i = 0; i < pivots.size(); ++i) {
        auto q = modp::rational_reconstruct(residues[i][f], modulus);
        if (!q) {
          ok = false;
          break;
        }
        v[pivots[i]] = -*q;
      }
      if (!ok) break;
      Int den = 1;
      for (const auto& x : v) den = lcm(den, x.get_den());
      IntVec w(n);
      for (std::size_t c = 0; c < n; ++c) w[c] = v[c].get_num() * (den / v[c].get_den());
      if (!detail::annihilates(arows, w)) {
        ok = false;
        break;
      }
      basis.push_back(std::move(w));
    }
    if (!ok) continue;

    // saturation: index of the lattice divides the product of denominators
    std::vector<std::uint64_t> sat_primes;
    {
      Int d = 1;
      for (std::size_t f = 0; f < basis.size(); ++f) d = lcm(d, abs(basis[f][free_cols[f]]));
      for (auto q : detail::small_prime_factors(d)) sat_primes.push_back(q);
    }
    for (auto q : sat_primes) detail::saturate_at(basis, q);
    for (auto& w : basis) {
      detail::make_primitive(w);
      detail::normalize_sign(w);
    }
    return IntMatrix::from_rows(basis, n);
  }
  throw Error(Errc::oracle_mismatch, "rational_kernel: reconstruction did not stabilize");
}

namespace detail {

/* Greedily pick rank-many columns independent modulo a large prime,
   preferring sparse ones. */
inline std::vector<std::size_t> independent_columns(const IntMatrix& k) {
  const std::size_t rows = k.rows(), cols = k.cols();
  const std::uint64_t p = modp::large_primes()[3];
  std::vector<std::vector<std::uint64_t>> colv(cols, std::vector<std::uint64_t>(rows, 0));
  std::vector<std::size_t> nnz(cols, 0);
  for (std::size_t i = 0; i < rows; ++i)
    for (const auto& [c, v] : k.row_entries(i)) {
      colv[c][i] = modp::reduce(v, p);
      ++nnz[c];
    }
  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return nnz[a] < nnz[b]; });
  std::vector<std::vector<std::uint64_t>> basis;  // reduced, pivot at piv_idx
  std::vector<std::size_t> piv_idx, chosen;
  for (auto c : order) {
    if (chosen.size() == rows) break;
    auto v = colv[c];
    for (std::size_t b = 0; b < basis.size(); ++b) {
      std::uint64_t x = v[piv_idx[b]];
      if (!x) continue;
      for (std::size_t i = 0; i < rows; ++i)
        if (basis[b][i]) v[i] = modp::submod(v[i], modp::mulmod(x, basis[b][i], p), p);
    }
    std::size_t pi = rows;
    for (std::size_t i = 0; i < rows; ++i)
      if (v[i]) {
        pi = i;
        break;
      }
    if (pi == rows) continue;
    std::uint64_t inv = modp::invmod(v[pi], p);
    for (auto& x : v) x = modp::mulmod(x, inv, p);
    basis.push_back(std::move(v));
    piv_idx.push_back(pi);
    chosen.push_back(c);
  }
  if (chosen.size() != rows) throw Error(Errc::invalid_argument, "lattice basis rows are dependent");
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace detail

/* K/U for lattices U inside K, K given by a basis. Finite part and free rank
   are both reported. */
inline AbGroup subquotient_torsion(const IntMatrix& k, const IntMatrix& u) {
  if (k.cols() != u.cols()) throw Error(Errc::invalid_argument, "subquotient: ambient dimensions differ");
  const std::size_t r = k.rows();
  if (r == 0) {
    if (!u.is_zero()) throw Error(Errc::not_sub_lattice, "U is not contained in the zero lattice");
    return AbGroup();
  }
  auto cols = detail::independent_columns(k);
  IntMatrix ks = k.select_cols(cols);
  auto h = hnf(ks, true);  // H = V * K_S, square upper triangular
  IntMatrix basis = h.U * k;
  auto brows = basis.sparse_rows();

  IntMatrix coords(0, r, IntMatrix::Storage::sparse);
  for (std::size_t i = 0; i < u.rows(); ++i) {
    IntVec uv = u.row(i);
    IntVec rhs(r);
    for (std::size_t t = 0; t < r; ++t) rhs[t] = uv[cols[t]];
    IntVec c(r);
    for (std::size_t t = 0; t < r; ++t) {
      Int x = rhs[t];
      for (std::size_t s = 0; s < t; ++s)
        if (c[s] != 0) x -= c[s] * h.H.at(s, t);
      const Int pv = h.H.at(t, t);
      if (!mpz_divisible_p(x.get_mpz_t(), pv.get_mpz_t()))
        throw Error(Errc::not_sub_lattice, "row " + std::to_string(i) + " of U is not in K");
      c[t] = x / pv;
    }
    // the selected columns fix c; the remaining ones must agree
    IntVec back(u.cols());
    for (std::size_t t = 0; t < r; ++t)
      if (c[t] != 0)
        for (const auto& [j, v] : brows[t]) back[j] += c[t] * v;
    if (back != uv) throw Error(Errc::not_sub_lattice, "row " + std::to_string(i) + " of U is not in K");
    coords.append_row(c);
  }
  return cokernel(coords, r);
}

}  // namespace ordist
