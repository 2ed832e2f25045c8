#pragma once

#include <vector>

#include "ordist/zlinalg/lattice.hpp"
#include "ordist/zlinalg/presentation.hpp"

namespace ordist {

/* A finitely generated abelian group with an automorphism t of finite order,
   in invariant-factor coordinates. Row convention: x -> x * matrix. */
struct CyclicModule {
  AbGroup module;
  AbHom t_action;
  long order = 1;

  std::size_t rank() const { return module.invariants().size(); }

  /* Z^gens / rowspan(relations), t acting on Z^gens by `action`. */
  static CyclicModule from_presentation(std::size_t gens, const IntMatrix& relations, const IntMatrix& action, long order) {
    if (action.rows() != gens || action.cols() != gens) throw Error(Errc::invalid_argument, "action is not square");
    Lattice L(relations);
    for (std::size_t i = 0; i < relations.rows(); ++i)
      if (!L.contains(action.left_apply(relations.row(i))))
        throw Error(Errc::invalid_argument, "action does not preserve the relations");
    auto pg = PresentedGroup::from_relations(gens, relations);
    CyclicModule M;
    M.module = pg.group;
    M.order = order;
    IntMatrix B = pg.from_canonical * action.as(IntMatrix::Storage::dense) * pg.to_canonical;
    M.t_action = {M.module, M.module, reduce_columns(B, M.module)};
    return M;
  }

  static CyclicModule free(const IntMatrix& action, long order) {
    if (action.rows() != action.cols()) throw Error(Errc::invalid_argument, "action is not square");
    CyclicModule M;
    M.module = AbGroup::free(action.rows());
    M.order = order;
    M.t_action = {M.module, M.module, action};
    return M;
  }

  /* x * t^k for every basis row x, as sparse rows. */
  std::vector<SparseVec> power_rows(long k) const {
    std::vector<SparseVec> out;
    for (std::size_t i = 0; i < rank(); ++i) {
      IntVec v(rank());
      v[i] = 1;
      for (long s = 0; s < k; ++s) v = t_action.apply(v);
      out.push_back(to_sparse(v));
    }
    return out;
  }

  bool is_valid() const {
    if (!t_action.is_well_defined()) return false;
    for (std::size_t i = 0; i < rank(); ++i) {
      IntVec v(rank()), e(rank());
      v[i] = e[i] = 1;
      t_action.reduce(e);
      for (long s = 0; s < order; ++s) v = t_action.apply(v);
      if (v != e) return false;
    }
    return true;
  }

  static SparseVec to_sparse(const IntVec& v) {
    SparseVec s;
    for (std::size_t j = 0; j < v.size(); ++j)
      if (v[j] != 0) s.emplace_back(j, v[j]);
    return s;
  }

 private:
  static IntMatrix reduce_columns(IntMatrix B, const AbGroup& A) {
    const auto& d = A.invariants();
    for (std::size_t i = 0; i < B.rows(); ++i)
      for (std::size_t j = 0; j < B.cols(); ++j)
        if (d[j] != 0) {
          Int x = B.at(i, j);
          mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), d[j].get_mpz_t());
          B.set(i, j, x);
        }
    return B;
  }
};

enum class Parity { even, odd };

namespace detail {

/* ker(phi) / image(psi) on M, for endomorphisms with phi psi = 0, given by
   their rows in the coordinates of M. */
inline AbGroup kernel_mod_image(const CyclicModule& M, const std::vector<SparseVec>& phi, const std::vector<SparseVec>& psi) {
  const std::size_t t = M.rank();
  if (t == 0) return AbGroup();
  const auto& d = M.module.invariants();
  std::vector<SparseVec> L;
  for (std::size_t j = 0; j < t; ++j)
    if (d[j] != 0) L.push_back({{j, d[j]}});
  // x with x phi in L: the left kernel of [phi; L], cut to the first t coordinates
  IntMatrix S(0, t, IntMatrix::Storage::sparse);
  for (const auto& r : phi) S.append_row(r);
  for (const auto& r : L) S.append_row(r);
  IntMatrix lk = rational_kernel(S.transposed());
  IntMatrix gens(0, t, IntMatrix::Storage::dense);
  for (std::size_t i = 0; i < lk.rows(); ++i) {
    IntVec x(t);
    for (std::size_t j = 0; j < t; ++j) x[j] = lk.at(i, j);
    gens.append_row(x);
  }
  for (const auto& r : L) gens.append_row(r);
  if (gens.rows() == 0) return AbGroup();
  IntMatrix K = Lattice(gens).basis();
  if (K.rows() == 0) return AbGroup();
  IntMatrix U(0, t, IntMatrix::Storage::sparse);
  for (const auto& r : psi) U.append_row(r);
  for (const auto& r : L) U.append_row(r);
  auto H = subquotient_torsion(K, U);
  if (H.rank() != 0) throw Error(Errc::oracle_mismatch, "Tate cohomology of a finite cyclic group came out infinite");
  return H;
}

/* v * A for sparse v and sparse rows of A. */
inline SparseVec sparse_times(const SparseVec& v, const std::vector<SparseVec>& A, IntVec& acc, std::vector<char>& hit) {
  std::vector<std::size_t> cols;
  for (const auto& [i, x] : v)
    for (const auto& [c, y] : A[i]) {
      if (!hit[c]) {
        hit[c] = 1;
        cols.push_back(c);
      }
      acc[c] += x * y;
    }
  std::sort(cols.begin(), cols.end());
  SparseVec out;
  for (std::size_t c : cols) {
    if (acc[c] != 0) out.emplace_back(c, acc[c]);
    acc[c] = 0;
    hit[c] = 0;
  }
  return out;
}

inline SparseVec sparse_add(const SparseVec& a, const SparseVec& b) {
  SparseVec out;
  std::size_t x = 0, y = 0;
  while (x < a.size() || y < b.size()) {
    if (y == b.size() || (x < a.size() && a[x].first < b[y].first)) {
      out.push_back(a[x++]);
    } else if (x == a.size() || b[y].first < a[x].first) {
      out.push_back(b[y++]);
    } else {
      Int s = a[x].second + b[y].second;
      if (s != 0) out.emplace_back(a[x].first, s);
      ++x;
      ++y;
    }
  }
  return out;
}

/* On Z^n, with both Tate groups killed by #C, the group ker(phi) / im(psi) is
   the torsion of Z^n / im(psi), read off prime by prime from elementary
   divisors modulo p^(v_p(#C) + 1). Pivot-free columns of psi and phi must
   number n in total, which also rules out torsion of order p^(v_p(#C) + 1). */
inline AbGroup free_tate(std::size_t n, long order, const std::vector<SparseVec>& psi, const std::vector<SparseVec>& phi) {
  if (n == 0 || order == 1) return AbGroup();
  std::vector<Int> diag;
  long rest = order;
  for (long p = 2; rest > 1; ++p) {
    if (rest % p) continue;
    unsigned k = 1;
    while (rest % p == 0) {
      rest /= p;
      ++k;
    }
    auto im = modp::local_divisors(psi, n, static_cast<modp::u64>(p), k);
    auto other = modp::local_divisors(phi, n, static_cast<modp::u64>(p), k);
    if (im.zeros + other.zeros != n)
      throw Error(Errc::oracle_mismatch, "Tate cohomology of a finite cyclic group came out infinite");
    Int pa = 1;
    for (unsigned a = 1; a < k; ++a) {
      pa *= p;
      for (std::size_t t = 0; t < im.count[a]; ++t) diag.push_back(pa);
    }
  }
  return AbGroup::from_diagonal(diag);
}

/* Rows of t - 1 and of the norm for a Z-free module. */
inline std::pair<std::vector<SparseVec>, std::vector<SparseVec>> free_rows(const CyclicModule& M) {
  const std::size_t n = M.rank();
  auto A = M.t_action.matrix.sparse_rows();
  IntVec acc(n);
  std::vector<char> hit(n, 0);
  std::vector<SparseVec> t1, N;
  for (std::size_t i = 0; i < n; ++i) {
    t1.push_back(sparse_add(A[i], SparseVec{{i, Int(-1)}}));
    SparseVec v{{i, Int(1)}}, sum;
    for (long s = 0; s < M.order; ++s) {
      sum = sparse_add(sum, v);
      v = sparse_times(v, A, acc, hit);
    }
    N.push_back(std::move(sum));
  }
  return {t1, N};
}

inline std::vector<SparseVec> minus_identity(std::vector<SparseVec> rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& r = rows[i];
    auto it = std::lower_bound(r.begin(), r.end(), i, [](const SparseEntry& e, std::size_t c) { return e.first < c; });
    if (it != r.end() && it->first == i) {
      it->second -= 1;
      if (it->second == 0) r.erase(it);
    } else {
      r.insert(it, {i, Int(-1)});
    }
  }
  return rows;
}

inline std::vector<SparseVec> norm_rows(const CyclicModule& M) {
  const std::size_t t = M.rank();
  std::vector<SparseVec> out;
  for (std::size_t i = 0; i < t; ++i) {
    IntVec v(t), acc(t);
    v[i] = 1;
    for (long s = 0; s < M.order; ++s) {
      for (std::size_t j = 0; j < t; ++j) acc[j] += v[j];
      v = M.t_action.apply(v);
    }
    M.t_action.reduce(acc);
    out.push_back(CyclicModule::to_sparse(acc));
  }
  return out;
}

}  // namespace detail

/* Tate cohomology of C = <t>, computed as ker/im. Even degrees
   ker(t - 1) / N M, odd degrees ker(N) / (t - 1) M, with N = sum of the t^i. */
inline AbGroup tate_cyclic_by_kernels(const CyclicModule& M, Parity parity) {
  auto t1 = detail::minus_identity(M.power_rows(1));
  for (auto& r : t1) {
    IntVec v(M.rank());
    for (auto& [j, x] : r) v[j] = x;
    M.t_action.reduce(v);
    r = CyclicModule::to_sparse(v);
  }
  auto N = detail::norm_rows(M);
  return parity == Parity::even ? detail::kernel_mod_image(M, t1, N) : detail::kernel_mod_image(M, N, t1);
}

/* Same groups; Z-free modules go through local elimination. */
inline AbGroup tate_cyclic(const CyclicModule& M, Parity parity) {
  if (M.module.rank() != M.rank()) return tate_cyclic_by_kernels(M, parity);
  auto [t1, N] = detail::free_rows(M);
  return parity == Parity::even ? detail::free_tate(M.rank(), M.order, N, t1) : detail::free_tate(M.rank(), M.order, t1, N);
}

}  // namespace ordist
