#pragma once

#include <future>
#include <optional>
#include <vector>

#include "ordist/distribution/presentation.hpp"
#include "ordist/zlinalg/lattice.hpp"

namespace ordist {

/* F_m as an integer matrix: rows indexed by G_m, one column per generator of
   Delta_m, holding scale * lift(sigma) alpha(n, m). */
struct IwasawaMatrix {
  IntMatrix F;
  Int scale = 1;
};

inline IwasawaMatrix iwasawa_matrix(const DeltaPresentation& P) {
  const auto& T = P.tower();
  const Level top = T.top_level();
  const auto& G = T.top().elements();
  std::vector<GroupRingElt> cols;
  cols.reserve(P.num_generators());
  for (const auto& n : P.levels()) {
    auto a = alpha(T, n, top);
    const auto& table = T.transition(top, n);
    std::vector<Elt> lift(T.group(n).order(), 0);
    std::vector<char> seen(lift.size(), 0);
    for (std::size_t t = 0; t < table.size(); ++t)
      if (!seen[table[t]]) {
        seen[table[t]] = 1;
        lift[table[t]] = static_cast<Elt>(t);
      }
    for (Elt l : lift) cols.push_back(a.translate(l));
  }
  IwasawaMatrix out;
  for (const auto& c : cols) mpz_lcm(out.scale.get_mpz_t(), out.scale.get_mpz_t(), c.common_denominator().get_mpz_t());
  IntMatrix Ft(0, G.order(), IntMatrix::Storage::sparse);
  for (const auto& c : cols) {
    auto v = c.scaled(out.scale);
    SparseVec row;
    for (std::size_t k = 0; k < v.size(); ++k)
      if (v[k] != 0) row.emplace_back(k, v[k]);
    Ft.append_row(std::move(row));
  }
  out.F = Ft.transposed();
  return out;
}

/* Rows of A whose image under F is nonzero. */
inline std::vector<std::size_t> rows_outside_kernel(const IntMatrix& F, const IntMatrix& A) {
  auto Fcols = F.transposed().sparse_rows();
  std::vector<std::size_t> bad;
  IntVec acc(F.rows());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    std::fill(acc.begin(), acc.end(), Int(0));
    for (const auto& [c, v] : A.row_entries(i))
      for (const auto& [r, x] : Fcols[c]) acc[r] += v * x;
    for (const auto& x : acc)
      if (x != 0) {
        bad.push_back(i);
        break;
      }
  }
  return bad;
}

struct TorsionOracles {
  AbGroup by_relations;  // torsion of Z^N / U(m)
  AbGroup by_kernel;     // ker(F) / U(m)
  std::size_t rank = 0;  // free rank of Z^N / U(m)
};

/* Both oracles for Tor(Z^gens / U), computed concurrently: the relation
   cokernel, and ker(F) / U. */
inline TorsionOracles torsion_oracles(const IntMatrix& relations, std::size_t gens, const IntMatrix& F) {
  auto a = std::async(std::launch::async, [&] { return cokernel(relations, gens); });
  auto b = std::async(std::launch::async, [&] { return subquotient_torsion(rational_kernel(F), relations); });
  auto full = a.get();
  return {full.torsion(), b.get(), full.rank()};
}

inline TorsionOracles torsion_oracles(const DeltaPresentation& P, const IwasawaMatrix& F) {
  return torsion_oracles(P.relations(), P.num_generators(), F.F);
}

inline void check_oracles(const TorsionOracles& o) {
  if (o.by_kernel.rank() != 0)
    throw Error(Errc::oracle_mismatch, "ker(F)/U(m) has free rank " + std::to_string(o.by_kernel.rank()));
  if (!(o.by_relations == o.by_kernel))
    throw Error(Errc::oracle_mismatch, "relation cokernel torsion " + o.by_relations.to_string() + " but ker(F)/U(m) is " +
                                           o.by_kernel.to_string());
}

inline AbGroup level_torsion(const IntMatrix& relations, std::size_t gens, const IntMatrix& F) {
  auto o = torsion_oracles(relations, gens, F);
  check_oracles(o);
  return o.by_relations;
}

inline AbGroup level_torsion(const DeltaPresentation& P, const IwasawaMatrix& F) {
  return level_torsion(P.relations(), P.num_generators(), F.F);
}

inline AbGroup level_torsion(const DeltaPresentation& P) { return level_torsion(P, iwasawa_matrix(P)); }

/* w_K^(a h), a = 2^(|m|-1) - |m|. For m = (1) the level group is free and the
   bound is 1. */
inline Int borne(const QuadField& K, const Modulus& m) {
  if (gcd(m.norm(), Int(K.w())) != 1) throw Error(Errc::not_coprime_to_w, m.spec() + " is not prime to w_K");
  long s = static_cast<long>(m.size());
  long a = s == 0 ? 0 : (1L << (s - 1)) - s;
  Int out;
  mpz_pow_ui(out.get_mpz_t(), Int(K.w()).get_mpz_t(), static_cast<unsigned long>(a * K.h()));
  return out;
}

struct TorsionBound {
  std::vector<std::pair<Level, Int>> z;  // z_u for u in Sigma, in divisor order
  Int product_bound = 1;
  std::optional<Int> borne;  // absent when m is not prime to w_K
};

inline TorsionBound torsion_bound(const DeltaPresentation& P) {
  TorsionBound out;
  for (auto& u : sigma_levels(P.tower())) {
    Int z = trace_ideal_quotient(P.tower(), u).z;
    out.z.emplace_back(u, z);
    out.product_bound *= z;
  }
  if (gcd(P.modulus().norm(), Int(P.field().w())) == 1) out.borne = borne(P.field(), P.modulus());
  return out;
}

/* Checks a computed torsion group against both bounds. */
inline void check_torsion_bounds(const TorsionBound& b, const AbGroup& torsion) {
  Int exp = torsion.is_trivial() ? Int(1) : torsion.exponent();
  if (!mpz_divisible_p(b.product_bound.get_mpz_t(), exp.get_mpz_t()))
    throw Error(Errc::oracle_mismatch, "torsion exponent " + exp.get_str() + " does not divide " + b.product_bound.get_str());
  Int ord = *torsion.order();
  if (b.borne && !mpz_divisible_p(b.borne->get_mpz_t(), ord.get_mpz_t()))
    throw Error(Errc::oracle_mismatch, "torsion order " + ord.get_str() + " does not divide " + b.borne->get_str());
}

inline TorsionBound torsion_bound(const DeltaPresentation& P, const AbGroup& torsion) {
  auto b = torsion_bound(P);
  check_torsion_bounds(b, torsion);
  return b;
}

}  // namespace ordist
