#pragma once

#include <cstdint>
#include <future>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ordist/cohomology/cyclic.hpp"

namespace ordist {

/* Bit i set means frame position i (0-based, the last position is m - 1). */
using IndexSet = std::uint32_t;

inline bool contains_index(IndexSet s, std::size_t i) { return (s >> i) & 1U; }
inline IndexSet full_index_set(std::size_t m) { return m >= 32 ? ~IndexSet(0) : (IndexSet(1) << m) - 1; }

inline std::string index_set_string(IndexSet s, std::size_t m) {
  std::string out = "{";
  for (std::size_t i = 0; i < m; ++i)
    if (contains_index(s, i)) out += (out.size() > 1 ? "," : "") + std::to_string(i + 1);
  return out + "}";
}

/* G_ell = <tau_1> x ... x <tau_m> with o(tau_i) = g_i for i < m and
   o(tau_m) = g_m / ell^r, and j = prod tau_i^(g_i / g_m). With m = 1 there is
   no complement and j = tau_1 generates G_ell, of order g_1. */
class SylowFrameSynthetic {
 public:
  SylowFrameSynthetic(long ell, std::vector<long> g, int r) : ell_(ell), g_(std::move(g)), r_(r) {
    if (ell < 2 || mpz_probab_prime_p(Int(ell).get_mpz_t(), 30) == 0) throw Error(Errc::not_prime, std::to_string(ell) + " is not prime");
    if (g_.empty()) throw Error(Errc::invalid_argument, "empty frame");
    if (g_.size() > 16) throw Error(Errc::invalid_argument, "frame too long");
    if (r < 0) throw Error(Errc::invalid_argument, "negative r");
    for (long x : g_) {
      if (x < 1 || !is_power_of(x, ell)) throw Error(Errc::invalid_argument, "g_i must be powers of ell");
      if (x < g_.back()) throw Error(Errc::invalid_argument, "g_m must be the smallest entry");
    }
    long lr = 1;
    for (int k = 0; k < r; ++k) lr *= ell;
    const std::size_t m = g_.size();
    if (m == 1) {
      orders_ = {g_[0]};
    } else {
      if (g_.back() % lr != 0) throw Error(Errc::invalid_argument, "ell^r does not divide g_m");
      orders_ = g_;
      orders_.back() = g_.back() / lr;
    }
    std::size_t n = 1;
    for (long o : orders_) {
      n *= static_cast<std::size_t>(o);
      if (n > (1U << 22)) throw Error(Errc::modulus_too_large, "frame group too large");
    }
    size_ = n;
    j_exponents_.assign(m, 1);
    for (std::size_t i = 0; i + 1 < m; ++i) j_exponents_[i] = g_[i] / g_.back();
    if (element_order(j()) != g_.back()) throw Error(Errc::oracle_mismatch, "order of j is not g_m");
  }

  long ell() const { return ell_; }
  int r() const { return r_; }
  std::size_t m() const { return g_.size(); }
  const std::vector<long>& g() const { return g_; }
  const std::vector<long>& orders() const { return orders_; }  // o(tau_i)
  std::size_t order() const { return size_; }

  Elt encode(const std::vector<long>& a) const {
    std::size_t idx = 0;
    for (std::size_t k = m(); k-- > 0;) idx = idx * orders_[k] + static_cast<std::size_t>(((a[k] % orders_[k]) + orders_[k]) % orders_[k]);
    return static_cast<Elt>(idx);
  }
  std::vector<long> decode(Elt e) const {
    std::vector<long> a(m());
    std::size_t idx = e;
    for (std::size_t k = 0; k < m(); ++k) {
      a[k] = static_cast<long>(idx % orders_[k]);
      idx /= orders_[k];
    }
    return a;
  }
  Elt add(Elt x, Elt y) const {
    auto a = decode(x), b = decode(y);
    for (std::size_t k = 0; k < m(); ++k) a[k] += b[k];
    return encode(a);
  }
  long element_order(Elt x) const {
    long o = 1;
    auto a = decode(x);
    for (std::size_t k = 0; k < m(); ++k) o = std::lcm(o, orders_[k] / std::gcd(orders_[k], a[k]));
    return o;
  }
  Elt tau(std::size_t i) const {
    std::vector<long> a(m(), 0);
    a[i] = 1;
    return encode(a);
  }
  Elt j() const { return encode(j_exponents_); }
  const std::vector<long>& j_exponents() const { return j_exponents_; }

  std::vector<Elt> closure(const std::vector<Elt>& gens) const {
    std::vector<char> seen(size_, 0);
    std::vector<Elt> out{0};
    seen[0] = 1;
    for (std::size_t h = 0; h < out.size(); ++h)
      for (Elt s : gens) {
        Elt y = add(out[h], s);
        if (!seen[y]) {
          seen[y] = 1;
          out.push_back(y);
        }
      }
    std::sort(out.begin(), out.end());
    return out;
  }

  /* The inertia ell-part at position i: <tau_i> for i < m, <j> for the last. */
  Elt inertia_generator(std::size_t i) const { return i + 1 == m() ? j() : tau(i); }

  std::string spec() const {
    std::string s = "ell=" + std::to_string(ell_) + " g=(";
    for (std::size_t i = 0; i < m(); ++i) s += (i ? "," : "") + std::to_string(g_[i]);
    return s + ") r=" + std::to_string(r_);
  }

 private:
  static bool is_power_of(long x, long ell) {
    while (x % ell == 0) x /= ell;
    return x == 1;
  }

  long ell_;
  std::vector<long> g_;
  int r_;
  std::vector<long> orders_;
  std::vector<long> j_exponents_;
  std::size_t size_ = 1;
};

namespace detail {

/* The translates sigma s(H), one per coset, as rows over Z[G]. */
inline std::vector<SparseVec> coset_trace_rows(const SylowFrameSynthetic& F, Elt h) {
  auto H = F.closure({h});
  std::vector<char> seen(F.order(), 0);
  std::vector<SparseVec> rows;
  for (Elt s = 0; s < F.order(); ++s) {
    if (seen[s]) continue;
    SparseVec row;
    for (Elt x : H) {
      Elt y = F.add(s, x);
      seen[y] = 1;
      row.emplace_back(y, Int(1));
    }
    std::sort(row.begin(), row.end());
    rows.push_back(std::move(row));
  }
  return rows;
}

/* Permutation action of delta on Z[G]. */
inline IntMatrix translation_matrix(const SylowFrameSynthetic& F, Elt delta) {
  IntMatrix A(0, F.order(), IntMatrix::Storage::sparse);
  for (Elt s = 0; s < F.order(); ++s) A.append_row(SparseVec{{F.add(s, delta), Int(1)}});
  return A;
}

}  // namespace detail

/* Lambda / I for a Lambda-submodule I spanned by trace translates. */
struct LambdaQuotient {
  IndexSet P = 0;
  IntMatrix relations;  // rows over the basis G_ell of Lambda
  AbGroup structure;

  AbGroup torsion() const { return structure.torsion(); }
};

struct LambdaQuotients {
  LambdaQuotient by_lambda;  // Lambda / Lambda(P)
  LambdaQuotient by_theta;   // Lambda / Theta(P)
};

namespace detail {

inline LambdaQuotient lambda_quotient(const SylowFrameSynthetic& F, IndexSet P, bool theta) {
  LambdaQuotient q;
  q.P = P;
  q.relations = IntMatrix(0, F.order(), IntMatrix::Storage::sparse);
  for (std::size_t i = 0; i < F.m(); ++i) {
    if (!contains_index(P, i)) continue;
    Elt h = theta ? F.inertia_generator(i) : F.tau(i);
    for (auto& row : coset_trace_rows(F, h)) q.relations.append_row(std::move(row));
  }
  q.structure = cokernel(q.relations, F.order());
  return q;
}

inline void check_index_set(const SylowFrameSynthetic& F, IndexSet P) {
  if (P & ~full_index_set(F.m())) throw Error(Errc::invalid_argument, "index set exceeds the frame");
}

}  // namespace detail

/* Lambda(P) is generated by the s(<tau_i>), i in P. Theta(P) uses the
   inertia ell-parts instead, so it differs only when the last index is in P,
   where s(<j>) replaces s(<tau_m>). */
inline LambdaQuotients build_lambda_quotients(const SylowFrameSynthetic& F, IndexSet P) {
  detail::check_index_set(F, P);
  return {detail::lambda_quotient(F, P, false), detail::lambda_quotient(F, P, true)};
}

inline LambdaQuotient theta_quotient(const SylowFrameSynthetic& F, IndexSet P) {
  detail::check_index_set(F, P);
  return detail::lambda_quotient(F, P, true);
}

/* Lambda / Lambda(P) as a <delta>-module in its monomial basis: the tensor
   product of Z[<tau_i>] / s(<tau_i>) for i in P, with basis tau_i^a,
   a < o(tau_i) - 1, and of Z[<tau_i>] for i outside P. */
inline CyclicModule lambda_module(const SylowFrameSynthetic& F, IndexSet P, Elt delta) {
  detail::check_index_set(F, P);
  const std::size_t m = F.m();
  const auto& o = F.orders();
  auto c = F.decode(delta);
  long ord = F.element_order(delta);
  std::vector<std::size_t> dim(m);
  std::size_t n = 1;
  for (std::size_t i = 0; i < m; ++i) {
    dim[i] = static_cast<std::size_t>(contains_index(P, i) ? o[i] - 1 : o[i]);
    n *= dim[i];
  }
  if (n == 0) return CyclicModule::free(IntMatrix(0, 0), ord);
  if (n > 4096) throw Error(Errc::modulus_too_large, "module rank " + std::to_string(n) + " is too large");

  // per factor: the matrix of tau_i^(c_i) on the factor basis
  std::vector<std::vector<std::vector<long>>> factor(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t d = dim[i];
    const bool quotient = contains_index(P, i);
    std::vector<std::vector<long>> M(d, std::vector<long>(d, 0));
    for (std::size_t a = 0; a < d; ++a) M[a][a] = 1;
    for (long s = 0; s < c[i]; ++s) {
      std::vector<std::vector<long>> next(d, std::vector<long>(d, 0));
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) {
          long x = M[a][b];
          if (x == 0) continue;
          if (!quotient) {
            next[a][(b + 1) % d] += x;
          } else if (b + 1 < d) {
            next[a][b + 1] += x;
          } else {
            for (std::size_t t = 0; t < d; ++t) next[a][t] -= x;
          }
        }
      M = std::move(next);
    }
    factor[i] = std::move(M);
  }

  IntMatrix A(0, n, IntMatrix::Storage::sparse);
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::vector<std::size_t> a(m);
    std::size_t t = idx;
    for (std::size_t i = 0; i < m; ++i) {
      a[i] = t % dim[i];
      t /= dim[i];
    }
    // Kronecker product of the factor rows
    std::vector<std::pair<std::size_t, long>> acc{{0, 1}};
    std::size_t stride = 1;
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<std::pair<std::size_t, long>> next;
      for (auto [col, x] : acc)
        for (std::size_t b = 0; b < dim[i]; ++b)
          if (factor[i][a[i]][b] != 0) next.emplace_back(col + b * stride, x * factor[i][a[i]][b]);
      acc = std::move(next);
      stride *= dim[i];
    }
    std::sort(acc.begin(), acc.end());
    SparseVec row;
    for (auto [col, x] : acc) row.emplace_back(col, Int(x));
    A.append_row(std::move(row));
  }
  return CyclicModule::free(A, ord);
}

/* The same module from the trace presentation of Lambda / Lambda(P) with the
   translation action of delta. Smith form based, small frames only. */
inline CyclicModule lambda_module_presented(const SylowFrameSynthetic& F, IndexSet P, Elt delta) {
  if (F.order() > 256) throw Error(Errc::modulus_too_large, "frame too large for the presented module");
  auto q = detail::lambda_quotient(F, P, false);
  return CyclicModule::from_presentation(F.order(), q.relations, detail::translation_matrix(F, delta),
                                         F.element_order(delta));
}

struct TorH2 {
  IndexSet P = 0;
  AbGroup torsion;  // Tor(Lambda / Theta(P + m))
  AbGroup h2;       // H^2(<j>, Lambda / Lambda(P))
  bool holds = false;
};

/* Tor(Lambda / Theta(P u {m})) against H^2(<j>, Lambda / Lambda(P)) for m not
   in P, each computed on its own. */
inline TorH2 verify_tor_h2(const SylowFrameSynthetic& F, IndexSet P) {
  detail::check_index_set(F, P);
  const std::size_t last = F.m() - 1;
  if (contains_index(P, last)) throw Error(Errc::invalid_argument, "P must not contain the last index");
  TorH2 out;
  out.P = P;
  auto a = std::async(std::launch::async, [&] { return theta_quotient(F, P | (IndexSet(1) << last)).torsion(); });
  out.h2 = tate_cyclic(lambda_module(F, P, F.j()), Parity::even);
  out.torsion = a.get();
  out.holds = out.torsion == out.h2;
  return out;
}

struct HpqCheck {
  IndexSet P = 0, Q = 0;
  Elt generator = 0;  // of D_Q
  long d_order = 1;
  AbGroup even, odd;
  bool holds = false;
};

/* D_Q is generated by the inertia ell-parts at positions outside Q. When it
   is cyclic, both Tate groups of Lambda / Lambda(P) over D_Q vanish. */
inline HpqCheck hpq_spot_check(const SylowFrameSynthetic& F, IndexSet P, IndexSet Q) {
  detail::check_index_set(F, P);
  detail::check_index_set(F, Q);
  const std::size_t last = F.m() - 1;
  if ((P & ~Q) != 0 || P == Q) throw Error(Errc::invalid_argument, "P must be a proper subset of Q");
  if (contains_index(Q, last)) throw Error(Errc::invalid_argument, "Q must not contain the last index");
  std::vector<Elt> gens;
  for (std::size_t i = 0; i < F.m(); ++i)
    if (!contains_index(Q, i)) gens.push_back(F.inertia_generator(i));
  auto D = F.closure(gens);
  HpqCheck out;
  out.P = P;
  out.Q = Q;
  out.d_order = static_cast<long>(D.size());
  bool cyclic = false;
  for (Elt x : D)
    if (F.element_order(x) == out.d_order) {
      out.generator = x;
      cyclic = true;
      break;
    }
  if (!cyclic) throw Error(Errc::not_cyclic, "D_Q is not cyclic for Q = " + index_set_string(Q, F.m()));
  auto M = lambda_module(F, P, out.generator);
  out.even = tate_cyclic(M, Parity::even);
  out.odd = tate_cyclic(M, Parity::odd);
  out.holds = out.even.is_trivial() && out.odd.is_trivial();
  return out;
}

/* Z[<tau_m>] with j acting through tau_m: the invariants of Lambda under
   tau_1, ..., tau_(m-1), as a <j>-module. */
inline CyclicModule last_invariants_module(const SylowFrameSynthetic& F) {
  const long o = F.orders().back();
  IntMatrix A(0, static_cast<std::size_t>(o), IntMatrix::Storage::sparse);
  for (long a = 0; a < o; ++a) A.append_row(SparseVec{{static_cast<std::size_t>((a + 1) % o), Int(1)}});
  return CyclicModule::free(A, F.g().back());
}

struct FrameTorsionRow {
  long ell = 0;
  std::size_t m = 0;
  std::vector<long> g;
  int r = 0;
  AbGroup torsion;             // Tor(Lambda / Theta({1..m}))
  AbGroup expected;            // 0 for m = 1 or m even, Z/ell^r otherwise
  AbGroup top_degree;          // H^(m+1)(<j>, Lambda^<tau_1..tau_(m-1)>), m >= 2
  std::vector<TorH2> tor_h2;   // every P inside {1..m-1}; the last one is P = {1..m-1}
  bool holds = false;
};

inline AbGroup expected_frame_torsion(const SylowFrameSynthetic& F) {
  if (F.m() == 1 || F.m() % 2 == 0) return AbGroup();
  Int q;
  mpz_ui_pow_ui(q.get_mpz_t(), static_cast<unsigned long>(F.ell()), static_cast<unsigned long>(F.r()));
  return AbGroup::cyclic(q);
}

inline FrameTorsionRow frame_torsion(const SylowFrameSynthetic& F) {
  FrameTorsionRow row;
  row.ell = F.ell();
  row.m = F.m();
  row.g = F.g();
  row.r = F.r();
  row.torsion = theta_quotient(F, full_index_set(F.m())).torsion();
  row.expected = expected_frame_torsion(F);
  row.holds = row.torsion == row.expected;
  if (F.m() >= 2) {
    row.top_degree = tate_cyclic(last_invariants_module(F), F.m() % 2 == 1 ? Parity::even : Parity::odd);
    row.holds = row.holds && row.top_degree == row.torsion;
  }
  for (IndexSet P = 0; P <= full_index_set(F.m() - 1); ++P) {
    row.tor_h2.push_back(verify_tor_h2(F, P));
    row.holds = row.holds && row.tor_h2.back().holds;
  }
  return row;
}

/* Frames with g_i in {ell, ell^2} (non-increasing), 1 <= m <= max_m, and every
   r in [min_r, max_r] with ell^r | g_m. Frames with m = 1 take r = 0 only. */
inline std::vector<SylowFrameSynthetic> sweep_frames(long ell, std::size_t max_m, int max_r, int min_r = 1) {
  std::vector<SylowFrameSynthetic> out;
  for (std::size_t m = 1; m <= max_m; ++m)
    for (std::size_t big = m + 1; big-- > 0;) {
      std::vector<long> g(m, ell);
      for (std::size_t i = 0; i < big; ++i) g[i] = ell * ell;
      for (int r = m == 1 ? 0 : min_r; r <= max_r; ++r) {
        long lr = 1;
        for (int k = 0; k < r; ++k) lr *= ell;
        if (m > 1 && g.back() % lr != 0) continue;
        if (m == 1 && r > 0) continue;
        out.emplace_back(ell, g, r);
      }
    }
  return out;
}

inline std::vector<FrameTorsionRow> frame_torsion_sweep(long ell, std::size_t max_m, int max_r, int min_r = 1) {
  auto frames = sweep_frames(ell, max_m, max_r, min_r);
  std::vector<std::future<FrameTorsionRow>> jobs;
  for (const auto& F : frames) jobs.push_back(std::async(std::launch::async, [&F] { return frame_torsion(F); }));
  std::vector<FrameTorsionRow> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace ordist
