#pragma once

#include <array>
#include <string>
#include <vector>

#include "ordist/distribution/torsion.hpp"

namespace ordist {

inline bool full_support(const Level& e) {
  for (int x : e)
    if (x == 0) return false;
  return true;
}

/* Sum of the coordinates of v on generators at levels divisible by all three
   primes of m. */
inline Int nu(const DeltaPresentation& P, const IntVec& v) {
  if (P.tower().num_primes() != 3)
    throw Error(Errc::wrong_shape, "nu needs exactly three primes, m = " + P.modulus().spec());
  if (v.size() != P.num_generators()) throw Error(Errc::invalid_argument, "vector length differs from the generator count");
  Int s = 0;
  for (const auto& e : P.levels()) {
    if (!full_support(e)) continue;
    std::size_t off = P.offset(e), n = P.tower().group(e).order();
    for (std::size_t k = 0; k < n; ++k) s += v[off + k];
  }
  return s;
}

inline Int nu(const DeltaPresentation& P, const SparseVec& v) {
  IntVec d(P.num_generators());
  for (const auto& [c, x] : v) d[c] = x;
  return nu(P, d);
}

/* One case of the parity argument for nu on the generators of U, over every
   level of K and not only those dividing m. The relevant degree
   [K_{np^e} : K_n] is N(p)^(e-1) (N(p) - 1) for the unramified kind and
   N(p)^e for the ramified kind, once roots of unity are trivial modulo every
   level divisible by one of the primes. */
struct ParityCase {
  PrimeIdeal prime;
  RelationKind kind = RelationKind::unramified;
  Int degree_at_one;  // the degree for e = 1
  bool holds = false;
  std::string reason;
};

struct ParityCheck {
  std::vector<ParityCase> cases;
  bool holds = false;
};

inline ParityCheck nu_parity(const QuadField& K, const std::array<PrimeIdeal, 3>& p) {
  ParityCheck out;
  bool mu_trivial = true;
  for (const auto& q : p) mu_trivial = mu_trivial && mu_kernel_order(K, Modulus(K, {{q, 1}})) == 1;
  for (const auto& q : p) {
    Int N = q.norm();
    bool odd = mpz_odd_p(N.get_mpz_t());
    ParityCase u{q, RelationKind::unramified, N - 1, mu_trivial && odd, ""};
    u.reason = u.holds ? "nu = -N(p)^(e-1)(N(p)-1), even"
                       : (mu_trivial ? "N(p) is even" : "roots of unity are not trivial modulo the primes");
    ParityCase r{q, RelationKind::ramified, N, mu_trivial && odd, ""};
    r.reason = r.holds ? "nu = 1 - N(p)^e, even" : u.reason;
    out.cases.push_back(u);
    out.cases.push_back(r);
  }
  out.holds = std::all_of(out.cases.begin(), out.cases.end(), [](const ParityCase& c) { return c.holds; });
  return out;
}

struct TorsionCertificate {
  std::array<PrimeIdeal, 3> primes;
  IntVec R;
  std::vector<std::pair<Level, SparseVec>> pieces;  // s(G') and the x_i, in block coordinates
  bool in_kernel = false;
  std::vector<std::size_t> relations_with_odd_nu;  // rows of U(m); expected empty
  Int nu_R;
  ParityCheck nu_parity_of_U;
  bool conclusion = false;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::hypothesis_failed, what);
}

}  // namespace detail

inline void check_torsex_hypotheses(const QuadField& K, const std::array<PrimeIdeal, 3>& p) {
  detail::require(K.w() == 2, "w_K = " + std::to_string(K.w()) + ", not 2");
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) detail::require(!(p[i] == p[j]), "the primes are not distinct");
  for (const auto& q : p) {
    Int r = q.norm() % 4;
    detail::require(r == 3, "N " + q.spec() + " = " + q.norm().get_str() + " is not 3 mod 4");
  }
  for (const auto& q : p)
    detail::require(ideal_class(K, q.ideal) == K.class_elements().identity(), q.spec() + " is not principal");
}

/* s(G') + x_1 + x_2 + x_3 in ker F_m with nu = #G' odd, for
   m = p_1 p_2 p_3 with principal p_i of norm 3 mod 4 and w_K = 2. */
inline TorsionCertificate torsex_certificate(const QuadField& K, const std::array<PrimeIdeal, 3>& p,
                                             std::uint64_t bound = kResidueBound) {
  check_torsex_hypotheses(K, p);
  Modulus m(K, {{p[0], 1}, {p[1], 1}, {p[2], 1}});
  auto P = build_presentation(K, m, bound);
  auto F = iwasawa_matrix(P);
  const auto& T = P.tower();
  const auto& G = T.top().elements();
  const Level top = T.top_level();

  auto H = galois_over_H(T, 2);
  std::array<Elt, 3> tau{};
  std::array<Subgroup, 3> odd;
  for (std::size_t f = 0; f < 3; ++f) {
    std::size_t k = H.frame_primes[f];
    if (H.inertia_ell[f].order() != 2) throw Error(Errc::oracle_mismatch, "2-part of inertia is not of order 2");
    tau[k] = H.inertia_generators[f];
    odd[k] = H.inertia_prime[f];
  }
  if (H.g_ell.order() != 4 || G.add(tau[0], tau[1]) != tau[2])
    throw Error(Errc::oracle_mismatch, "the 2-parts of inertia do not form a Klein group");

  TorsionCertificate cert;
  cert.primes = p;
  cert.R.assign(P.num_generators(), Int(0));
  SparseVec sg;
  for (Elt e : H.g_prime.elements) sg.emplace_back(e, Int(1));
  std::sort(sg.begin(), sg.end());
  for (const auto& [e, c] : sg) cert.R[P.index(top, static_cast<Elt>(e))] += c;
  cert.pieces.emplace_back(top, sg);

  // 2 = (1 + tau_1) + (1 + tau_2) - tau_1 (1 + tau_3); each (1 + tau_i) s(G') alpha(m, m)
  // is -2 lambda_i^-1 s(G'_j x G'_k) alpha(m / p_i, m), or 0 when lambda_i lies in
  // Phi_i = T_i x G'_j x G'_k
  for (std::size_t i = 0; i < 3; ++i) {
    std::size_t j = (i + 1) % 3, k = (i + 2) % 3;
    Level below = top;
    below[i] = 0;
    Elt lambda = T.frobenius(top, i).representative;
    std::vector<Elt> phi_gens = T.inertia(top, i).generators;
    for (Elt g : odd[j].generators) phi_gens.push_back(g);
    for (Elt g : odd[k].generators) phi_gens.push_back(g);
    auto Phi = subgroup_generated(G, phi_gens);
    if (Phi.order() * 2 != H.gamma.order()) throw Error(Errc::oracle_mismatch, "Phi is not of index 2 in Gamma");
    Level piece_level = below;
    SparseVec piece;
    if (!Phi.contains(lambda)) {
      std::vector<Elt> jk = odd[j].generators;
      jk.insert(jk.end(), odd[k].generators.begin(), odd[k].generators.end());
      auto y = trace(G, subgroup_generated(G, jk)).translate(G.neg(lambda));
      if (i == 2) y = y.translate(tau[0]) * Rat(-1);
      auto x = project(y, T.group(below).elements(), T.transition(top, below));
      for (Elt e : x.support()) {
        if (x[e].get_den() != 1) throw Error(Errc::oracle_mismatch, "x_i is not integral");
        piece.emplace_back(e, x[e].get_num());
        cert.R[P.index(below, e)] += x[e].get_num();
      }
    }
    cert.pieces.emplace_back(piece_level, piece);
  }

  auto image = F.F.right_apply(cert.R);
  cert.in_kernel = std::all_of(image.begin(), image.end(), [](const Int& x) { return x == 0; });
  cert.nu_R = nu(P, cert.R);
  for (std::size_t r = 0; r < P.relations().rows(); ++r)
    if (mpz_odd_p(nu(P, P.relations().row_entries(r)).get_mpz_t())) cert.relations_with_odd_nu.push_back(r);
  cert.nu_parity_of_U = nu_parity(K, p);
  cert.conclusion = cert.in_kernel && mpz_odd_p(cert.nu_R.get_mpz_t()) && cert.nu_parity_of_U.holds &&
                    cert.relations_with_odd_nu.empty();
  return cert;
}

/* Triples of principal primes of norm 3 mod 4 over distinct rational primes,
   norms at most norm_bound. Empty unless w_K = 2. */
inline std::vector<std::array<PrimeIdeal, 3>> search_torsex(const QuadField& K, long norm_bound) {
  std::vector<std::array<PrimeIdeal, 3>> out;
  if (K.w() != 2) return out;
  std::vector<PrimeIdeal> ok;
  for (auto& q : primes_up_to(K, norm_bound))
    if (q.norm() % 4 == 3 && ideal_class(K, q.ideal) == K.class_elements().identity()) ok.push_back(q);
  for (std::size_t a = 0; a < ok.size(); ++a)
    for (std::size_t b = a + 1; b < ok.size(); ++b)
      for (std::size_t c = b + 1; c < ok.size(); ++c)
        if (ok[a].p != ok[b].p && ok[b].p != ok[c].p && ok[a].p != ok[c].p) out.push_back({ok[a], ok[b], ok[c]});
  return out;
}

}  // namespace ordist
