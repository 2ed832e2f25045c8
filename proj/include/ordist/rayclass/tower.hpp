#pragma once

#include <map>
#include <memory>
#include <vector>

#include "ordist/rayclass/ray_class_group.hpp"

namespace ordist {

using Level = std::vector<int>;  // exponents on the primes of the top modulus

inline std::size_t level_size(const Level& e) {
  std::size_t s = 0;
  for (int x : e) s += x > 0;
  return s;
}

inline bool level_divides(const Level& a, const Level& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

/* Order on divisors: number of primes, then the support in lexicographic
   order, then the exponents. Refines divisibility. */
inline bool level_less(const Level& a, const Level& b) {
  std::size_t sa = level_size(a), sb = level_size(b);
  if (sa != sb) return sa < sb;
  std::vector<std::size_t> pa, pb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i]) pa.push_back(i);
    if (b[i]) pb.push_back(i);
  }
  if (pa != pb) return pa < pb;
  return a < b;
}

/* Ray class groups of every divisor of m, built on demand, with transitions,
   inertia subgroups and Frobenius data. Lazily filled caches: not for
   concurrent use. */
class RayClassTower {
 public:
  RayClassTower(const QuadField& K, const Modulus& m, std::uint64_t bound = kResidueBound)
      : K_(K), m_(m), bound_(bound) {}
  RayClassTower(const RayClassGroup& top, std::uint64_t bound = kResidueBound)
      : K_(top.field()), m_(top.modulus()), bound_(bound) {
    groups_.emplace(m_.exponents(), std::make_unique<RayClassGroup>(top));
  }

  const QuadField& field() const { return K_; }
  const Modulus& modulus() const { return m_; }
  std::size_t num_primes() const { return m_.size(); }
  const PrimeIdeal& prime(std::size_t i) const { return m_.factors()[i].prime; }
  Level top_level() const { return m_.exponents(); }
  Level unit_level() const { return Level(m_.size(), 0); }
  Modulus level_modulus(const Level& e) const { return m_.with_exponents(K_, e); }

  std::vector<Level> divisors() const {
    std::vector<Level> out = {unit_level()};
    auto top = top_level();
    for (std::size_t i = 0; i < top.size(); ++i) {
      std::vector<Level> next;
      for (auto& e : out)
        for (int k = 0; k <= top[i]; ++k) {
          Level f = e;
          f[i] = k;
          next.push_back(f);
        }
      out = std::move(next);
    }
    std::sort(out.begin(), out.end(), level_less);
    return out;
  }

  const RayClassGroup& group(const Level& e) const {
    check(e);
    auto it = groups_.find(e);
    if (it == groups_.end())
      it = groups_.emplace(e, std::make_unique<RayClassGroup>(K_, level_modulus(e), bound_)).first;
    return *it->second;
  }
  const RayClassGroup& top() const { return group(top_level()); }

  const std::vector<Elt>& transition(const Level& from, const Level& to) const {
    if (!level_divides(to, from)) throw Error(Errc::not_divisor, "transition target does not divide the source");
    auto key = std::make_pair(from, to);
    auto it = transitions_.find(key);
    if (it == transitions_.end()) {
      std::vector<Elt> t;
      if (from == to) {
        t.resize(group(from).order());
        for (std::size_t e = 0; e < t.size(); ++e) t[e] = static_cast<Elt>(e);
      } else {
        t = transition_table(group(from), group(to));
      }
      it = transitions_.emplace(key, std::move(t)).first;
    }
    return it->second;
  }

  /* T_{p_i} inside G at level e. */
  const Subgroup& inertia(const Level& e, std::size_t i) const {
    if (e.at(i) == 0) throw Error(Errc::prime_not_in_modulus, prime(i).spec() + " does not divide the level");
    auto key = std::make_pair(e, i);
    auto it = inertia_.find(key);
    if (it == inertia_.end()) {
      Level f = e;
      f[i] = 0;
      it = inertia_.emplace(key, kernel_of(group(e).elements(), transition(e, f))).first;
    }
    return it->second;
  }

  Frobenius frobenius(const Level& e, std::size_t i) const {
    auto key = std::make_pair(e, i);
    auto it = frobenius_.find(key);
    if (it != frobenius_.end()) return it->second;
    Frobenius fr;
    if (e.at(i) == 0) {
      fr = {group(e).artin(prime(i)), false};
    } else {
      Level f = e;
      f[i] = 0;
      Elt a = group(f).artin(prime(i));
      const auto& t = transition(e, f);
      fr.coset = true;
      fr.representative = static_cast<Elt>(std::find(t.begin(), t.end(), a) - t.begin());
      if (fr.representative == t.size()) throw Error(Errc::oracle_mismatch, "transition is not surjective");
    }
    frobenius_.emplace(key, fr);
    return fr;
  }

 private:
  void check(const Level& e) const {
    if (e.size() != m_.size() || !level_divides(e, m_.exponents()))
      throw Error(Errc::not_divisor, "level is not a divisor of " + m_.spec());
    for (int x : e)
      if (x < 0) throw Error(Errc::invalid_argument, "negative exponent");
  }

  QuadField K_;
  Modulus m_;
  std::uint64_t bound_;
  mutable std::map<Level, std::unique_ptr<RayClassGroup>> groups_;
  mutable std::map<std::pair<Level, Level>, std::vector<Elt>> transitions_;
  mutable std::map<std::pair<Level, std::size_t>, Subgroup> inertia_;
  mutable std::map<std::pair<Level, std::size_t>, Frobenius> frobenius_;
};

/* Gamma = Gal(K_m/H) split as G' x G_l, with the inertia l-Sylows and a frame
   tau_1..tau_s: <tau_i> is the l-Sylow of inertia at the i-th prime for i < s,
   G_l = <tau_1> x ... x <tau_s>, and j = prod tau_i^(g_i/g_s) generates the
   l-Sylow of inertia at the last prime. Primes are in frame order, largest
   g first. */
struct GaloisOverH {
  long ell = 2;
  long ell_r = 1;  // largest power of ell dividing w_K
  Subgroup gamma;
  Subgroup g_prime;
  Subgroup g_ell;
  std::vector<std::size_t> frame_primes;  // frame position -> index of the prime in m
  std::vector<Subgroup> inertia_ell;
  std::vector<Subgroup> inertia_prime;  // G'_i, with T_{p_i} = G'_i x G^l_{p_i}
  std::vector<long> g;
  std::vector<Elt> inertia_generators;  // generator of each G^l_{p_i}; the last is j
  std::vector<Elt> tau;
  Elt j = 0;
};

namespace detail {

inline bool is_power_of(long n, long ell) {
  while (n % ell == 0) n /= ell;
  return n == 1;
}

inline Subgroup part_of_order(const FiniteAbGroup& G, const Subgroup& S, long ell, bool ell_part) {
  std::vector<Elt> el;
  for (Elt e : S.elements) {
    long o = G.element_order(e);
    bool is_ell = detail::is_power_of(o, ell);
    bool coprime = o % ell != 0;
    if (ell_part ? is_ell : coprime) el.push_back(e);
  }
  return subgroup_from_elements(G, el);
}

}  // namespace detail

inline GaloisOverH galois_over_H(const RayClassTower& T, long ell) {
  if (!is_prime(ell)) throw Error(Errc::not_prime, std::to_string(ell) + " is not prime");
  const auto& K = T.field();
  const auto& G = T.top().elements();
  GaloisOverH out;
  out.ell = ell;
  for (long w = K.w(); w % ell == 0; w /= ell) out.ell_r *= ell;
  out.gamma = kernel_of(G, T.transition(T.top_level(), T.unit_level()));
  out.g_prime = detail::part_of_order(G, out.gamma, ell, false);
  out.g_ell = detail::part_of_order(G, out.gamma, ell, true);
  if (out.g_prime.order() * out.g_ell.order() != out.gamma.order())
    throw Error(Errc::oracle_mismatch, "Gamma is not the product of its l-part and l'-part");

  const std::size_t s = T.num_primes();
  std::vector<Subgroup> ell_parts;
  for (std::size_t i = 0; i < s; ++i) ell_parts.push_back(detail::part_of_order(G, T.inertia(T.top_level(), i), ell, true));
  out.frame_primes.resize(s);
  for (std::size_t i = 0; i < s; ++i) out.frame_primes[i] = i;
  std::stable_sort(out.frame_primes.begin(), out.frame_primes.end(), [&](std::size_t a, std::size_t b) {
    return ell_parts[a].order() > ell_parts[b].order();
  });
  for (std::size_t i : out.frame_primes) {
    out.inertia_ell.push_back(ell_parts[i]);
    out.inertia_prime.push_back(detail::part_of_order(G, T.inertia(T.top_level(), i), ell, false));
    out.g.push_back(static_cast<long>(ell_parts[i].order()));
  }
  if (s == 0 || out.g_ell.order() == 1) {
    out.inertia_generators.assign(s, G.identity());
    return out;
  }
  if (gcd(T.modulus().norm(), Int(K.w())) != 1)
    throw Error(Errc::not_coprime_to_w, "the frame needs m prime to w_K");

  auto generator = [&](const Subgroup& S) {
    if (S.structure.invariants().size() > 1) throw Error(Errc::frame_unavailable, "inertia l-Sylow is not cyclic");
    for (Elt e : S.elements)
      if (static_cast<std::size_t>(G.element_order(e)) == S.order()) return e;
    return G.identity();
  };
  std::size_t prod = 1;
  for (std::size_t i = 0; i + 1 < s; ++i) {
    out.tau.push_back(generator(out.inertia_ell[i]));
    out.inertia_generators.push_back(out.tau.back());
    prod *= out.inertia_ell[i].order();
  }
  if (closure(G, out.tau).size() != prod)
    throw Error(Errc::frame_unavailable, "inertia l-Sylows of the first primes are not independent");
  // j is fixed up to a common unit multiple, so only the generators tau_i,
  // i < s, are rescaled: tau_i -> u_i tau_i with u_i a unit mod g_s
  const Elt j0 = generator(out.inertia_ell.back());
  const long gm = out.g.back();
  std::vector<long> units;
  for (long u = 1; u <= gm; ++u)
    if (u % ell != 0) units.push_back(u);
  const std::vector<Elt> base = out.tau;
  std::vector<std::size_t> pick(s - 1, 0);
  for (;;) {
    std::vector<Elt> frame;
    Elt t = j0;
    for (std::size_t i = 0; i + 1 < s; ++i) {
      frame.push_back(G.times(base[i], units[pick[i]]));
      t = G.sub(t, G.times(frame[i], out.g[i] / gm));
    }
    frame.push_back(t);
    if (prod * static_cast<std::size_t>(G.element_order(t)) == out.g_ell.order() &&
        closure(G, frame).size() == out.g_ell.order()) {
      out.tau = frame;
      out.j = j0;
      out.inertia_generators = std::vector<Elt>(frame.begin(), frame.end() - 1);
      out.inertia_generators.push_back(j0);
      return out;
    }
    std::size_t k = 0;
    while (k < pick.size() && ++pick[k] == units.size()) pick[k++] = 0;
    if (k == pick.size()) break;
  }
  throw Error(Errc::frame_unavailable, "no frame element completes the inertia l-Sylows to G_l");
}

inline GaloisOverH galois_over_H(const RayClassGroup& Gm, long ell) { return galois_over_H(RayClassTower(Gm), ell); }

}  // namespace ordist
