#pragma once

#include <algorithm>
#include <vector>

#include "ordist/rayclass.hpp"
#include "ordist/zlinalg/lattice.hpp"

namespace ordist {

/* Element of Q[G] for a finite abelian group G, dense in the element index. */
class GroupRingElt {
 public:
  GroupRingElt() = default;
  explicit GroupRingElt(const FiniteAbGroup& G) : G_(G), c_(G.order(), Rat(0)) {}

  static GroupRingElt basis(const FiniteAbGroup& G, Elt e) {
    GroupRingElt x(G);
    x.c_.at(e) = 1;
    return x;
  }
  static GroupRingElt one(const FiniteAbGroup& G) { return basis(G, G.identity()); }

  const FiniteAbGroup& group() const { return G_; }
  std::size_t size() const { return c_.size(); }
  const Rat& operator[](Elt e) const { return c_[e]; }
  Rat& operator[](Elt e) { return c_[e]; }
  const std::vector<Rat>& coeffs() const { return c_; }

  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const Rat& r) { return r == 0; });
  }

  Rat augmentation() const {
    Rat s = 0;
    for (const auto& r : c_) s += r;
    return s;
  }

  GroupRingElt& operator+=(const GroupRingElt& o) {
    check(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  GroupRingElt& operator-=(const GroupRingElt& o) {
    check(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  GroupRingElt& operator*=(const Rat& s) {
    for (auto& r : c_) r *= s;
    return *this;
  }
  friend GroupRingElt operator+(GroupRingElt a, const GroupRingElt& b) { return a += b; }
  friend GroupRingElt operator-(GroupRingElt a, const GroupRingElt& b) { return a -= b; }
  friend GroupRingElt operator*(GroupRingElt a, const Rat& s) { return a *= s; }
  friend GroupRingElt operator*(const Rat& s, GroupRingElt a) { return a *= s; }

  friend GroupRingElt operator*(const GroupRingElt& a, const GroupRingElt& b) {
    a.check(b);
    GroupRingElt out(a.G_);
    auto sa = a.support(), sb = b.support();
    for (Elt x : sa)
      for (Elt y : sb) out.c_[a.G_.add(x, y)] += a.c_[x] * b.c_[y];
    return out;
  }

  /* sigma * x */
  GroupRingElt translate(Elt sigma) const {
    GroupRingElt out(G_);
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (c_[i] != 0) out.c_[G_.add(sigma, static_cast<Elt>(i))] = c_[i];
    return out;
  }

  std::vector<Elt> support() const {
    std::vector<Elt> s;
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (c_[i] != 0) s.push_back(static_cast<Elt>(i));
    return s;
  }

  Int common_denominator() const {
    Int d = 1;
    for (const auto& r : c_) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), r.get_den_mpz_t());
    return d;
  }

  /* d * x as an integer vector; d must clear every denominator. */
  IntVec scaled(const Int& d) const {
    IntVec v(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) {
      Rat t = c_[i] * d;
      if (t.get_den() != 1) throw Error(Errc::invalid_argument, "scale does not clear the denominators");
      v[i] = t.get_num();
    }
    return v;
  }

  friend bool operator==(const GroupRingElt& a, const GroupRingElt& b) { return a.c_ == b.c_; }

 private:
  void check(const GroupRingElt& o) const {
    if (o.c_.size() != c_.size() || o.G_.mods() != G_.mods())
      throw Error(Errc::invalid_argument, "group ring elements over different groups");
  }

  FiniteAbGroup G_;
  std::vector<Rat> c_;
};

inline GroupRingElt trace(const FiniteAbGroup& G, const std::vector<Elt>& X) {
  GroupRingElt x(G);
  for (Elt e : X) x[e] += 1;
  return x;
}

inline GroupRingElt trace(const FiniteAbGroup& G, const Subgroup& X) { return trace(G, X.elements); }

/* phi: Q[G_n] -> Q[G_n'], sigma -> sum of its preimages. */
inline GroupRingElt inflate(const GroupRingElt& x, const FiniteAbGroup& target, const std::vector<Elt>& table) {
  GroupRingElt y(target);
  for (std::size_t t = 0; t < table.size(); ++t) y[static_cast<Elt>(t)] = x[table[t]];
  return y;
}

/* Pushforward Q[G_n'] -> Q[G_n] along a transition. */
inline GroupRingElt project(const GroupRingElt& x, const FiniteAbGroup& target, const std::vector<Elt>& table) {
  GroupRingElt y(target);
  for (std::size_t t = 0; t < table.size(); ++t) y[table[t]] += x[static_cast<Elt>(t)];
  return y;
}

/* lambda^-1 s(T) / #T for the prime with the given Frobenius data and
   inertia group. */
inline GroupRingElt p_star(const FiniteAbGroup& G, const Frobenius& fr, const Subgroup& T) {
  GroupRingElt x = trace(G, T).translate(G.neg(fr.representative));
  x *= Rat(1, static_cast<unsigned long>(T.order()));
  return x;
}

inline GroupRingElt p_star(const RayClassTower& T, const Level& e, std::size_t i) {
  const auto& G = T.group(e).elements();
  if (e.at(i) == 0) return GroupRingElt::basis(G, G.neg(T.frobenius(e, i).representative));
  return p_star(G, T.frobenius(e, i), T.inertia(e, i));
}

/* p* in G_n' for an arbitrary prime of K. */
inline GroupRingElt p_star(const RayClassGroup& Gn, const PrimeIdeal& p) {
  const auto& G = Gn.elements();
  auto fr = frobenius(Gn, p);
  if (!fr.coset) return GroupRingElt::basis(G, G.neg(fr.representative));
  return p_star(G, fr, inertia(Gn, p));
}

/* alpha(n, n') = s(Gal(K_n'/K_n)) prod_{p | n} (1 - p*), in Q[G_n']. */
inline GroupRingElt alpha(const RayClassTower& T, const Level& n, const Level& np) {
  const auto& G = T.group(np).elements();
  GroupRingElt prod = GroupRingElt::one(G);
  for (std::size_t i = 0; i < n.size(); ++i)
    if (n[i] > 0) prod = prod * (GroupRingElt::one(G) - p_star(T, np, i));
  return trace(G, kernel_of(G, T.transition(np, n))) * prod;
}

inline GroupRingElt alpha(const Modulus& n, const RayClassGroup& Gnp) {
  RayClassTower T(Gnp);
  Level e(T.num_primes(), 0);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = n.valuation(T.prime(i));
  if (!n.divides(Gnp.modulus())) throw Error(Errc::not_divisor, n.spec() + " does not divide " + Gnp.modulus().spec());
  return alpha(T, e, T.top_level());
}

/* The ideal of Z[X] generated by inertia traces: one row per distinct
   translate sigma s(T_i), over the element list X of a group containing
   every T_i. */
struct TraceIdeal {
  std::vector<Elt> elements;  // column index -> group element
  std::vector<GroupRingElt> generators;
  IntMatrix lattice;
};

struct TraceQuotient {
  TraceIdeal ideal;
  AbGroup quotient;
  Int z = 1;  // exponent of the torsion subgroup
};

namespace detail {

inline TraceQuotient trace_quotient(const FiniteAbGroup& G, std::vector<Elt> X, const std::vector<const Subgroup*>& Ts) {
  std::sort(X.begin(), X.end());
  std::vector<std::int64_t> col(G.order(), -1);
  for (std::size_t k = 0; k < X.size(); ++k) col[X[k]] = static_cast<std::int64_t>(k);
  TraceQuotient out;
  out.ideal.elements = X;
  out.ideal.lattice = IntMatrix(0, X.size(), IntMatrix::Storage::sparse);
  for (const Subgroup* T : Ts) {
    out.ideal.generators.push_back(trace(G, *T));
    std::vector<char> done(G.order(), 0);
    for (Elt s : X) {
      if (done[s]) continue;
      SparseVec row;
      for (Elt t : T->elements) {
        Elt y = G.add(s, t);
        done[y] = 1;
        if (col[y] < 0) throw Error(Errc::invalid_argument, "inertia group is not inside the index group");
        row.emplace_back(static_cast<std::size_t>(col[y]), Int(1));
      }
      out.ideal.lattice.append_row(row);
    }
  }
  out.quotient = cokernel(out.ideal.lattice, X.size());
  out.z = out.quotient.torsion().is_trivial() ? Int(1) : out.quotient.torsion().exponent();
  return out;
}

}  // namespace detail

/* Z[G_n]/S(n) and z_n. */
inline TraceQuotient trace_ideal_quotient(const RayClassTower& T, const Level& n) {
  const auto& G = T.group(n).elements();
  std::vector<Elt> all(G.order());
  for (std::size_t e = 0; e < all.size(); ++e) all[e] = static_cast<Elt>(e);
  std::vector<const Subgroup*> Ts;
  for (std::size_t i = 0; i < n.size(); ++i)
    if (n[i] > 0) Ts.push_back(&T.inertia(n, i));
  return detail::trace_quotient(G, all, Ts);
}

inline TraceQuotient trace_ideal_quotient(const RayClassGroup& Gn) {
  RayClassTower T(Gn);
  return trace_ideal_quotient(T, T.top_level());
}

/* Z[Gal(K_n/H)] modulo the ideal generated by the inertia traces. */
inline TraceQuotient gal_H_trace_quotient(const RayClassTower& T, const Level& n) {
  const auto& G = T.group(n).elements();
  Level one(n.size(), 0);
  auto gamma = kernel_of(G, T.transition(n, one));
  std::vector<const Subgroup*> Ts;
  for (std::size_t i = 0; i < n.size(); ++i)
    if (n[i] > 0) Ts.push_back(&T.inertia(n, i));
  return detail::trace_quotient(G, gamma.elements, Ts);
}

inline AbGroup gal_H_quotient_torsion(const RayClassTower& T, const Level& n) {
  if (gcd(T.level_modulus(n).norm(), Int(T.field().w())) != 1)
    throw Error(Errc::not_coprime_to_w, T.level_modulus(n).spec() + " is not prime to w_K");
  return gal_H_trace_quotient(T, n).quotient.torsion();
}

inline AbGroup gal_H_quotient_torsion(const RayClassGroup& Gm, const Modulus& n) {
  if (!n.divides(Gm.modulus())) throw Error(Errc::not_divisor, n.spec() + " does not divide " + Gm.modulus().spec());
  RayClassTower T(Gm);
  Level e(T.num_primes(), 0);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = n.valuation(T.prime(i));
  return gal_H_quotient_torsion(T, e);
}

/* Divisors of m of the form prod p_i^(t_i e_i), t_i in {0, 1}. */
inline std::vector<Level> sigma_levels(const RayClassTower& T) {
  std::vector<Level> out;
  auto top = T.top_level();
  for (auto& e : T.divisors()) {
    bool ok = true;
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i] != 0 && e[i] != top[i]) ok = false;
    if (ok) out.push_back(e);
  }
  return out;
}

/* sum over u in Sigma, u | n of (-1)^d(u,n) [K_u : K]. */
inline long trace_quotient_rank_formula(const RayClassTower& T, const Level& n) {
  long r = 0;
  for (auto& u : sigma_levels(T)) {
    if (!level_divides(u, n)) continue;
    long d = static_cast<long>(level_size(n) - level_size(u));
    long deg = static_cast<long>(T.group(u).order());
    r += (d % 2 == 0) ? deg : -deg;
  }
  return r;
}

}  // namespace ordist
