#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ordist/quadfield.hpp"

namespace ordist {

/* A word in the class-group generator ideals that is principal, with a
   generator and its residue class modulo n. */
struct ClassRelation {
  std::vector<long> exponents;
  QElt generator;
  Elt residue = 0;
};

struct Frobenius {
  Elt representative = 0;
  bool coset = false;  // true when p | n: only the class mod T_p(n) is meaningful
};

/* Order predicted by 1 -> (O/n)^x / mu -> Cl_n -> Cl -> 1. */
inline Int ray_class_order_formula(const QuadField& K, const Modulus& n) {
  if (n.is_unit()) return Int(K.h());
  return K.h() * residue_unit_count(n) * mu_kernel_order(K, n) / K.w();
}

/* Cl_n presented on generators of (O/n)^x and on prime ideals generating Cl.
   Relations: the orders of the unit generators, the image of mu_K, and for
   each relation among the class-group generators the residue of a generator
   of the corresponding principal ideal. */
class RayClassGroup {
 public:
  RayClassGroup() = default;
  RayClassGroup(const QuadField& K, const Modulus& n, std::uint64_t bound = kResidueBound)
      : K_(std::make_shared<const QuadField>(K)), n_(n), n_ideal_(n.ideal()), units_(residue_units(K, n, bound)) {
    choose_class_generators();
    build();
  }

  const QuadField& field() const { return *K_; }
  const Modulus& modulus() const { return n_; }
  const ResidueUnits& units() const { return units_; }
  const AbGroup& group() const { return pres_.group; }
  const FiniteAbGroup& elements() const { return elems_; }
  const PresentedGroup& presentation() const { return pres_; }
  const std::vector<PrimeIdeal>& class_generators() const { return q_; }
  const std::vector<ClassRelation>& ext_data() const { return ext_; }
  std::size_t order() const { return elems_.order(); }

  Elt word_class(const IntVec& w) const { return elems_.encode(pres_.canonical(w)); }

  /* Class of the principal ideal (beta), beta prime to n. */
  Elt unit_class(const QElt& beta) const {
    IntVec w(pres_.num_generators, Int(0));
    auto c = units_.elements.decode(units_.dlog(beta));
    for (std::size_t i = 0; i < c.size(); ++i) w[i] = c[i];
    return word_class(w);
  }

  Elt artin(const OIdeal& a) const {
    if (!(a.order() == K_->order())) throw Error(Errc::field_mismatch, "ideal from another field");
    if (!is_coprime(a, n_ideal_)) throw Error(Errc::not_coprime, a.to_string() + " is not prime to " + n_.spec());
    const auto& Cl = K_->class_elements();
    const auto& c = words_[Cl.neg(ideal_class(*K_, a))];
    OIdeal J = a;
    for (std::size_t j = 0; j < q_.size(); ++j) J = multiply(J, power(q_[j].ideal, c[j]));
    auto alpha = is_principal(J);
    if (!alpha) throw Error(Errc::oracle_mismatch, "class word of " + a.to_string() + " is not principal");
    IntVec w(pres_.num_generators, Int(0));
    auto u = units_.elements.decode(units_.dlog(*alpha));
    for (std::size_t i = 0; i < u.size(); ++i) w[i] = u[i];
    for (std::size_t j = 0; j < q_.size(); ++j) w[u.size() + j] = -c[j];
    return word_class(w);
  }

  Elt artin(const PrimeIdeal& p) const { return artin(p.ideal); }

  /* Artin images of the primes of norm <= bound not dividing n. */
  std::vector<std::pair<PrimeIdeal, Elt>> artin_table(long bound) const {
    std::vector<std::pair<PrimeIdeal, Elt>> out;
    for (auto& P : primes_up_to(*K_, bound))
      if (n_.valuation(P) == 0) out.emplace_back(P, artin(P));
    return out;
  }

  /* Images in `target` of the presentation generators of this group. */
  std::vector<Elt> generator_images(const RayClassGroup& target) const {
    std::vector<Elt> img;
    for (auto r : units_.basis) img.push_back(target.unit_class(units_.ring.element(r)));
    for (const auto& q : q_) img.push_back(target.artin(q));
    return img;
  }

 private:
  void choose_class_generators() {
    const auto& Cl = K_->class_elements();
    std::vector<Elt> cls;
    std::vector<Elt> span = {Cl.identity()};
    for (long p = 2; span.size() < Cl.order(); ++p) {
      if (!is_prime(p)) continue;
      for (auto& P : splitting_type(*K_, p).primes) {
        if (n_.valuation(P) > 0) continue;
        Elt c = ideal_class(*K_, P.ideal);
        if (std::binary_search(span.begin(), span.end(), c)) continue;
        q_.push_back(P);
        cls.push_back(c);
        span = closure(Cl, cls);
      }
    }
    // nonnegative words for every class, by breadth-first search
    words_.assign(Cl.order(), {});
    std::vector<char> seen(Cl.order(), 0);
    std::vector<Elt> queue = {Cl.identity()};
    seen[Cl.identity()] = 1;
    words_[Cl.identity()] = std::vector<long>(q_.size(), 0);
    for (std::size_t h = 0; h < queue.size(); ++h)
      for (std::size_t j = 0; j < cls.size(); ++j) {
        Elt y = Cl.add(queue[h], cls[j]);
        if (seen[y]) continue;
        seen[y] = 1;
        words_[y] = words_[queue[h]];
        ++words_[y][j];
        queue.push_back(y);
      }
    if (!q_.empty()) {
      auto d = ab_discover<Elt>(Int(static_cast<unsigned long>(Cl.order())),
                                [&Cl](Elt a, Elt b) { return Cl.add(a, b); }, cls, Cl.identity());
      const auto& R = d.presentation.relations;
      for (std::size_t r = 0; r < R.rows(); ++r) {
        ClassRelation cr;
        bool zero = true;
        for (std::size_t j = 0; j < R.cols(); ++j) {
          cr.exponents.push_back(to_long(R.at(r, j)));
          if (cr.exponents.back() < 0) throw Error(Errc::oracle_mismatch, "negative class relation exponent");
          if (cr.exponents.back()) zero = false;
        }
        if (!zero) ext_.push_back(std::move(cr));
      }
    }
  }

  void build() {
    const std::size_t tu = units_.group.invariants().size();
    const std::size_t g = tu + q_.size();
    std::vector<IntVec> rows;
    for (std::size_t i = 0; i < tu; ++i) {
      IntVec r(g, Int(0));
      r[i] = units_.group.invariants()[i];
      rows.push_back(std::move(r));
    }
    IntVec z(g, Int(0));
    auto zc = units_.elements.decode(units_.zeta);
    for (std::size_t i = 0; i < tu; ++i) z[i] = zc[i];
    rows.push_back(std::move(z));
    for (auto& cr : ext_) {
      OIdeal J = OIdeal::unit(K_->order());
      for (std::size_t j = 0; j < q_.size(); ++j) J = multiply(J, power(q_[j].ideal, cr.exponents[j]));
      auto alpha = is_principal(J);
      if (!alpha) throw Error(Errc::oracle_mismatch, "class relation does not give a principal ideal");
      cr.generator = *alpha;
      cr.residue = units_.dlog(*alpha);
      IntVec r(g, Int(0));
      auto u = units_.elements.decode(cr.residue);
      for (std::size_t i = 0; i < tu; ++i) r[i] = -u[i];
      for (std::size_t j = 0; j < q_.size(); ++j) r[tu + j] = cr.exponents[j];
      rows.push_back(std::move(r));
    }
    pres_ = PresentedGroup::from_relations(g, IntMatrix::from_rows(rows, g));
    elems_ = FiniteAbGroup(pres_.group);
    Int expect = ray_class_order_formula(*K_, n_);
    if (Int(static_cast<unsigned long>(elems_.order())) != expect)
      throw Error(Errc::oracle_mismatch, "ray class group of " + n_.spec() + " has order " +
                                             std::to_string(elems_.order()) + ", expected " + expect.get_str());
  }

  std::shared_ptr<const QuadField> K_;
  Modulus n_;
  OIdeal n_ideal_;
  ResidueUnits units_;
  std::vector<PrimeIdeal> q_;
  std::vector<std::vector<long>> words_;  // class -> nonnegative word in q_
  std::vector<ClassRelation> ext_;
  PresentedGroup pres_;
  FiniteAbGroup elems_;
};

inline RayClassGroup ray_class_group(const QuadField& K, const Modulus& n, std::uint64_t bound = kResidueBound) {
  return RayClassGroup(K, n, bound);
}

/* The surjection G_m -> G_n for n | m, on canonical coordinates. */
inline AbHom transition(const RayClassGroup& Gm, const RayClassGroup& Gn) {
  if (!(Gm.field() == Gn.field())) throw Error(Errc::field_mismatch, "ray class groups of different fields");
  if (!Gn.modulus().divides(Gm.modulus()))
    throw Error(Errc::not_divisor, Gn.modulus().spec() + " does not divide " + Gm.modulus().spec());
  auto img = Gm.generator_images(Gn);
  const auto& T = Gn.elements();
  const auto& lift = Gm.presentation().from_canonical;
  const Int ord(static_cast<unsigned long>(T.order()));
  IntMatrix M(lift.rows(), Gn.group().invariants().size());
  for (std::size_t k = 0; k < lift.rows(); ++k) {
    Elt e = T.identity();
    for (std::size_t i = 0; i < img.size(); ++i) {
      Int c;
      mpz_fdiv_r(c.get_mpz_t(), lift.at(k, i).get_mpz_t(), ord.get_mpz_t());
      e = T.add(e, T.times(img[i], c.get_si()));
    }
    auto v = T.decode(e);
    for (std::size_t j = 0; j < v.size(); ++j) M.set(k, j, Int(v[j]));
  }
  return {Gm.group(), Gn.group(), M};
}

inline AbHom transition(const RayClassGroup& Gm, const Modulus& n) {
  return transition(Gm, RayClassGroup(Gm.field(), n));
}

/* The transition as a lookup table on element indices. */
inline std::vector<Elt> transition_table(const RayClassGroup& Gm, const RayClassGroup& Gn) {
  AbHom f = transition(Gm, Gn);
  const auto& S = Gm.elements();
  const auto& T = Gn.elements();
  std::vector<Elt> col;
  for (std::size_t k = 0; k < f.matrix.rows(); ++k) {
    std::vector<Int> row(f.matrix.cols());
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = f.matrix.at(k, j);
    col.push_back(T.encode(row));
  }
  std::vector<Elt> table(S.order());
  for (std::size_t e = 0; e < S.order(); ++e) {
    auto c = S.decode(static_cast<Elt>(e));
    Elt y = T.identity();
    for (std::size_t k = 0; k < c.size(); ++k) y = T.add(y, T.times(col[k], c[k]));
    table[e] = y;
  }
  return table;
}

inline Subgroup kernel_of(const FiniteAbGroup& G, const std::vector<Elt>& table) {
  std::vector<Elt> ker;
  for (std::size_t e = 0; e < table.size(); ++e)
    if (table[e] == 0) ker.push_back(static_cast<Elt>(e));
  return subgroup_from_elements(G, ker);
}

inline Modulus remove_prime(const QuadField& K, const Modulus& n, const PrimeIdeal& p) {
  auto e = n.exponents();
  for (std::size_t i = 0; i < e.size(); ++i)
    if (n.factors()[i].prime == p) e[i] = 0;
  return n.with_exponents(K, e);
}

/* T_p(n): kernel of G_n -> G_{n / p^v}. */
inline Subgroup inertia(const RayClassGroup& Gn, const PrimeIdeal& p) {
  if (Gn.modulus().valuation(p) == 0)
    throw Error(Errc::prime_not_in_modulus, p.spec() + " does not divide " + Gn.modulus().spec());
  RayClassGroup Gq(Gn.field(), remove_prime(Gn.field(), Gn.modulus(), p));
  return kernel_of(Gn.elements(), transition_table(Gn, Gq));
}

/* Artin(p) when p does not divide n; otherwise the smallest lift of the
   Frobenius of p taken at the level n / p^v. */
inline Frobenius frobenius(const RayClassGroup& Gn, const PrimeIdeal& p) {
  if (Gn.modulus().valuation(p) == 0) return {Gn.artin(p), false};
  RayClassGroup Gq(Gn.field(), remove_prime(Gn.field(), Gn.modulus(), p));
  Elt a = Gq.artin(p);
  auto table = transition_table(Gn, Gq);
  for (std::size_t e = 0; e < table.size(); ++e)
    if (table[e] == a) return {static_cast<Elt>(e), true};
  throw Error(Errc::oracle_mismatch, "transition is not surjective");
}

}  // namespace ordist
