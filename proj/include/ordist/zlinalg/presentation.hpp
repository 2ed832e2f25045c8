#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <numeric>
#include <memory>
#include <unordered_map>
#include <vector>

#include "ordist/zlinalg/ab_group.hpp"
#include "ordist/zlinalg/normal_form.hpp"

namespace ordist {

/* Z^num_generators modulo the row span of a relation matrix, together with
   the change of coordinates to invariant-factor form. */
struct PresentedGroup {
  std::size_t num_generators = 0;
  IntMatrix relations;
  AbGroup group;
  IntMatrix to_canonical;    // num_generators x t
  IntMatrix from_canonical;  // t x num_generators

  static PresentedGroup from_relations(std::size_t gens, const IntMatrix& rel) {
    if (rel.cols() != gens) throw Error(Errc::invalid_argument, "relation width differs from generator count");
    PresentedGroup out;
    out.num_generators = gens;
    out.relations = rel;
    auto s = snf(rel);
    std::vector<Int> diag(gens, Int(0));
    for (std::size_t k = 0; k < s.diagonal.size(); ++k) diag[k] = s.diagonal[k];
    std::vector<std::size_t> kept;
    std::vector<Int> inv;
    for (std::size_t k = 0; k < gens; ++k)
      if (diag[k] != 1) {
        kept.push_back(k);
        inv.push_back(diag[k]);
      }
    out.group = AbGroup::from_diagonal(inv);
    if (out.group.invariants() != inv) throw Error(Errc::oracle_mismatch, "Smith form diagonal is not a divisibility chain");
    out.to_canonical = s.R.select_cols(kept);
    out.from_canonical = s.R_inverse.select_rows(kept);
    return out;
  }

  std::vector<Int> canonical(const std::vector<Int>& word) const {
    auto y = to_canonical.left_apply(word);
    const auto& d = group.invariants();
    for (std::size_t k = 0; k < y.size(); ++k)
      if (d[k] != 0) mpz_fdiv_r(y[k].get_mpz_t(), y[k].get_mpz_t(), d[k].get_mpz_t());
    return y;
  }

  std::vector<Int> lift(const std::vector<Int>& coords) const { return from_canonical.left_apply(coords); }
};

using Elt = std::uint32_t;

/* Elements of a finite abelian group in invariant-factor coordinates, indexed
   by mixed radix. */
class FiniteAbGroup {
 public:
  FiniteAbGroup() = default;
  explicit FiniteAbGroup(const AbGroup& g) {
    if (!g.is_finite()) throw Error(Errc::invalid_argument, "FiniteAbGroup: group is infinite");
    std::size_t n = 1;
    for (const auto& d : g.invariants()) {
      mods_.push_back(to_long(d));
      n *= static_cast<std::size_t>(mods_.back());
      if (n > (std::size_t(1) << 31)) throw Error(Errc::invalid_argument, "group too large to enumerate");
    }
    order_ = n;
  }

  std::size_t order() const { return order_; }
  const std::vector<long>& mods() const { return mods_; }
  std::size_t ngens() const { return mods_.size(); }
  AbGroup structure() const {
    std::vector<Int> d;
    for (long m : mods_) d.emplace_back(m);
    return AbGroup::from_diagonal(d);
  }

  Elt encode(const std::vector<long>& c) const {
    std::size_t idx = 0;
    for (std::size_t k = mods_.size(); k-- > 0;) idx = idx * mods_[k] + floor_mod(c[k], mods_[k]);
    return static_cast<Elt>(idx);
  }
  Elt encode(const std::vector<Int>& c) const {
    std::vector<long> v(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
      Int r;
      mpz_fdiv_r_ui(r.get_mpz_t(), c[k].get_mpz_t(), static_cast<unsigned long>(mods_[k]));
      v[k] = r.get_si();
    }
    return encode(v);
  }
  std::vector<long> decode(Elt e) const {
    std::vector<long> c(mods_.size());
    std::size_t idx = e;
    for (std::size_t k = 0; k < mods_.size(); ++k) {
      c[k] = static_cast<long>(idx % mods_[k]);
      idx /= mods_[k];
    }
    return c;
  }
  std::vector<Int> decode_int(Elt e) const {
    auto c = decode(e);
    return std::vector<Int>(c.begin(), c.end());
  }

  Elt identity() const { return 0; }
  Elt add(Elt a, Elt b) const {
    std::size_t ia = a, ib = b, idx = 0, scale = 1;
    for (long m : mods_) {
      long s = static_cast<long>(ia % m) + static_cast<long>(ib % m);
      if (s >= m) s -= m;
      idx += scale * s;
      scale *= m;
      ia /= m;
      ib /= m;
    }
    return static_cast<Elt>(idx);
  }
  Elt neg(Elt a) const {
    std::size_t ia = a, idx = 0, scale = 1;
    for (long m : mods_) {
      long x = static_cast<long>(ia % m);
      idx += scale * (x ? m - x : 0);
      scale *= m;
      ia /= m;
    }
    return static_cast<Elt>(idx);
  }
  Elt sub(Elt a, Elt b) const { return add(a, neg(b)); }
  Elt times(Elt a, long k) const {
    auto c = decode(a);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = floor_mod(static_cast<long>((static_cast<__int128>(c[i]) * k) % mods_[i]), mods_[i]);
    return encode(c);
  }
  long element_order(Elt a) const {
    auto c = decode(a);
    long o = 1;
    for (std::size_t i = 0; i < c.size(); ++i) {
      long g = std::gcd(c[i], mods_[i]);
      o = std::lcm(o, mods_[i] / g);
    }
    return o;
  }

  friend bool operator==(const FiniteAbGroup& a, const FiniteAbGroup& b) { return a.mods_ == b.mods_; }

 private:
  std::vector<long> mods_;
  std::size_t order_ = 1;
};

/* Relation lattice of a finite abelian group on g generators: always contains
   N * Z^g, so entries stay reduced mod N. */
class ModularRelationLattice {
 public:
  ModularRelationLattice(std::size_t g, const Int& n) : n_(n), piv_(g, IntVec(g, Int(0))) {
    for (std::size_t j = 0; j < g; ++j) piv_[j][j] = n;
  }

  void insert(IntVec v) {
    const std::size_t g = piv_.size();
    for (auto& x : v) mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), n_.get_mpz_t());
    for (std::size_t c = 0; c < g; ++c) {
      if (v[c] == 0) continue;
      IntVec& p = piv_[c];
      if (mpz_divisible_p(v[c].get_mpz_t(), p[c].get_mpz_t())) {
        Int q = v[c] / p[c];
        for (std::size_t j = c; j < g; ++j) v[j] -= q * p[j];
      } else {
        Int d, s, t;
        mpz_gcdext(d.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), p[c].get_mpz_t(), v[c].get_mpz_t());
        Int a = p[c] / d, b = v[c] / d;
        IntVec np(g), nv(g);
        for (std::size_t j = c; j < g; ++j) {
          np[j] = s * p[j] + t * v[j];
          nv[j] = a * v[j] - b * p[j];
        }
        p = std::move(np);
        v = std::move(nv);
        for (std::size_t j = c + 1; j < g; ++j) mpz_fdiv_r(p[j].get_mpz_t(), p[j].get_mpz_t(), n_.get_mpz_t());
      }
      for (auto& x : v) mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), n_.get_mpz_t());
    }
  }

  IntMatrix matrix() const { return IntMatrix::from_rows(piv_, piv_.size()); }

 private:
  Int n_;
  std::vector<IntVec> piv_;
};

template <class Elem, class Hash = std::hash<Elem>>
struct Discovery {
  AbGroup group;
  PresentedGroup presentation;  // on the supplied generators
  std::unordered_map<Elem, std::vector<long>, Hash> dlog;
  std::vector<Elem> basis;  // element realizing each canonical generator
  std::vector<Elem> elements;  // breadth-first order, identity first
};

/* Structure of the abelian group generated by gens inside a black box, by a
   breadth-first walk of the Cayley graph: tree paths give words, the other
   edges give relations. */
template <class Elem, class Mul, class Hash = std::hash<Elem>>
Discovery<Elem, Hash> ab_discover(const Int& order, Mul mul, const std::vector<Elem>& gens, const Elem& identity) {
  const std::size_t g = gens.size();
  if (order <= 0) throw Error(Errc::invalid_argument, "ab_discover: order must be positive");
  Discovery<Elem, Hash> out;
  std::unordered_map<Elem, std::size_t, Hash> index;
  std::vector<std::vector<long>> words;
  out.elements.push_back(identity);
  index.emplace(identity, 0);
  words.emplace_back(g, 0);
  ModularRelationLattice rel(g, order);
  for (std::size_t head = 0; head < out.elements.size(); ++head) {
    for (std::size_t j = 0; j < g; ++j) {
      Elem y = mul(out.elements[head], gens[j]);
      auto it = index.find(y);
      if (it == index.end()) {
        if (out.elements.size() >= order)
          throw Error(Errc::invalid_argument, "ab_discover: generated group exceeds the stated order");
        index.emplace(y, out.elements.size());
        auto w = words[head];
        ++w[j];
        words.push_back(std::move(w));
        out.elements.push_back(std::move(y));
      } else {
        const auto& wy = words[it->second];
        IntVec r(g);
        bool zero = true;
        for (std::size_t k = 0; k < g; ++k) {
          r[k] = words[head][k] - wy[k] + (k == j ? 1 : 0);
          if (r[k] != 0) zero = false;
        }
        if (!zero) rel.insert(std::move(r));
      }
    }
  }
  if (out.elements.size() != order)
    throw Error(Errc::generators_insufficient,
                "generators reach " + std::to_string(out.elements.size()) + " of " + order.get_str() + " elements");
  out.presentation = PresentedGroup::from_relations(g, rel.matrix());
  out.group = out.presentation.group;
  if (*out.group.order() != order) throw Error(Errc::oracle_mismatch, "ab_discover: relation lattice has wrong index");
  const std::size_t t = out.group.invariants().size();
  out.basis.assign(t, identity);
  std::vector<char> found(t, 0);
  for (std::size_t i = 0; i < out.elements.size(); ++i) {
    auto y = out.presentation.canonical(IntVec(words[i].begin(), words[i].end()));
    std::vector<long> c(t);
    std::size_t nz = 0, last = 0;
    for (std::size_t k = 0; k < t; ++k) {
      c[k] = y[k].get_si();
      if (c[k]) {
        ++nz;
        last = k;
      }
    }
    if (nz == 1 && c[last] == 1 && !found[last]) {
      found[last] = 1;
      out.basis[last] = out.elements[i];
    }
    out.dlog.emplace(out.elements[i], std::move(c));
  }
  return out;
}

/* Subgroup of a FiniteAbGroup, as a sorted element list. */
struct Subgroup {
  std::vector<Elt> elements;
  std::vector<Elt> generators;
  AbGroup structure;

  std::size_t order() const { return elements.size(); }
  bool contains(Elt e) const { return std::binary_search(elements.begin(), elements.end(), e); }
};

inline std::vector<Elt> closure(const FiniteAbGroup& G, const std::vector<Elt>& gens) {
  std::vector<char> seen(G.order(), 0);
  std::vector<Elt> out = {G.identity()};
  seen[G.identity()] = 1;
  for (std::size_t h = 0; h < out.size(); ++h)
    for (Elt s : gens) {
      Elt y = G.add(out[h], s);
      if (!seen[y]) {
        seen[y] = 1;
        out.push_back(y);
      }
    }
  std::sort(out.begin(), out.end());
  return out;
}

inline Subgroup subgroup_generated(const FiniteAbGroup& G, const std::vector<Elt>& gens) {
  Subgroup s;
  s.generators = gens;
  s.elements = closure(G, gens);
  auto d = ab_discover<Elt>(Int(static_cast<unsigned long>(s.elements.size())),
                            [&G](Elt a, Elt b) { return G.add(a, b); }, gens, G.identity());
  s.structure = d.group;
  return s;
}

/* Subgroup given by its element set; generators picked greedily. */
inline Subgroup subgroup_from_elements(const FiniteAbGroup& G, std::vector<Elt> elems) {
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  std::vector<Elt> gens;
  std::vector<char> in_span(G.order(), 0);
  in_span[G.identity()] = 1;
  std::vector<Elt> span = {G.identity()};
  for (Elt e : elems) {
    if (in_span[e]) continue;
    gens.push_back(e);
    span = closure(G, gens);
    for (Elt x : span) in_span[x] = 1;
  }
  if (span.size() != elems.size()) throw Error(Errc::invalid_argument, "element set is not a subgroup");
  Subgroup s = subgroup_generated(G, gens);
  return s;
}

}  // namespace ordist
