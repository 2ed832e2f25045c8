#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ordist/zlinalg/int_matrix.hpp"

namespace ordist {

/* Finitely generated abelian group by invariant factors d1 | d2 | ... with
   ones dropped and 0 standing for a copy of Z (zeros come last). */
class AbGroup {
 public:
  AbGroup() = default;

  /* Any diagonal presentation; entries are normalized into a divisibility
     chain. */
  static AbGroup from_diagonal(const std::vector<Int>& diag) {
    std::vector<Int> finite;
    std::size_t free_rank = 0;
    for (const auto& d : diag) {
      Int a = abs(d);
      if (a == 0)
        ++free_rank;
      else if (a != 1)
        finite.push_back(a);
    }
    for (std::size_t i = 0; i < finite.size(); ++i)
      for (std::size_t j = i + 1; j < finite.size(); ++j) {
        Int g = gcd(finite[i], finite[j]);
        Int l = finite[i] / g * finite[j];
        finite[i] = g;
        finite[j] = l;
      }
    AbGroup out;
    for (auto& d : finite)
      if (d != 1) out.inv_.push_back(d);
    out.inv_.insert(out.inv_.end(), free_rank, Int(0));
    return out;
  }

  static AbGroup cyclic(const Int& n) { return from_diagonal({n}); }
  static AbGroup free(std::size_t r) { return from_diagonal(std::vector<Int>(r, Int(0))); }

  const std::vector<Int>& invariants() const { return inv_; }

  std::size_t rank() const {
    std::size_t r = 0;
    for (const auto& d : inv_)
      if (d == 0) ++r;
    return r;
  }

  bool is_finite() const { return rank() == 0; }
  bool is_trivial() const { return inv_.empty(); }

  std::optional<Int> order() const {
    if (!is_finite()) return std::nullopt;
    Int o = 1;
    for (const auto& d : inv_) o *= d;
    return o;
  }

  AbGroup torsion() const {
    AbGroup t;
    for (const auto& d : inv_)
      if (d != 0) t.inv_.push_back(d);
    return t;
  }

  std::vector<Int> torsion_invariants() const { return torsion().inv_; }

  Int exponent() const {
    Int e = 1;
    for (const auto& d : inv_)
      if (d != 0) e = lcm(e, d);
    return e;
  }

  std::string to_string() const {
    if (inv_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& d : inv_) {
      if (d == 0) continue;
      os << (first ? "" : " x ") << "Z/" << d.get_str();
      first = false;
    }
    if (std::size_t r = rank()) {
      os << (first ? "" : " x ") << "Z";
      if (r > 1) os << "^" << r;
    }
    return os.str();
  }

  friend bool operator==(const AbGroup& a, const AbGroup& b) { return a.inv_ == b.inv_; }
  friend bool operator!=(const AbGroup& a, const AbGroup& b) { return !(a == b); }

 private:
  std::vector<Int> inv_;
};

/* Homomorphism between groups in invariant-factor coordinates: row i is the
   image of the i-th canonical generator of the domain. */
struct AbHom {
  AbGroup domain;
  AbGroup codomain;
  IntMatrix matrix;

  std::vector<Int> apply(const std::vector<Int>& x) const {
    std::vector<Int> y = matrix.left_apply(x);
    reduce(y);
    return y;
  }

  void reduce(std::vector<Int>& y) const {
    const auto& c = codomain.invariants();
    for (std::size_t j = 0; j < y.size(); ++j)
      if (c[j] != 0) {
        mpz_fdiv_r(y[j].get_mpz_t(), y[j].get_mpz_t(), c[j].get_mpz_t());
      }
  }

  /* Each domain relation d_i e_i must land in the codomain relation lattice. */
  bool is_well_defined() const {
    const auto& d = domain.invariants();
    const auto& c = codomain.invariants();
    if (matrix.rows() != d.size() || matrix.cols() != c.size()) return false;
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t j = 0; j < c.size(); ++j) {
        Int v = d[i] * matrix.at(i, j);
        if (c[j] == 0 ? v != 0 : v % c[j] != 0) return false;
      }
    return true;
  }
};

}  // namespace ordist
