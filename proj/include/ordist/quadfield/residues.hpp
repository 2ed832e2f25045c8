#pragma once

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "ordist/quadfield/field.hpp"

namespace ordist {

struct ModulusFactor {
  PrimeIdeal prime;
  int exponent = 1;
};

/* Integral ideal given by its factorization; primes are distinct and sorted
   by (rational prime, index). */
class Modulus {
 public:
  Modulus() = default;
  Modulus(const QuadField& K, std::vector<ModulusFactor> factors) : o_(K.order()) {
    for (auto& f : factors) {
      if (f.exponent < 0) throw Error(Errc::invalid_argument, "negative exponent in modulus");
      if (!(f.prime.ideal.order() == o_)) throw Error(Errc::field_mismatch, "prime from another field");
      if (f.exponent > 0) factors_.push_back(std::move(f));
    }
    std::sort(factors_.begin(), factors_.end(),
              [](const ModulusFactor& a, const ModulusFactor& b) { return a.prime < b.prime; });
    for (std::size_t i = 1; i < factors_.size(); ++i)
      if (factors_[i].prime == factors_[i - 1].prime)
        throw Error(Errc::invalid_argument, "repeated prime " + factors_[i].prime.spec() + " in modulus");
  }

  static Modulus unit(const QuadField& K) { return Modulus(K, {}); }

  const QuadOrder& order() const { return o_; }
  const std::vector<ModulusFactor>& factors() const { return factors_; }
  std::size_t size() const { return factors_.size(); }
  bool is_unit() const { return factors_.empty(); }

  OIdeal ideal() const {
    OIdeal r = OIdeal::unit(o_);
    for (const auto& f : factors_) r = multiply(r, power(f.prime.ideal, f.exponent));
    return r;
  }

  Int norm() const {
    Int n = 1;
    for (const auto& f : factors_) {
      Int pn = f.prime.norm();
      for (int k = 0; k < f.exponent; ++k) n *= pn;
    }
    return n;
  }

  std::vector<int> exponents() const {
    std::vector<int> e;
    for (const auto& f : factors_) e.push_back(f.exponent);
    return e;
  }

  /* Same primes with new exponents; zero drops the prime. */
  Modulus with_exponents(const QuadField& K, const std::vector<int>& e) const {
    if (e.size() != factors_.size()) throw Error(Errc::invalid_argument, "exponent vector length");
    std::vector<ModulusFactor> f;
    for (std::size_t i = 0; i < e.size(); ++i) f.push_back({factors_[i].prime, e[i]});
    return Modulus(K, f);
  }

  int valuation(const PrimeIdeal& p) const {
    for (const auto& f : factors_)
      if (f.prime == p) return f.exponent;
    return 0;
  }

  bool divides(const Modulus& other) const {
    for (const auto& f : factors_)
      if (other.valuation(f.prime) < f.exponent) return false;
    return true;
  }

  std::string spec() const {
    if (factors_.empty()) return "1";
    std::string s;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (i) s += ",";
      s += factors_[i].prime.spec();
      if (factors_[i].exponent != 1) s += "^" + std::to_string(factors_[i].exponent);
    }
    return s;
  }

  friend bool operator==(const Modulus& a, const Modulus& b) {
    if (!(a.o_ == b.o_) || a.factors_.size() != b.factors_.size()) return false;
    for (std::size_t i = 0; i < a.factors_.size(); ++i)
      if (!(a.factors_[i].prime == b.factors_[i].prime) || a.factors_[i].exponent != b.factors_[i].exponent)
        return false;
    return true;
  }

 private:
  QuadOrder o_;
  std::vector<ModulusFactor> factors_;
};

/* "p:11:0", "p:11:1", "p:7" (index 0), "q:3". */
inline PrimeIdeal parse_prime(const QuadField& K, const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() < 2 || parts.size() > 3 || (parts[0] != "p" && parts[0] != "q"))
    throw Error(Errc::invalid_argument, "bad prime spec '" + text + "'");
  long p = 0;
  int idx = 0;
  try {
    std::size_t used = 0;
    p = std::stol(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("trailing");
    if (parts.size() == 3) {
      idx = std::stoi(parts[2], &used);
      if (used != parts[2].size()) throw std::invalid_argument("trailing");
    }
  } catch (const std::logic_error&) {
    throw Error(Errc::invalid_argument, "bad prime spec '" + text + "'");
  }
  auto s = splitting_type(K, p);
  if (parts[0] == "q" && s.type == Splitting::split)
    throw Error(Errc::invalid_argument, std::to_string(p) + " splits; use p:" + std::to_string(p) + ":i");
  if (idx < 0 || static_cast<std::size_t>(idx) >= s.primes.size())
    throw Error(Errc::invalid_argument, "no prime of index " + std::to_string(idx) + " above " + std::to_string(p));
  return s.primes[idx];
}

/* Comma-separated prime specs with optional "^e"; "1" or "" is the unit ideal. */
inline Modulus parse_modulus(const QuadField& K, const std::string& text) {
  std::vector<ModulusFactor> f;
  if (text.empty() || text == "1") return Modulus::unit(K);
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int e = 1;
    auto caret = item.find('^');
    if (caret != std::string::npos) {
      try {
        std::size_t used = 0;
        e = std::stoi(item.substr(caret + 1), &used);
        if (used != item.size() - caret - 1 || e < 1) throw std::invalid_argument("exp");
      } catch (const std::logic_error&) {
        throw Error(Errc::invalid_argument, "bad exponent in '" + item + "'");
      }
      item = item.substr(0, caret);
    }
    f.push_back({parse_prime(K, item), e});
  }
  return Modulus(K, f);
}

/* O_K / n with elements indexed x + A*y for the canonical representative
   x + y omega, x in [0, A), y in [0, C). */
class ResidueRing {
 public:
  ResidueRing() = default;
  explicit ResidueRing(const OIdeal& n) : o_(n.order()) {
    if (!n.A().fits_slong_p() || n.norm() > Int(1) << 40)
      throw Error(Errc::modulus_too_large, "residue ring too large to index");
    if (std::labs(o_.N) > (1L << 40)) throw Error(Errc::invalid_argument, "discriminant too large");
    A_ = n.A().get_si();
    B_ = n.B().get_si();
    C_ = n.C().get_si();
  }

  std::uint64_t size() const { return static_cast<std::uint64_t>(A_ * C_); }

  std::uint64_t index(const QElt& e) const {
    Int y = e.y % C_;
    if (y < 0) y += C_;
    Int q = (e.y - y) / C_;
    Int x = (e.x - q * B_) % A_;
    if (x < 0) x += A_;
    return static_cast<std::uint64_t>(x.get_si() + A_ * y.get_si());
  }

  QElt element(std::uint64_t idx) const {
    return {Int(static_cast<long>(idx % A_)), Int(static_cast<long>(idx / A_))};
  }

  std::uint64_t mul(std::uint64_t i, std::uint64_t j) const {
    __int128 x1 = static_cast<long>(i % A_), y1 = static_cast<long>(i / A_);
    __int128 x2 = static_cast<long>(j % A_), y2 = static_cast<long>(j / A_);
    __int128 x = x1 * x2 - static_cast<__int128>(o_.N) * y1 * y2;
    __int128 y = x1 * y2 + x2 * y1 + static_cast<__int128>(o_.delta) * y1 * y2;
    __int128 yr = y % C_;
    if (yr < 0) yr += C_;
    __int128 q = (y - yr) / C_;
    __int128 xr = (x - q * B_) % A_;
    if (xr < 0) xr += A_;
    return static_cast<std::uint64_t>(xr + static_cast<__int128>(A_) * yr);
  }

  std::uint64_t one() const { return index({Int(1), Int(0)}); }

 private:
  QuadOrder o_;
  long A_ = 1, B_ = 0, C_ = 1;
};

/* (O_K / n)^x with discrete logarithms for every residue, and the image of
   the roots of unity. */
struct ResidueUnits {
  Modulus modulus;
  ResidueRing ring;
  AbGroup group;
  FiniteAbGroup elements;
  std::vector<std::int64_t> dlog_table;  // residue index -> element, -1 for non-units
  std::vector<std::uint64_t> basis;      // residue index of each canonical generator
  Elt zeta = 0;                          // image of the generator of mu_K
  std::size_t mu_image_order = 1;

  bool is_unit(const QElt& e) const { return dlog_table[ring.index(e)] >= 0; }

  Elt dlog(const QElt& e) const {
    auto v = dlog_table[ring.index(e)];
    if (v < 0) throw Error(Errc::not_coprime, "element is not a unit modulo " + modulus.spec());
    return static_cast<Elt>(v);
  }

  std::vector<Elt> mu_image() const { return closure(elements, {zeta}); }
};

inline constexpr std::uint64_t kResidueBound = 1000000;

/* Euler function of n: prod N(p)^(e-1) (N(p) - 1). */
inline Int residue_unit_count(const Modulus& n) {
  Int phi = 1;
  for (const auto& f : n.factors()) {
    Int np = f.prime.norm();
    phi *= np - 1;
    for (int k = 1; k < f.exponent; ++k) phi *= np;
  }
  return phi;
}

/* #{zeta^k : zeta^k = 1 mod n}, i.e. the kernel of mu_K -> (O/n)^x. */
inline long mu_kernel_order(const QuadField& K, const Modulus& n) {
  OIdeal I = n.ideal();
  QElt z = K.zeta(), zk{Int(1), Int(0)};
  long ker = 0;
  for (int k = 0; k < K.w(); ++k) {
    if (I.contains({zk.x - 1, zk.y})) ++ker;
    zk = qmul(K.order(), zk, z);
  }
  return ker;
}

inline ResidueUnits residue_units(const QuadField& K, const Modulus& n, std::uint64_t bound = kResidueBound) {
  if (n.norm() > Int(static_cast<unsigned long>(bound)))
    throw Error(Errc::modulus_too_large, "N(n) = " + n.norm().get_str() + " exceeds " + std::to_string(bound));
  ResidueUnits U;
  U.modulus = n;
  U.ring = ResidueRing(n.ideal());
  const std::uint64_t size = U.ring.size();
  std::vector<char> unit(size, 1);
  for (std::uint64_t i = 0; i < size; ++i) {
    QElt e = U.ring.element(i);
    for (const auto& f : n.factors())
      if (f.prime.ideal.contains(e)) {
        unit[i] = 0;
        break;
      }
  }
  std::uint64_t count = 0;
  for (auto u : unit) count += u;
  if (Int(static_cast<unsigned long>(count)) != residue_unit_count(n))
    throw Error(Errc::oracle_mismatch, "unit count disagrees with the Euler function of " + n.spec());

  // greedy generators: smallest residue outside the current subgroup
  std::vector<char> in_sub(size, 0);
  std::vector<std::uint64_t> sub = {U.ring.one()};
  in_sub[U.ring.one()] = 1;
  std::vector<std::uint64_t> gens;
  for (std::uint64_t i = 0; i < size && sub.size() < count; ++i) {
    if (!unit[i] || in_sub[i]) continue;
    gens.push_back(i);
    std::vector<std::uint64_t> base = sub;
    std::uint64_t pk = i;
    while (!in_sub[pk]) {
      for (auto h : base) {
        auto x = U.ring.mul(h, pk);
        in_sub[x] = 1;
        sub.push_back(x);
      }
      pk = U.ring.mul(pk, i);
    }
  }
  auto disc = ab_discover<std::uint64_t>(
      Int(static_cast<unsigned long>(count)),
      [&U](std::uint64_t a, std::uint64_t b) { return U.ring.mul(a, b); }, gens, U.ring.one());
  U.group = disc.group;
  U.elements = FiniteAbGroup(U.group);
  U.dlog_table.assign(size, -1);
  for (const auto& [r, c] : disc.dlog) U.dlog_table[r] = U.elements.encode(c);
  U.basis = disc.basis;
  U.zeta = U.dlog(K.zeta());
  U.mu_image_order = static_cast<std::size_t>(U.elements.element_order(U.zeta));
  return U;
}

}  // namespace ordist
