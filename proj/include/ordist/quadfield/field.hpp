#pragma once

#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "ordist/zlinalg.hpp"

namespace ordist {

/* Maximal order of Q(sqrt D) with Z-basis {1, omega}, omega = (delta + sqrt D)/2,
   so omega^2 = delta * omega - N. */
struct QuadOrder {
  long disc = -4;
  long delta = 0;
  long N = 1;

  QuadOrder() = default;
  explicit QuadOrder(long D) : disc(D), delta(D & 1), N((delta - D) / 4) {}
  friend bool operator==(const QuadOrder& a, const QuadOrder& b) { return a.disc == b.disc; }
};

/* x + y * omega */
struct QElt {
  Int x = 0, y = 0;
  friend bool operator==(const QElt& a, const QElt& b) { return a.x == b.x && a.y == b.y; }
};

inline QElt qmul(const QuadOrder& o, const QElt& a, const QElt& b) {
  return {a.x * b.x - o.N * a.y * b.y, a.x * b.y + a.y * b.x + o.delta * a.y * b.y};
}

inline Int qnorm(const QuadOrder& o, const QElt& a) { return a.x * a.x + o.delta * a.x * a.y + o.N * a.y * a.y; }

/* (u, v) with a = (u + v sqrt D)/2 */
inline std::pair<Int, Int> half_coordinates(const QuadOrder& o, const QElt& a) {
  return {2 * a.x + o.delta * a.y, a.y};
}

struct Form {
  long a = 1, b = 0, c = 1;
  friend bool operator==(const Form& f, const Form& g) { return f.a == g.a && f.b == g.b && f.c == g.c; }
  friend bool operator<(const Form& f, const Form& g) {
    return std::tie(f.a, f.b, f.c) < std::tie(g.a, g.b, g.c);
  }
};

inline long form_disc(const Form& f) { return f.b * f.b - 4 * f.a * f.c; }

/* Reduction of a positive definite form: |b| <= a <= c, b >= 0 when either
   inequality is an equality. */
inline Form reduce_form(Form f) {
  const long D = form_disc(f);
  auto normalize = [D](Form& g) {
    if (-g.a < g.b && g.b <= g.a) return;
    long k = floor_div(Int(g.a - g.b), Int(2 * g.a)).get_si();
    g.b += 2 * g.a * k;
    g.c = (g.b * g.b - D) / (4 * g.a);
  };
  normalize(f);
  while (f.a > f.c) {
    f = {f.c, -f.b, f.a};
    normalize(f);
  }
  if (f.a == f.c && f.b < 0) f.b = -f.b;
  return f;
}

/* Composition of primitive forms of the same discriminant, unreduced
   output (Dirichlet/Shanks formulas). */
inline Form compose_forms(Form f1, Form f2) {
  const long D = form_disc(f1);
  if (form_disc(f2) != D) throw Error(Errc::field_mismatch, "forms of different discriminants");
  if (f1.a > f2.a) std::swap(f1, f2);
  long s = (f1.b + f2.b) / 2;
  long n = f2.b - s;
  long y1, d;
  if (f2.a % f1.a == 0) {
    y1 = 0;
    d = f1.a;
  } else {
    Int g, u, v;
    mpz_gcdext(g.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t(), Int(f2.a).get_mpz_t(), Int(f1.a).get_mpz_t());
    d = g.get_si();
    y1 = u.get_si();
  }
  long x2, y2, d1;
  if (s % d == 0) {
    y2 = -1;
    x2 = 0;
    d1 = d;
  } else {
    Int g, u, v;
    mpz_gcdext(g.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t(), Int(s).get_mpz_t(), Int(d).get_mpz_t());
    d1 = g.get_si();
    x2 = u.get_si();
    y2 = -v.get_si();
  }
  long v1 = f1.a / d1, v2 = f2.a / d1;
  Int r = (Int(y1) * y2 * n - Int(x2) * f2.c) % v1;
  if (r < 0) r += v1;
  Int b3 = f2.b + 2 * Int(v2) * r;
  Int a3 = Int(v1) * v2;
  Int c3 = (b3 * b3 - D) / (4 * a3);
  return {to_long(a3), to_long(b3), to_long(c3)};
}

inline bool is_squarefree(long n) {
  if (n <= 0) return false;
  for (long p = 2; p * p <= n; ++p)
    if (n % (p * p) == 0) return false;
  return true;
}

inline bool is_prime(long p) { return p >= 2 && mpz_probab_prime_p(Int(p).get_mpz_t(), 30) > 0; }

/* Imaginary quadratic field Q(sqrt(-d)), with its class group computed from
   reduced forms. */
class QuadField {
 public:
  static QuadField make(long d) {
    if (d <= 0) throw Error(Errc::invalid_argument, "d must be a positive integer");
    if (!is_squarefree(d)) throw Error(Errc::not_squarefree, std::to_string(d) + " is not squarefree");
    QuadField K;
    K.d_ = d;
    long D = (d % 4 == 3) ? -d : -4 * d;
    K.o_ = QuadOrder(D);
    K.w_ = D == -4 ? 4 : (D == -3 ? 6 : 2);
    K.enumerate_forms();
    K.build_class_group();
    return K;
  }

  long d() const { return d_; }
  long disc() const { return o_.disc; }
  int w() const { return w_; }
  long h() const { return static_cast<long>(forms_.size()); }
  const QuadOrder& order() const { return o_; }
  const AbGroup& class_group() const { return cl_; }
  const FiniteAbGroup& class_elements() const { return cl_elts_; }
  const std::vector<Form>& forms() const { return forms_; }

  Elt class_of_form(const Form& f) const {
    auto it = index_.find(reduce_form(f));
    if (it == index_.end()) throw Error(Errc::invalid_argument, "form is not primitive of this discriminant");
    return form_to_elt_[it->second];
  }
  const Form& form_of_class(Elt e) const { return forms_[elt_to_form_[e]]; }

  /* Generator of the roots of unity. */
  QElt zeta() const {
    if (w_ == 2) return {Int(-1), Int(0)};
    return {Int(0), Int(1)};
  }

  friend bool operator==(const QuadField& a, const QuadField& b) { return a.d_ == b.d_; }

 private:
  void enumerate_forms() {
    const long D = o_.disc;
    for (long a = 1; 3 * a * a <= -D; ++a)
      for (long b = -a + 1; b <= a; ++b) {
        if (((b - D) & 1) != 0) continue;
        long num = b * b - D;
        if (num % (4 * a) != 0) continue;
        long c = num / (4 * a);
        if (c < a || (a == c && b < 0)) continue;
        if (std::gcd(std::gcd(a, std::labs(b)), c) != 1) continue;
        forms_.push_back({a, b, c});
      }
    std::sort(forms_.begin(), forms_.end());
    for (std::size_t i = 0; i < forms_.size(); ++i) index_[forms_[i]] = i;
  }

  void build_class_group() {
    const long h = static_cast<long>(forms_.size());
    std::vector<std::size_t> gens;
    for (std::size_t i = 1; i < forms_.size(); ++i) gens.push_back(i);
    auto mul = [this](std::size_t i, std::size_t j) { return index_.at(reduce_form(compose_forms(forms_[i], forms_[j]))); };
    auto disc = ab_discover<std::size_t>(Int(h), mul, gens, std::size_t(0));
    cl_ = disc.group;
    cl_elts_ = FiniteAbGroup(cl_);
    form_to_elt_.assign(forms_.size(), 0);
    elt_to_form_.assign(forms_.size(), 0);
    for (std::size_t i = 0; i < forms_.size(); ++i) {
      Elt e = cl_elts_.encode(disc.dlog.at(i));
      form_to_elt_[i] = e;
      elt_to_form_[e] = i;
    }
  }

  long d_ = 1;
  QuadOrder o_;
  int w_ = 4;
  std::vector<Form> forms_;
  std::map<Form, std::size_t> index_;
  AbGroup cl_;
  FiniteAbGroup cl_elts_;
  std::vector<Elt> form_to_elt_;
  std::vector<std::size_t> elt_to_form_;
};

inline QuadField make_field(long d) { return QuadField::make(d); }

/* Nonzero ideal with Z-basis {A, B + C omega}: C | A, C | B, 0 <= B < A. */
class OIdeal {
 public:
  OIdeal() = default;
  OIdeal(const QuadOrder& o, Int A, Int B, Int C) : o_(o), A_(std::move(A)), B_(std::move(B)), C_(std::move(C)) {
    if (A_ <= 0 || C_ <= 0 || A_ % C_ != 0 || B_ % C_ != 0 || B_ < 0 || B_ >= A_)
      throw Error(Errc::invalid_argument, "not an ideal in Hermite form");
    // closed under multiplication by omega
    if (!contains(qmul(o_, {B_, C_}, {Int(0), Int(1)})))
      throw Error(Errc::invalid_argument, "lattice is not an ideal");
  }

  static OIdeal unit(const QuadOrder& o) { return OIdeal(o, Int(1), Int(0), Int(1)); }

  static OIdeal from_generators(const QuadOrder& o, const std::vector<QElt>& gens) {
    std::vector<QElt> z;
    for (const auto& g : gens) {
      z.push_back(g);
      z.push_back(qmul(o, g, {Int(0), Int(1)}));
    }
    return from_lattice(o, z);
  }

  static OIdeal principal(const QuadOrder& o, const QElt& a) { return from_generators(o, {a}); }

  /* a Z + ((b + sqrt D)/2) Z */
  static OIdeal from_ab(const QuadOrder& o, const Int& a, const Int& b) {
    Int t = b - o.delta;
    if (t % 2 != 0) throw Error(Errc::invalid_argument, "b has the wrong parity");
    return from_lattice(o, {{a, Int(0)}, {t / 2, Int(1)}});
  }

  /* Z-span of the given elements, which must already be an ideal. */
  static OIdeal from_lattice(const QuadOrder& o, std::vector<QElt> v) {
    for (;;) {
      std::size_t best = v.size();
      for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i].y != 0 && (best == v.size() || cmpabs(v[i].y, v[best].y) < 0)) best = i;
      if (best == v.size()) throw Error(Errc::invalid_argument, "lattice has rank below 2");
      bool clean = true;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i == best || v[i].y == 0) continue;
        Int q = floor_div(v[i].y, v[best].y);
        v[i].x -= q * v[best].x;
        v[i].y -= q * v[best].y;
        if (v[i].y != 0) clean = false;
      }
      if (!clean) continue;
      QElt piv = v[best];
      if (piv.y < 0) {
        piv.x = -piv.x;
        piv.y = -piv.y;
      }
      Int A = 0;
      for (std::size_t i = 0; i < v.size(); ++i)
        if (i != best) A = gcd(A, v[i].x);
      if (A == 0) throw Error(Errc::invalid_argument, "lattice has rank below 2");
      Int B = piv.x % A;
      if (B < 0) B += A;
      return OIdeal(o, A, B, piv.y);
    }
  }

  const QuadOrder& order() const { return o_; }
  long disc() const { return o_.disc; }
  const Int& A() const { return A_; }
  const Int& B() const { return B_; }
  const Int& C() const { return C_; }
  Int norm() const { return A_ * C_; }
  bool is_unit() const { return A_ == 1 && C_ == 1; }

  bool contains(const QElt& e) const {
    if (e.y % C_ != 0) return false;
    Int q = e.y / C_;
    return (e.x - q * B_) % A_ == 0;
  }

  /* Canonical representative of e modulo the ideal: x in [0, A), y in [0, C). */
  QElt reduce(const QElt& e) const {
    Int y = e.y % C_;
    if (y < 0) y += C_;
    Int q = (e.y - y) / C_;
    Int x = (e.x - q * B_) % A_;
    if (x < 0) x += A_;
    return {x, y};
  }

  /* Form attached to the primitive part a Z + ((b' + sqrt D)/2) Z. */
  Form form() const {
    Int a = A_ / C_;
    Int bp = 2 * (B_ / C_) + o_.delta;
    Int c = (bp * bp - o_.disc) / (4 * a);
    return {to_long(a), to_long(-bp), to_long(c)};
  }

  friend bool operator==(const OIdeal& a, const OIdeal& b) {
    return a.o_ == b.o_ && a.A_ == b.A_ && a.B_ == b.B_ && a.C_ == b.C_;
  }
  friend bool operator!=(const OIdeal& a, const OIdeal& b) { return !(a == b); }
  friend bool operator<(const OIdeal& a, const OIdeal& b) {
    return std::tie(a.A_, a.B_, a.C_) < std::tie(b.A_, b.B_, b.C_);
  }

  std::string to_string() const {
    return "(" + A_.get_str() + ", " + B_.get_str() + " + " + C_.get_str() + "w)";
  }

 private:
  QuadOrder o_;
  Int A_ = 1, B_ = 0, C_ = 1;
};

inline void check_same_field(const OIdeal& a, const OIdeal& b) {
  if (!(a.order() == b.order()))
    throw Error(Errc::field_mismatch, "ideals of discriminants " + std::to_string(a.disc()) + " and " +
                                          std::to_string(b.disc()));
}

inline OIdeal multiply(const OIdeal& a, const OIdeal& b) {
  check_same_field(a, b);
  const auto& o = a.order();
  std::vector<QElt> ga = {{a.A(), Int(0)}, {a.B(), a.C()}};
  std::vector<QElt> gb = {{b.A(), Int(0)}, {b.B(), b.C()}};
  std::vector<QElt> prod;
  for (auto& x : ga)
    for (auto& y : gb) prod.push_back(qmul(o, x, y));
  return OIdeal::from_lattice(o, prod);
}

inline OIdeal ideal_gcd(const OIdeal& a, const OIdeal& b) {
  check_same_field(a, b);
  return OIdeal::from_lattice(a.order(), {{a.A(), Int(0)}, {a.B(), a.C()}, {b.A(), Int(0)}, {b.B(), b.C()}});
}

inline bool is_coprime(const OIdeal& a, const OIdeal& b) { return ideal_gcd(a, b).is_unit(); }

inline OIdeal power(const OIdeal& a, long e) {
  OIdeal r = OIdeal::unit(a.order());
  for (long k = 0; k < e; ++k) r = multiply(r, a);
  return r;
}

/* Generator of a principal ideal, found as a shortest lattice vector for the
   norm form (Gauss reduction) and accepted when its norm equals N(I). */
inline std::optional<QElt> is_principal(const OIdeal& I) {
  const auto& o = I.order();
  QElt u{I.A(), Int(0)}, v{I.B(), I.C()};
  auto Q = [&o](const QElt& e) -> Int { return qnorm(o, e); };
  auto B2 = [&o](const QElt& p, const QElt& q) -> Int {
    return 2 * p.x * q.x + o.delta * (p.x * q.y + q.x * p.y) + 2 * o.N * p.y * q.y;
  };
  if (Q(u) < Q(v)) std::swap(u, v);
  for (;;) {
    Int q = round_div(B2(u, v), 2 * Q(v));
    u.x -= q * v.x;
    u.y -= q * v.y;
    if (Q(u) >= Q(v)) break;
    std::swap(u, v);
  }
  if (Q(v) == I.norm()) return v;
  return std::nullopt;
}

enum class Splitting { split, inert, ramified };

inline const char* splitting_name(Splitting s) {
  switch (s) {
    case Splitting::split: return "split";
    case Splitting::inert: return "inert";
    case Splitting::ramified: return "ramified";
  }
  return "?";
}

struct PrimeIdeal {
  long p = 0;
  int index = 0;  // 0 or 1 for split primes, 0 otherwise
  Splitting type = Splitting::inert;
  OIdeal ideal;

  Int norm() const { return ideal.norm(); }

  /* Text form accepted back by parse_prime. */
  std::string spec() const {
    switch (type) {
      case Splitting::split: return "p:" + std::to_string(p) + ":" + std::to_string(index);
      case Splitting::ramified: return "p:" + std::to_string(p);
      case Splitting::inert: return "q:" + std::to_string(p);
    }
    return "";
  }

  friend bool operator==(const PrimeIdeal& a, const PrimeIdeal& b) { return a.ideal == b.ideal; }
  friend bool operator<(const PrimeIdeal& a, const PrimeIdeal& b) {
    return std::tie(a.p, a.index) < std::tie(b.p, b.index);
  }
};

struct SplittingResult {
  Splitting type;
  std::vector<PrimeIdeal> primes;  // canonical order
};

namespace detail {

/* Square root of a quadratic residue a modulo an odd prime p. */
inline long sqrt_mod(long a, long p) {
  using namespace modp;
  u64 P = static_cast<u64>(p);
  u64 A = static_cast<u64>(floor_mod(a, p));
  if (A == 0) return 0;
  u64 q = P - 1;
  int s = 0;
  while ((q & 1) == 0) {
    q >>= 1;
    ++s;
  }
  u64 z = 2;
  while (powmod(z, (P - 1) / 2, P) != P - 1) ++z;
  u64 m = s, c = powmod(z, q, P), t = powmod(A, q, P), r = powmod(A, (q + 1) / 2, P);
  while (t != 1) {
    u64 i = 0, tt = t;
    while (tt != 1) {
      tt = mulmod(tt, tt, P);
      ++i;
    }
    u64 b = c;
    for (u64 k = 0; k + i + 1 < m; ++k) b = mulmod(b, b, P);
    m = i;
    c = mulmod(b, b, P);
    t = mulmod(t, c, P);
    r = mulmod(r, b, P);
  }
  return static_cast<long>(r);
}

}  // namespace detail

/* Decomposition of a rational prime. Split primes come as aZ + ((b+sqrt D)/2)Z
   with b in [0, 2p); the smaller b is index 0. */
inline SplittingResult splitting_type(const QuadField& K, long p) {
  if (!is_prime(p)) throw Error(Errc::not_prime, std::to_string(p) + " is not prime");
  const auto& o = K.order();
  const long D = o.disc;
  std::vector<long> bs;
  if (p == 2) {
    for (long b = 0; b < 4; ++b)
      if (floor_mod(b - D, 2) == 0 && floor_mod(b * b - D, 8) == 0) bs.push_back(b);
  } else {
    int kr = mpz_kronecker_si(Int(D).get_mpz_t(), p);
    if (kr >= 0) {
      long r = detail::sqrt_mod(D, p);
      for (long cand : {r, p - r, r + p, 2 * p - r})
        if (cand >= 0 && cand < 2 * p && floor_mod(cand - D, 2) == 0) {
          Int t = Int(cand) * cand - D;
          if (mpz_divisible_ui_p(t.get_mpz_t(), static_cast<unsigned long>(4 * p))) bs.push_back(cand);
        }
      std::sort(bs.begin(), bs.end());
      bs.erase(std::unique(bs.begin(), bs.end()), bs.end());
    }
  }
  SplittingResult res;
  if (bs.empty()) {
    res.type = Splitting::inert;
    res.primes.push_back({p, 0, Splitting::inert, OIdeal(o, Int(p), Int(0), Int(p))});
    return res;
  }
  res.type = bs.size() == 2 ? Splitting::split : Splitting::ramified;
  for (std::size_t i = 0; i < bs.size(); ++i)
    res.primes.push_back({p, static_cast<int>(i), res.type, OIdeal::from_ab(o, Int(p), Int(bs[i]))});
  return res;
}

inline PrimeIdeal prime_ideal(const QuadField& K, long p, int index = 0) {
  auto s = splitting_type(K, p);
  if (index < 0 || static_cast<std::size_t>(index) >= s.primes.size())
    throw Error(Errc::invalid_argument, "no prime of index " + std::to_string(index) + " above " + std::to_string(p));
  return s.primes[index];
}

/* All prime ideals of norm at most bound, by rational prime then index. */
inline std::vector<PrimeIdeal> primes_up_to(const QuadField& K, long bound) {
  std::vector<PrimeIdeal> out;
  for (long p = 2; p <= bound; ++p) {
    if (!is_prime(p)) continue;
    for (auto& P : splitting_type(K, p).primes)
      if (P.norm() <= bound) out.push_back(P);
  }
  return out;
}

/* Class of an ideal in the class group. */
inline Elt ideal_class(const QuadField& K, const OIdeal& I) {
  if (!(I.order() == K.order())) throw Error(Errc::field_mismatch, "ideal from another field");
  return K.class_of_form(I.form());
}

}  // namespace ordist
