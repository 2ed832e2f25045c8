#include <gtest/gtest.h>

#include <random>
#include <set>

#include "ordist/quadfield.hpp"

using namespace ordist;

namespace {

/* Analytic class number formula for D < -4 (and the w-corrected version for
   D = -3, -4): h = -(w / 2|D|) * sum_{a=1}^{|D|} chi(a) a. */
long class_number_oracle(long D) {
  long w = D == -4 ? 4 : (D == -3 ? 6 : 2);
  long s = 0;
  for (long a = 1; a <= -D; ++a) s += mpz_kronecker_si(Int(D).get_mpz_t(), a) * a;
  return -w * s / (2 * -D);
}

/* Principality by brute force: an element of I with norm N(I). */
bool principal_oracle(const OIdeal& I) {
  const auto& o = I.order();
  Int n = I.norm();
  long bound = 2 * (mpz_get_si(Int(sqrt(Int(4 * n))).get_mpz_t()) + 2);
  for (long y = -bound; y <= bound; ++y)
    for (long x = -bound; x <= bound; ++x) {
      QElt e{Int(x), Int(y)};
      if (qnorm(o, e) == n && I.contains(e)) return true;
    }
  return false;
}

/* Every ideal of norm <= bound, as products of prime powers. */
void ideals_up_to(const QuadField& K, long bound, std::vector<OIdeal>& out) {
  auto primes = primes_up_to(K, bound);
  std::function<void(std::size_t, OIdeal)> rec = [&](std::size_t start, OIdeal cur) {
    out.push_back(cur);
    for (std::size_t i = start; i < primes.size(); ++i) {
      OIdeal next = cur;
      for (;;) {
        next = multiply(next, primes[i].ideal);
        if (next.norm() > bound) break;
        rec(i + 1, next);
      }
    }
  };
  rec(0, OIdeal::unit(K.order()));
}

}  // namespace

TEST(Field, Examples) {
  auto k1 = make_field(1);
  EXPECT_EQ(k1.disc(), -4);
  EXPECT_EQ(k1.w(), 4);
  EXPECT_EQ(k1.h(), 1);
  auto k7 = make_field(7);
  EXPECT_EQ(k7.disc(), -7);
  EXPECT_EQ(k7.w(), 2);
  EXPECT_EQ(k7.h(), 1);
  EXPECT_EQ(make_field(23).h(), 3);
  EXPECT_EQ(make_field(23).class_group(), AbGroup::cyclic(3));
  EXPECT_EQ(make_field(3).w(), 6);
  EXPECT_EQ(make_field(5).disc(), -20);
  try {
    make_field(12);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_squarefree);
  }
}

TEST(Field, ClassNumbersMatchAnalyticFormula) {
  for (long d = 1; d <= 400; ++d) {
    if (!is_squarefree(d)) continue;
    auto K = make_field(d);
    EXPECT_EQ(K.h(), class_number_oracle(K.disc())) << "d=" << d;
    EXPECT_EQ(*K.class_group().order(), K.h());
  }
  // (Z/2)^2 and Z/4 are told apart: D = -84 and D = -56
  EXPECT_EQ(make_field(21).class_group(), AbGroup::from_diagonal({2, 2}));
  EXPECT_EQ(make_field(14).class_group(), AbGroup::cyclic(4));
}

TEST(Forms, CompositionMatchesIdealProducts) {
  for (long d : {5L, 14L, 21L, 23L, 47L, 71L, 105L}) {
    auto K = make_field(d);
    auto primes = primes_up_to(K, 60);
    const auto& G = K.class_elements();
    for (auto& P : primes)
      for (auto& Q : primes) {
        Elt lhs = ideal_class(K, multiply(P.ideal, Q.ideal));
        EXPECT_EQ(lhs, G.add(ideal_class(K, P.ideal), ideal_class(K, Q.ideal))) << "d=" << d;
      }
  }
}

TEST(Splitting, Examples) {
  auto K = make_field(7);
  EXPECT_EQ(splitting_type(K, 11).type, Splitting::split);
  EXPECT_EQ(splitting_type(K, 7).type, Splitting::ramified);
  EXPECT_EQ(splitting_type(K, 3).type, Splitting::inert);
  try {
    splitting_type(K, 9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_prime);
  }
  auto s = splitting_type(K, 11);
  EXPECT_EQ(multiply(s.primes[0].ideal, s.primes[1].ideal), OIdeal::principal(K.order(), {Int(11), Int(0)}));
  // index 0 has the smaller b in [0, 22): b = 9, then b = 13
  EXPECT_EQ(s.primes[0].ideal.form().b, -9);
  EXPECT_EQ(s.primes[1].ideal.form().b, -13);
}

TEST(Splitting, ProductsOfPrimesAbovePAreP) {
  for (long d : {1L, 2L, 3L, 5L, 7L, 15L, 23L, 163L}) {
    auto K = make_field(d);
    for (long p = 2; p < 200; ++p) {
      if (!is_prime(p)) continue;
      auto s = splitting_type(K, p);
      OIdeal pO = OIdeal::principal(K.order(), {Int(p), Int(0)});
      long kr = p == 2 ? (K.disc() % 2 == 0 ? 0 : (floor_mod(K.disc(), 8) == 1 ? 1 : -1))
                       : mpz_kronecker_si(Int(K.disc()).get_mpz_t(), p);
      switch (s.type) {
        case Splitting::split:
          EXPECT_EQ(kr, 1);
          ASSERT_EQ(s.primes.size(), 2u);
          EXPECT_NE(s.primes[0].ideal, s.primes[1].ideal);
          EXPECT_EQ(multiply(s.primes[0].ideal, s.primes[1].ideal), pO);
          EXPECT_EQ(s.primes[0].norm(), p);
          break;
        case Splitting::ramified:
          EXPECT_EQ(kr, 0);
          EXPECT_EQ(multiply(s.primes[0].ideal, s.primes[0].ideal), pO);
          break;
        case Splitting::inert:
          EXPECT_EQ(kr, -1);
          EXPECT_EQ(s.primes[0].ideal, pO);
          EXPECT_EQ(s.primes[0].norm(), p * p);
          break;
      }
    }
  }
}

TEST(Ideals, FieldMismatch) {
  auto a = prime_ideal(make_field(7), 11, 0);
  auto b = prime_ideal(make_field(5), 3, 0);
  try {
    multiply(a.ideal, b.ideal);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::field_mismatch);
  }
  EXPECT_THROW(ideal_gcd(a.ideal, b.ideal), Error);
}

TEST(Ideals, GcdAndCoprimality) {
  auto K = make_field(7);
  auto p11 = prime_ideal(K, 11, 0).ideal, q11 = prime_ideal(K, 11, 1).ideal;
  EXPECT_TRUE(is_coprime(p11, q11));
  EXPECT_EQ(ideal_gcd(multiply(p11, q11), p11), p11);
  EXPECT_FALSE(is_coprime(multiply(p11, p11), p11));
}

TEST(Principal, Examples) {
  auto K15 = make_field(15);
  auto P19 = prime_ideal(K15, 19, 0);
  auto g = is_principal(P19.ideal);
  ASSERT_TRUE(g.has_value());
  EXPECT_EQ(qnorm(K15.order(), *g), 19);
  EXPECT_TRUE(P19.ideal.contains(*g));
  auto [u, v] = half_coordinates(K15.order(), *g);
  EXPECT_EQ(u * u + 15 * v * v, 4 * 19);
  auto K5 = make_field(5);
  EXPECT_FALSE(is_principal(prime_ideal(K5, 2, 0).ideal).has_value());
}

TEST(Principal, AgreesWithClassTrivialityUpToNorm200) {
  for (long d : {5L, 7L, 15L, 23L, 14L, 21L}) {
    auto K = make_field(d);
    std::vector<OIdeal> ideals;
    ideals_up_to(K, 200, ideals);
    for (const auto& I : ideals) {
      bool pr = is_principal(I).has_value();
      EXPECT_EQ(pr, ideal_class(K, I) == K.class_elements().identity()) << I.to_string();
      EXPECT_EQ(pr, principal_oracle(I)) << I.to_string();
    }
  }
}

TEST(Residues, ExampleUnitGroups) {
  auto K = make_field(7);
  EXPECT_EQ(residue_units(K, parse_modulus(K, "p:7")).group, AbGroup::cyclic(6));
  EXPECT_EQ(residue_units(K, parse_modulus(K, "p:11:0")).group, AbGroup::cyclic(10));
  EXPECT_EQ(residue_units(K, parse_modulus(K, "q:3")).group, AbGroup::cyclic(8));
  try {
    residue_units(K, parse_modulus(K, "p:11:0^6"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::modulus_too_large);
  }
}

TEST(Residues, OrdersAreMultiplicativeAndDlogIsAHomomorphism) {
  std::mt19937_64 rng(17);
  for (long d : {1L, 3L, 7L, 5L, 23L}) {
    auto K = make_field(d);
    auto primes = primes_up_to(K, 30);
    for (std::size_t i = 0; i < primes.size(); ++i)
      for (std::size_t j = i + 1; j < primes.size(); ++j) {
        for (int e : {1, 2}) {
          Modulus a(K, {{primes[i], e}}), b(K, {{primes[j], 1}}), ab(K, {{primes[i], e}, {primes[j], 1}});
          if (ab.norm() > 20000) continue;
          auto Ua = residue_units(K, a), Ub = residue_units(K, b), Uab = residue_units(K, ab);
          Int np = primes[i].norm();
          Int expect = np - 1;
          for (int k = 1; k < e; ++k) expect *= np;
          EXPECT_EQ(*Ua.group.order(), expect);
          EXPECT_EQ(*Uab.group.order(), *Ua.group.order() * *Ub.group.order());
          for (int t = 0; t < 20; ++t) {
            QElt x{Int(static_cast<long>(rng() % 1000)), Int(static_cast<long>(rng() % 1000))};
            QElt y{Int(static_cast<long>(rng() % 1000)), Int(static_cast<long>(rng() % 1000))};
            if (!Uab.is_unit(x) || !Uab.is_unit(y)) continue;
            EXPECT_EQ(Uab.dlog(qmul(K.order(), x, y)), Uab.elements.add(Uab.dlog(x), Uab.dlog(y)));
          }
        }
      }
  }
}

TEST(Residues, RootsOfUnityInjectWhenCoprimeToW) {
  for (long d : {1L, 3L, 7L, 15L}) {
    auto K = make_field(d);
    for (auto& P : primes_up_to(K, 80)) {
      Modulus n(K, {{P, 1}});
      if (gcd(P.norm(), Int(K.w())) != 1) continue;
      auto U = residue_units(K, n);
      EXPECT_EQ(U.mu_image_order, static_cast<std::size_t>(K.w())) << P.spec();
      EXPECT_EQ(mu_kernel_order(K, n), 1);
    }
  }
}

TEST(Modulus, ParseAndPrint) {
  auto K = make_field(7);
  auto m = parse_modulus(K, "p:23:0,p:7,p:11:0");
  EXPECT_EQ(m.spec(), "p:7,p:11:0,p:23:0");
  EXPECT_EQ(m.norm(), 7 * 11 * 23);
  EXPECT_EQ(parse_modulus(K, "p:11:1^2").norm(), 121);
  EXPECT_EQ(parse_prime(K, "p:7").spec(), "p:7");
  EXPECT_EQ(parse_prime(K, "q:3").norm(), 9);
  EXPECT_THROW(parse_modulus(K, "p:11:0,p:11:0"), Error);
  EXPECT_THROW(parse_prime(K, "p:11:2"), Error);
  EXPECT_THROW(parse_prime(K, "x:11"), Error);
  EXPECT_THROW(parse_prime(K, "q:11"), Error);
}
