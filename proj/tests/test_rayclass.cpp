#include <gtest/gtest.h>

#include <random>
#include <set>

#include "ordist/rayclass.hpp"

using namespace ordist;

namespace {

OIdeal conjugate(const PrimeIdeal& P, const QuadField& K) {
  auto s = splitting_type(K, P.p);
  return s.primes.size() == 2 ? s.primes[1 - P.index].ideal : P.ideal;
}

/* Ray equivalence by brute force: a b^-1 = (beta / N(b)) and a generator is
   congruent to 1 mod n up to a root of unity. */
bool ray_equivalent_oracle(const QuadField& K, const Modulus& n, const PrimeIdeal& a, const PrimeIdeal& b) {
  auto beta = is_principal(multiply(a.ideal, conjugate(b, K)));
  if (!beta) return false;
  OIdeal N = n.ideal();
  QElt z = K.zeta(), u{Int(1), Int(0)};
  Int nb = b.norm();
  for (int k = 0; k < K.w(); ++k) {
    QElt t = qmul(K.order(), u, {nb, Int(0)});
    if (N.contains({beta->x - t.x, beta->y - t.y})) return true;
    u = qmul(K.order(), u, z);
  }
  return false;
}

/* h * #(O/n)^x / #(image of mu), all counted by enumeration. */
long order_oracle(const QuadField& K, const Modulus& n) {
  if (n.is_unit()) return K.h();
  OIdeal N = n.ideal();
  ResidueRing R(N);
  long units = 0;
  for (std::uint64_t i = 0; i < R.size(); ++i) {
    QElt e = R.element(i);
    bool u = true;
    for (auto& f : n.factors())
      if (f.prime.ideal.contains(e)) u = false;
    units += u;
  }
  std::set<std::uint64_t> mu;
  QElt z = K.zeta(), u{Int(1), Int(0)};
  for (int k = 0; k < K.w(); ++k) {
    mu.insert(R.index(u));
    u = qmul(K.order(), u, z);
  }
  return K.h() * units / static_cast<long>(mu.size());
}

Modulus triple7(const QuadField& K) { return parse_modulus(K, "p:7,p:11:0,p:23:0"); }

}  // namespace

TEST(RayClass, Examples) {
  auto K = make_field(7);
  EXPECT_TRUE(ray_class_group(K, Modulus::unit(K)).group().is_trivial());
  EXPECT_EQ(ray_class_group(K, parse_modulus(K, "p:11:0")).group(), AbGroup::cyclic(5));
  auto G = ray_class_group(K, triple7(K));
  EXPECT_EQ(G.order(), 660u);
  EXPECT_EQ(ray_class_group(K, parse_modulus(K, "p:7")).order(), 3u);
  try {
    ray_class_group(K, parse_modulus(K, "p:11:0^6"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::modulus_too_large);
  }
  try {
    G.artin(prime_ideal(K, 11, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_coprime);
  }
}

TEST(RayClass, OrderMatchesEnumeration) {
  for (long d : {1L, 2L, 3L, 5L, 7L, 14L, 15L, 21L, 23L}) {
    auto K = make_field(d);
    auto primes = primes_up_to(K, 30);
    EXPECT_EQ(ray_class_group(K, Modulus::unit(K)).order(), static_cast<std::size_t>(K.h()));
    for (std::size_t i = 0; i < primes.size(); ++i)
      for (std::size_t j = i; j < primes.size(); ++j) {
        Modulus n = i == j ? Modulus(K, {{primes[i], 2}}) : Modulus(K, {{primes[i], 1}, {primes[j], 1}});
        if (n.norm() > 3000) continue;
        auto G = ray_class_group(K, n);
        EXPECT_EQ(static_cast<long>(G.order()), order_oracle(K, n)) << "d=" << d << " n=" << n.spec();
        EXPECT_EQ(Int(static_cast<unsigned long>(G.order())), ray_class_order_formula(K, n));
      }
  }
}

TEST(RayClass, ArtinIsMultiplicative) {
  std::mt19937_64 rng(5);
  for (long d : {7L, 5L, 23L, 3L, 14L}) {
    auto K = make_field(d);
    auto primes = primes_up_to(K, 120);
    for (const char* spec : {"p:7", "q:3", "p:11:0,p:23:0"}) {
      Modulus n;
      try {
        n = parse_modulus(K, spec);
      } catch (const Error&) {
        continue;
      }
      auto G = ray_class_group(K, n);
      std::vector<PrimeIdeal> good;
      for (auto& P : primes)
        if (n.valuation(P) == 0) good.push_back(P);
      for (int t = 0; t < 40; ++t) {
        const auto& a = good[rng() % good.size()];
        const auto& b = good[rng() % good.size()];
        EXPECT_EQ(G.artin(multiply(a.ideal, b.ideal)), G.elements().add(G.artin(a), G.artin(b)))
            << "d=" << d << " n=" << spec;
      }
    }
  }
}

TEST(RayClass, ArtinAgreesWithRayEquivalence) {
  for (long d : {7L, 5L, 23L, 14L, 1L}) {
    auto K = make_field(d);
    auto primes = primes_up_to(K, 90);
    for (const char* spec : {"p:3:0", "p:11:0", "q:3", "p:2:0^3"}) {
      Modulus n;
      try {
        n = parse_modulus(K, spec);
      } catch (const Error&) {
        continue;
      }
      auto G = ray_class_group(K, n);
      for (auto& a : primes)
        for (auto& b : primes) {
          if (n.valuation(a) || n.valuation(b)) continue;
          if (gcd(b.norm(), n.norm()) != 1) continue;  // the oracle divides by N(b)
          EXPECT_EQ(G.artin(a) == G.artin(b), ray_equivalent_oracle(K, n, a, b))
              << "d=" << d << " n=" << spec << " " << a.spec() << " " << b.spec();
        }
    }
  }
}

TEST(Transition, Examples) {
  auto K = make_field(7);
  auto G = ray_class_group(K, parse_modulus(K, "p:7,p:11:0"));
  auto G11 = ray_class_group(K, parse_modulus(K, "p:11:0"));
  EXPECT_EQ(G.order(), 30u);
  auto t = transition_table(G, G11);
  EXPECT_EQ(kernel_of(G.elements(), t).order(), 6u);
  auto id = transition(G, G);
  for (std::size_t k = 0; k < id.matrix.rows(); ++k)
    for (std::size_t j = 0; j < id.matrix.cols(); ++j) EXPECT_EQ(id.matrix.at(k, j), k == j ? 1 : 0);
  EXPECT_TRUE(transition(G, G11).is_well_defined());
  try {
    transition(G11, G);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_divisor);
  }
  for (long d : {5L, 23L, 21L}) {
    auto L = make_field(d);
    auto P = primes_up_to(L, 40);
    Modulus n(L, {{P[2], 1}, {P[4], 1}});
    auto Gn = ray_class_group(L, n);
    auto table = transition_table(Gn, ray_class_group(L, Modulus::unit(L)));
    std::set<Elt> image(table.begin(), table.end());
    EXPECT_EQ(static_cast<long>(image.size()), L.h());
  }
}

TEST(Transition, FunctorialAndCompatibleWithArtin) {
  for (long d : {7L, 23L, 3L}) {
    auto K = make_field(d);
    auto P = primes_up_to(K, 30);
    Modulus m(K, {{P[1], 2}, {P[3], 1}, {P[5], 1}});
    if (m.norm() > 200000) continue;
    RayClassTower T(K, m);
    auto levels = T.divisors();
    for (auto& a : levels)
      for (auto& b : levels) {
        if (!level_divides(b, a)) continue;
        for (auto& c : levels) {
          if (!level_divides(c, b)) continue;
          const auto& ab = T.transition(a, b);
          const auto& bc = T.transition(b, c);
          const auto& ac = T.transition(a, c);
          for (std::size_t e = 0; e < ab.size(); ++e) ASSERT_EQ(bc[ab[e]], ac[e]);
        }
        for (auto& Q : primes_up_to(K, 60)) {
          if (m.valuation(Q)) continue;
          EXPECT_EQ(T.transition(a, b)[T.group(a).artin(Q)], T.group(b).artin(Q));
        }
      }
  }
}

TEST(Inertia, Examples) {
  auto K = make_field(7);
  auto G = ray_class_group(K, triple7(K));
  EXPECT_EQ(inertia(G, prime_ideal(K, 7)).structure, AbGroup::cyclic(6));
  auto G11 = ray_class_group(K, parse_modulus(K, "p:11:0"));
  EXPECT_EQ(inertia(G11, prime_ideal(K, 11, 0)).order(), 5u);
  try {
    inertia(G11, prime_ideal(K, 7));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::prime_not_in_modulus);
  }
}

TEST(Inertia, GeneratesGammaAndMatchesResidueUnits) {
  struct Case {
    long d;
    const char* m;
  };
  for (auto c : {Case{7, "p:7,p:11:0,p:23:0"}, Case{7, "q:3,p:11:1"}, Case{3, "p:7:0,p:13:0,p:19:0"},
                 Case{1, "p:5:0,p:13:0,p:17:1"}, Case{23, "p:3:0,p:13:0"}, Case{5, "p:3:0,p:7:0"},
                 Case{7, "p:11:0^2,p:23:0"}, Case{15, "p:2:0,p:17:0"}}) {
    auto K = make_field(c.d);
    auto m = parse_modulus(K, c.m);
    RayClassTower T(K, m);
    const auto& G = T.top().elements();
    std::vector<Elt> gens;
    for (std::size_t i = 0; i < T.num_primes(); ++i)
      for (Elt e : T.inertia(T.top_level(), i).generators) gens.push_back(e);
    auto gamma = kernel_of(G, T.transition(T.top_level(), T.unit_level()));
    EXPECT_EQ(closure(G, gens), gamma.elements) << c.d << " " << c.m;
    bool coprime_w = gcd(m.norm(), Int(K.w())) == 1;
    if (coprime_w && m.size() > 1)
      for (std::size_t i = 0; i < T.num_primes(); ++i) {
        Modulus pe(K, {m.factors()[i]});
        EXPECT_EQ(T.inertia(T.top_level(), i).structure, residue_units(K, pe).group) << c.d << " " << c.m;
      }
  }
}

TEST(Frobenius, Examples) {
  auto K = make_field(7);
  auto G7 = ray_class_group(K, parse_modulus(K, "p:7"));
  auto p11 = prime_ideal(K, 11, 0);
  auto f = frobenius(G7, p11);
  EXPECT_FALSE(f.coset);
  EXPECT_EQ(f.representative, G7.artin(p11));
  // 11 = N((3 + sqrt(-7))/2 ...) generator (x,y) of p11; its residue mod p7 decides the class
  auto alpha = is_principal(p11.ideal);
  ASSERT_TRUE(alpha.has_value());
  EXPECT_EQ(f.representative, G7.unit_class(*alpha));
  auto G11 = ray_class_group(K, parse_modulus(K, "p:11:0"));
  auto g = frobenius(G11, p11);
  EXPECT_TRUE(g.coset);
  EXPECT_EQ(g.representative, G11.elements().identity());
  auto G1 = ray_class_group(K, Modulus::unit(K));
  EXPECT_EQ(frobenius(G1, prime_ideal(K, 2, 0)).representative, 0u);
}

TEST(Frobenius, CosetLiftsTheLowerArtinImage) {
  auto K = make_field(23);
  auto m = parse_modulus(K, "p:3:0,p:13:0");
  RayClassTower T(K, m);
  for (std::size_t i = 0; i < 2; ++i) {
    auto fr = T.frobenius(T.top_level(), i);
    EXPECT_TRUE(fr.coset);
    Level low = T.top_level();
    low[i] = 0;
    EXPECT_EQ(T.transition(T.top_level(), low)[fr.representative], T.group(low).artin(T.prime(i)));
    auto direct = frobenius(T.top(), T.prime(i));
    EXPECT_EQ(direct.representative, fr.representative);
  }
}

TEST(GaloisOverH, TripleInQSqrtMinus7) {
  auto K = make_field(7);
  auto G = ray_class_group(K, triple7(K));
  auto H = galois_over_H(G, 2);
  const auto& E = G.elements();
  EXPECT_EQ(H.gamma.order(), 660u);
  EXPECT_EQ(H.g_ell.structure, AbGroup::from_diagonal({2, 2}));
  EXPECT_EQ(H.g_prime.order(), 165u);
  EXPECT_EQ(H.g, (std::vector<long>{2, 2, 2}));
  ASSERT_EQ(H.tau.size(), 3u);
  // the inertia generator at the last prime is the product of the other two
  EXPECT_EQ(H.j, E.add(H.tau[0], H.tau[1]));
  EXPECT_EQ(H.inertia_generators[2], E.add(H.inertia_generators[0], H.inertia_generators[1]));
  EXPECT_EQ(H.tau[2], E.identity());
  EXPECT_EQ(H.ell_r, 2);

  auto H3 = galois_over_H(G, 3);
  EXPECT_EQ(H3.g_ell.order(), 3u);
  EXPECT_EQ(H3.frame_primes[0], 0u);  // the 3-part comes from inertia at p7
  for (Elt e : H3.g_ell.elements) EXPECT_TRUE(inertia(G, prime_ideal(K, 7)).contains(e));

  auto H13 = galois_over_H(G, 13);
  EXPECT_EQ(H13.g_ell.order(), 1u);
  EXPECT_TRUE(H13.tau.empty());
}

TEST(GaloisOverH, FrameLaws) {
  struct Case {
    long d;
    const char* m;
    long ell;
  };
  for (auto c : {Case{7, "p:7,p:11:0,p:23:0", 2}, Case{3, "p:7:0,p:13:0", 3}, Case{3, "p:7:0,p:13:0,p:19:0", 3},
                 Case{3, "p:7:0,p:13:0,p:19:0", 2}, Case{1, "p:5:0,p:13:0", 2}, Case{1, "p:5:0,p:13:0,p:17:0", 2},
                 Case{7, "p:11:0,p:23:0", 2}, Case{23, "p:13:0,p:29:0", 2}}) {
    auto K = make_field(c.d);
    RayClassTower T(K, parse_modulus(K, c.m));
    SCOPED_TRACE(std::to_string(c.d) + " " + c.m + " ell=" + std::to_string(c.ell));
    auto H = galois_over_H(T, c.ell);
    const auto& G = T.top().elements();
    EXPECT_EQ(H.g_prime.order() * H.g_ell.order(), H.gamma.order());
    for (std::size_t i = 1; i < H.g.size(); ++i) EXPECT_GE(H.g[i - 1], H.g[i]);
    if (H.tau.empty()) continue;
    const long gm = H.g.back();
    Elt j = G.identity();
    for (std::size_t i = 0; i < H.tau.size(); ++i) j = G.add(j, G.times(H.tau[i], H.g[i] / gm));
    EXPECT_EQ(j, H.j) << c.d << " " << c.m;
    EXPECT_EQ(G.element_order(H.j), gm);
    EXPECT_EQ(closure(G, {H.j}), H.inertia_ell.back().elements);
    std::size_t prod = 1;
    for (Elt t : H.tau) prod *= static_cast<std::size_t>(G.element_order(t));
    EXPECT_EQ(prod, H.g_ell.order());
    EXPECT_EQ(closure(G, H.tau), H.g_ell.elements);
    EXPECT_EQ(G.element_order(H.tau.back()), std::max(1L, gm / H.ell_r)) << c.d << " " << c.m;
  }
}
