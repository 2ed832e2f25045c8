#include <gtest/gtest.h>

#include <random>
#include <set>

#include "ordist/zlinalg.hpp"

using namespace ordist;

namespace {

/* Determinant by fraction-free elimination. */
Int det_oracle(std::vector<IntVec> m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  Int sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t s = k + 1;
      while (s < n && m[s][k] == 0) ++s;
      if (s == n) return 0;
      std::swap(m[s], m[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

void subsets(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& cur,
             std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

/* Invariant factors from gcds of k x k minors. */
std::vector<Int> minors_oracle(const IntMatrix& a) {
  auto rows = a.dense_rows();
  std::vector<Int> dk = {Int(1)};
  for (std::size_t k = 1; k <= std::min(a.rows(), a.cols()); ++k) {
    std::vector<std::vector<std::size_t>> rs, cs;
    std::vector<std::size_t> cur;
    subsets(a.rows(), k, 0, cur, rs);
    subsets(a.cols(), k, 0, cur, cs);
    Int g = 0;
    for (auto& r : rs)
      for (auto& c : cs) {
        std::vector<IntVec> sub(k, IntVec(k));
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) sub[i][j] = rows[r[i]][c[j]];
        g = gcd(g, det_oracle(sub));
      }
    if (g == 0) break;
    dk.push_back(g);
  }
  std::vector<Int> out;
  for (std::size_t k = 1; k < dk.size(); ++k) out.push_back(dk[k] / dk[k - 1]);
  return out;
}

IntMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, long lo, long hi) {
  std::uniform_int_distribution<long> d(lo, hi);
  IntMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m.set(i, j, d(rng));
  return m;
}

IntMatrix diag_matrix(const std::vector<Int>& d, std::size_t r, std::size_t c) {
  IntMatrix m(r, c);
  for (std::size_t k = 0; k < d.size(); ++k) m.set(k, k, d[k]);
  return m;
}

}  // namespace

TEST(IntMatrix, SparseAndDenseAgree) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    auto a = random_matrix(rng, 4, 7, -2, 2);
    auto s = a.as(IntMatrix::Storage::sparse);
    EXPECT_EQ(a, s);
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j) EXPECT_EQ(a.at(i, j), s.at(i, j));
    EXPECT_EQ(a.transposed(), s.transposed());
    auto b = random_matrix(rng, 7, 3, -3, 3);
    EXPECT_EQ(a * b, s * b.as(IntMatrix::Storage::sparse));
  }
}

TEST(IntMatrix, TextRoundTripIsExact) {
  IntMatrix m(0, 3);
  m.append_row(IntVec{Int("123456789012345678901234567890"), Int(-7), Int(0)});
  m.append_row(IntVec{Int(0), Int(1), Int("-99999999999999999999")});
  auto text = matrix_to_string(m);
  EXPECT_EQ(text, "2 3\n123456789012345678901234567890 -7 0\n0 1 -99999999999999999999\n");
  auto back = matrix_from_string(text);
  EXPECT_EQ(back, m);
  EXPECT_EQ(matrix_to_string(back), text);
  EXPECT_THROW(matrix_from_string("2 2\n1 2\n"), Error);
  EXPECT_THROW(matrix_from_string("1 2\n1 x\n"), Error);
}

TEST(Hnf, Example) {
  IntMatrix a = {{2, 4}, {6, 8}};
  auto h = hnf(a);
  // entries above pivots are reduced into [0, pivot), so (2,4) becomes (2,0)
  EXPECT_EQ(h.H, (IntMatrix{{2, 0}, {0, 4}}));
  EXPECT_EQ(h.U * a, h.H);
  EXPECT_EQ(Lattice(a), Lattice(IntMatrix{{2, 4}, {0, 4}}));
}

TEST(Hnf, RandomTransformsAreUnimodular) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 60; ++t) {
    std::size_t r = 1 + rng() % 6, c = 1 + rng() % 6;
    auto a = random_matrix(rng, r, c, -5, 5);
    auto h = hnf(a);
    EXPECT_EQ(h.U * a, h.H);
    EXPECT_EQ(abs(det_oracle(h.U.dense_rows())), 1);
    for (std::size_t k = 0; k < h.rank(); ++k) {
      EXPECT_GT(h.H.at(k, h.pivots[k]), 0);
      for (std::size_t i = 0; i < k; ++i) {
        EXPECT_GE(h.H.at(i, h.pivots[k]), 0);
        EXPECT_LT(h.H.at(i, h.pivots[k]), h.H.at(k, h.pivots[k]));
      }
    }
  }
}

TEST(Snf, Examples) {
  auto s = snf(IntMatrix{{6, 0}, {0, 4}});
  EXPECT_EQ(s.diagonal, (std::vector<Int>{2, 12}));
  auto z = snf(IntMatrix{{2, 0}, {0, 0}});
  EXPECT_EQ(z.diagonal, (std::vector<Int>{2, 0}));
}

TEST(Snf, RandomAgainstMinorsOracle) {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 150; ++t) {
    std::size_t r = 1 + rng() % 6, c = 1 + rng() % 6;
    auto a = random_matrix(rng, r, c, -5, 5);
    auto expect = minors_oracle(a);
    auto s = snf(a);
    EXPECT_EQ(s.L * a * s.R, diag_matrix(s.diagonal, r, c));
    EXPECT_EQ(abs(det_oracle(s.L.dense_rows())), 1);
    EXPECT_EQ(abs(det_oracle(s.R.dense_rows())), 1);
    EXPECT_EQ(s.R * s.R_inverse, IntMatrix::identity(c));
    std::vector<Int> got;
    for (auto& d : s.diagonal)
      if (d != 0) got.push_back(d);
    EXPECT_EQ(got, expect);
    auto f = invariant_factors(a.as(IntMatrix::Storage::sparse), true);
    EXPECT_EQ(f.nonzero, expect);
  }
}

TEST(Snf, SparseEngineOnStructuredInput) {
  // block of a cyclic group ring relation: translates of 1 + g + g^2 in Z[C_6]
  IntMatrix a(0, 6, IntMatrix::Storage::sparse);
  for (std::size_t s = 0; s < 6; ++s) a.append_row(SparseVec{{s, 1}, {(s + 2) % 6, 1}, {(s + 4) % 6, 1}});
  EXPECT_EQ(cokernel(a, 6), AbGroup::free(4));
  EXPECT_EQ(invariant_factors(a).nonzero, minors_oracle(a));
}

TEST(Snf, LargeInputPassesModularVerification) {
  std::mt19937_64 rng(7);
  const std::size_t n = 520;
  IntMatrix a(n, n, IntMatrix::Storage::sparse);
  for (std::size_t i = 0; i < n; ++i) {
    a.set(i, i, (i % 97 == 0) ? 6 : 1);
    a.set(i, (i + 1 + rng() % 5) % n, static_cast<long>(rng() % 3));
  }
  auto f = invariant_factors(a);
  EXPECT_EQ(f.rank(), modp::rank(a, modp::large_primes()[5]));
}

TEST(Cokernel, Examples) {
  EXPECT_EQ(cokernel(IntMatrix{{1, 1}, {1, -1}}, 2), AbGroup::cyclic(2));
  EXPECT_EQ(cokernel(IntMatrix{{2, 0}, {0, 3}}, 2), AbGroup::cyclic(6));
  EXPECT_EQ(cokernel(IntMatrix(0, 3), 3), AbGroup::free(3));
  EXPECT_EQ(cokernel(IntMatrix{{2, 0}, {0, 0}}, 2).to_string(), "Z/2 x Z");
}

TEST(Cokernel, InvariantUnderUnimodularRowOps) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 60; ++t) {
    std::size_t r = 1 + rng() % 6, c = 1 + rng() % 6;
    auto a = random_matrix(rng, r, c, -5, 5);
    auto g = cokernel(a, c);
    auto u = IntMatrix::identity(r);
    for (int k = 0; k < 8 && r > 1; ++k) {
      std::size_t i = rng() % r, j = rng() % r;
      if (i == j) continue;
      long q = static_cast<long>(rng() % 7) - 3;
      for (std::size_t col = 0; col < r; ++col) u.set(i, col, u.at(i, col) + q * u.at(j, col));
    }
    EXPECT_EQ(cokernel(u * a, c), g);
  }
}

TEST(RationalKernel, Examples) {
  EXPECT_EQ(rational_kernel(IntMatrix{{1, -1}}), (IntMatrix{{1, 1}}));
  EXPECT_EQ(rational_kernel(IntMatrix{{2, 4}}), (IntMatrix{{2, -1}}));
}

TEST(RationalKernel, RandomKernelsAreSaturated) {
  std::mt19937_64 rng(314);
  for (int t = 0; t < 60; ++t) {
    std::size_t r = 1 + rng() % 5, c = 2 + rng() % 6;
    // low rank and non-unit gcds make saturation matter
    auto a = random_matrix(rng, r, 2, -4, 4) * random_matrix(rng, 2, c, -4, 4);
    auto k = rational_kernel(a);
    std::size_t rk = modp::rank(a, modp::large_primes()[0]);
    EXPECT_EQ(k.rows(), c - rk);
    EXPECT_TRUE((a * k.transposed()).is_zero());
    // saturated iff Z^c / K is torsion free
    EXPECT_TRUE(cokernel(k, c).is_finite() == (k.rows() == c));
    EXPECT_EQ(cokernel(k, c).torsion(), AbGroup());
  }
}

TEST(Subquotient, ExampleAndError) {
  auto k = IntMatrix::identity(2);
  EXPECT_EQ(subquotient_torsion(k, IntMatrix{{1, 1}, {1, -1}}), AbGroup::cyclic(2));
  EXPECT_THROW(
      {
        try {
          subquotient_torsion(IntMatrix{{2, 0}, {0, 2}}, IntMatrix{{1, 1}});
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), Errc::not_sub_lattice);
          throw;
        }
      },
      Error);
}

TEST(Subquotient, FullLatticeReproducesCokernel) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 60; ++t) {
    std::size_t r = 1 + rng() % 6, c = 1 + rng() % 6;
    auto u = random_matrix(rng, r, c, -5, 5);
    EXPECT_EQ(subquotient_torsion(IntMatrix::identity(c), u), cokernel(u, c));
  }
}

TEST(Subquotient, KernelOfMapModuloImage) {
  // K = kernel of (x,y,z) -> x+y+z, U = 2K plus (1,-1,0): K/U = Z/2
  auto k = rational_kernel(IntMatrix{{1, 1, 1}});
  IntMatrix u = {{2, -2, 0}, {0, 2, -2}, {1, -1, 0}};
  EXPECT_EQ(subquotient_torsion(k, u), AbGroup::cyclic(2));
}

TEST(AbDiscover, KleinFourFromInvolutions) {
  // (Z/2)^2 as pairs of bits under xor
  auto d = ab_discover<unsigned>(Int(4), [](unsigned a, unsigned b) { return a ^ b; }, {1u, 2u}, 0u);
  EXPECT_EQ(d.group, AbGroup::from_diagonal({2, 2}));
  std::set<std::vector<long>> logs;
  for (auto& [e, l] : d.dlog) logs.insert(l);
  EXPECT_EQ(logs.size(), 4u);
}

TEST(AbDiscover, CyclicUnitsAndInsufficientGenerators) {
  // (Z/7)^x generated by 3
  auto mul = [](long a, long b) { return a * b % 7; };
  auto d = ab_discover<long>(Int(6), mul, {3L}, 1L);
  EXPECT_EQ(d.group, AbGroup::cyclic(6));
  // dlog is a homomorphism
  for (long a = 1; a < 7; ++a)
    for (long b = 1; b < 7; ++b) EXPECT_EQ((d.dlog[a][0] + d.dlog[b][0]) % 6, d.dlog[mul(a, b)][0]);
  try {
    ab_discover<long>(Int(6), mul, {2L}, 1L);
    FAIL() << "expected GeneratorsInsufficient";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::generators_insufficient);
  }
}

TEST(AbDiscover, RandomProductsOfCyclicGroups) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 30; ++t) {
    std::vector<Int> mods;
    std::size_t k = 1 + rng() % 3;
    for (std::size_t i = 0; i < k; ++i) mods.emplace_back(static_cast<long>(1 + rng() % 8));
    FiniteAbGroup G(AbGroup::from_diagonal(mods));
    // redundant random generators of the whole group
    std::vector<Elt> gens;
    for (std::size_t i = 0; i < G.ngens(); ++i) {
      std::vector<long> c(G.ngens(), 0);
      c[i] = 1;
      gens.push_back(G.encode(c));
    }
    gens.push_back(static_cast<Elt>(rng() % G.order()));
    std::shuffle(gens.begin(), gens.end(), rng);
    auto d = ab_discover<Elt>(Int(static_cast<unsigned long>(G.order())), [&G](Elt a, Elt b) { return G.add(a, b); },
                              gens, G.identity());
    EXPECT_EQ(d.group, G.structure());
  }
}

TEST(PresentedGroup, CanonicalAndLiftAreInverse) {
  IntMatrix rel = {{4, 2, 0}, {0, 6, 3}, {2, 0, 8}};
  auto p = PresentedGroup::from_relations(3, rel);
  EXPECT_EQ(p.group, cokernel(rel, 3));
  FiniteAbGroup G(p.group);
  for (Elt e = 0; e < G.order(); ++e) EXPECT_EQ(G.encode(p.canonical(p.lift(G.decode_int(e)))), e);
  for (std::size_t i = 0; i < rel.rows(); ++i) EXPECT_EQ(G.encode(p.canonical(rel.row(i))), G.identity());
}

TEST(AbHom, WellDefinedness) {
  AbHom ok{AbGroup::cyclic(4), AbGroup::cyclic(2), IntMatrix{{1}}};
  EXPECT_TRUE(ok.is_well_defined());
  AbHom bad{AbGroup::cyclic(2), AbGroup::cyclic(4), IntMatrix{{1}}};
  EXPECT_FALSE(bad.is_well_defined());
  AbHom good{AbGroup::cyclic(2), AbGroup::cyclic(4), IntMatrix{{2}}};
  EXPECT_TRUE(good.is_well_defined());
}

TEST(LocalDivisors, MatchInvariantFactorValuations) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> entry(-6, 6), dim(1, 7);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t r = dim(rng), c = dim(rng);
    IntMatrix A(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) A.set(i, j, Int(trial % 3 == 0 ? 2 * entry(rng) : entry(rng)));
    auto f = invariant_factors(A);
    for (modp::u64 p : {2, 3}) {
      const unsigned k = 3;
      auto L = modp::local_divisors(A.sparse_rows(), c, p, k);
      std::vector<std::size_t> want(k, 0);
      std::size_t zeros = c - f.rank();
      for (const auto& d : f.nonzero) {
        unsigned v = static_cast<unsigned>(mpz_scan1(d.get_mpz_t(), 0));
        if (p == 3) {
          v = 0;
          Int x = d;
          while (mpz_divisible_ui_p(x.get_mpz_t(), 3)) {
            x /= 3;
            ++v;
          }
        }
        if (v < k)
          ++want[v];
        else
          ++zeros;
      }
      EXPECT_EQ(L.count, want) << trial;
      EXPECT_EQ(L.zeros, zeros) << trial;
    }
  }
}
