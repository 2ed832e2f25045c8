#pragma once

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "ordist/groupring.hpp"

namespace ordist {

struct GeneratorRef {
  Level level;
  Elt sigma = 0;
};

/* ramified: sigma - s(K_{up^e}/K_u) lift, for p | u.
   unramified: (1 - Frob_p^-1) sigma - s(K_{up^e}/K_u) lift, for p not dividing u. */
enum class RelationKind { ramified, unramified };

struct RelationRow {
  Level u;
  std::size_t prime = 0;  // index into the primes of m
  int step = 1;           // e
  RelationKind kind = RelationKind::unramified;
  Elt sigma = 0;
};

/* Delta_m, the free group on the disjoint union of the G_n for n | m, and the
   relation subgroup U(m). Generators are grouped in blocks by level, blocks in
   divisor order, elements in index order inside a block. */
class DeltaPresentation {
 public:
  DeltaPresentation(const QuadField& K, const Modulus& m, std::uint64_t bound = kResidueBound)
      : tower_(std::make_shared<RayClassTower>(K, m, bound)) {
    levels_ = tower_->divisors();
    std::size_t off = 0;
    for (auto& e : levels_) {
      offsets_.emplace(e, off);
      starts_.push_back(off);
      off += tower_->group(e).order();
    }
    count_ = off;
  }

  const RayClassTower& tower() const { return *tower_; }
  const QuadField& field() const { return tower_->field(); }
  const Modulus& modulus() const { return tower_->modulus(); }
  const std::vector<Level>& levels() const { return levels_; }
  std::size_t num_generators() const { return count_; }

  std::size_t offset(const Level& e) const {
    auto it = offsets_.find(e);
    if (it == offsets_.end()) throw Error(Errc::not_divisor, "level is not a divisor of " + modulus().spec());
    return it->second;
  }
  std::size_t index(const Level& e, Elt sigma) const { return offset(e) + sigma; }

  GeneratorRef generator(std::size_t k) const {
    if (k >= count_) throw Error(Errc::invalid_argument, "generator index out of range");
    std::size_t b = static_cast<std::size_t>(std::upper_bound(starts_.begin(), starts_.end(), k) - starts_.begin()) - 1;
    return {levels_[b], static_cast<Elt>(k - starts_[b])};
  }

  const IntMatrix& relations() const { return relations_; }
  const std::vector<RelationRow>& relation_rows() const { return rows_; }

 private:
  friend DeltaPresentation build_presentation(const QuadField&, const Modulus&, std::uint64_t, std::optional<std::uint64_t>);

  std::shared_ptr<RayClassTower> tower_;
  std::vector<Level> levels_;
  std::map<Level, std::size_t> offsets_;
  std::vector<std::size_t> starts_;
  std::size_t count_ = 0;
  IntMatrix relations_;
  std::vector<RelationRow> rows_;
};

/* With lift_seed set, each trace term is expanded from a random lift of sigma
   translated by the kernel instead of read off the preimage table. */
inline DeltaPresentation build_presentation(const QuadField& K, const Modulus& m, std::uint64_t bound = kResidueBound,
                                            std::optional<std::uint64_t> lift_seed = std::nullopt) {
  DeltaPresentation P(K, m, bound);
  const auto& T = P.tower();
  const Level top = T.top_level();
  std::mt19937_64 rng(lift_seed.value_or(0));
  P.relations_ = IntMatrix(0, P.num_generators(), IntMatrix::Storage::sparse);

  for (const auto& u : P.levels_) {
    const auto& Gu = T.group(u).elements();
    for (std::size_t i = 0; i < top.size(); ++i) {
      for (int e = 1; u[i] + e <= top[i]; ++e) {
        Level up = u;
        up[i] += e;
        const auto& table = T.transition(up, u);
        std::vector<std::vector<Elt>> pre(Gu.order());
        for (std::size_t t = 0; t < table.size(); ++t) pre[table[t]].push_back(static_cast<Elt>(t));
        const auto& Gup = T.group(up).elements();
        const RelationKind kind = u[i] > 0 ? RelationKind::ramified : RelationKind::unramified;
        Elt lambda = kind == RelationKind::unramified ? T.frobenius(u, i).representative : Gu.identity();

        for (std::size_t s = 0; s < Gu.order(); ++s) {
          const Elt sigma = static_cast<Elt>(s);
          std::map<std::size_t, Int> acc;
          acc[P.index(u, sigma)] += 1;
          if (kind == RelationKind::unramified) acc[P.index(u, Gu.sub(sigma, lambda))] -= 1;
          if (lift_seed) {
            Elt lift = pre[sigma][rng() % pre[sigma].size()];
            for (Elt k : pre[Gu.identity()]) acc[P.index(up, Gup.add(lift, k))] -= 1;
          } else {
            for (Elt t : pre[sigma]) acc[P.index(up, t)] -= 1;
          }
          SparseVec row;
          for (auto& [c, v] : acc)
            if (v != 0) row.emplace_back(c, v);
          P.relations_.append_row(std::move(row));
          P.rows_.push_back({u, i, e, kind, sigma});
        }
      }
    }
  }
  return P;
}

}  // namespace ordist
