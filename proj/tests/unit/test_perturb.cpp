#include "proofdoor/errors.hpp"
#include "proofdoor/interpolation.hpp"
#include "proofdoor/perturb.hpp"
#include "proofdoor/proofdoor.hpp"
#include "proofdoor/sat.hpp"
#include "families.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

using namespace proofdoor;
using namespace proofdoor::testing;

namespace {

// A random formula chunked by contiguous clause ranges.
ChunkedFormula random_chunked(Rng &rng, std::size_t chunks) {
  std::uniform_int_distribution<std::size_t> per(1, 4);
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  std::size_t total = 0;
  for (std::size_t j = 0; j < chunks; ++j) {
    std::size_t n = per(rng);
    ranges.emplace_back(total, total + n);
    total += n;
  }
  CnfFormula f = random_cnf(rng, 8, total, 1, 3);
  return build_chunked(f, ChunkSpec::from_ranges(ranges));
}

bool is_permutation_of_range(const std::vector<std::size_t> &p) {
  std::vector<std::size_t> s = p;
  std::sort(s.begin(), s.end());
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] != i)
      return false;
  return true;
}

// First seed whose chunk order for k chunks equals want.
std::uint64_t seed_for(std::size_t k, const std::vector<std::size_t> &want) {
  for (std::uint64_t s = 0;; ++s)
    if (seeded_permutation(k, s) == want)
      return s;
}

} // namespace

TEST(SplitMixTest, ReferenceStream) {
  // Published first outputs for seed 1234567.
  SplitMix64 r(1234567);
  EXPECT_EQ(r.next(), 6457827717110365317ULL);
  EXPECT_EQ(r.next(), 3203168211198807973ULL);
  EXPECT_EQ(r.next(), 9817491932198370423ULL);
}

TEST(SplitMixTest, BelowStaysInRange) {
  SplitMix64 r(9);
  for (std::uint64_t bound : {1ULL, 2ULL, 3ULL, 7ULL, 1000ULL})
    for (int i = 0; i < 200; ++i)
      EXPECT_LT(r.below(bound), bound);
}

TEST(SeededPermutationTest, BijectionAndDeterminism) {
  for (std::size_t n : {0u, 1u, 2u, 5u, 40u})
    for (std::uint64_t s = 0; s < 20; ++s) {
      auto p = seeded_permutation(n, s);
      EXPECT_EQ(p.size(), n);
      EXPECT_TRUE(is_permutation_of_range(p));
      EXPECT_EQ(p, seeded_permutation(n, s));
    }
}

TEST(SeededPermutationTest, AllOrdersReachable) {
  std::set<std::vector<std::size_t>> seen;
  for (std::uint64_t s = 0; s < 2000; ++s)
    seen.insert(seeded_permutation(3, s));
  EXPECT_EQ(seen.size(), 6u);
}

TEST(ScrambleByIterationTest, IdentitySeedKeepsFormula) {
  Chunked ch = simple_chain(3);
  ChunkedFormula cf = build_chunked(ch.formula, ch.spec);
  std::vector<std::size_t> id(cf.num_chunks());
  std::iota(id.begin(), id.end(), 0);
  ScrambleResult r = scramble_by_iteration(cf, seed_for(id.size(), id));
  EXPECT_EQ(r.formula, ch.formula);
}

TEST(ScrambleByIterationTest, TwoChunkSwapReverses) {
  CnfFormula f(3, {Clause{1}, Clause{-1, 2}, Clause{-2, 3}, Clause{-3}});
  ChunkedFormula cf = build_chunked(f, ChunkSpec::from_ranges({{0, 2}, {2, 4}}));
  ScrambleResult r = scramble_by_iteration(cf, seed_for(2, {1, 0}));
  EXPECT_EQ(r.formula,
            CnfFormula(3, {Clause{-2, 3}, Clause{-3}, Clause{1}, Clause{-1, 2}}));
  EXPECT_EQ(r.record.chunk_order, (std::vector<std::size_t>{1, 0}));
  EXPECT_EQ(r.record.permutation, (std::vector<std::size_t>{2, 3, 0, 1}));
  ASSERT_TRUE(r.chunk_map.has_value());
  EXPECT_EQ(r.chunk_map->clause_chunks, (std::vector<std::size_t>{1, 1, 0, 0}));
}

TEST(ScrambleByIterationTest, ChunksStayContiguousAndOrdered) {
  Rng rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    ChunkedFormula cf = random_chunked(rng, 2 + rep % 5);
    ScrambleResult r = scramble_by_iteration(cf, rep);
    std::vector<Clause> expect;
    for (std::size_t j : r.record.chunk_order)
      for (const Clause &c : cf.chunk(j))
        expect.push_back(c);
    EXPECT_EQ(r.formula.clauses(), expect);
    EXPECT_TRUE(is_permutation_of_range(r.record.chunk_order));
  }
}

TEST(ScrambleByIterationTest, ChunkMapRebuildsSameChunks) {
  Rng rng(6);
  for (int rep = 0; rep < 50; ++rep) {
    ChunkedFormula cf = random_chunked(rng, 2 + rep % 4);
    ScrambleResult r = scramble_by_iteration(cf, 1000 + rep);
    ChunkSpec back = parse_chunk_spec(chunk_spec_to_json(*r.chunk_map));
    ChunkedFormula again = build_chunked(r.formula, back);
    ASSERT_EQ(again.num_chunks(), cf.num_chunks());
    for (std::size_t j = 0; j < cf.num_chunks(); ++j)
      EXPECT_EQ(again.chunk(j), cf.chunk(j));
  }
}

TEST(ScrambleByIterationTest, ProofdoorInvariantUnderScramble) {
  Chunked ch = simple_chain(4);
  ChunkedFormula cf = build_chunked(ch.formula, ch.spec);
  ScrambleResult r = scramble_by_iteration(cf, 77);
  ChunkedFormula scf = build_chunked(r.formula, *r.chunk_map);
  Proofdoor a = strongest_proofdoor(cf), b = strongest_proofdoor(scf);
  ASSERT_EQ(a.interpolants.size(), b.interpolants.size());
  for (std::size_t j = 0; j < a.interpolants.size(); ++j)
    EXPECT_TRUE(same_clause_multiset(a.interpolants[j], b.interpolants[j]));
}

TEST(ScrambleByClauseTest, IdentityAndSingleClause) {
  CnfFormula f(3, {Clause{1, 2}, Clause{-1}, Clause{3, -2}});
  std::vector<std::size_t> id{0, 1, 2};
  EXPECT_EQ(scramble_by_clause(f, seed_for(3, id)).formula, f);
  CnfFormula one(2, {Clause{2, -1}});
  for (std::uint64_t s = 0; s < 10; ++s)
    EXPECT_EQ(scramble_by_clause(one, s).formula, one);
  EXPECT_TRUE(scramble_by_clause(CnfFormula(), 3).formula.empty());
  EXPECT_FALSE(scramble_by_clause(f, 3).chunk_map.has_value());
}

TEST(ScrambleByClauseTest, LiteralOrderUntouched) {
  Rng rng(8);
  for (int rep = 0; rep < 50; ++rep) {
    CnfFormula f = random_cnf(rng, 6, 10, 1, 4);
    ScrambleResult r = scramble_by_clause(f, rep);
    for (std::size_t p = 0; p < f.size(); ++p)
      EXPECT_EQ(r.formula[p].lits(), f[r.record.permutation[p]].lits());
  }
}

TEST(ScrambleProperties, MultisetPreservedAndRoundTrip) {
  Rng rng(9);
  for (int rep = 0; rep < 200; ++rep) {
    ChunkedFormula cf = random_chunked(rng, 2 + rep % 6);
    for (ScrambleResult r : {scramble_by_iteration(cf, rep),
                             scramble_by_clause(cf.base(), rep)}) {
      EXPECT_TRUE(same_clause_multiset(r.formula, cf.base()));
      EXPECT_EQ(r.formula.num_vars(), cf.base().num_vars());
      EXPECT_EQ(unscramble(r.formula, r.record), cf.base());
    }
  }
}

TEST(ScrambleProperties, SatisfiabilityPreserved) {
  Rng rng(10);
  for (int rep = 0; rep < 60; ++rep) {
    ChunkedFormula cf = random_chunked(rng, 3);
    bool sat = brute_sat(cf.base());
    for (const CnfFormula &g : {scramble_by_iteration(cf, rep).formula,
                                scramble_by_clause(cf.base(), rep).formula}) {
      EXPECT_EQ(brute_sat(g), sat);
      EXPECT_EQ(is_unsat(g), !sat);
    }
  }
}

TEST(ScrambleProperties, Deterministic) {
  Rng rng(11);
  ChunkedFormula cf = random_chunked(rng, 5);
  EXPECT_EQ(to_dimacs(scramble_by_iteration(cf, 42).formula),
            to_dimacs(scramble_by_iteration(cf, 42).formula));
  EXPECT_EQ(to_dimacs(scramble_by_clause(cf.base(), 42).formula),
            to_dimacs(scramble_by_clause(cf.base(), 42).formula));
}

TEST(UnscrambleTest, Errors) {
  CnfFormula f(2, {Clause{1}, Clause{2}, Clause{-1, -2}});
  ScrambleRecord rec;
  rec.permutation = {0, 1};
  EXPECT_THROW(unscramble(f, rec), ContractError);
  rec.permutation = {0, 1, 1};
  EXPECT_THROW(unscramble(f, rec), ContractError);
  rec.permutation = {0, 1, 3};
  EXPECT_THROW(unscramble(f, rec), ContractError);
  rec.permutation = {0, 1, 2};
  EXPECT_EQ(unscramble(f, rec), f);
}

TEST(ScrambleRecordTest, JsonRoundTrip) {
  Chunked ch = simple_chain(3);
  ChunkedFormula cf = build_chunked(ch.formula, ch.spec);
  ScrambleRecord rec = scramble_by_iteration(cf, 0xfedcba9876543210ULL).record;
  ScrambleRecord back = parse_scramble_record(scramble_record_to_json(rec));
  EXPECT_EQ(back.kind, ScrambleKind::ByIteration);
  EXPECT_EQ(back.seed, 0xfedcba9876543210ULL);
  EXPECT_EQ(back.permutation, rec.permutation);
  EXPECT_EQ(back.chunk_order, rec.chunk_order);
  EXPECT_THROW(parse_scramble_record("{\"kind\":\"by-row\",\"seed\":\"1\","
                                     "\"permutation\":[]}"),
               InputError);
  EXPECT_THROW(parse_scramble_record("{\"kind\":\"by-clause\"}"), InputError);
  EXPECT_THROW(parse_scramble_record("not json"), InputError);
}

TEST(ChunkListSpecTest, Validation) {
  CnfFormula f(2, {Clause{1}, Clause{2}, Clause{-1, -2}});
  EXPECT_NO_THROW(build_chunked(f, ChunkSpec::from_clause_chunks({1, 0, 1})));
  EXPECT_THROW(build_chunked(f, ChunkSpec::from_clause_chunks({0, 1})),
               InputError);
  EXPECT_THROW(build_chunked(f, ChunkSpec::from_clause_chunks({0, 2, 2})),
               InputError);
  EXPECT_THROW(build_chunked(f, ChunkSpec::from_clause_chunks({0, 0, 0})),
               InputError);
}
