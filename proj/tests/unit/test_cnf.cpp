#include "proofdoor/cnf.hpp"
#include "proofdoor/errors.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace proofdoor;
using proofdoor::testing::Rng;

namespace {

std::vector<int> dimacs(const Clause &c) {
  std::vector<int> out;
  for (Lit l : c)
    out.push_back(l.to_dimacs());
  return out;
}

} // namespace

//===----------------------------------------------------------------------===//
// Literals and clauses
//===----------------------------------------------------------------------===//

TEST(LitTest, DimacsRoundTripAndNegation) {
  for (int v : {1, -1, 7, -42}) {
    Lit l = Lit::from_dimacs(v);
    EXPECT_EQ(l.to_dimacs(), v);
    EXPECT_EQ(~~l, l);
    EXPECT_NE(~l, l);
    EXPECT_EQ(l.var(), static_cast<Var>(std::abs(v)));
  }
  EXPECT_THROW(Lit::from_dimacs(0), ContractError);
}

TEST(ClauseTest, NormalizesDuplicatesAndKeepsTautologies) {
  Clause c{1, 2, 1, -3, 2};
  EXPECT_EQ(dimacs(c), (std::vector<int>{1, 2, -3}));
  EXPECT_FALSE(c.is_tautology());
  Clause t{4, -4};
  EXPECT_TRUE(t.is_tautology());
  EXPECT_EQ(t.size(), 2u);
  EXPECT_TRUE(Clause{}.empty());
}

//===----------------------------------------------------------------------===//
// DIMACS
//===----------------------------------------------------------------------===//

TEST(DimacsTest, ParsesSimpleFormula) {
  CnfFormula f = parse_dimacs("p cnf 2 2\n1 0\n-1 2 0\n");
  EXPECT_EQ(f.num_vars(), 2u);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(dimacs(f[0]), (std::vector<int>{1}));
  EXPECT_EQ(dimacs(f[1]), (std::vector<int>{-1, 2}));
}

TEST(DimacsTest, CollapsesDuplicateLiterals) {
  CnfFormula f = parse_dimacs("p cnf 1 1\n1 1 0\n");
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(dimacs(f[0]), (std::vector<int>{1}));
}

TEST(DimacsTest, ClauseCountMismatchIsAnError) {
  try {
    parse_dimacs("p cnf 1 2\n1 0\n");
    FAIL() << "expected InputError";
  } catch (const InputError &e) {
    EXPECT_NE(std::string(e.what()).find("clause count mismatch"),
              std::string::npos);
    EXPECT_GT(e.line(), 0u);
  }
}

TEST(DimacsTest, ReportsErrorsWithLineNumbers) {
  try {
    parse_dimacs("c hello\np cnf 2 1\n1 3 0\n");
    FAIL();
  } catch (const InputError &e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_dimacs("p cnf x 1\n1 0\n"), InputError);
  EXPECT_THROW(parse_dimacs("1 0\n"), InputError);
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 2\n"), InputError);
  EXPECT_THROW(parse_dimacs(""), InputError);
}

TEST(DimacsTest, ClausesMaySpanLines) {
  CnfFormula f = parse_dimacs("p cnf 3 2\n1 2\n3 0 -1\n0\n");
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(dimacs(f[0]), (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(dimacs(f[1]), (std::vector<int>{-1}));
}

TEST(DimacsTest, ToleratesPercentAndTrailingGarbageWithWarning) {
  std::vector<std::string> warnings;
  auto sink = [&](const std::string &w) { warnings.push_back(w); };
  CnfFormula f = parse_dimacs("p cnf 2 1\n1 2 0\n%\n0\n", sink);
  EXPECT_EQ(f.size(), 1u);
  EXPECT_EQ(warnings.size(), 1u);

  warnings.clear();
  f = parse_dimacs("p cnf 2 1\n1 2 0\ngarbage here\n", sink);
  EXPECT_EQ(f.size(), 1u);
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(DimacsTest, EmissionIsDeterministicAndKeepsOrder) {
  CnfFormula f(3, {Clause{3, -1}, Clause{2}, Clause{}});
  EXPECT_EQ(to_dimacs(f), "p cnf 3 3\n3 -1 0\n2 0\n0\n");
}

TEST(DimacsTest, RoundTripPreservesClauseMultiset) {
  Rng rng(11);
  for (int round = 0; round < 200; ++round) {
    CnfFormula f = proofdoor::testing::random_cnf(rng, 1 + rng() % 12,
                                                  rng() % 25, 0, 5);
    CnfFormula g = parse_dimacs(to_dimacs(f));
    EXPECT_TRUE(same_clause_multiset(f, g));
    EXPECT_EQ(f, g);
  }
}

TEST(CvrTest, Ratios) {
  std::vector<Clause> ten(10, Clause{1});
  EXPECT_DOUBLE_EQ(cvr(CnfFormula(5, ten)), 2.0);
  EXPECT_DOUBLE_EQ(cvr(CnfFormula(3, {})), 0.0);
  std::vector<Clause> seven(7, Clause{1, 2});
  EXPECT_DOUBLE_EQ(cvr(CnfFormula(2, seven)), 3.5);
  EXPECT_THROW(cvr(CnfFormula(0, {})), ContractError);
}

//===----------------------------------------------------------------------===//
// Unit propagation
//===----------------------------------------------------------------------===//

TEST(UnitPropagateTest, UnitChain) {
  CnfFormula f(2, {Clause{1}, Clause{-1, 2}});
  PropagationResult r = unit_propagate(f, {});
  EXPECT_FALSE(r.conflict);
  ASSERT_EQ(r.implied.size(), 2u);
  EXPECT_EQ(r.implied[0].to_dimacs(), 1);
  EXPECT_EQ(r.implied[1].to_dimacs(), 2);
  EXPECT_EQ(r.final.value(Var(2)), LBool::True);
}

TEST(UnitPropagateTest, Contradiction) {
  CnfFormula f(1, {Clause{1}, Clause{-1}});
  EXPECT_TRUE(unit_propagate(f, {}).conflict);
}

TEST(UnitPropagateTest, NoUnit) {
  CnfFormula f(2, {Clause{1, 2}});
  PropagationResult r = unit_propagate(f, {});
  EXPECT_FALSE(r.conflict);
  EXPECT_TRUE(r.implied.empty());
}

TEST(UnitPropagateTest, ComplementaryAssumptionsConflict) {
  CnfFormula f(2, {Clause{1, 2}});
  std::vector<Lit> a{Lit::from_dimacs(1), Lit::from_dimacs(-1)};
  EXPECT_TRUE(unit_propagate(f, a).conflict);
}

TEST(UnitPropagateTest, EmptyClauseConflicts) {
  CnfFormula f(1, {Clause{1}, Clause{}});
  EXPECT_TRUE(unit_propagate(f, {}).conflict);
}

TEST(UnitPropagateTest, EngineIsReusable) {
  CnfFormula f(3, {Clause{-1, 2}, Clause{-2, 3}});
  PropagationEngine e(f);
  std::vector<Lit> a{Lit::from_dimacs(1)};
  EXPECT_TRUE(e.forces_or_conflicts(a, Lit::from_dimacs(3)));
  EXPECT_FALSE(e.forces_or_conflicts({}, Lit::from_dimacs(3)));
  std::vector<Lit> b{Lit::from_dimacs(1), Lit::from_dimacs(-3)};
  EXPECT_TRUE(e.conflicts(b));
  EXPECT_FALSE(e.conflicts(a));
}

// Fixpoint and conflict flag agree with a naive propagator run in shuffled
// clause orders.
TEST(UnitPropagateTest, ConfluentAcrossPropagationOrders) {
  Rng rng(5);
  for (int round = 0; round < 500; ++round) {
    Var n = 2 + rng() % 8;
    CnfFormula f =
        proofdoor::testing::random_cnf(rng, n, 1 + rng() % 14, 1, 3);
    std::vector<Lit> assumptions;
    for (int k = 0, m = rng() % 3; k < m; ++k)
      assumptions.emplace_back(1 + rng() % n, rng() % 2);
    PropagationResult fast = unit_propagate(f, assumptions);
    for (int perm = 0; perm < 4; ++perm) {
      auto slow = proofdoor::testing::naive_unit_propagate(f, assumptions, &rng);
      ASSERT_EQ(fast.conflict, slow.conflict) << to_dimacs(f);
      if (fast.conflict)
        continue;
      for (Var v = 1; v <= n; ++v) {
        int expect = slow.value[v];
        LBool got = fast.final.value(v);
        ASSERT_EQ(expect, static_cast<int>(got)) << "var " << v;
      }
    }
  }
}

// Adding assumptions never loses a derived literal.
TEST(UnitPropagateTest, MonotoneUnderMoreAssumptions) {
  Rng rng(9);
  for (int round = 0; round < 500; ++round) {
    Var n = 2 + rng() % 8;
    CnfFormula f =
        proofdoor::testing::random_cnf(rng, n, 1 + rng() % 14, 1, 3);
    std::vector<Lit> small;
    for (int k = 0, m = rng() % 3; k < m; ++k)
      small.emplace_back(1 + rng() % n, rng() % 2);
    std::vector<Lit> big = small;
    for (int k = 0, m = 1 + rng() % 3; k < m; ++k)
      big.emplace_back(1 + rng() % n, rng() % 2);
    PropagationResult r1 = unit_propagate(f, small);
    PropagationResult r2 = unit_propagate(f, big);
    if (r1.conflict) {
      EXPECT_TRUE(r2.conflict);
      continue;
    }
    if (r2.conflict)
      continue;
    for (Lit l : r1.implied)
      EXPECT_EQ(r2.final.value(l), LBool::True);
  }
}
