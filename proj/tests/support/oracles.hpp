#pragma once

// Brute-force oracles for the test suites. Nothing here calls into the
// solver, the elimination engine, or the propagation engine: every answer
// comes from explicit enumeration over assignments.

#include "proofdoor/cnf.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace proofdoor::testing {

using Rng = std::mt19937_64;

inline CnfFormula random_cnf(Rng &rng, Var num_vars, std::size_t num_clauses,
                             std::size_t min_len, std::size_t max_len) {
  std::uniform_int_distribution<Var> var(1, num_vars);
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::bernoulli_distribution sign(0.5);
  std::vector<Clause> clauses;
  for (std::size_t i = 0; i < num_clauses; ++i) {
    std::vector<Lit> lits;
    std::size_t n = len(rng);
    for (std::size_t k = 0; k < n; ++k)
      lits.emplace_back(var(rng), sign(rng));
    clauses.emplace_back(std::move(lits));
  }
  return CnfFormula(num_vars, std::move(clauses));
}

// Random clause over an explicit variable pool.
inline Clause random_clause(Rng &rng, const std::vector<Var> &pool,
                            std::size_t len) {
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::bernoulli_distribution sign(0.5);
  std::vector<Lit> lits;
  for (std::size_t k = 0; k < len; ++k)
    lits.emplace_back(pool[pick(rng)], sign(rng));
  return Clause(std::move(lits));
}

// Evaluates a clause under the assignment whose bit i gives vars[i].
inline bool eval_clause(const Clause &c, const std::vector<Var> &vars,
                        std::uint64_t bits) {
  for (Lit l : c) {
    auto it = std::find(vars.begin(), vars.end(), l.var());
    if (it == vars.end())
      continue; // unknown variable: treated as false literal
    bool value = (bits >> (it - vars.begin())) & 1u;
    if (value == l.positive())
      return true;
  }
  return false;
}

inline bool eval(const CnfFormula &f, const std::vector<Var> &vars,
                 std::uint64_t bits) {
  for (const Clause &c : f)
    if (!eval_clause(c, vars, bits))
      return false;
  return true;
}

inline std::vector<Var> union_vars(const std::vector<Var> &a,
                                   const std::vector<Var> &b) {
  std::vector<Var> out = a;
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline bool brute_sat(const CnfFormula &f) {
  auto vars = f.variables();
  for (std::uint64_t bits = 0; bits < (1ull << vars.size()); ++bits)
    if (eval(f, vars, bits))
      return true;
  return false;
}

// Truth table of (∃ everything-but-keep. f) indexed by assignments to keep.
inline std::vector<bool> projected_table(const CnfFormula &f,
                                         const std::vector<Var> &keep) {
  auto all = union_vars(f.variables(), keep);
  std::vector<bool> table(1ull << keep.size(), false);
  for (std::uint64_t bits = 0; bits < (1ull << all.size()); ++bits) {
    if (!eval(f, all, bits))
      continue;
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < keep.size(); ++i) {
      auto pos = std::find(all.begin(), all.end(), keep[i]) - all.begin();
      if ((bits >> pos) & 1u)
        key |= 1ull << i;
    }
    table[key] = true;
  }
  return table;
}

// Truth table of f over keep; f must only mention variables in keep.
inline std::vector<bool> table_over(const CnfFormula &f,
                                    const std::vector<Var> &keep) {
  std::vector<bool> table(1ull << keep.size());
  for (std::uint64_t bits = 0; bits < table.size(); ++bits)
    table[bits] = eval(f, keep, bits);
  return table;
}

// Does the model set `table` (over keep) satisfy clause c everywhere?
inline bool table_implies(const std::vector<bool> &table,
                          const std::vector<Var> &keep, const Clause &c) {
  for (std::uint64_t bits = 0; bits < table.size(); ++bits)
    if (table[bits] && !eval_clause(c, keep, bits))
      return false;
  return true;
}

// Every non-tautological, nonempty-or-empty clause over vars, by choosing for
// each variable: absent / positive / negative.
inline std::vector<Clause> all_clauses_over(const std::vector<Var> &vars) {
  std::vector<Clause> out;
  std::size_t total = 1;
  for (std::size_t i = 0; i < vars.size(); ++i)
    total *= 3;
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<Lit> lits;
    std::size_t x = code;
    for (Var v : vars) {
      std::size_t d = x % 3;
      x /= 3;
      if (d == 1)
        lits.emplace_back(v, true);
      else if (d == 2)
        lits.emplace_back(v, false);
    }
    out.emplace_back(std::move(lits));
  }
  return out;
}

// Naive unit propagation with a caller-chosen clause visiting order. Used to
// cross-check the watched-literal engine.
struct NaiveUp {
  std::vector<int> value; // 0 undef, 1 true, -1 false, indexed by var
  bool conflict = false;
};

inline NaiveUp naive_unit_propagate(const CnfFormula &f,
                                    const std::vector<Lit> &assumptions,
                                    Rng *shuffle = nullptr) {
  NaiveUp r;
  r.value.assign(f.num_vars() + 1, 0);
  auto lit_value = [&](Lit l) {
    if (l.var() >= r.value.size())
      r.value.resize(l.var() + 1, 0);
    int v = r.value[l.var()];
    return l.positive() ? v : -v;
  };
  for (Lit a : assumptions) {
    int v = lit_value(a);
    if (v == -1) {
      r.conflict = true;
      return r;
    }
    r.value[a.var()] = a.positive() ? 1 : -1;
  }
  std::vector<std::size_t> order(f.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = i;
  bool changed = true;
  while (changed) {
    changed = false;
    if (shuffle)
      std::shuffle(order.begin(), order.end(), *shuffle);
    for (std::size_t idx : order) {
      const Clause &c = f[idx];
      std::size_t unassigned = 0;
      Lit last;
      bool sat = false;
      for (Lit l : c) {
        int v = lit_value(l);
        if (v == 1) {
          sat = true;
          break;
        }
        if (v == 0) {
          ++unassigned;
          last = l;
        }
      }
      if (sat)
        continue;
      if (unassigned == 0) {
        r.conflict = true;
        return r;
      }
      if (unassigned == 1) {
        r.value[last.var()] = last.positive() ? 1 : -1;
        changed = true;
      }
    }
  }
  return r;
}

// Absorption straight from the definition, on top of the naive propagator.
inline bool naive_absorbed(const CnfFormula &f, const Clause &c) {
  if (c.empty())
    return naive_unit_propagate(f, {}).conflict;
  for (Lit keep : c) {
    std::vector<Lit> assumptions;
    for (Lit l : c)
      if (l != keep)
        assumptions.push_back(~l);
    NaiveUp r = naive_unit_propagate(f, assumptions);
    if (r.conflict)
      continue;
    int v = keep.var() < r.value.size() ? r.value[keep.var()] : 0;
    if ((keep.positive() ? v : -v) != 1)
      return false;
  }
  return true;
}

} // namespace proofdoor::testing
