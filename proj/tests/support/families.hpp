#pragma once

// Constructed chunked families used by unit, CLI and acceptance tests.

#include "proofdoor/chunking.hpp"
#include "proofdoor/cnf.hpp"

#include <utility>
#include <vector>

namespace proofdoor::testing {

struct Chunked {
  CnfFormula formula;
  ChunkSpec spec;
};

// (x0)(¬x0∨x1)...(¬x_{n-1}∨x_n)(¬x_n) with x_i = i+1. Chunk 0 holds the
// first two clauses, then one implication per chunk, then (¬x_n).
inline Chunked simple_chain(int n) {
  std::vector<Clause> cs{Clause{1}};
  for (int i = 0; i < n; ++i)
    cs.push_back(Clause{-(i + 1), i + 2});
  cs.push_back(Clause{-(n + 1)});
  std::vector<std::pair<std::size_t, std::size_t>> ranges{{0, 2}};
  for (std::size_t c = 2; c < cs.size(); ++c)
    ranges.emplace_back(c, c + 1);
  return {CnfFormula(static_cast<Var>(n + 1), std::move(cs)),
          ChunkSpec::from_ranges(std::move(ranges))};
}

// Each step x_i → x_{i+1} goes through y_i, and y_i follows from x_i only
// after a case split on a local z_i:
//   (¬x_i∨y_i∨z_i) (¬x_i∨y_i∨¬z_i) (¬y_i∨x_{i+1}).
// Variables: x_i = 3i+1, y_i = 3i+2, z_i = 3i+3. Chunk 0 = (x0); chunk i+1 =
// step i; the last chunk also holds (¬x_n).
inline Chunked gadget_chain(int n) {
  auto x = [](int i) { return 3 * i + 1; };
  auto y = [](int i) { return 3 * i + 2; };
  auto z = [](int i) { return 3 * i + 3; };
  std::vector<Clause> cs{Clause{x(0)}};
  std::vector<std::pair<std::size_t, std::size_t>> ranges{{0, 1}};
  for (int i = 0; i < n; ++i) {
    std::size_t begin = cs.size();
    cs.push_back(Clause{-x(i), y(i), z(i)});
    cs.push_back(Clause{-x(i), y(i), -z(i)});
    cs.push_back(Clause{-y(i), x(i + 1)});
    if (i + 1 == n)
      cs.push_back(Clause{-x(n)});
    ranges.emplace_back(begin, cs.size());
  }
  return {CnfFormula(static_cast<Var>(x(n)), std::move(cs)),
          ChunkSpec::from_ranges(std::move(ranges))};
}

// Pigeonhole: `holes`+1 pigeons into `holes` holes; p(i,h) = i*holes+h+1.
inline std::vector<Clause> pigeonhole(int holes) {
  auto p = [holes](int i, int h) { return i * holes + h + 1; };
  std::vector<Clause> cs;
  for (int i = 0; i <= holes; ++i) {
    std::vector<int> c;
    for (int h = 0; h < holes; ++h)
      c.push_back(p(i, h));
    cs.push_back(Clause::from_dimacs(c));
  }
  for (int h = 0; h < holes; ++h)
    for (int i = 0; i <= holes; ++i)
      for (int j = i + 1; j <= holes; ++j)
        cs.push_back(Clause{-p(i, h), -p(j, h)});
  return cs;
}

} // namespace proofdoor::testing
