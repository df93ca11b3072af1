#pragma once

#include "proofdoor/chunking.hpp"
#include "proofdoor/cnf.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace proofdoor {

// Portable 64-bit generator; equal seeds give equal streams everywhere.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  // Uniform in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound);

private:
  std::uint64_t state_;
};

// Fisher-Yates shuffle of 0..n-1 driven by SplitMix64(seed).
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

enum class ScrambleKind { ByIteration, ByClause };

const char *to_string(ScrambleKind k);
ScrambleKind parse_scramble_kind(const std::string &s);

struct ScrambleRecord {
  ScrambleKind kind = ScrambleKind::ByClause;
  std::uint64_t seed = 0;
  // Clause p of the scrambled formula is clause permutation[p] of the input.
  std::vector<std::size_t> permutation;
  // By-iteration only: position p holds original chunk chunk_order[p].
  std::vector<std::size_t> chunk_order;
};

struct ScrambleResult {
  CnfFormula formula;
  ScrambleRecord record;
  // By-iteration only: original chunk index of every scrambled clause, so
  // the scrambled file rebuilds the same chunks in the same order.
  std::optional<ChunkSpec> chunk_map;
};

// Concatenates the chunks in seeded order; clause order inside each chunk is
// kept. Clauses come from cf.base().
ScrambleResult scramble_by_iteration(const ChunkedFormula &cf,
                                     std::uint64_t seed);
// Permutes all clauses; literal order inside clauses is untouched.
ScrambleResult scramble_by_clause(const CnfFormula &f, std::uint64_t seed);

// Inverse permutation. Throws ContractError when the record does not fit f
// or is not a bijection.
CnfFormula unscramble(const CnfFormula &f, const ScrambleRecord &rec);

// {"kind":"by-clause","seed":"123","permutation":[...],"chunk_order":[...]}.
// The seed is a decimal string so every 64-bit value survives JSON readers.
std::string scramble_record_to_json(const ScrambleRecord &rec);
ScrambleRecord parse_scramble_record(const std::string &json_text);

} // namespace proofdoor
