#pragma once

// Clause store with occurrence lists and subsumption, shared by the
// elimination, consensus and distribution routines. Clauses are kept as
// literal vectors sorted by code.

#include "proofdoor/cnf.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace proofdoor::detail {

using SortedLits = std::vector<Lit>;

SortedLits sorted_lits(const Clause &c);
bool sorted_is_tautology(const SortedLits &c);
// Resolvent of p (contains +v) and n (contains -v); nullopt if tautological.
std::optional<SortedLits> resolve_sorted(const SortedLits &p,
                                         const SortedLits &n, Var v);
// Union of two sorted clauses; nullopt if tautological.
std::optional<SortedLits> union_sorted(const SortedLits &a,
                                       const SortedLits &b);
bool sorted_subset(const SortedLits &small, const SortedLits &big);

class ClauseDb {
public:
  explicit ClauseDb(std::size_t max_clauses) : max_clauses_(max_clauses) {}

  // Adds c unless it is a tautology or subsumed by a live clause; live
  // clauses subsumed by c are removed. Returns whether c was added. Throws
  // BlowupError once the live count passes the cap.
  bool add(SortedLits c);
  void remove(std::size_t idx);

  bool alive(std::size_t idx) const { return alive_[idx]; }
  const SortedLits &clause(std::size_t idx) const { return clauses_[idx]; }
  const std::vector<std::size_t> &occurrences(Lit l) const;
  std::size_t occurrence_count(Var v) const;
  std::size_t live() const { return live_; }
  bool has_empty() const { return has_empty_; }

  // Live clauses in insertion order.
  std::vector<Clause> live_clauses() const;

private:
  static std::uint64_t signature(const SortedLits &c);
  void ensure(Lit l);
  bool subsumed(const SortedLits &c, std::uint64_t sig) const;
  void remove_subsumed_by(const SortedLits &c, std::uint64_t sig);

  std::size_t max_clauses_;
  std::vector<SortedLits> clauses_;
  std::vector<std::uint64_t> sigs_;
  std::vector<bool> alive_;
  std::vector<std::vector<std::size_t>> occ_; // by literal code
  std::size_t live_ = 0;
  bool has_empty_ = false;
  static const std::vector<std::size_t> kNone;
};

} // namespace proofdoor::detail
