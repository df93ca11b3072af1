#include "clause_db.hpp"

#include "proofdoor/errors.hpp"

#include <algorithm>

namespace proofdoor::detail {

const std::vector<std::size_t> ClauseDb::kNone;

SortedLits sorted_lits(const Clause &c) { return c.sorted(); }

bool sorted_is_tautology(const SortedLits &c) {
  for (std::size_t i = 1; i < c.size(); ++i)
    if (c[i].var() == c[i - 1].var())
      return true;
  return false;
}

std::optional<SortedLits> union_sorted(const SortedLits &a,
                                       const SortedLits &b) {
  SortedLits out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    Lit next;
    if (j == b.size() || (i < a.size() && a[i] < b[j]))
      next = a[i++];
    else if (i == a.size() || b[j] < a[i])
      next = b[j++];
    else {
      next = a[i++];
      ++j;
    }
    // Sorted by code, so x and ~x are adjacent.
    if (!out.empty() && out.back().var() == next.var())
      return std::nullopt;
    out.push_back(next);
  }
  return out;
}

std::optional<SortedLits> resolve_sorted(const SortedLits &p,
                                         const SortedLits &n, Var v) {
  SortedLits a, b;
  a.reserve(p.size());
  b.reserve(n.size());
  for (Lit l : p)
    if (l.var() != v)
      a.push_back(l);
  for (Lit l : n)
    if (l.var() != v)
      b.push_back(l);
  return union_sorted(a, b);
}

bool sorted_subset(const SortedLits &small, const SortedLits &big) {
  if (small.size() > big.size())
    return false;
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

std::uint64_t ClauseDb::signature(const SortedLits &c) {
  std::uint64_t s = 0;
  for (Lit l : c)
    s |= 1ull << (l.code() & 63u);
  return s;
}

void ClauseDb::ensure(Lit l) {
  if (l.code() >= occ_.size())
    occ_.resize(l.code() + 2);
}

const std::vector<std::size_t> &ClauseDb::occurrences(Lit l) const {
  return l.code() < occ_.size() ? occ_[l.code()] : kNone;
}

std::size_t ClauseDb::occurrence_count(Var v) const {
  return occurrences(Lit(v, true)).size() + occurrences(Lit(v, false)).size();
}

bool ClauseDb::subsumed(const SortedLits &c, std::uint64_t sig) const {
  if (has_empty_)
    return true;
  for (Lit l : c)
    for (std::size_t idx : occurrences(l)) {
      const SortedLits &d = clauses_[idx];
      if (d.size() <= c.size() && (sigs_[idx] & ~sig) == 0 &&
          sorted_subset(d, c))
        return true;
    }
  return false;
}

void ClauseDb::remove_subsumed_by(const SortedLits &c, std::uint64_t sig) {
  if (c.empty()) {
    for (std::size_t i = 0; i < clauses_.size(); ++i)
      if (alive_[i])
        remove(i);
    return;
  }
  Lit best = c[0];
  for (Lit l : c)
    if (occurrences(l).size() < occurrences(best).size())
      best = l;
  std::vector<std::size_t> victims;
  for (std::size_t idx : occurrences(best)) {
    const SortedLits &d = clauses_[idx];
    if (d.size() >= c.size() && (sig & ~sigs_[idx]) == 0 &&
        sorted_subset(c, d))
      victims.push_back(idx);
  }
  for (std::size_t idx : victims)
    remove(idx);
}

bool ClauseDb::add(SortedLits c) {
  if (sorted_is_tautology(c))
    return false;
  std::uint64_t sig = signature(c);
  if (subsumed(c, sig))
    return false;
  remove_subsumed_by(c, sig);
  std::size_t idx = clauses_.size();
  for (Lit l : c) {
    ensure(l);
    occ_[l.code()].push_back(idx);
  }
  if (c.empty())
    has_empty_ = true;
  clauses_.push_back(std::move(c));
  sigs_.push_back(sig);
  alive_.push_back(true);
  if (++live_ > max_clauses_)
    throw BlowupError("intermediate formula exceeds the cap of " +
                          std::to_string(max_clauses_) + " clauses",
                      live_, 0);
  return true;
}

void ClauseDb::remove(std::size_t idx) {
  if (!alive_[idx])
    return;
  alive_[idx] = false;
  --live_;
  for (Lit l : clauses_[idx]) {
    auto &o = occ_[l.code()];
    auto it = std::find(o.begin(), o.end(), idx);
    if (it != o.end()) {
      *it = o.back();
      o.pop_back();
    }
  }
  if (clauses_[idx].empty())
    has_empty_ = false;
  clauses_[idx].clear();
  clauses_[idx].shrink_to_fit();
}

std::vector<Clause> ClauseDb::live_clauses() const {
  std::vector<Clause> out;
  out.reserve(live_);
  for (std::size_t i = 0; i < clauses_.size(); ++i)
    if (alive_[i])
      out.emplace_back(clauses_[i]);
  return out;
}

} // namespace proofdoor::detail
