#include "proofdoor/errors.hpp"
#include "proofdoor/sat.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <unordered_map>

namespace proofdoor {

//===----------------------------------------------------------------------===//
// ResolutionProof
//===----------------------------------------------------------------------===//

std::optional<Clause> resolve(const Clause &a, const Clause &b, Var v) {
  Lit pos(v, true), neg(v, false);
  const Clause *p = nullptr, *n = nullptr;
  if (a.contains(pos) && b.contains(neg))
    p = &a, n = &b;
  else if (a.contains(neg) && b.contains(pos))
    p = &b, n = &a;
  else
    return std::nullopt;
  std::vector<Lit> lits;
  lits.reserve(a.size() + b.size());
  for (Lit l : *p)
    if (l != pos)
      lits.push_back(l);
  for (Lit l : *n)
    if (l != neg)
      lits.push_back(l);
  return Clause(std::move(lits));
}

std::size_t ResolutionProof::add_leaf(Clause c, std::size_t input_index) {
  Node n;
  n.clause = std::move(c);
  n.input_index = static_cast<std::int64_t>(input_index);
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

std::size_t ResolutionProof::add_resolvent(std::size_t left, std::size_t right,
                                           Var pivot) {
  const Clause &a = nodes_.at(left).clause;
  const Clause &b = nodes_.at(right).clause;
  auto r = resolve(a, b, pivot);
  if (!r)
    throw ContractError("pivot " + std::to_string(pivot) +
                        " does not clash between antecedents");
  if (!a.contains(Lit(pivot, true)))
    std::swap(left, right);
  Node n;
  n.clause = std::move(*r);
  n.left = static_cast<std::int64_t>(left);
  n.right = static_cast<std::int64_t>(right);
  n.pivot = pivot;
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

bool ResolutionProof::check() const {
  if (nodes_.empty() || !nodes_.back().clause.empty())
    return false;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node &n = nodes_[i];
    if (n.is_leaf())
      continue;
    if (n.left < 0 || n.right < 0 || static_cast<std::size_t>(n.left) >= i ||
        static_cast<std::size_t>(n.right) >= i)
      return false;
    const Clause &l = nodes_[n.left].clause;
    const Clause &r = nodes_[n.right].clause;
    if (!l.contains(Lit(n.pivot, true)) || !r.contains(Lit(n.pivot, false)))
      return false;
    auto res = resolve(l, r, n.pivot);
    if (!res || !res->same_set(n.clause))
      return false;
  }
  return true;
}

const char *to_string(SolveStatus s) {
  switch (s) {
  case SolveStatus::Sat:
    return "SAT";
  case SolveStatus::Unsat:
    return "UNSAT";
  case SolveStatus::BudgetExhausted:
    return "BUDGET_EXHAUSTED";
  }
  return "?";
}

//===----------------------------------------------------------------------===//
// CDCL core
//===----------------------------------------------------------------------===//

namespace {

constexpr std::uint32_t kNoReason = UINT32_MAX;

class Cdcl {
public:
  Cdcl(const CnfFormula &f, const SolverOptions &opts)
      : formula_(f), opts_(opts), num_vars_(f.num_vars()) {
    values_.assign(num_vars_ + 1, LBool::Undef);
    level_.assign(num_vars_ + 1, 0);
    reason_.assign(num_vars_ + 1, kNoReason);
    trail_pos_.assign(num_vars_ + 1, 0);
    activity_.assign(num_vars_ + 1, 0.0);
    phase_.assign(num_vars_ + 1, false);
    seen_.assign(num_vars_ + 1, 0);
    heap_pos_.assign(num_vars_ + 1, -1);
    watches_.resize(2 * (num_vars_ + 1));
    start_ = std::chrono::steady_clock::now();
  }

  SolveResult run();

private:
  struct SClause {
    std::vector<Lit> lits;
  };
  struct Watch {
    std::uint32_t cref;
    Lit blocker;
  };
  struct Derivation {
    std::int64_t input_index = -1;
    std::uint32_t start = 0;
    std::vector<std::pair<std::uint32_t, Var>> steps;
  };

  LBool value(Lit l) const {
    LBool b = values_[l.var()];
    if (b == LBool::Undef || l.positive())
      return b;
    return b == LBool::True ? LBool::False : LBool::True;
  }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  std::uint32_t add_clause(std::vector<Lit> lits, Derivation d);
  void enqueue(Lit l, std::uint32_t reason);
  std::uint32_t propagate();
  void analyze(std::uint32_t confl, std::vector<Lit> &learnt, int &bt_level,
               Derivation &d);
  void derive_empty(std::uint32_t confl, Derivation &d);
  void resolve_root_literals(Derivation &d);
  void backtrack(int level);
  Lit pick_branch();
  bool out_of_budget();

  void bump(Var v);
  void heap_insert(Var v);
  Var heap_pop();
  void sift_up(int i);
  void sift_down(int i);
  bool heap_less(Var a, Var b) const {
    return activity_[a] > activity_[b] ||
           (activity_[a] == activity_[b] && a < b);
  }

  ResolutionProof build_proof(const Derivation &final) const;

  const CnfFormula &formula_;
  const SolverOptions &opts_;
  Var num_vars_;

  std::vector<SClause> clauses_;
  std::vector<Derivation> derivations_;
  std::vector<std::vector<Watch>> watches_;
  std::vector<LBool> values_;
  std::vector<int> level_;
  std::vector<std::uint32_t> reason_;
  std::vector<std::size_t> trail_pos_;
  std::vector<Lit> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;

  std::vector<double> activity_;
  double var_inc_ = 1.0;
  std::vector<bool> phase_;
  std::vector<char> seen_;
  std::vector<Var> heap_;
  std::vector<int> heap_pos_;

  DratTrace trace_;
  SolveStats stats_;
  std::chrono::steady_clock::time_point start_;
};

std::uint32_t Cdcl::add_clause(std::vector<Lit> lits, Derivation d) {
  auto cref = static_cast<std::uint32_t>(clauses_.size());
  clauses_.push_back({std::move(lits)});
  if (opts_.record_resolution)
    derivations_.push_back(std::move(d));
  const auto &c = clauses_.back().lits;
  if (c.size() >= 2) {
    watches_[(~c[0]).code()].push_back({cref, c[1]});
    watches_[(~c[1]).code()].push_back({cref, c[0]});
  }
  return cref;
}

void Cdcl::enqueue(Lit l, std::uint32_t reason) {
  values_[l.var()] = l.positive() ? LBool::True : LBool::False;
  level_[l.var()] = decision_level();
  reason_[l.var()] = reason;
  trail_pos_[l.var()] = trail_.size();
  trail_.push_back(l);
}

std::uint32_t Cdcl::propagate() {
  std::uint32_t confl = kNoReason;
  while (qhead_ < trail_.size() && confl == kNoReason) {
    Lit p = trail_[qhead_++];
    Lit false_lit = ~p;
    auto &ws = watches_[p.code()];
    std::size_t i = 0, j = 0;
    for (; i < ws.size(); ++i) {
      Watch w = ws[i];
      if (confl != kNoReason) {
        ws[j++] = w;
        continue;
      }
      if (value(w.blocker) == LBool::True) {
        ws[j++] = w;
        continue;
      }
      auto &lits = clauses_[w.cref].lits;
      if (lits[0] == false_lit)
        std::swap(lits[0], lits[1]);
      Lit first = lits[0];
      if (first != w.blocker && value(first) == LBool::True) {
        ws[j++] = {w.cref, first};
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < lits.size(); ++k) {
        if (value(lits[k]) != LBool::False) {
          std::swap(lits[1], lits[k]);
          watches_[(~lits[1]).code()].push_back({w.cref, first});
          moved = true;
          break;
        }
      }
      if (moved)
        continue;
      ws[j++] = {w.cref, first};
      if (value(first) == LBool::False) {
        confl = w.cref;
      } else {
        ++stats_.propagations;
        enqueue(first, w.cref);
      }
    }
    ws.resize(j);
  }
  return confl;
}

void Cdcl::bump(Var v) {
  if ((activity_[v] += var_inc_) > 1e100) {
    for (Var u = 1; u <= num_vars_; ++u)
      activity_[u] *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_pos_[v] >= 0)
    sift_up(heap_pos_[v]);
}

void Cdcl::heap_insert(Var v) {
  if (heap_pos_[v] >= 0)
    return;
  heap_pos_[v] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  sift_up(heap_pos_[v]);
}

Var Cdcl::heap_pop() {
  Var top = heap_[0];
  Var last = heap_.back();
  heap_.pop_back();
  heap_pos_[top] = -1;
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[last] = 0;
    sift_down(0);
  }
  return top;
}

void Cdcl::sift_up(int i) {
  Var v = heap_[i];
  while (i > 0) {
    int parent = (i - 1) / 2;
    if (!heap_less(v, heap_[parent]))
      break;
    heap_[i] = heap_[parent];
    heap_pos_[heap_[i]] = i;
    i = parent;
  }
  heap_[i] = v;
  heap_pos_[v] = i;
}

void Cdcl::sift_down(int i) {
  Var v = heap_[i];
  int n = static_cast<int>(heap_.size());
  for (;;) {
    int child = 2 * i + 1;
    if (child >= n)
      break;
    if (child + 1 < n && heap_less(heap_[child + 1], heap_[child]))
      ++child;
    if (!heap_less(heap_[child], v))
      break;
    heap_[i] = heap_[child];
    heap_pos_[heap_[i]] = i;
    i = child;
  }
  heap_[i] = v;
  heap_pos_[v] = i;
}

// Resolves every root-level literal still in the resolvent (marked in seen_
// with value 2) against its reason, newest first.
void Cdcl::resolve_root_literals(Derivation &d) {
  std::size_t root_end = trail_lim_.empty() ? trail_.size() : trail_lim_[0];
  for (std::size_t i = root_end; i-- > 0;) {
    Var v = trail_[i].var();
    if (seen_[v] != 2)
      continue;
    seen_[v] = 0;
    std::uint32_t r = reason_[v];
    if (opts_.record_resolution)
      d.steps.emplace_back(r, v);
    for (Lit q : clauses_[r].lits)
      if (q.var() != v && !seen_[q.var()])
        seen_[q.var()] = 2;
  }
}

void Cdcl::analyze(std::uint32_t confl, std::vector<Lit> &learnt,
                   int &bt_level, Derivation &d) {
  learnt.clear();
  learnt.push_back(Lit()); // UIP slot
  d.start = confl;
  int path = 0;
  Lit p;
  bool have_p = false;
  std::size_t index = trail_.size();
  std::vector<Var> to_clear;

  for (;;) {
    for (Lit q : clauses_[confl].lits) {
      if (have_p && q == p)
        continue;
      Var v = q.var();
      if (seen_[v])
        continue;
      if (level_[v] == 0) {
        seen_[v] = 2;
        continue;
      }
      seen_[v] = 1;
      to_clear.push_back(v);
      bump(v);
      if (level_[v] >= decision_level())
        ++path;
      else
        learnt.push_back(q);
    }
    do {
      --index;
    } while (seen_[trail_[index].var()] != 1);
    p = trail_[index];
    have_p = true;
    seen_[p.var()] = 0;
    --path;
    if (path == 0)
      break;
    confl = reason_[p.var()];
    if (opts_.record_resolution)
      d.steps.emplace_back(confl, p.var());
  }
  learnt[0] = ~p;

  for (Var v : to_clear)
    if (seen_[v] == 1)
      seen_[v] = 0;
  resolve_root_literals(d);

  bt_level = 0;
  if (learnt.size() > 1) {
    std::size_t best = 1;
    for (std::size_t i = 2; i < learnt.size(); ++i)
      if (level_[learnt[i].var()] > level_[learnt[best].var()])
        best = i;
    std::swap(learnt[1], learnt[best]);
    bt_level = level_[learnt[1].var()];
  }
}

void Cdcl::derive_empty(std::uint32_t confl, Derivation &d) {
  d.start = confl;
  for (Lit q : clauses_[confl].lits)
    seen_[q.var()] = 2;
  resolve_root_literals(d);
}

void Cdcl::backtrack(int level) {
  if (decision_level() <= level)
    return;
  for (std::size_t i = trail_.size(); i-- > trail_lim_[level];) {
    Var v = trail_[i].var();
    phase_[v] = trail_[i].positive();
    values_[v] = LBool::Undef;
    reason_[v] = kNoReason;
    heap_insert(v);
  }
  trail_.resize(trail_lim_[level]);
  trail_lim_.resize(level);
  qhead_ = trail_.size();
}

Lit Cdcl::pick_branch() {
  while (!heap_.empty()) {
    Var v = heap_pop();
    if (values_[v] == LBool::Undef)
      return Lit(v, phase_[v]);
  }
  return Lit();
}

bool Cdcl::out_of_budget() {
  if (opts_.conflict_budget && stats_.conflicts >= *opts_.conflict_budget)
    return true;
  if (opts_.time_budget && (stats_.conflicts & 63) == 0 &&
      std::chrono::steady_clock::now() - start_ > *opts_.time_budget)
    return true;
  return false;
}

ResolutionProof Cdcl::build_proof(const Derivation &final) const {
  ResolutionProof proof;
  std::unordered_map<std::uint32_t, std::size_t> node_of;

  // Iterative post-order over clause derivations.
  auto materialise = [&](std::uint32_t root) {
    std::vector<std::uint32_t> stack{root};
    while (!stack.empty()) {
      std::uint32_t c = stack.back();
      if (node_of.count(c)) {
        stack.pop_back();
        continue;
      }
      const Derivation &d = derivations_[c];
      if (d.input_index >= 0) {
        node_of[c] = proof.add_leaf(Clause(clauses_[c].lits),
                                    static_cast<std::size_t>(d.input_index));
        stack.pop_back();
        continue;
      }
      bool ready = true;
      if (!node_of.count(d.start)) {
        stack.push_back(d.start);
        ready = false;
      }
      for (auto [r, v] : d.steps)
        if (!node_of.count(r)) {
          stack.push_back(r);
          ready = false;
        }
      if (!ready)
        continue;
      std::size_t cur = node_of[d.start];
      for (auto [r, v] : d.steps)
        cur = proof.add_resolvent(cur, node_of[r], v);
      node_of[c] = cur;
      stack.pop_back();
    }
  };

  materialise(final.start);
  for (auto [r, v] : final.steps)
    materialise(r);
  std::size_t cur = node_of[final.start];
  for (auto [r, v] : final.steps)
    cur = proof.add_resolvent(cur, node_of[r], v);
  assert(cur == proof.root());
  (void)cur;
  return proof;
}

SolveResult Cdcl::run() {
  SolveResult result;
  auto finish_unsat = [&](const Derivation &final) {
    trace_.additions.emplace_back();
    result.status = SolveStatus::Unsat;
    result.trace = std::move(trace_);
    if (opts_.record_resolution)
      result.resolution = build_proof(final);
    result.stats = stats_;
    return result;
  };

  // Load input clauses. Tautologies are satisfied and skipped.
  std::vector<std::uint32_t> pending_units;
  for (std::size_t i = 0; i < formula_.size(); ++i) {
    const Clause &c = formula_[i];
    if (c.is_tautology())
      continue;
    Derivation d;
    d.input_index = static_cast<std::int64_t>(i);
    if (c.empty()) {
      std::uint32_t cref = add_clause({}, d);
      Derivation final;
      final.start = cref;
      return finish_unsat(final);
    }
    std::uint32_t cref = add_clause(c.lits(), d);
    if (c.size() == 1)
      pending_units.push_back(cref);
  }
  for (Var v = 1; v <= num_vars_; ++v)
    heap_insert(v);

  for (std::uint32_t cref : pending_units) {
    Lit u = clauses_[cref].lits[0];
    if (value(u) == LBool::False) {
      Derivation final;
      derive_empty(cref, final);
      return finish_unsat(final);
    }
    if (value(u) == LBool::Undef)
      enqueue(u, cref);
  }

  double restart_limit = opts_.restart_first;
  std::uint64_t conflicts_since_restart = 0;
  std::vector<Lit> learnt;

  for (;;) {
    std::uint32_t confl = propagate();
    if (confl != kNoReason) {
      ++stats_.conflicts;
      ++conflicts_since_restart;
      if (decision_level() == 0) {
        Derivation final;
        derive_empty(confl, final);
        return finish_unsat(final);
      }
      int bt_level = 0;
      Derivation d;
      analyze(confl, learnt, bt_level, d);
      backtrack(bt_level);
      trace_.additions.emplace_back(learnt);
      std::uint32_t cref = add_clause(learnt, std::move(d));
      enqueue(learnt[0], cref);
      var_inc_ /= opts_.var_decay;
      continue;
    }
    if (out_of_budget()) {
      result.status = SolveStatus::BudgetExhausted;
      result.stats = stats_;
      return result;
    }
    if (conflicts_since_restart >= restart_limit) {
      conflicts_since_restart = 0;
      restart_limit *= opts_.restart_factor;
      ++stats_.restarts;
      backtrack(0);
    }
    Lit next = pick_branch();
    if (next == Lit()) {
      result.status = SolveStatus::Sat;
      result.model = Assignment(num_vars_);
      for (Var v = 1; v <= num_vars_; ++v)
        result.model.set(Lit(v, values_[v] == LBool::True));
      result.stats = stats_;
      return result;
    }
    ++stats_.decisions;
    trail_lim_.push_back(trail_.size());
    enqueue(next, kNoReason);
  }
}

} // namespace

SolveResult solve(const CnfFormula &f, const SolverOptions &options) {
  Cdcl solver(f, options);
  return solver.run();
}

std::optional<bool> is_unsat(const CnfFormula &f,
                             const SolverOptions &options) {
  SolveResult r = solve(f, options);
  if (r.status == SolveStatus::BudgetExhausted)
    return std::nullopt;
  return r.status == SolveStatus::Unsat;
}

} // namespace proofdoor
