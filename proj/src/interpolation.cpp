#include "proofdoor/interpolation.hpp"

#include "clause_db.hpp"
#include "proofdoor/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <ostream>
#include <set>

namespace proofdoor {

using detail::ClauseDb;
using detail::SortedLits;

namespace {

using Clock = std::chrono::steady_clock;

std::vector<Var> set_difference(const std::vector<Var> &a,
                                const std::vector<Var> &b) {
  std::vector<Var> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

std::vector<Var> set_intersection(const std::vector<Var> &a,
                                  const std::vector<Var> &b) {
  std::vector<Var> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

CnfFormula from_db(const ClauseDb &db, Var num_vars) {
  return CnfFormula(num_vars, db.live_clauses());
}

// Variable elimination over a ClauseDb.
class Eliminator {
public:
  Eliminator(const CnfFormula &f, const InterpolationOptions &opts)
      : db_(opts.max_clauses), opts_(opts), num_vars_(f.num_vars()) {
    for (const Clause &c : f)
      db_.add(c.sorted());
  }

  // Number of non-tautological resolvents on v, stopping once above limit.
  std::size_t count_resolvents(Var v, std::size_t limit) const {
    std::size_t n = 0;
    for (std::size_t p : db_.occurrences(Lit(v, true)))
      for (std::size_t q : db_.occurrences(Lit(v, false)))
        if (detail::resolve_sorted(db_.clause(p), db_.clause(q), v) &&
            ++n > limit)
          return n;
    return n;
  }

  void eliminate(Var v) {
    std::vector<SortedLits> pos, neg;
    for (std::size_t p : db_.occurrences(Lit(v, true)))
      pos.push_back(db_.clause(p));
    for (std::size_t q : db_.occurrences(Lit(v, false)))
      neg.push_back(db_.clause(q));
    std::vector<std::size_t> victims = db_.occurrences(Lit(v, true));
    const auto &nv = db_.occurrences(Lit(v, false));
    victims.insert(victims.end(), nv.begin(), nv.end());
    for (std::size_t idx : victims)
      db_.remove(idx);
    for (const SortedLits &p : pos)
      for (const SortedLits &n : neg)
        if (auto r = detail::resolve_sorted(p, n, v))
          add(std::move(*r));
    ++eliminated_;
  }

  void project_out(std::vector<Var> vars) {
    // Threshold rounds.
    bool changed = true;
    while (changed && !vars.empty()) {
      changed = false;
      std::stable_sort(vars.begin(), vars.end(), [&](Var x, Var y) {
        return db_.occurrence_count(x) < db_.occurrence_count(y);
      });
      std::vector<Var> keep;
      for (Var v : vars) {
        std::size_t occ = db_.occurrence_count(v);
        if (occ == 0)
          continue;
        std::size_t limit = occ + opts_.bve_threshold;
        if (count_resolvents(v, limit) <= limit) {
          eliminate(v);
          changed = true;
        } else {
          keep.push_back(v);
        }
      }
      vars = std::move(keep);
    }
    // Davis-Putnam closure for whatever the threshold refused.
    while (!vars.empty()) {
      auto it = std::min_element(vars.begin(), vars.end(), [&](Var x, Var y) {
        std::size_t cx = db_.occurrence_count(x), cy = db_.occurrence_count(y);
        return cx < cy || (cx == cy && x < y);
      });
      Var v = *it;
      vars.erase(it);
      if (db_.occurrence_count(v) != 0)
        eliminate(v);
    }
  }

  // Consensus on every remaining variable, one pass per variable.
  void close_under_consensus() {
    std::vector<Var> vars;
    for (Var v = 1; v <= num_vars_; ++v)
      if (db_.occurrence_count(v))
        vars.push_back(v);
    for (Var v : vars) {
      std::vector<SortedLits> pos, neg;
      for (std::size_t p : db_.occurrences(Lit(v, true)))
        pos.push_back(db_.clause(p));
      for (std::size_t q : db_.occurrences(Lit(v, false)))
        neg.push_back(db_.clause(q));
      for (const SortedLits &p : pos)
        for (const SortedLits &n : neg)
          if (auto r = detail::resolve_sorted(p, n, v))
            add(std::move(*r));
    }
  }

  CnfFormula result() const { return from_db(db_, num_vars_); }

private:
  void add(SortedLits c) {
    try {
      db_.add(std::move(c));
    } catch (const BlowupError &e) {
      throw BlowupError(e.what(), e.clauses_at_abort(), eliminated_);
    }
  }

  ClauseDb db_;
  const InterpolationOptions &opts_;
  Var num_vars_;
  std::size_t eliminated_ = 0;
};

} // namespace

//===----------------------------------------------------------------------===//
// Names
//===----------------------------------------------------------------------===//

const char *to_string(InterpolantKind k) {
  switch (k) {
  case InterpolantKind::Strongest:
    return "strongest";
  case InterpolantKind::Weakest:
    return "weakest";
  case InterpolantKind::McMillan:
    return "mcmillan";
  }
  return "?";
}

InterpolantKind parse_interpolant_kind(const std::string &s) {
  if (s == "strongest")
    return InterpolantKind::Strongest;
  if (s == "weakest")
    return InterpolantKind::Weakest;
  if (s == "mcmillan")
    return InterpolantKind::McMillan;
  throw InputError("unknown interpolant kind '" + s + "'");
}

const char *to_string(Verdict v) {
  switch (v) {
  case Verdict::False:
    return "false";
  case Verdict::True:
    return "true";
  case Verdict::Indeterminate:
    return "indeterminate";
  }
  return "?";
}

std::string report_to_json(const InterpolantReport &r) {
  nlohmann::json j;
  j["kind"] = to_string(r.kind);
  j["clause_count"] = r.clause_count;
  if (r.validated) {
    j["validation"] = {{"a_implies_i", to_string(r.validated->a_implies_i)},
                       {"i_and_b_unsat", to_string(r.validated->i_and_b_unsat)},
                       {"scope", to_string(r.validated->scope)}};
  } else {
    j["validation"] = nullptr;
  }
  j["wall_time_s"] = r.wall_time.count();
  return j.dump();
}

//===----------------------------------------------------------------------===//
// CutProblem
//===----------------------------------------------------------------------===//

CutProblem CutProblem::make(CnfFormula a, CnfFormula b) {
  CutProblem p;
  auto va = a.variables();
  auto vb = b.variables();
  p.shared = set_intersection(va, vb);
  p.local_a = set_difference(va, p.shared);
  p.local_b = set_difference(vb, p.shared);
  p.a = std::move(a);
  p.b = std::move(b);
  return p;
}

//===----------------------------------------------------------------------===//
// Elimination
//===----------------------------------------------------------------------===//

CnfFormula eliminate_variable(const CnfFormula &f, Var v,
                              std::size_t max_clauses) {
  std::vector<Clause> out;
  std::vector<const Clause *> pos, neg;
  for (const Clause &c : f) {
    if (c.contains(Lit(v, true)))
      pos.push_back(&c);
    else if (c.contains(Lit(v, false)))
      neg.push_back(&c);
    else
      out.push_back(c);
  }
  for (const Clause *p : pos) {
    if (p->contains(Lit(v, false)))
      continue; // tautology on v itself
    for (const Clause *n : neg) {
      auto r = resolve(*p, *n, v);
      if (!r || r->is_tautology())
        continue;
      out.push_back(std::move(*r));
      if (out.size() > max_clauses)
        throw BlowupError("eliminating variable " + std::to_string(v) +
                              " exceeds the cap of " +
                              std::to_string(max_clauses) + " clauses",
                          out.size(), 0);
    }
  }
  return CnfFormula(f.num_vars(), std::move(out));
}

CnfFormula project_out(const CnfFormula &f, const std::vector<Var> &eliminate,
                       const InterpolationOptions &opts) {
  Eliminator e(f, opts);
  e.project_out(eliminate);
  return e.result();
}

CnfFormula prime_implicates(const CnfFormula &f, std::size_t max_clauses) {
  InterpolationOptions opts;
  opts.max_clauses = max_clauses;
  Eliminator e(f, opts);
  e.close_under_consensus();
  return e.result();
}

CnfFormula simplify_subsumed(const CnfFormula &f) {
  ClauseDb db(SIZE_MAX);
  for (const Clause &c : f)
    db.add(c.sorted());
  return from_db(db, f.num_vars());
}

//===----------------------------------------------------------------------===//
// CNF combinators
//===----------------------------------------------------------------------===//

CnfFormula cnf_or(const CnfFormula &x, const CnfFormula &y,
                  std::size_t max_clauses) {
  ClauseDb db(max_clauses);
  std::vector<SortedLits> ys;
  ys.reserve(y.size());
  for (const Clause &c : y)
    ys.push_back(c.sorted());
  for (const Clause &c : x) {
    SortedLits xs = c.sorted();
    for (const SortedLits &d : ys)
      if (auto u = detail::union_sorted(xs, d))
        db.add(std::move(*u));
  }
  return from_db(db, std::max(x.num_vars(), y.num_vars()));
}

CnfFormula cnf_and(const CnfFormula &x, const CnfFormula &y,
                   std::size_t max_clauses) {
  ClauseDb db(max_clauses);
  for (const Clause &c : x)
    db.add(c.sorted());
  for (const Clause &c : y)
    db.add(c.sorted());
  return from_db(db, std::max(x.num_vars(), y.num_vars()));
}

CnfFormula cnf_negate(const CnfFormula &f, std::size_t max_clauses) {
  // ¬(D_1 ∧ ... ∧ D_m) = ∨_k ∧_{l ∈ D_k} ¬l; start from ⊥ = {∅}.
  std::vector<SortedLits> current{SortedLits{}};
  std::vector<SortedLits> clauses;
  for (const Clause &c : simplify_subsumed(f))
    clauses.push_back(c.sorted());
  std::stable_sort(clauses.begin(), clauses.end(),
                   [](const SortedLits &a, const SortedLits &b) {
                     return a.size() < b.size();
                   });
  for (const SortedLits &d : clauses) {
    ClauseDb db(max_clauses);
    for (const SortedLits &r : current)
      for (Lit l : d) {
        SortedLits unit{~l};
        if (auto u = detail::union_sorted(r, unit))
          db.add(std::move(*u));
      }
    current.clear();
    for (const Clause &c : db.live_clauses())
      current.push_back(c.sorted());
    if (current.empty())
      break; // ⊤ absorbs every further disjunct
  }
  std::vector<Clause> out;
  for (auto &c : current)
    out.emplace_back(std::move(c));
  return CnfFormula(f.num_vars(), std::move(out));
}

//===----------------------------------------------------------------------===//
// Interpolants
//===----------------------------------------------------------------------===//

InterpolantReport strongest_interpolant(const CutProblem &p,
                                        const InterpolationOptions &opts) {
  auto start = Clock::now();
  Eliminator e(p.a, opts);
  e.project_out(p.local_a);
  InterpolantReport r;
  if (opts.prime_closure) {
    e.close_under_consensus();
    r.implicate_complete = true;
  }
  CnfFormula result = e.result();
  r.interpolant = CnfFormula(p.num_vars(), result.clauses());
  r.kind = InterpolantKind::Strongest;
  r.clause_count = r.interpolant.size();
  r.wall_time = Clock::now() - start;
  return r;
}

InterpolantReport weakest_interpolant(const CutProblem &p,
                                      const InterpolationOptions &opts) {
  auto start = Clock::now();
  CnfFormula projected = project_out(p.b, p.local_b, opts);
  CnfFormula negated = cnf_negate(projected, opts.max_clauses);
  InterpolantReport r;
  r.interpolant = CnfFormula(p.num_vars(), negated.clauses());
  r.kind = InterpolantKind::Weakest;
  r.clause_count = r.interpolant.size();
  r.wall_time = Clock::now() - start;
  return r;
}

InterpolantReport mcmillan_interpolant(const ResolutionProof &proof,
                                       const std::vector<Side> &side_of_input,
                                       const std::vector<Var> &shared,
                                       const InterpolationOptions &opts) {
  auto start = Clock::now();
  if (proof.empty())
    throw ContractError("empty resolution proof");
  const auto &nodes = proof.nodes();

  auto side = [&](const ResolutionProof::Node &n) {
    if (static_cast<std::size_t>(n.input_index) >= side_of_input.size())
      throw ContractError("proof leaf for input clause " +
                          std::to_string(n.input_index) + " is not tagged");
    return side_of_input[n.input_index];
  };

  // Var(B-leaves), computed once.
  Var max_var = 0;
  for (const auto &n : nodes)
    max_var = std::max(max_var, n.clause.max_var());
  std::vector<bool> in_b(max_var + 1, false);
  for (const auto &n : nodes)
    if (n.is_leaf() && side(n) == Side::B)
      for (Lit l : n.clause)
        in_b[l.var()] = true;

  // Reference counts so partial interpolants are freed once consumed.
  std::vector<std::size_t> uses(nodes.size(), 0);
  for (const auto &n : nodes)
    if (!n.is_leaf()) {
      if (n.left < 0 || n.right < 0)
        throw ContractError("internal proof node without antecedents");
      ++uses[n.left];
      ++uses[n.right];
    }

  std::vector<std::optional<CnfFormula>> partial(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto &n = nodes[i];
    if (n.is_leaf()) {
      if (side(n) == Side::B) {
        partial[i] = CnfFormula(); // ⊤
      } else {
        std::vector<Lit> global;
        for (Lit l : n.clause)
          if (in_b[l.var()])
            global.push_back(l);
        partial[i] = CnfFormula({Clause(std::move(global))});
      }
      continue;
    }
    const auto &l = nodes[n.left];
    const auto &r = nodes[n.right];
    if (!l.clause.contains(Lit(n.pivot, true)) ||
        !r.clause.contains(Lit(n.pivot, false)))
      throw ContractError("pivot " + std::to_string(n.pivot) +
                          " does not match antecedents of node " +
                          std::to_string(i));
    const CnfFormula &pl = *partial[n.left];
    const CnfFormula &pr = *partial[n.right];
    bool a_local = n.pivot >= in_b.size() || !in_b[n.pivot];
    partial[i] = a_local ? cnf_or(pl, pr, opts.max_clauses)
                         : cnf_and(pl, pr, opts.max_clauses);
    if (--uses[n.left] == 0)
      partial[n.left].reset();
    if (--uses[n.right] == 0)
      partial[n.right].reset();
  }

  Var num_vars = max_var;
  for (Var v : shared)
    num_vars = std::max(num_vars, v);
  InterpolantReport rep;
  rep.interpolant =
      CnfFormula(num_vars, simplify_subsumed(*partial[proof.root()]).clauses());
  rep.kind = InterpolantKind::McMillan;
  rep.clause_count = rep.interpolant.size();
  rep.proof_nodes = nodes.size();
  rep.wall_time = Clock::now() - start;
  return rep;
}

InterpolantReport mcmillan_interpolant(const CutProblem &p,
                                       const InterpolationOptions &opts) {
  auto start = Clock::now();
  SolverOptions so = opts.solver;
  so.record_resolution = true;
  CnfFormula joint = p.a.conjoin(p.b);
  SolveResult res = solve(joint, so);
  if (res.status == SolveStatus::BudgetExhausted)
    throw BudgetExhausted("solver budget exhausted refuting A ∧ B");
  if (res.status == SolveStatus::Sat)
    throw ContractError("A ∧ B is satisfiable; no interpolant exists");
  std::vector<Side> sides(joint.size(), Side::B);
  std::fill(sides.begin(), sides.begin() + p.a.size(), Side::A);
  InterpolantReport r = mcmillan_interpolant(*res.resolution, sides, p.shared,
                                             opts);
  r.interpolant = CnfFormula(std::max(p.num_vars(), r.interpolant.num_vars()),
                             r.interpolant.clauses());
  r.wall_time = Clock::now() - start;
  return r;
}

//===----------------------------------------------------------------------===//
// Validation
//===----------------------------------------------------------------------===//

namespace {

Verdict to_verdict(std::optional<bool> b) {
  if (!b)
    return Verdict::Indeterminate;
  return *b ? Verdict::True : Verdict::False;
}

} // namespace

std::optional<bool> entails(const CnfFormula &f, const CnfFormula &g,
                            const SolverOptions &solver) {
  bool indeterminate = false;
  for (const Clause &c : g) {
    std::vector<Clause> units;
    for (Lit l : c)
      units.push_back(Clause({~l}));
    auto r = is_unsat(f.with(units), solver);
    if (!r)
      indeterminate = true;
    else if (!*r)
      return false;
  }
  if (indeterminate)
    return std::nullopt;
  return true;
}

ValidationTriple validate_interpolant(const CutProblem &p,
                                      const CnfFormula &interpolant,
                                      const SolverOptions &solver) {
  ValidationTriple t;
  t.a_implies_i = to_verdict(entails(p.a, interpolant, solver));
  t.i_and_b_unsat = to_verdict(is_unsat(interpolant.conjoin(p.b), solver));
  auto vars = interpolant.variables();
  t.scope = std::includes(p.shared.begin(), p.shared.end(), vars.begin(),
                          vars.end())
                ? Verdict::True
                : Verdict::False;
  return t;
}

void emit_qdimacs(std::ostream &out, const CnfFormula &f,
                  const std::vector<Var> &exists) {
  out << "p cnf " << f.num_vars() << ' ' << f.size() << '\n';
  if (!exists.empty()) {
    out << 'e';
    for (Var v : exists)
      out << ' ' << v;
    out << " 0\n";
  }
  for (const Clause &c : f) {
    for (Lit l : c)
      out << l.to_dimacs() << ' ';
    out << "0\n";
  }
}

} // namespace proofdoor
