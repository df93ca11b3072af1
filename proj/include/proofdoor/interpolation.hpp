#pragma once

#include "proofdoor/cnf.hpp"
#include "proofdoor/sat.hpp"

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace proofdoor {

//===----------------------------------------------------------------------===//
// Cut problems
//===----------------------------------------------------------------------===//

// An interpolation problem (A, B) with its variable partition.
struct CutProblem {
  CnfFormula a;
  CnfFormula b;
  std::vector<Var> shared;  // Var(a) ∩ Var(b)
  std::vector<Var> local_a; // Var(a) \ shared
  std::vector<Var> local_b; // Var(b) \ shared

  static CutProblem make(CnfFormula a, CnfFormula b);
  // The cut read right-to-left: (B, A).
  CutProblem swapped() const { return make(b, a); }
  Var num_vars() const { return std::max(a.num_vars(), b.num_vars()); }
};

enum class InterpolantKind { Strongest, Weakest, McMillan };

const char *to_string(InterpolantKind k);
InterpolantKind parse_interpolant_kind(const std::string &s);

enum class Verdict { False, True, Indeterminate };

const char *to_string(Verdict v);

struct ValidationTriple {
  Verdict a_implies_i = Verdict::Indeterminate;      // A ⊨ I
  Verdict i_and_b_unsat = Verdict::Indeterminate;    // I ∧ B ⊨ ⊥
  Verdict scope = Verdict::Indeterminate;            // Var(I) ⊆ V_s

  bool all_true() const {
    return a_implies_i == Verdict::True && i_and_b_unsat == Verdict::True &&
           scope == Verdict::True;
  }
  bool any_false() const {
    return a_implies_i == Verdict::False || i_and_b_unsat == Verdict::False ||
           scope == Verdict::False;
  }
};

struct InterpolantReport {
  CnfFormula interpolant;
  InterpolantKind kind = InterpolantKind::Strongest;
  std::size_t clause_count = 0;
  std::optional<ValidationTriple> validated;
  std::chrono::duration<double> wall_time{0};
  // Strongest only: the result contains every prime implicate over V_s.
  bool implicate_complete = false;
  // McMillan only: number of proof nodes the partial interpolants span.
  std::size_t proof_nodes = 0;
};

// JSON object: kind, clause_count, validation triple, wall time.
std::string report_to_json(const InterpolantReport &r);

//===----------------------------------------------------------------------===//
// Options
//===----------------------------------------------------------------------===//

struct InterpolationOptions {
  // Hard cap on clauses in any intermediate formula.
  std::size_t max_clauses = 1'000'000;
  // Threshold BVE eliminates v when #resolvents <= occ(v) + bve_threshold.
  std::size_t bve_threshold = 16;
  // Close the strongest interpolant under consensus (prime implicates).
  bool prime_closure = true;
  // Budget for each SAT call made by validation.
  SolverOptions solver;
};

//===----------------------------------------------------------------------===//
// Operations
//===----------------------------------------------------------------------===//

// ∃v.f by Davis-Putnam resolution: v-free clauses in input order followed by
// every non-tautological resolvent. Throws BlowupError past max_clauses.
CnfFormula eliminate_variable(const CnfFormula &f, Var v,
                              std::size_t max_clauses = 1'000'000);

// Projects f onto everything except `eliminate`: threshold BVE rounds in
// ascending occurrence order, then forced DP elimination of what is left,
// with subsumption/tautology pruning throughout.
CnfFormula project_out(const CnfFormula &f, const std::vector<Var> &eliminate,
                       const InterpolationOptions &opts = {});

// All prime implicates of f (consensus closure + subsumption).
CnfFormula prime_implicates(const CnfFormula &f,
                            std::size_t max_clauses = 1'000'000);

// ∃L_A.a over V_s. Throws BlowupError past the clause cap.
InterpolantReport strongest_interpolant(const CutProblem &p,
                                        const InterpolationOptions &opts = {});

// ¬∃L_B.b, converted to CNF by De Morgan and distribution.
InterpolantReport weakest_interpolant(const CutProblem &p,
                                      const InterpolationOptions &opts = {});

enum class Side : std::uint8_t { A, B };

// McMillan's interpolant from a refutation of A ∧ B. `side_of_input` tags
// each input clause index that a proof leaf may reference. Throws
// ContractError for untagged leaves or pivot mismatches.
InterpolantReport mcmillan_interpolant(const ResolutionProof &proof,
                                       const std::vector<Side> &side_of_input,
                                       const std::vector<Var> &shared,
                                       const InterpolationOptions &opts = {});

// Solves a ∧ b with resolution recording and extracts the McMillan
// interpolant. Throws BudgetExhausted, or ContractError when a ∧ b is SAT.
InterpolantReport mcmillan_interpolant(const CutProblem &p,
                                       const InterpolationOptions &opts = {});

ValidationTriple validate_interpolant(const CutProblem &p,
                                      const CnfFormula &interpolant,
                                      const SolverOptions &solver = {});

// CNF of (x ∨ y) and (x ∧ y) without fresh variables, pruned by
// subsumption. Throws BlowupError past max_clauses.
CnfFormula cnf_or(const CnfFormula &x, const CnfFormula &y,
                  std::size_t max_clauses = 1'000'000);
CnfFormula cnf_and(const CnfFormula &x, const CnfFormula &y,
                   std::size_t max_clauses = 1'000'000);
// CNF of ¬f by De Morgan + distribution.
CnfFormula cnf_negate(const CnfFormula &f, std::size_t max_clauses = 1'000'000);

// Drops tautologies and subsumed clauses; keeps the first of duplicates.
CnfFormula simplify_subsumed(const CnfFormula &f);

// f ⊨ g, checked clause-wise with UNSAT calls.
std::optional<bool> entails(const CnfFormula &f, const CnfFormula &g,
                            const SolverOptions &solver = {});

// QDIMACS with one existential block for `exists`.
void emit_qdimacs(std::ostream &out, const CnfFormula &f,
                  const std::vector<Var> &exists);

} // namespace proofdoor
