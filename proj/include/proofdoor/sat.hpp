#pragma once

#include "proofdoor/cnf.hpp"

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace proofdoor {

//===----------------------------------------------------------------------===//
// Proof objects
//===----------------------------------------------------------------------===//

// Learned clauses in learning order. Deletions are never recorded.
struct DratTrace {
  std::vector<Clause> additions;
  // Source line of each addition when parsed from a file; empty otherwise.
  std::vector<std::size_t> lines;

  bool ends_with_empty_clause() const {
    return !additions.empty() && additions.back().empty();
  }
};

// Binary resolution DAG. Leaves reference input clauses by index; every
// internal node is the resolvent of `left` and `right` on `pivot`, with the
// positive pivot literal in `left`.
class ResolutionProof {
public:
  struct Node {
    Clause clause;
    std::int64_t input_index = -1; // >= 0 for leaves
    std::int64_t left = -1;
    std::int64_t right = -1;
    Var pivot = 0;

    bool is_leaf() const { return input_index >= 0; }
  };

  std::size_t add_leaf(Clause c, std::size_t input_index);
  std::size_t add_resolvent(std::size_t left, std::size_t right, Var pivot);

  const std::vector<Node> &nodes() const { return nodes_; }
  const Node &node(std::size_t i) const { return nodes_.at(i); }
  std::size_t size() const { return nodes_.size(); }
  std::size_t root() const { return nodes_.size() - 1; }
  bool empty() const { return nodes_.empty(); }

  // Replays every internal node and compares against the stored clause; the
  // root must be the empty clause.
  bool check() const;

private:
  std::vector<Node> nodes_;
};

// Resolvent of two clauses on v, or nullopt when v is not a clashing pivot.
std::optional<Clause> resolve(const Clause &a, const Clause &b, Var v);

//===----------------------------------------------------------------------===//
// Solver
//===----------------------------------------------------------------------===//

enum class SolveStatus { Sat, Unsat, BudgetExhausted };

const char *to_string(SolveStatus s);

struct SolveStats {
  std::uint64_t decisions = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
};

struct SolverOptions {
  // Resolution recording keeps one derivation chain per learned clause.
  bool record_resolution = false;
  std::optional<std::uint64_t> conflict_budget;
  std::optional<std::chrono::duration<double>> time_budget;
  double restart_first = 100;
  double restart_factor = 1.5;
  double var_decay = 0.95;
};

struct SolveResult {
  SolveStatus status = SolveStatus::BudgetExhausted;
  Assignment model;                          // Sat only
  DratTrace trace;                           // Unsat only
  std::optional<ResolutionProof> resolution; // Unsat + record_resolution
  SolveStats stats;
};

// CDCL with first-UIP learning, VSIDS (ties to the lowest index), phase
// saving and geometric restarts. No clause deletion or inprocessing.
SolveResult solve(const CnfFormula &f, const SolverOptions &options = {});

// Convenience for the many "is this UNSAT" checks: Unsat -> true, Sat ->
// false, budget -> nullopt.
std::optional<bool> is_unsat(const CnfFormula &f,
                             const SolverOptions &options = {});

//===----------------------------------------------------------------------===//
// DRAT
//===----------------------------------------------------------------------===//

struct DratCheck {
  bool ok = false;
  // Index of the first failing addition; additions.size() when the trace
  // does not end in the empty clause.
  std::size_t failed_index = 0;
  std::string message;

  explicit operator bool() const { return ok; }
};

// RUP-checks every addition against f plus the earlier additions.
DratCheck check_drat(const CnfFormula &f, const DratTrace &t);

// Plain-text DRAT. Deletion lines ("d ...") are ignored through `warn`.
DratTrace parse_drat(std::istream &in, const WarningSink &warn = {});
DratTrace read_drat_file(const std::string &path, const WarningSink &warn = {});
void emit_drat(std::ostream &out, const DratTrace &t);
void write_drat_file(const std::string &path, const DratTrace &t);

//===----------------------------------------------------------------------===//
// External solvers
//===----------------------------------------------------------------------===//

struct ExternalSolverOptions {
  // Whitespace-separated argv template. "{cnf}" and "{proof}" are replaced
  // by the paths; without placeholders both paths are appended. Empty means
  // the PROOFDOOR_SOLVER environment variable.
  std::string command;
  std::optional<std::chrono::duration<double>> timeout;
  // Directory for the temporary CNF/proof files; defaults to the system
  // temp directory.
  std::string work_dir;
};

// Runs a solver that follows the SAT-competition exit-code convention
// (10 SAT, 20 UNSAT) and writes DRAT to the proof path. Throws Error on
// process failure or unparsable proof; a timeout yields BudgetExhausted
// status.
SolveResult run_external_solver(const CnfFormula &f,
                                const ExternalSolverOptions &options);

} // namespace proofdoor
