#pragma once

#include "proofdoor/chunking.hpp"
#include "proofdoor/interpolation.hpp"

#include <optional>
#include <string>
#include <vector>

namespace proofdoor {

// Outcome of one cut of a proofdoor run.
struct CutOutcome {
  enum class Status { Ok, Blowup, Budget, Error };

  Status status = Status::Ok;
  std::string message;
  std::size_t clause_count = 0;
  std::optional<ValidationTriple> validation;
  double wall_time_s = 0;
};

const char *to_string(CutOutcome::Status s);

// I_1..I_{n-1} for an n-chunk formula. interpolants[j] sits on the cut
// between chunk j and chunk j+1 and interpolates (I_j-1 ∧ A_j, A_j+1..).
struct Proofdoor {
  InterpolantKind kind = InterpolantKind::Strongest;
  std::vector<CnfFormula> interpolants;
  std::vector<CutOutcome> cuts;
  // First cut that failed to produce an interpolant; that cut (and only
  // that cut) carries the raw prefix in its place.
  std::optional<std::size_t> failure_index;
  // I_{n-1} ∧ A_{n-1} ⊨ ⊥.
  Verdict final_check = Verdict::Indeterminate;

  bool complete() const {
    for (const CutOutcome &c : cuts)
      if (c.status != CutOutcome::Status::Ok)
        return false;
    return true;
  }
  // Complete, every cut validated, and the final check passed.
  bool valid() const;
};

struct ProofdoorOptions {
  InterpolationOptions interp;
  bool validate = true;
};

// Sequential construction of one lattice kind. Never throws for per-cut
// blow-up or budget exhaustion: the failing cut is recorded and the raw
// prefix I_{j-1} ∧ A_j stands in for I_j.
Proofdoor build_proofdoor(const ChunkedFormula &cf, InterpolantKind kind,
                          const ProofdoorOptions &opts = {});

Proofdoor strongest_proofdoor(const ChunkedFormula &cf,
                              const ProofdoorOptions &opts = {});

struct LatticeSample {
  Proofdoor strongest;
  Proofdoor mcmillan;
  Proofdoor weakest;
};

LatticeSample sample_lattice(const ChunkedFormula &cf,
                             const ProofdoorOptions &opts = {});

struct ProofdoorParams {
  std::size_t c = 0;
  std::size_t w = 0;
  std::size_t s_bound = 0;
  std::size_t k = 0; // chunk count
  bool s_exact_fallback = false; // s_bound fell back to c on a budget hit
};

ProofdoorParams measure_params(const Proofdoor &pd, const ChunkedFormula &cf,
                               const SolverOptions &solver = {});

// Vertex separation number of an undirected graph under a linear order:
// max over prefixes of the number of prefix vertices adjacent to a later
// vertex. `order` must be a permutation of 0..adj.size()-1.
std::size_t vertex_separation(const std::vector<std::vector<std::size_t>> &adj,
                              const std::vector<std::size_t> &order);

// A vertex of the clause-variable incidence graph.
struct IncidenceVertex {
  bool is_clause = false;
  std::size_t id = 0; // variable index or clause position

  bool operator==(const IncidenceVertex &) const = default;
};

// Variables ascending, each clause right after its smallest variable
// (empty clauses first).
std::vector<IncidenceVertex>
default_incidence_order(const std::vector<Clause> &chunk);

// Upper bound on the pathwidth of the incidence graph of `chunk`. With no
// order given, default_incidence_order is used. Throws ContractError when
// the order does not cover the graph exactly.
std::size_t pathwidth_bound(
    const std::vector<Clause> &chunk,
    const std::optional<std::vector<IncidenceVertex>> &order = std::nullopt);

// Archive: I_1.cnf .. I_{n-1}.cnf plus manifest.json.
void write_proofdoor_archive(const std::string &dir, const Proofdoor &pd,
                             const std::optional<ProofdoorParams> &params);
Proofdoor read_proofdoor_archive(const std::string &dir);
std::string proofdoor_manifest_json(const Proofdoor &pd,
                                    const std::optional<ProofdoorParams> &p);

} // namespace proofdoor
