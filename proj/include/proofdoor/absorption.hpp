#pragma once

#include "proofdoor/chunking.hpp"
#include "proofdoor/cnf.hpp"
#include "proofdoor/proofdoor.hpp"
#include "proofdoor/sat.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace proofdoor {

// F absorbs C: for every literal l of C, asserting the negation of the rest
// makes unit propagation force l or conflict. C = ∅ is absorbed iff
// propagation with no assumptions conflicts.
bool is_absorbed(const CnfFormula &f, const Clause &c);
bool is_absorbed(PropagationEngine &engine, const Clause &c);

// Fraction of clauses of i absorbed by f; 1 for empty i.
double absorption_fraction(const CnfFormula &f, const CnfFormula &i);
double absorption_fraction(PropagationEngine &engine, const CnfFormula &i);

// Base formula plus trace additions, each tagged with the chunk of its
// variables. Prefix Π_i holds the additions tagged ≤ i.
class PartialProofs {
public:
  PartialProofs(CnfFormula base, std::vector<Clause> additions,
                std::vector<std::size_t> chunk_of_addition,
                std::size_t num_prefixes);

  const CnfFormula &base() const { return base_; }
  std::size_t num_prefixes() const { return num_prefixes_; }
  const std::vector<Clause> &additions() const { return additions_; }
  const std::vector<std::size_t> &chunk_of_addition() const {
    return chunk_of_addition_;
  }

  // Additions of Π_i in trace order.
  std::vector<Clause> additions_in(std::size_t i,
                                   bool include_empty = true) const;
  CnfFormula prefix(std::size_t i, bool include_empty = true) const;

private:
  CnfFormula base_;
  std::vector<Clause> additions_;
  std::vector<std::size_t> chunk_of_addition_;
  std::size_t num_prefixes_;
};

// Tags each addition with clause_chunk, clamped to [0, k-1]. Throws
// InputError for a trace variable missing from the map.
PartialProofs partition_trace(const CnfFormula &base, const DratTrace &trace,
                              const VarChunkMap &m, std::size_t k);

// h[i][j] = absorption of interpolant j by prefix i; k rows, k-1 columns.
struct AbsorptionMatrix {
  std::vector<std::vector<double>> h;

  std::size_t rows() const { return h.size(); }
  std::size_t cols() const { return h.empty() ? 0 : h[0].size(); }
};

struct HeatmapOptions {
  std::size_t jobs = 1;
  // A trailing empty clause would make every prefix conflict at the root and
  // absorb everything, so it is left out unless asked for.
  bool include_empty_clause = false;
};

// Throws ContractError when pp has not exactly one more prefix than pd has
// interpolants.
AbsorptionMatrix heatmap(const PartialProofs &pp, const Proofdoor &pd,
                         const HeatmapOptions &opts = {});
AbsorptionMatrix heatmap(const PartialProofs &pp,
                         const std::vector<CnfFormula> &interpolants,
                         const HeatmapOptions &opts = {});

// Mean of h[i][j] over i >= j; 1 for a matrix with no such cell.
double incrementality_score(const AbsorptionMatrix &m);

// Header "prefix,I_1,..", then one "Pi_i,..." row per prefix.
void write_heatmap_csv(std::ostream &out, const AbsorptionMatrix &m);
// One square per cell, 256-level gray, darker for higher absorption.
void write_heatmap_svg(std::ostream &out, const AbsorptionMatrix &m,
                       int cell_px = 24);
// {"score", "rows", "cols", "first_full_row": [row or null per column]}.
std::string heatmap_summary_json(const AbsorptionMatrix &m);

} // namespace proofdoor
