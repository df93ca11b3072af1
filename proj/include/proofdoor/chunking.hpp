#pragma once

#include "proofdoor/cnf.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace proofdoor {

// How a formula is cut into ordered chunks A_0..A_K.
struct ChunkSpec {
  enum class Mode { ClauseRanges, VariableMap, ClauseChunks };

  Mode mode = Mode::ClauseRanges;
  // Half-open clause-index intervals [begin, end), in chunk order.
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  // Variable -> chunk index; a clause goes to the max chunk of its variables.
  std::map<Var, std::size_t> var_to_chunk;
  // Explicit chunk index per clause; chunks need not be contiguous.
  std::vector<std::size_t> clause_chunks;
  // Optional BMC role annotations ("Initial", "T_3", "bad_5"), carried
  // through untouched.
  std::vector<std::string> labels;

  static ChunkSpec from_ranges(
      std::vector<std::pair<std::size_t, std::size_t>> ranges);
  static ChunkSpec from_var_map(std::map<Var, std::size_t> var_to_chunk);
  static ChunkSpec from_clause_chunks(std::vector<std::size_t> clause_chunks);
};

// Chunk index of the last chunk in which each variable occurs.
class VarChunkMap {
public:
  VarChunkMap() = default;
  explicit VarChunkMap(std::map<Var, std::size_t> chunk_of)
      : chunk_of_(std::move(chunk_of)) {}

  bool contains(Var v) const { return chunk_of_.count(v) != 0; }
  // Throws ContractError for an unmapped variable.
  std::size_t at(Var v) const;
  const std::map<Var, std::size_t> &entries() const { return chunk_of_; }
  std::size_t size() const { return chunk_of_.size(); }

private:
  std::map<Var, std::size_t> chunk_of_;
};

class ChunkedFormula {
public:
  ChunkedFormula(CnfFormula base, std::vector<CnfFormula> chunks,
                 std::vector<std::size_t> chunk_of_clause,
                 std::vector<std::string> labels);

  const CnfFormula &base() const { return base_; }
  std::size_t num_chunks() const { return chunks_.size(); }
  const std::vector<CnfFormula> &chunks() const { return chunks_; }
  const CnfFormula &chunk(std::size_t i) const { return chunks_.at(i); }
  // Chunk index of each base clause, in base order.
  const std::vector<std::size_t> &chunk_of_clause() const {
    return chunk_of_clause_;
  }
  // Z_j = Var(A_0..A_j) ∩ Var(A_{j+1}..A_K), for j = 0..num_chunks-2.
  const std::vector<std::vector<Var>> &cut_vars() const { return cut_vars_; }
  // X_j = Var(A_j) \ Var(A_{j+1}..A_K), for every chunk.
  const std::vector<std::vector<Var>> &local_vars() const {
    return local_vars_;
  }
  const std::vector<std::string> &labels() const { return labels_; }

  // A_from ∧ ... ∧ A_to (inclusive).
  CnfFormula span(std::size_t from, std::size_t to) const;

private:
  CnfFormula base_;
  std::vector<CnfFormula> chunks_;
  std::vector<std::size_t> chunk_of_clause_;
  std::vector<std::vector<Var>> cut_vars_;
  std::vector<std::vector<Var>> local_vars_;
  std::vector<std::string> labels_;
};

// Throws InputError on uncovered clauses/variables, overlapping or unordered
// ranges, empty chunks, or fewer than two chunks.
ChunkedFormula build_chunked(const CnfFormula &f, const ChunkSpec &spec);

VarChunkMap var_chunk_map(const ChunkedFormula &cf);

// Max chunk over the clause's variables; the empty clause maps to chunk 0.
std::size_t clause_chunk(const Clause &c, const VarChunkMap &m);

// Chunk-map sidecar JSON:
//   {"mode":"clause-ranges","ranges":[[0,2],[2,3]]}
//   {"mode":"variable-map","vars":{"1":0,"2":1}}
//   {"mode":"clause-chunks","chunks":[0,1,0]}
// An optional "labels" string array is accepted in either mode.
ChunkSpec parse_chunk_spec(const std::string &json_text);
ChunkSpec read_chunk_spec_file(const std::string &path);
std::string chunk_spec_to_json(const ChunkSpec &spec);
void write_chunk_spec_file(const std::string &path, const ChunkSpec &spec);

} // namespace proofdoor
