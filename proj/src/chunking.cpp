#include "proofdoor/chunking.hpp"

#include "proofdoor/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace proofdoor {

using nlohmann::json;

ChunkSpec ChunkSpec::from_ranges(
    std::vector<std::pair<std::size_t, std::size_t>> ranges) {
  ChunkSpec s;
  s.mode = Mode::ClauseRanges;
  s.ranges = std::move(ranges);
  return s;
}

ChunkSpec ChunkSpec::from_var_map(std::map<Var, std::size_t> var_to_chunk) {
  ChunkSpec s;
  s.mode = Mode::VariableMap;
  s.var_to_chunk = std::move(var_to_chunk);
  return s;
}

ChunkSpec ChunkSpec::from_clause_chunks(
    std::vector<std::size_t> clause_chunks) {
  ChunkSpec s;
  s.mode = Mode::ClauseChunks;
  s.clause_chunks = std::move(clause_chunks);
  return s;
}

std::size_t VarChunkMap::at(Var v) const {
  auto it = chunk_of_.find(v);
  if (it == chunk_of_.end())
    throw ContractError("variable " + std::to_string(v) +
                        " missing from chunk map");
  return it->second;
}

//===----------------------------------------------------------------------===//
// ChunkedFormula
//===----------------------------------------------------------------------===//

ChunkedFormula::ChunkedFormula(CnfFormula base, std::vector<CnfFormula> chunks,
                               std::vector<std::size_t> chunk_of_clause,
                               std::vector<std::string> labels)
    : base_(std::move(base)), chunks_(std::move(chunks)),
      chunk_of_clause_(std::move(chunk_of_clause)),
      labels_(std::move(labels)) {
  const std::size_t n = chunks_.size();
  const Var nv = base_.num_vars();
  // first[v] / last[v]: first and last chunk containing v.
  std::vector<std::size_t> first(nv + 1, n), last(nv + 1, 0);
  std::vector<bool> occurs(nv + 1, false);
  for (std::size_t j = 0; j < n; ++j)
    for (const Clause &c : chunks_[j])
      for (Lit l : c) {
        occurs[l.var()] = true;
        first[l.var()] = std::min(first[l.var()], j);
        last[l.var()] = std::max(last[l.var()], j);
      }
  cut_vars_.assign(n ? n - 1 : 0, {});
  local_vars_.assign(n, {});
  for (Var v = 1; v <= nv; ++v) {
    if (!occurs[v])
      continue;
    for (std::size_t j = first[v]; j < last[v]; ++j)
      cut_vars_[j].push_back(v);
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (Var v : chunks_[j].variables())
      if (last[v] == j)
        local_vars_[j].push_back(v);
  }
}

CnfFormula ChunkedFormula::span(std::size_t from, std::size_t to) const {
  std::vector<Clause> out;
  for (std::size_t j = from; j <= to && j < chunks_.size(); ++j)
    out.insert(out.end(), chunks_[j].begin(), chunks_[j].end());
  return CnfFormula(base_.num_vars(), std::move(out));
}

ChunkedFormula build_chunked(const CnfFormula &f, const ChunkSpec &spec) {
  std::vector<std::size_t> chunk_of(f.size(), 0);
  std::size_t num_chunks = 0;

  if (spec.mode == ChunkSpec::Mode::ClauseRanges) {
    std::size_t expect = 0;
    for (std::size_t i = 0; i < spec.ranges.size(); ++i) {
      auto [b, e] = spec.ranges[i];
      if (b < expect)
        throw InputError("overlapping clause ranges at chunk " +
                         std::to_string(i));
      if (b > expect)
        throw InputError("clauses [" + std::to_string(expect) + ", " +
                         std::to_string(b) + ") are not covered");
      if (e <= b)
        throw InputError("chunk " + std::to_string(i) + " has zero clauses");
      if (e > f.size())
        throw InputError("range end " + std::to_string(e) +
                         " exceeds clause count " + std::to_string(f.size()));
      for (std::size_t c = b; c < e; ++c)
        chunk_of[c] = i;
      expect = e;
    }
    if (expect != f.size())
      throw InputError("clauses from index " + std::to_string(expect) +
                       " are not covered");
    num_chunks = spec.ranges.size();
  } else if (spec.mode == ChunkSpec::Mode::ClauseChunks) {
    if (spec.clause_chunks.size() != f.size())
      throw InputError("chunk list has " +
                       std::to_string(spec.clause_chunks.size()) +
                       " entries for " + std::to_string(f.size()) +
                       " clauses");
    chunk_of = spec.clause_chunks;
    for (std::size_t j : chunk_of)
      num_chunks = std::max(num_chunks, j + 1);
    std::vector<bool> used(num_chunks, false);
    for (std::size_t j : chunk_of)
      used[j] = true;
    for (std::size_t j = 0; j < num_chunks; ++j)
      if (!used[j])
        throw InputError("chunk " + std::to_string(j) + " has zero clauses");
  } else {
    for (Var v : f.variables())
      if (!spec.var_to_chunk.count(v))
        throw InputError("variable " + std::to_string(v) +
                         " is not covered by the variable map");
    VarChunkMap m(spec.var_to_chunk);
    for (std::size_t i = 0; i < f.size(); ++i) {
      chunk_of[i] = clause_chunk(f[i], m);
      num_chunks = std::max(num_chunks, chunk_of[i] + 1);
    }
    for (const auto &[v, j] : spec.var_to_chunk)
      num_chunks = std::max(num_chunks, j + 1);
  }

  if (num_chunks < 2)
    throw InputError("a chunked formula needs at least 2 chunks");
  std::vector<std::vector<Clause>> parts(num_chunks);
  for (std::size_t i = 0; i < f.size(); ++i)
    parts[chunk_of[i]].push_back(f[i]);
  std::vector<CnfFormula> chunks;
  chunks.reserve(num_chunks);
  for (std::size_t j = 0; j < num_chunks; ++j) {
    if (parts[j].empty())
      throw InputError("chunk " + std::to_string(j) + " has zero clauses");
    chunks.emplace_back(f.num_vars(), std::move(parts[j]));
  }
  std::vector<std::string> labels = spec.labels;
  if (!labels.empty() && labels.size() != num_chunks)
    throw InputError("label count " + std::to_string(labels.size()) +
                     " does not match chunk count " +
                     std::to_string(num_chunks));
  return ChunkedFormula(f, std::move(chunks), std::move(chunk_of),
                        std::move(labels));
}

VarChunkMap var_chunk_map(const ChunkedFormula &cf) {
  std::map<Var, std::size_t> m;
  for (std::size_t j = 0; j < cf.num_chunks(); ++j)
    for (const Clause &c : cf.chunk(j))
      for (Lit l : c)
        m[l.var()] = j; // chunks visited in order, so the last write wins
  return VarChunkMap(std::move(m));
}

std::size_t clause_chunk(const Clause &c, const VarChunkMap &m) {
  std::size_t k = 0;
  for (Lit l : c)
    k = std::max(k, m.at(l.var()));
  return k;
}

//===----------------------------------------------------------------------===//
// Chunk-map JSON
//===----------------------------------------------------------------------===//

ChunkSpec parse_chunk_spec(const std::string &json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw InputError(std::string("chunk map is not valid JSON: ") + e.what());
  }
  try {
    ChunkSpec spec;
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "clause-ranges") {
      spec.mode = ChunkSpec::Mode::ClauseRanges;
      for (const auto &r : j.at("ranges")) {
        if (!r.is_array() || r.size() != 2)
          throw InputError("chunk map range must be a [begin, end] pair");
        spec.ranges.emplace_back(r[0].get<std::size_t>(),
                                 r[1].get<std::size_t>());
      }
    } else if (mode == "variable-map") {
      spec.mode = ChunkSpec::Mode::VariableMap;
      for (const auto &[key, value] : j.at("vars").items()) {
        long long v = std::stoll(key);
        if (v < 1)
          throw InputError("chunk map variable '" + key + "' is not positive");
        spec.var_to_chunk[static_cast<Var>(v)] = value.get<std::size_t>();
      }
    } else if (mode == "clause-chunks") {
      spec.mode = ChunkSpec::Mode::ClauseChunks;
      spec.clause_chunks = j.at("chunks").get<std::vector<std::size_t>>();
    } else {
      throw InputError("unknown chunk map mode '" + mode + "'");
    }
    if (j.contains("labels"))
      spec.labels = j.at("labels").get<std::vector<std::string>>();
    return spec;
  } catch (const json::exception &e) {
    throw InputError(std::string("malformed chunk map: ") + e.what());
  } catch (const std::invalid_argument &) {
    throw InputError("chunk map variable keys must be integers");
  }
}

ChunkSpec read_chunk_spec_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open chunk map '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_chunk_spec(ss.str());
}

std::string chunk_spec_to_json(const ChunkSpec &spec) {
  json j;
  if (spec.mode == ChunkSpec::Mode::ClauseRanges) {
    j["mode"] = "clause-ranges";
    j["ranges"] = json::array();
    for (auto [b, e] : spec.ranges)
      j["ranges"].push_back({b, e});
  } else if (spec.mode == ChunkSpec::Mode::ClauseChunks) {
    j["mode"] = "clause-chunks";
    j["chunks"] = spec.clause_chunks;
  } else {
    j["mode"] = "variable-map";
    j["vars"] = json::object();
    for (auto [v, c] : spec.var_to_chunk)
      j["vars"][std::to_string(v)] = c;
  }
  if (!spec.labels.empty())
    j["labels"] = spec.labels;
  return j.dump();
}

void write_chunk_spec_file(const std::string &path, const ChunkSpec &spec) {
  std::ofstream out(path);
  if (!out)
    throw InputError("cannot write '" + path + "'");
  out << chunk_spec_to_json(spec) << '\n';
}

} // namespace proofdoor
