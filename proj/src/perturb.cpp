#include "proofdoor/perturb.hpp"

#include "proofdoor/errors.hpp"

#include <json.hpp>

#include <numeric>

namespace proofdoor {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  // Reject the top partial block so every residue is equally likely.
  std::uint64_t limit = -bound % bound;
  for (;;) {
    std::uint64_t r = next();
    if (r >= limit)
      return r % bound;
  }
}

std::vector<std::size_t> seeded_permutation(std::size_t n,
                                            std::uint64_t seed) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  SplitMix64 rng(seed);
  for (std::size_t i = n; i > 1; --i)
    std::swap(p[i - 1], p[rng.below(i)]);
  return p;
}

const char *to_string(ScrambleKind k) {
  return k == ScrambleKind::ByIteration ? "by-iteration" : "by-clause";
}

ScrambleKind parse_scramble_kind(const std::string &s) {
  if (s == "by-iteration")
    return ScrambleKind::ByIteration;
  if (s == "by-clause")
    return ScrambleKind::ByClause;
  throw InputError("unknown scramble kind '" + s + "'");
}

namespace {

CnfFormula permuted(const CnfFormula &f, const std::vector<std::size_t> &perm) {
  std::vector<Clause> out;
  out.reserve(perm.size());
  for (std::size_t i : perm)
    out.push_back(f[i]);
  return CnfFormula(f.num_vars(), std::move(out));
}

} // namespace

ScrambleResult scramble_by_iteration(const ChunkedFormula &cf,
                                     std::uint64_t seed) {
  const std::size_t k = cf.num_chunks();
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < cf.chunk_of_clause().size(); ++i)
    members[cf.chunk_of_clause()[i]].push_back(i);

  ScrambleResult r;
  r.record.kind = ScrambleKind::ByIteration;
  r.record.seed = seed;
  r.record.chunk_order = seeded_permutation(k, seed);
  std::vector<std::size_t> clause_chunks;
  for (std::size_t j : r.record.chunk_order)
    for (std::size_t i : members[j]) {
      r.record.permutation.push_back(i);
      clause_chunks.push_back(j);
    }
  r.formula = permuted(cf.base(), r.record.permutation);
  ChunkSpec spec = ChunkSpec::from_clause_chunks(std::move(clause_chunks));
  spec.labels = cf.labels();
  r.chunk_map = std::move(spec);
  return r;
}

ScrambleResult scramble_by_clause(const CnfFormula &f, std::uint64_t seed) {
  ScrambleResult r;
  r.record.kind = ScrambleKind::ByClause;
  r.record.seed = seed;
  r.record.permutation = seeded_permutation(f.size(), seed);
  r.formula = permuted(f, r.record.permutation);
  return r;
}

CnfFormula unscramble(const CnfFormula &f, const ScrambleRecord &rec) {
  const std::size_t n = rec.permutation.size();
  if (n != f.size())
    throw ContractError("scramble record covers " + std::to_string(n) +
                        " clauses but the formula has " +
                        std::to_string(f.size()));
  std::vector<std::size_t> inverse(n, n);
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t i = rec.permutation[p];
    if (i >= n || inverse[i] != n)
      throw ContractError("scramble record is not a permutation");
    inverse[i] = p;
  }
  return permuted(f, inverse);
}

std::string scramble_record_to_json(const ScrambleRecord &rec) {
  nlohmann::json j;
  j["kind"] = to_string(rec.kind);
  j["seed"] = std::to_string(rec.seed);
  j["permutation"] = rec.permutation;
  if (rec.kind == ScrambleKind::ByIteration)
    j["chunk_order"] = rec.chunk_order;
  return j.dump();
}

ScrambleRecord parse_scramble_record(const std::string &json_text) {
  try {
    auto j = nlohmann::json::parse(json_text);
    ScrambleRecord rec;
    rec.kind = parse_scramble_kind(j.at("kind").get<std::string>());
    const auto &seed = j.at("seed");
    rec.seed = seed.is_string() ? std::stoull(seed.get<std::string>())
                                : seed.get<std::uint64_t>();
    rec.permutation = j.at("permutation").get<std::vector<std::size_t>>();
    if (j.contains("chunk_order"))
      rec.chunk_order = j.at("chunk_order").get<std::vector<std::size_t>>();
    return rec;
  } catch (const nlohmann::json::exception &e) {
    throw InputError(std::string("malformed scramble record: ") + e.what());
  } catch (const std::logic_error &) {
    throw InputError("scramble record seed is not an unsigned integer");
  }
}

} // namespace proofdoor
