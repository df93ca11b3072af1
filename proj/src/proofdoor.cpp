#include "proofdoor/proofdoor.hpp"

#include "proofdoor/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace proofdoor {

namespace fs = std::filesystem;
using nlohmann::json;

const char *to_string(CutOutcome::Status s) {
  switch (s) {
  case CutOutcome::Status::Ok:
    return "ok";
  case CutOutcome::Status::Blowup:
    return "blowup";
  case CutOutcome::Status::Budget:
    return "budget";
  case CutOutcome::Status::Error:
    return "error";
  }
  return "?";
}

bool Proofdoor::valid() const {
  if (!complete() || final_check != Verdict::True)
    return false;
  for (const CutOutcome &c : cuts)
    if (!c.validation || !c.validation->all_true())
      return false;
  return true;
}

//===----------------------------------------------------------------------===//
// Construction
//===----------------------------------------------------------------------===//

namespace {

InterpolantReport interpolate(const CutProblem &p, InterpolantKind kind,
                              const InterpolationOptions &opts) {
  switch (kind) {
  case InterpolantKind::Strongest:
    return strongest_interpolant(p, opts);
  case InterpolantKind::Weakest:
    return weakest_interpolant(p, opts);
  case InterpolantKind::McMillan:
    return mcmillan_interpolant(p, opts);
  }
  throw ContractError("unknown interpolant kind");
}

} // namespace

Proofdoor build_proofdoor(const ChunkedFormula &cf, InterpolantKind kind,
                          const ProofdoorOptions &opts) {
  const std::size_t n = cf.num_chunks();
  if (n < 2)
    throw ContractError("a proofdoor needs at least two chunks");
  Proofdoor pd;
  pd.kind = kind;
  CnfFormula prev; // I_0 = ⊤
  for (std::size_t j = 0; j + 1 < n; ++j) {
    auto start = std::chrono::steady_clock::now();
    CnfFormula a = prev.conjoin(cf.chunk(j));
    CutProblem p = CutProblem::make(a, cf.span(j + 1, n - 1));
    CutOutcome out;
    CnfFormula itp;
    try {
      itp = interpolate(p, kind, opts.interp).interpolant;
    } catch (const BlowupError &e) {
      out.status = CutOutcome::Status::Blowup;
      out.message = e.what();
    } catch (const BudgetExhausted &e) {
      out.status = CutOutcome::Status::Budget;
      out.message = e.what();
    } catch (const ContractError &e) {
      out.status = CutOutcome::Status::Error;
      out.message = e.what();
    }
    if (out.status != CutOutcome::Status::Ok) {
      itp = a;
      if (!pd.failure_index)
        pd.failure_index = j;
    }
    if (opts.validate)
      out.validation = validate_interpolant(p, itp, opts.interp.solver);
    out.clause_count = itp.size();
    out.wall_time_s = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    pd.interpolants.push_back(itp);
    pd.cuts.push_back(std::move(out));
    prev = std::move(itp);
  }
  auto last = is_unsat(prev.conjoin(cf.chunk(n - 1)), opts.interp.solver);
  pd.final_check =
      !last ? Verdict::Indeterminate : (*last ? Verdict::True : Verdict::False);
  return pd;
}

Proofdoor strongest_proofdoor(const ChunkedFormula &cf,
                              const ProofdoorOptions &opts) {
  return build_proofdoor(cf, InterpolantKind::Strongest, opts);
}

LatticeSample sample_lattice(const ChunkedFormula &cf,
                             const ProofdoorOptions &opts) {
  return {build_proofdoor(cf, InterpolantKind::Strongest, opts),
          build_proofdoor(cf, InterpolantKind::McMillan, opts),
          build_proofdoor(cf, InterpolantKind::Weakest, opts)};
}

//===----------------------------------------------------------------------===//
// Parameters
//===----------------------------------------------------------------------===//

ProofdoorParams measure_params(const Proofdoor &pd, const ChunkedFormula &cf,
                               const SolverOptions &solver) {
  if (pd.interpolants.size() + 1 != cf.num_chunks())
    throw ContractError("proofdoor has " +
                        std::to_string(pd.interpolants.size()) +
                        " interpolants for " +
                        std::to_string(cf.num_chunks()) + " chunks");
  ProofdoorParams r;
  r.k = cf.num_chunks();
  r.c = 1;
  for (const CnfFormula &i : pd.interpolants)
    r.c = std::max(r.c, i.size());
  for (const CnfFormula &chunk : cf.chunks())
    r.w = std::max(r.w, pathwidth_bound(chunk.clauses()));

  try {
    for (std::size_t j = 0; j < pd.interpolants.size(); ++j) {
      const CnfFormula prev = j == 0 ? CnfFormula() : pd.interpolants[j - 1];
      const CnfFormula &chunk = cf.chunk(j);
      std::size_t greedy = 0;
      for (const Clause &c : pd.interpolants[j]) {
        std::vector<Clause> s = prev.clauses();
        auto holds = [&](const std::vector<Clause> &support) {
          auto r = entails(chunk.with(support),
                           CnfFormula(std::vector<Clause>{c}), solver);
          if (!r)
            throw BudgetExhausted("greedy dependency check");
          return *r;
        };
        if (holds(s)) {
          for (std::size_t k = 0; k < s.size();) {
            std::vector<Clause> trial = s;
            trial.erase(trial.begin() + k);
            if (holds(trial))
              s = std::move(trial);
            else
              ++k;
          }
        }
        greedy = std::max(greedy, s.size());
      }
      r.s_bound = std::max(r.s_bound, std::min(prev.size(), greedy));
    }
  } catch (const BudgetExhausted &) {
    r.s_bound = r.c;
    r.s_exact_fallback = true;
  }
  return r;
}

std::size_t vertex_separation(const std::vector<std::vector<std::size_t>> &adj,
                              const std::vector<std::size_t> &order) {
  const std::size_t n = adj.size();
  if (order.size() != n)
    throw ContractError("vertex order does not cover the graph");
  std::vector<std::size_t> pos(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (order[i] >= n || pos[order[i]] != n)
      throw ContractError("vertex order is not a permutation");
    pos[order[i]] = i;
  }
  // Vertex u counts at every prefix end in [pos(u), reach(u)).
  std::vector<long> delta(n + 1, 0);
  for (std::size_t u = 0; u < n; ++u) {
    std::size_t reach = pos[u];
    for (std::size_t w : adj[u])
      reach = std::max(reach, pos[w]);
    if (reach > pos[u]) {
      ++delta[pos[u]];
      --delta[reach];
    }
  }
  long best = 0, cur = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cur += delta[i];
    best = std::max(best, cur);
  }
  return static_cast<std::size_t>(best);
}

std::vector<IncidenceVertex>
default_incidence_order(const std::vector<Clause> &chunk) {
  std::map<Var, std::vector<std::size_t>> after;
  std::vector<IncidenceVertex> order;
  for (std::size_t i = 0; i < chunk.size(); ++i) {
    if (chunk[i].empty()) {
      order.push_back({true, i});
      continue;
    }
    Var lo = chunk[i].max_var();
    for (Lit l : chunk[i])
      lo = std::min(lo, l.var());
    after[lo].push_back(i);
    for (Lit l : chunk[i])
      after.try_emplace(l.var());
  }
  for (const auto &[v, clauses] : after) {
    order.push_back({false, v});
    for (std::size_t i : clauses)
      order.push_back({true, i});
  }
  return order;
}

std::size_t
pathwidth_bound(const std::vector<Clause> &chunk,
                const std::optional<std::vector<IncidenceVertex>> &order) {
  std::map<Var, std::size_t> var_id;
  for (const Clause &c : chunk)
    for (Lit l : c)
      var_id.try_emplace(l.var(), 0);
  std::size_t next = chunk.size();
  for (auto &[v, id] : var_id)
    id = next++;
  std::vector<std::vector<std::size_t>> adj(next);
  for (std::size_t i = 0; i < chunk.size(); ++i)
    for (Lit l : chunk[i]) {
      std::size_t vid = var_id[l.var()];
      adj[i].push_back(vid);
      adj[vid].push_back(i);
    }
  const std::vector<IncidenceVertex> ord =
      order ? *order : default_incidence_order(chunk);
  std::vector<std::size_t> ids;
  ids.reserve(ord.size());
  for (const IncidenceVertex &v : ord) {
    if (v.is_clause) {
      if (v.id >= chunk.size())
        throw ContractError("order names clause " + std::to_string(v.id) +
                            " outside the chunk");
      ids.push_back(v.id);
    } else {
      auto it = var_id.find(static_cast<Var>(v.id));
      if (it == var_id.end())
        throw ContractError("order names variable " + std::to_string(v.id) +
                            " absent from the chunk");
      ids.push_back(it->second);
    }
  }
  return vertex_separation(adj, ids);
}

//===----------------------------------------------------------------------===//
// Archive
//===----------------------------------------------------------------------===//

namespace {

Verdict parse_verdict(const std::string &s) {
  if (s == "true")
    return Verdict::True;
  if (s == "false")
    return Verdict::False;
  if (s == "indeterminate")
    return Verdict::Indeterminate;
  throw InputError("bad verdict '" + s + "' in manifest");
}

CutOutcome::Status parse_status(const std::string &s) {
  for (auto st : {CutOutcome::Status::Ok, CutOutcome::Status::Blowup,
                  CutOutcome::Status::Budget, CutOutcome::Status::Error})
    if (s == to_string(st))
      return st;
  throw InputError("bad cut status '" + s + "' in manifest");
}

std::string interpolant_file(std::size_t j) {
  return "I_" + std::to_string(j + 1) + ".cnf";
}

} // namespace

std::string proofdoor_manifest_json(const Proofdoor &pd,
                                    const std::optional<ProofdoorParams> &p) {
  json j;
  j["kind"] = to_string(pd.kind);
  j["num_interpolants"] = pd.interpolants.size();
  j["complete"] = pd.complete();
  j["valid"] = pd.valid();
  j["failure_index"] =
      pd.failure_index ? json(*pd.failure_index + 1) : json(nullptr);
  j["final_check"] = to_string(pd.final_check);
  json cuts = json::array();
  for (std::size_t i = 0; i < pd.cuts.size(); ++i) {
    const CutOutcome &c = pd.cuts[i];
    json e;
    e["index"] = i + 1;
    e["file"] = interpolant_file(i);
    e["status"] = to_string(c.status);
    if (!c.message.empty())
      e["message"] = c.message;
    e["clause_count"] = c.clause_count;
    if (c.validation)
      e["validation"] = {{"a_implies_i", to_string(c.validation->a_implies_i)},
                         {"i_and_b_unsat",
                          to_string(c.validation->i_and_b_unsat)},
                         {"scope", to_string(c.validation->scope)}};
    else
      e["validation"] = nullptr;
    e["wall_time_s"] = c.wall_time_s;
    cuts.push_back(std::move(e));
  }
  j["cuts"] = std::move(cuts);
  if (p)
    j["params"] = {{"c", p->c},
                   {"w", p->w},
                   {"s_bound", p->s_bound},
                   {"k", p->k},
                   {"s_fallback", p->s_exact_fallback}};
  else
    j["params"] = nullptr;
  return j.dump(2);
}

void write_proofdoor_archive(const std::string &dir, const Proofdoor &pd,
                             const std::optional<ProofdoorParams> &params) {
  fs::create_directories(dir);
  for (std::size_t j = 0; j < pd.interpolants.size(); ++j)
    write_dimacs_file((fs::path(dir) / interpolant_file(j)).string(),
                      pd.interpolants[j]);
  std::ofstream out(fs::path(dir) / "manifest.json");
  if (!out)
    throw Error("cannot write manifest in " + dir);
  out << proofdoor_manifest_json(pd, params) << '\n';
}

Proofdoor read_proofdoor_archive(const std::string &dir) {
  fs::path manifest = fs::path(dir) / "manifest.json";
  std::ifstream in(manifest);
  if (!in)
    throw InputError("missing " + manifest.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception &e) {
    throw InputError(manifest.string() + ": " + e.what());
  }
  Proofdoor pd;
  try {
    pd.kind = parse_interpolant_kind(j.at("kind").get<std::string>());
    pd.final_check = parse_verdict(j.at("final_check").get<std::string>());
    if (!j.at("failure_index").is_null())
      pd.failure_index = j["failure_index"].get<std::size_t>() - 1;
    for (const json &e : j.at("cuts")) {
      CutOutcome c;
      c.status = parse_status(e.at("status").get<std::string>());
      c.clause_count = e.at("clause_count").get<std::size_t>();
      c.wall_time_s = e.value("wall_time_s", 0.0);
      c.message = e.value("message", std::string());
      if (e.contains("validation") && !e["validation"].is_null()) {
        const json &v = e["validation"];
        c.validation = ValidationTriple{
            parse_verdict(v.at("a_implies_i").get<std::string>()),
            parse_verdict(v.at("i_and_b_unsat").get<std::string>()),
            parse_verdict(v.at("scope").get<std::string>())};
      }
      std::string file = e.value("file", interpolant_file(pd.cuts.size()));
      pd.interpolants.push_back(
          read_dimacs_file((fs::path(dir) / file).string()));
      pd.cuts.push_back(std::move(c));
    }
  } catch (const json::exception &e) {
    throw InputError(manifest.string() + ": " + e.what());
  }
  return pd;
}

} // namespace proofdoor
