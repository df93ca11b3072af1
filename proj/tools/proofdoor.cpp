// Command-line front end: one subcommand per pipeline stage.
//
// Exit codes: 0 ok, 2 input error, 3 blow-up or budget exhausted,
// 4 validation failure (including a satisfiable formula where a refutation
// is required). Diagnostics go to stderr; stdout stays empty unless
// --json-to-stdout is given.

#include "proofdoor/absorption.hpp"
#include "proofdoor/chunking.hpp"
#include "proofdoor/cnf.hpp"
#include "proofdoor/errors.hpp"
#include "proofdoor/interpolation.hpp"
#include "proofdoor/perturb.hpp"
#include "proofdoor/proofdoor.hpp"
#include "proofdoor/sat.hpp"
#include "proofdoor/scaling.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#ifndef PROOFDOOR_VERSION
#define PROOFDOOR_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace proofdoor;

namespace {

enum Exit : int {
  kOk = 0,
  kInternal = 1,
  kInput = 2,
  kBlowup = 3,
  kValidation = 4,
};

struct Global {
  std::size_t jobs = 1;
  bool json_to_stdout = false;
  std::string manifest;
  bool quiet = false;
};

void note(const Global &g, const std::string &msg) {
  if (!g.quiet)
    std::cerr << msg << '\n';
}

void warn(const std::string &msg) { std::cerr << "warning: " << msg << '\n'; }

void write_text(const fs::path &p, const std::string &text) {
  std::ofstream out(p, std::ios::binary);
  if (!out)
    throw InputError("cannot write '" + p.string() + "'");
  out << text;
}

void make_dir(const fs::path &p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec)
    throw InputError("cannot create directory '" + p.string() +
                     "': " + ec.message());
}

json input_entry(const std::string &role, const std::string &path) {
  std::error_code ec;
  auto size = fs::file_size(path, ec);
  return {{"role", role},
          {"path", path},
          {"bytes", ec ? json(nullptr) : json(size)}};
}

// Provenance record for one invocation.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  json inputs = json::array();
  json seeds = json::object();
  json extra = json::object();
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void write(const fs::path &p, int exit_code) const {
    double wall = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    json j{{"tool", "proofdoor"},
           {"version", PROOFDOOR_VERSION},
           {"command", command},
           {"argv", argv},
           {"inputs", inputs},
           {"seeds", seeds},
           {"exit_code", exit_code},
           {"wall_time_s", wall}};
    for (auto &[k, v] : extra.items())
      j[k] = v;
    write_text(p, j.dump(2) + "\n");
  }
};

SolverOptions solver_options(std::optional<std::uint64_t> conflicts,
                             std::optional<double> seconds) {
  SolverOptions o;
  o.conflict_budget = conflicts;
  if (seconds)
    o.time_budget = std::chrono::duration<double>(*seconds);
  return o;
}

ChunkedFormula load_chunked(const std::string &cnf, const std::string &map) {
  CnfFormula f = read_dimacs_file(cnf, warn);
  return build_chunked(f, read_chunk_spec_file(map));
}

void emit_json(const Global &g, const json &j) {
  if (g.json_to_stdout)
    std::cout << j.dump(2) << '\n';
}

//===----------------------------------------------------------------------===//
// solve
//===----------------------------------------------------------------------===//

struct SolveArgs {
  std::string cnf;
  std::string drat;
  std::string external;
  std::optional<std::uint64_t> conflicts;
  std::optional<double> seconds;
};

int run_solve(const SolveArgs &a, const Global &g, RunManifest &m) {
  m.inputs.push_back(input_entry("cnf", a.cnf));
  CnfFormula f = read_dimacs_file(a.cnf, warn);
  SolveResult r;
  if (!a.external.empty()) {
    ExternalSolverOptions eo;
    eo.command = a.external;
    if (a.seconds)
      eo.timeout = std::chrono::duration<double>(*a.seconds);
    r = run_external_solver(f, eo);
  } else {
    r = solve(f, solver_options(a.conflicts, a.seconds));
  }
  json j{{"status", to_string(r.status)},
         {"decisions", r.stats.decisions},
         {"conflicts", r.stats.conflicts},
         {"propagations", r.stats.propagations},
         {"restarts", r.stats.restarts}};
  if (r.status == SolveStatus::Sat) {
    std::vector<int> model;
    for (Var v = 1; v <= f.num_vars(); ++v)
      if (LBool val = r.model.value(v); val != LBool::Undef)
        model.push_back(val == LBool::True ? static_cast<int>(v)
                                           : -static_cast<int>(v));
    j["model"] = model;
  }
  if (r.status == SolveStatus::Unsat) {
    j["trace_additions"] = r.trace.additions.size();
    if (!a.drat.empty())
      write_drat_file(a.drat, r.trace);
  }
  note(g, std::string("s ") + to_string(r.status));
  m.extra["result"] = j;
  emit_json(g, j);
  return r.status == SolveStatus::BudgetExhausted ? kBlowup : kOk;
}

//===----------------------------------------------------------------------===//
// proofdoor
//===----------------------------------------------------------------------===//

struct InterpArgs {
  std::size_t max_clauses = InterpolationOptions{}.max_clauses;
  std::size_t bve_threshold = InterpolationOptions{}.bve_threshold;
  bool no_prime_closure = false;
  std::optional<std::uint64_t> conflicts;
  std::optional<double> seconds;

  InterpolationOptions options() const {
    InterpolationOptions o;
    o.max_clauses = max_clauses;
    o.bve_threshold = bve_threshold;
    o.prime_closure = !no_prime_closure;
    o.solver = solver_options(conflicts, seconds);
    return o;
  }
};

void add_interp_flags(CLI::App *sub, InterpArgs &a) {
  sub->add_option("--max-clauses", a.max_clauses,
                  "Clause cap for any intermediate formula")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--bve-threshold", a.bve_threshold,
                  "Eliminate v when resolvents <= occurrences + threshold")
      ->capture_default_str();
  sub->add_flag("--no-prime-closure", a.no_prime_closure,
                "Skip consensus closure of the strongest interpolant");
  sub->add_option("--conflict-budget", a.conflicts,
                  "Conflict budget per SAT call")
      ->check(CLI::PositiveNumber);
  sub->add_option("--time-budget", a.seconds,
                  "Seconds per SAT call")
      ->check(CLI::PositiveNumber);
}

struct ProofdoorArgs {
  std::string cnf;
  std::string chunks;
  std::string out;
  std::string kind = "strongest";
  bool no_validate = false;
  bool no_params = false;
  InterpArgs interp;
};

// Worst outcome of a proofdoor run as an exit code.
int proofdoor_exit(const Proofdoor &pd) {
  bool invalid = pd.final_check == Verdict::False;
  bool unsure = pd.final_check == Verdict::Indeterminate;
  for (const CutOutcome &c : pd.cuts) {
    if (c.validation && c.validation->any_false())
      invalid = true;
    else if (c.validation && !c.validation->all_true())
      unsure = true;
  }
  if (invalid)
    return kValidation;
  if (!pd.complete() || unsure)
    return kBlowup;
  return kOk;
}

int run_proofdoor(const ProofdoorArgs &a, const Global &g, RunManifest &m) {
  m.inputs.push_back(input_entry("cnf", a.cnf));
  m.inputs.push_back(input_entry("chunks", a.chunks));
  ChunkedFormula cf = load_chunked(a.cnf, a.chunks);
  ProofdoorOptions po;
  po.interp = a.interp.options();
  po.validate = !a.no_validate;

  std::vector<InterpolantKind> kinds;
  if (a.kind == "all")
    kinds = {InterpolantKind::Strongest, InterpolantKind::McMillan,
             InterpolantKind::Weakest};
  else
    kinds = {parse_interpolant_kind(a.kind)};

  make_dir(a.out);
  int code = kOk;
  json summary = json::array();
  for (InterpolantKind k : kinds) {
    Proofdoor pd = build_proofdoor(cf, k, po);
    std::optional<ProofdoorParams> params;
    if (!a.no_params)
      params = measure_params(pd, cf, po.interp.solver);
    fs::path dir = kinds.size() == 1 ? fs::path(a.out)
                                     : fs::path(a.out) / to_string(k);
    write_proofdoor_archive(dir.string(), pd, params);
    int c = proofdoor_exit(pd);
    note(g, std::string(to_string(k)) + ": " +
                std::to_string(pd.interpolants.size()) + " interpolants, " +
                (pd.complete() ? "complete" : "incomplete") +
                ", final check " + to_string(pd.final_check));
    for (std::size_t j = 0; j < pd.cuts.size(); ++j)
      if (pd.cuts[j].status != CutOutcome::Status::Ok)
        note(g, "  cut I_" + std::to_string(j + 1) + ": " +
                    to_string(pd.cuts[j].status) + " " + pd.cuts[j].message);
    summary.push_back(json::parse(proofdoor_manifest_json(pd, params)));
    code = std::max(code, c);
  }
  m.extra["proofdoors"] = summary;
  emit_json(g, summary.size() == 1 ? summary[0] : summary);
  return code;
}

//===----------------------------------------------------------------------===//
// absorb
//===----------------------------------------------------------------------===//

struct AbsorbArgs {
  std::string cnf;
  std::string chunks;
  std::string archive;
  std::string drat;
  bool solve = false;
  std::string external;
  std::string out;
  bool include_empty = false;
  std::optional<std::uint64_t> conflicts;
  std::optional<double> seconds;
};

int run_absorb(const AbsorbArgs &a, const Global &g, RunManifest &m) {
  m.inputs.push_back(input_entry("cnf", a.cnf));
  m.inputs.push_back(input_entry("chunks", a.chunks));
  m.inputs.push_back(input_entry("proofdoor", a.archive));
  ChunkedFormula cf = load_chunked(a.cnf, a.chunks);
  Proofdoor pd = read_proofdoor_archive(a.archive);

  DratTrace trace;
  if (!a.drat.empty()) {
    m.inputs.push_back(input_entry("drat", a.drat));
    trace = read_drat_file(a.drat, warn);
    DratCheck chk = check_drat(cf.base(), trace);
    if (!chk) {
      std::string where =
          chk.failed_index < trace.lines.size()
              ? "line " + std::to_string(trace.lines[chk.failed_index])
              : "end of trace";
      throw InputError("DRAT check failed at " + where + " (addition " +
                       std::to_string(chk.failed_index + 1) +
                       "): " + chk.message);
    }
  } else {
    SolveResult r;
    if (!a.external.empty()) {
      ExternalSolverOptions eo;
      eo.command = a.external;
      if (a.seconds)
        eo.timeout = std::chrono::duration<double>(*a.seconds);
      r = run_external_solver(cf.base(), eo);
    } else {
      r = solve(cf.base(), solver_options(a.conflicts, a.seconds));
    }
    if (r.status == SolveStatus::Sat) {
      std::cerr << "error: formula is satisfiable; there is no refutation\n";
      return kValidation;
    }
    if (r.status == SolveStatus::BudgetExhausted)
      throw BudgetExhausted("solver budget exhausted before a refutation");
    trace = std::move(r.trace);
  }

  PartialProofs pp =
      partition_trace(cf.base(), trace, var_chunk_map(cf), cf.num_chunks());
  HeatmapOptions ho;
  ho.jobs = g.jobs;
  ho.include_empty_clause = a.include_empty;
  AbsorptionMatrix h = heatmap(pp, pd, ho);

  make_dir(a.out);
  std::ostringstream csv, svg;
  write_heatmap_csv(csv, h);
  write_heatmap_svg(svg, h);
  write_text(fs::path(a.out) / "heatmap.csv", csv.str());
  write_text(fs::path(a.out) / "heatmap.svg", svg.str());
  std::string score = heatmap_summary_json(h);
  write_text(fs::path(a.out) / "score.json", score + "\n");
  json sj = json::parse(score);
  note(g, "incrementality score " + sj["score"].dump());
  m.extra["score"] = sj["score"];
  m.extra["trace_additions"] = trace.additions.size();
  emit_json(g, sj);
  return kOk;
}

//===----------------------------------------------------------------------===//
// classify
//===----------------------------------------------------------------------===//

struct ClassifyArgs {
  std::string csv;
  std::string out;
  int degree = 3;
  bool parity = false;
  std::string size = "clauses";
  bool plot = false;
  int refine = ClassifyOptions{}.exp_refine_iterations;
};

std::string file_stem_for(const std::string &family) {
  std::string s;
  for (char c : family)
    s += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'
             ? c
             : '_';
  return s.empty() ? "family" : s;
}

int run_classify(const ClassifyArgs &a, const Global &g, RunManifest &m) {
  m.inputs.push_back(input_entry("timings", a.csv));
  auto fams = read_timing_csv_file(a.csv);
  ClassifyOptions o;
  o.poly_degree = a.degree;
  o.size = a.size == "vars" ? SizeMeasure::Vars : SizeMeasure::Clauses;
  o.exp_refine_iterations = a.refine;
  auto reports = classify_all(fams, o, a.parity, g.jobs);
  std::string text = scaling_report_json(reports);
  make_dir(a.out);
  write_text(fs::path(a.out) / "report.json", text + "\n");
  if (a.plot)
    for (std::size_t i = 0; i < fams.size(); ++i) {
      std::ostringstream svg;
      write_fit_svg(svg, fams[i], reports[i].fit, o);
      write_text(fs::path(a.out) / (file_stem_for(fams[i].family) + ".svg"),
                 svg.str());
    }
  for (const FamilyReport &r : reports) {
    std::string line = r.family + ": " + to_string(r.fit.label);
    if (r.fit.parity_labels)
      line += std::string(" (odd ") + to_string(r.fit.parity_labels->first) +
              ", even " + to_string(r.fit.parity_labels->second) + ")";
    note(g, line);
  }
  emit_json(g, json::parse(text));
  return kOk;
}

//===----------------------------------------------------------------------===//
// scramble
//===----------------------------------------------------------------------===//

struct ScrambleArgs {
  std::string cnf;
  std::string kind;
  std::uint64_t seed = 0;
  std::string chunks;
  std::string out;
  std::string undo;
};

int run_scramble(const ScrambleArgs &a, const Global &g, RunManifest &m) {
  m.inputs.push_back(input_entry("cnf", a.cnf));
  CnfFormula f = read_dimacs_file(a.cnf, warn);
  if (!a.undo.empty()) {
    m.inputs.push_back(input_entry("record", a.undo));
    std::ifstream in(a.undo);
    if (!in)
      throw InputError("cannot open scramble record '" + a.undo + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    ScrambleRecord rec = parse_scramble_record(ss.str());
    write_dimacs_file(a.out, unscramble(f, rec));
    note(g, "restored original clause order");
    return kOk;
  }
  if (a.kind.empty())
    throw InputError("--kind is required unless --undo is given");
  ScrambleKind kind = parse_scramble_kind(a.kind);
  m.seeds["scramble"] = std::to_string(a.seed);
  ScrambleResult r;
  if (kind == ScrambleKind::ByIteration) {
    if (a.chunks.empty())
      throw InputError("by-iteration scrambling needs --chunks");
    m.inputs.push_back(input_entry("chunks", a.chunks));
    r = scramble_by_iteration(build_chunked(f, read_chunk_spec_file(a.chunks)),
                              a.seed);
  } else {
    r = scramble_by_clause(f, a.seed);
  }
  write_dimacs_file(a.out, r.formula);
  write_text(a.out + ".scramble.json",
             scramble_record_to_json(r.record) + "\n");
  if (r.chunk_map)
    write_chunk_spec_file(a.out + ".chunks.json", *r.chunk_map);
  note(g, std::string(to_string(kind)) + " scramble written to " + a.out);
  emit_json(g, json::parse(scramble_record_to_json(r.record)));
  return kOk;
}

//===----------------------------------------------------------------------===//
// validate-itp
//===----------------------------------------------------------------------===//

struct ValidateArgs {
  std::string a, b, itp;
  std::string cnf, chunks, archive;
  std::string qdimacs;
  std::optional<std::uint64_t> conflicts;
  std::optional<double> seconds;
};

json triple_json(const ValidationTriple &t) {
  return {{"a_implies_i", to_string(t.a_implies_i)},
          {"i_and_b_unsat", to_string(t.i_and_b_unsat)},
          {"scope", to_string(t.scope)}};
}

int triple_exit(const ValidationTriple &t) {
  if (t.any_false())
    return kValidation;
  return t.all_true() ? kOk : kBlowup;
}

int run_validate(const ValidateArgs &a, const Global &g, RunManifest &m) {
  SolverOptions so = solver_options(a.conflicts, a.seconds);
  if (!a.a.empty() || !a.b.empty() || !a.itp.empty()) {
    if (a.a.empty() || a.b.empty() || a.itp.empty())
      throw InputError("--a, --b and --itp go together");
    for (auto [role, p] : {std::pair{"a", a.a}, {"b", a.b}, {"itp", a.itp}})
      m.inputs.push_back(input_entry(role, p));
    CutProblem p = CutProblem::make(read_dimacs_file(a.a, warn),
                                    read_dimacs_file(a.b, warn));
    ValidationTriple t =
        validate_interpolant(p, read_dimacs_file(a.itp, warn), so);
    if (!a.qdimacs.empty()) {
      std::ofstream out(a.qdimacs);
      if (!out)
        throw InputError("cannot write '" + a.qdimacs + "'");
      emit_qdimacs(out, p.a, p.local_a);
    }
    json j = triple_json(t);
    note(g, "A => I: " + std::string(to_string(t.a_implies_i)) +
                ", I & B unsat: " + to_string(t.i_and_b_unsat) +
                ", scope: " + to_string(t.scope));
    m.extra["validation"] = j;
    emit_json(g, j);
    return triple_exit(t);
  }

  if (a.cnf.empty() || a.chunks.empty() || a.archive.empty())
    throw InputError("give either --a/--b/--itp or CNF with --chunks and "
                     "--proofdoor");
  m.inputs.push_back(input_entry("cnf", a.cnf));
  m.inputs.push_back(input_entry("chunks", a.chunks));
  m.inputs.push_back(input_entry("proofdoor", a.archive));
  ChunkedFormula cf = load_chunked(a.cnf, a.chunks);
  Proofdoor pd = read_proofdoor_archive(a.archive);
  if (pd.interpolants.size() + 1 != cf.num_chunks())
    throw InputError("archive holds " + std::to_string(pd.interpolants.size()) +
                     " interpolants for " + std::to_string(cf.num_chunks()) +
                     " chunks");
  int code = kOk;
  json cuts = json::array();
  CnfFormula prev;
  for (std::size_t j = 0; j < pd.interpolants.size(); ++j) {
    CnfFormula left = prev.with(cf.chunk(j).clauses());
    CutProblem p =
        CutProblem::make(left, cf.span(j + 1, cf.num_chunks() - 1));
    ValidationTriple t = validate_interpolant(p, pd.interpolants[j], so);
    json e = triple_json(t);
    e["index"] = j + 1;
    cuts.push_back(e);
    note(g, "I_" + std::to_string(j + 1) + ": " +
                (t.all_true() ? "ok" : t.any_false() ? "FAILED" : "unknown"));
    code = std::max(code, triple_exit(t));
    prev = pd.interpolants[j];
  }
  // The last interpolant must refute the final chunk.
  CnfFormula last = prev.with(cf.chunk(cf.num_chunks() - 1).clauses());
  std::optional<bool> refuted = is_unsat(last, so);
  json j{{"cuts", cuts},
         {"final_check", !refuted ? "indeterminate"
                         : *refuted ? "true"
                                    : "false"}};
  if (!refuted)
    code = std::max<int>(code, kBlowup);
  else if (!*refuted)
    code = kValidation;
  m.extra["validation"] = j;
  emit_json(g, j);
  return code;
}

//===----------------------------------------------------------------------===//
// report
//===----------------------------------------------------------------------===//

struct ReportArgs {
  std::vector<std::string> dirs;
  std::string out;
};

std::optional<json> read_json(const fs::path &p) {
  std::ifstream in(p);
  if (!in)
    return std::nullopt;
  try {
    return json::parse(in);
  } catch (const json::exception &e) {
    throw InputError("malformed JSON in '" + p.string() + "': " + e.what());
  }
}

// Collects every artifact a run directory holds into one summary.
int run_report(const ReportArgs &a, const Global &g, RunManifest &m) {
  json runs = json::array();
  std::ostringstream md;
  md << "# Proofdoor run report\n\n";
  for (const std::string &d : a.dirs) {
    if (!fs::is_directory(d))
      throw InputError("'" + d + "' is not a directory");
    m.inputs.push_back(input_entry("run", d));
    json r{{"dir", d}};
    md << "## " << d << "\n\n";
    bool found = false;
    if (auto man = read_json(fs::path(d) / "manifest.json")) {
      found = true;
      r["proofdoor"] = *man;
      md << "- proofdoor (" << (*man)["kind"].get<std::string>() << "): "
         << (*man)["num_interpolants"] << " interpolants, complete "
         << (*man)["complete"] << ", final check "
         << (*man)["final_check"].get<std::string>() << "\n";
      if (!(*man)["params"].is_null())
        md << "- parameters: c = " << (*man)["params"]["c"]
           << ", w = " << (*man)["params"]["w"]
           << ", s <= " << (*man)["params"]["s_bound"]
           << ", k = " << (*man)["params"]["k"] << "\n";
    }
    for (const char *kind : {"strongest", "mcmillan", "weakest"})
      if (auto man = read_json(fs::path(d) / kind / "manifest.json")) {
        found = true;
        r["lattice"][kind] = *man;
        md << "- " << kind << ": complete " << (*man)["complete"]
           << ", final check " << (*man)["final_check"].get<std::string>()
           << "\n";
      }
    if (auto score = read_json(fs::path(d) / "score.json")) {
      found = true;
      r["absorption"] = *score;
      md << "- incrementality score " << (*score)["score"] << " ("
         << (*score)["rows"] << " x " << (*score)["cols"] << ")\n";
    }
    if (auto rep = read_json(fs::path(d) / "report.json")) {
      found = true;
      r["scaling"] = *rep;
      std::map<std::string, int> counts;
      for (const auto &f : (*rep)["families"])
        ++counts[f["label"].get<std::string>()];
      md << "- scaling:";
      for (auto &[label, n] : counts)
        md << ' ' << label << ' ' << n << ';';
      md << "\n";
    }
    if (auto run = read_json(fs::path(d) / "run.json"))
      r["run"] = *run;
    if (!found)
      warn("no proofdoor, absorption or scaling artifacts in '" + d + "'");
    md << "\n";
    runs.push_back(r);
  }
  json j{{"runs", runs}};
  write_text(a.out, j.dump(2) + "\n");
  fs::path mdp = fs::path(a.out).replace_extension(".md");
  write_text(mdp, md.str());
  note(g, "report written to " + a.out + " and " + mdp.string());
  emit_json(g, j);
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Proofdoor toolkit: interpolant sequences over chunked CNF, "
               "proof absorption, scrambling and scaling classification"};
  app.set_version_flag("--version", PROOFDOOR_VERSION);
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value configuration file; flags win");
  app.allow_config_extras(false);

  Global g;
  app.add_option("-j,--jobs", g.jobs,
                 "Worker threads for heatmap rows and family classification")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--json-to-stdout", g.json_to_stdout,
               "Print the result JSON on stdout");
  app.add_option("--manifest", g.manifest,
                 "Run manifest path (default: run.json in the output "
                 "directory)");
  app.add_flag("-q,--quiet", g.quiet, "Suppress progress notes on stderr");

  SolveArgs sa;
  auto *solve_cmd = app.add_subcommand("solve", "Run the CDCL engine");
  solve_cmd->add_option("cnf", sa.cnf, "DIMACS input")
      ->required()
      ->check(CLI::ExistingFile);
  solve_cmd->add_option("--drat", sa.drat, "Write the refutation trace here");
  solve_cmd->add_option("--external", sa.external,
                        "External solver command ({cnf} and {proof} are "
                        "substituted)");
  solve_cmd->add_option("--conflict-budget", sa.conflicts, "Conflict budget")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--time-budget", sa.seconds, "Seconds")
      ->check(CLI::PositiveNumber);

  ProofdoorArgs pa;
  auto *pd_cmd =
      app.add_subcommand("proofdoor", "Compute and validate a proofdoor");
  pd_cmd->add_option("cnf", pa.cnf, "DIMACS input")
      ->required()
      ->check(CLI::ExistingFile);
  pd_cmd->add_option("--chunks", pa.chunks, "Chunk map JSON")
      ->required()
      ->check(CLI::ExistingFile);
  pd_cmd->add_option("-o,--out", pa.out, "Archive directory")->required();
  pd_cmd->add_option("--kind", pa.kind, "Interpolant kind")
      ->check(CLI::IsMember({"strongest", "mcmillan", "weakest", "all"}))
      ->capture_default_str();
  pd_cmd->add_flag("--no-validate", pa.no_validate,
                   "Skip the per-cut validation triple");
  pd_cmd->add_flag("--no-params", pa.no_params,
                   "Skip measuring c, w and s");
  add_interp_flags(pd_cmd, pa.interp);

  AbsorbArgs aa;
  auto *ab_cmd = app.add_subcommand(
      "absorb", "Absorption heatmap of a refutation against a proofdoor");
  ab_cmd->add_option("cnf", aa.cnf, "DIMACS input")
      ->required()
      ->check(CLI::ExistingFile);
  ab_cmd->add_option("--chunks", aa.chunks, "Chunk map JSON")
      ->required()
      ->check(CLI::ExistingFile);
  ab_cmd->add_option("--proofdoor", aa.archive, "Proofdoor archive directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  auto *drat_opt = ab_cmd->add_option("--drat", aa.drat, "DRAT trace")
                       ->check(CLI::ExistingFile);
  auto *solve_flag =
      ab_cmd->add_flag("--solve", aa.solve, "Produce the trace by solving");
  drat_opt->excludes(solve_flag);
  ab_cmd->add_option("--external", aa.external,
                     "With --solve: external solver command");
  ab_cmd->add_option("-o,--out", aa.out, "Output directory")->required();
  ab_cmd->add_flag("--include-empty-clause", aa.include_empty,
                   "Count the trace's final empty clause in its prefix");
  ab_cmd->add_option("--conflict-budget", aa.conflicts, "Conflict budget")
      ->check(CLI::PositiveNumber);
  ab_cmd->add_option("--time-budget", aa.seconds, "Seconds")
      ->check(CLI::PositiveNumber);

  ClassifyArgs ca;
  auto *cl_cmd =
      app.add_subcommand("classify", "Label timing series by growth class");
  cl_cmd->add_option("csv", ca.csv, "Timing CSV")
      ->required()
      ->check(CLI::ExistingFile);
  cl_cmd->add_option("-o,--out", ca.out, "Output directory")->required();
  cl_cmd->add_option("--degree", ca.degree, "Polynomial degree")
      ->check(CLI::Range(1, 10))
      ->capture_default_str();
  cl_cmd->add_flag("--parity", ca.parity,
                   "Also classify odd and even depths separately");
  cl_cmd->add_option("--size-measure", ca.size, "Size axis")
      ->check(CLI::IsMember({"clauses", "vars"}))
      ->capture_default_str();
  cl_cmd->add_flag("--plot", ca.plot, "Write one SVG per family");
  cl_cmd->add_option("--exp-refine", ca.refine,
                     "Gauss-Newton steps for the exponential fit")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  ScrambleArgs sc;
  auto *sc_cmd =
      app.add_subcommand("scramble", "Permute chunks or clauses by seed");
  sc_cmd->add_option("cnf", sc.cnf, "DIMACS input")
      ->required()
      ->check(CLI::ExistingFile);
  sc_cmd->add_option("--kind", sc.kind, "Scramble kind")
      ->check(CLI::IsMember({"by-iteration", "by-clause"}));
  sc_cmd->add_option("--seed", sc.seed, "64-bit seed")->capture_default_str();
  sc_cmd->add_option("--chunks", sc.chunks, "Chunk map (by-iteration)");
  sc_cmd->add_option("-o,--out", sc.out, "Output DIMACS")->required();
  sc_cmd->add_option("--undo", sc.undo,
                     "Scramble record: restore the original order instead");

  ValidateArgs va;
  auto *va_cmd = app.add_subcommand(
      "validate-itp", "Check interpolant conditions for a cut or an archive");
  va_cmd->add_option("cnf", va.cnf, "DIMACS input (archive mode)")
      ->check(CLI::ExistingFile);
  va_cmd->add_option("--chunks", va.chunks, "Chunk map (archive mode)")
      ->check(CLI::ExistingFile);
  va_cmd->add_option("--proofdoor", va.archive, "Archive (archive mode)")
      ->check(CLI::ExistingDirectory);
  va_cmd->add_option("--a", va.a, "A side")->check(CLI::ExistingFile);
  va_cmd->add_option("--b", va.b, "B side")->check(CLI::ExistingFile);
  va_cmd->add_option("--itp", va.itp, "Candidate interpolant")
      ->check(CLI::ExistingFile);
  va_cmd->add_option("--qdimacs", va.qdimacs,
                     "Also write the projection of A as QDIMACS");
  va_cmd->add_option("--conflict-budget", va.conflicts, "Conflict budget")
      ->check(CLI::PositiveNumber);
  va_cmd->add_option("--time-budget", va.seconds, "Seconds")
      ->check(CLI::PositiveNumber);

  ReportArgs ra;
  auto *re_cmd =
      app.add_subcommand("report", "Summarise run directories as JSON + md");
  re_cmd->add_option("dirs", ra.dirs, "Run directories")->required();
  re_cmd->add_option("-o,--out", ra.out, "Summary JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kInput;
  }

  RunManifest m;
  m.argv.assign(argv, argv + argc);
  m.extra["jobs"] = g.jobs;
  std::string out_dir;
  int code = kInternal;
  try {
    if (solve_cmd->parsed()) {
      m.command = "solve";
      code = run_solve(sa, g, m);
    } else if (pd_cmd->parsed()) {
      m.command = "proofdoor";
      out_dir = pa.out;
      code = run_proofdoor(pa, g, m);
    } else if (ab_cmd->parsed()) {
      m.command = "absorb";
      out_dir = aa.out;
      if (aa.drat.empty() && !aa.solve)
        throw InputError("absorb needs --drat FILE or --solve");
      code = run_absorb(aa, g, m);
    } else if (cl_cmd->parsed()) {
      m.command = "classify";
      out_dir = ca.out;
      code = run_classify(ca, g, m);
    } else if (sc_cmd->parsed()) {
      m.command = "scramble";
      code = run_scramble(sc, g, m);
    } else if (va_cmd->parsed()) {
      m.command = "validate-itp";
      code = run_validate(va, g, m);
    } else if (re_cmd->parsed()) {
      m.command = "report";
      code = run_report(ra, g, m);
    }
  } catch (const InputError &e) {
    std::cerr << "error: " << e.what() << '\n';
    code = kInput;
  } catch (const ContractError &e) {
    std::cerr << "error: " << e.what() << '\n';
    code = kInput;
  } catch (const BlowupError &e) {
    std::cerr << "error: " << e.what() << '\n';
    code = kBlowup;
  } catch (const BudgetExhausted &e) {
    std::cerr << "error: " << e.what() << '\n';
    code = kBlowup;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    code = kInternal;
  }

  std::string manifest = g.manifest;
  if (manifest.empty() && !out_dir.empty() && fs::is_directory(out_dir))
    manifest = (fs::path(out_dir) / "run.json").string();
  if (!manifest.empty()) {
    try {
      m.write(manifest, code);
    } catch (const std::exception &e) {
      std::cerr << "error: " << e.what() << '\n';
      if (code == kOk)
        code = kInput;
    }
  }
  return code;
}
