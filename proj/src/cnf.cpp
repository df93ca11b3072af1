#include "proofdoor/cnf.hpp"

#include "proofdoor/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace proofdoor {

//===----------------------------------------------------------------------===//
// Lit / Clause
//===----------------------------------------------------------------------===//

Lit Lit::from_dimacs(int value) {
  if (value == 0)
    throw ContractError("literal 0 is the DIMACS terminator");
  return value > 0 ? Lit(static_cast<Var>(value), true)
                   : Lit(static_cast<Var>(-static_cast<long long>(value)),
                         false);
}

Clause::Clause(std::vector<Lit> lits) {
  lits_.reserve(lits.size());
  for (Lit l : lits)
    if (std::find(lits_.begin(), lits_.end(), l) == lits_.end())
      lits_.push_back(l);
}

Clause::Clause(std::initializer_list<int> dimacs)
    : Clause(from_dimacs(std::span<const int>(dimacs.begin(), dimacs.size()))) {
}

Clause Clause::from_dimacs(std::span<const int> dimacs) {
  std::vector<Lit> lits;
  lits.reserve(dimacs.size());
  for (int v : dimacs)
    lits.push_back(Lit::from_dimacs(v));
  return Clause(std::move(lits));
}

bool Clause::contains(Lit l) const {
  return std::find(lits_.begin(), lits_.end(), l) != lits_.end();
}

bool Clause::is_tautology() const {
  auto s = sorted();
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i].var() == s[i - 1].var())
      return true;
  return false;
}

Var Clause::max_var() const {
  Var m = 0;
  for (Lit l : lits_)
    m = std::max(m, l.var());
  return m;
}

std::vector<Lit> Clause::sorted() const {
  std::vector<Lit> s = lits_;
  std::sort(s.begin(), s.end());
  return s;
}

bool Clause::subset_of(const Clause &other) const {
  if (size() > other.size())
    return false;
  for (Lit l : lits_)
    if (!other.contains(l))
      return false;
  return true;
}

//===----------------------------------------------------------------------===//
// CnfFormula
//===----------------------------------------------------------------------===//

CnfFormula::CnfFormula(Var num_vars, std::vector<Clause> clauses)
    : num_vars_(num_vars), clauses_(std::move(clauses)) {
  for (const Clause &c : clauses_)
    if (c.max_var() > num_vars_)
      throw InputError("literal variable " + std::to_string(c.max_var()) +
                       " exceeds num_vars " + std::to_string(num_vars_));
}

CnfFormula::CnfFormula(std::vector<Clause> clauses)
    : clauses_(std::move(clauses)) {
  for (const Clause &c : clauses_)
    num_vars_ = std::max(num_vars_, c.max_var());
}

std::vector<Var> CnfFormula::variables() const {
  std::vector<bool> seen(num_vars_ + 1, false);
  for (const Clause &c : clauses_)
    for (Lit l : c)
      seen[l.var()] = true;
  std::vector<Var> out;
  for (Var v = 1; v <= num_vars_; ++v)
    if (seen[v])
      out.push_back(v);
  return out;
}

CnfFormula CnfFormula::with(std::span<const Clause> extra) const {
  std::vector<Clause> all = clauses_;
  Var n = num_vars_;
  for (const Clause &c : extra) {
    all.push_back(c);
    n = std::max(n, c.max_var());
  }
  return CnfFormula(n, std::move(all));
}

CnfFormula CnfFormula::conjoin(const CnfFormula &other) const {
  CnfFormula out = with(other.clauses());
  out.num_vars_ = std::max(num_vars_, other.num_vars_);
  return out;
}

bool same_clause_multiset(const CnfFormula &a, const CnfFormula &b) {
  if (a.size() != b.size())
    return false;
  auto keys = [](const CnfFormula &f) {
    std::vector<std::vector<Lit>> k;
    k.reserve(f.size());
    for (const Clause &c : f)
      k.push_back(c.sorted());
    std::sort(k.begin(), k.end());
    return k;
  };
  return keys(a) == keys(b);
}

double cvr(const CnfFormula &f) {
  if (f.num_vars() == 0)
    throw ContractError("clause/variable ratio of a zero-variable formula");
  return static_cast<double>(f.size()) / static_cast<double>(f.num_vars());
}

//===----------------------------------------------------------------------===//
// DIMACS
//===----------------------------------------------------------------------===//

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])))
      ++j;
    if (j > i)
      out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_int(std::string_view tok, long long &out) {
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && p == tok.data() + tok.size();
}

} // namespace

CnfFormula parse_dimacs(std::istream &in, const WarningSink &warn) {
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  long long num_vars = 0, num_clauses = 0;
  std::vector<Clause> clauses;
  std::vector<int> pending;
  std::size_t pending_line = 0;
  bool trailing_warned = false;

  auto note = [&](const std::string &msg) {
    if (warn)
      warn(msg + " (line " + std::to_string(lineno) + ")");
  };

  while (std::getline(in, line)) {
    ++lineno;
    auto toks = split_ws(line);
    if (toks.empty())
      continue;
    if (toks[0][0] == 'c')
      continue;
    if (!have_header) {
      if (toks[0] != "p")
        throw InputError("expected 'p cnf V C' header", lineno);
      if (toks.size() != 4 || toks[1] != "cnf" ||
          !parse_int(toks[2], num_vars) || !parse_int(toks[3], num_clauses) ||
          num_vars < 0 || num_clauses < 0 || num_vars > (1ll << 30))
        throw InputError("malformed header '" + line + "'", lineno);
      have_header = true;
      continue;
    }
    if (toks[0] == "p")
      throw InputError("duplicate header", lineno);
    if (toks[0][0] == '%') {
      note("'%' marker; ignoring the rest of the input");
      break;
    }
    bool trailing = false;
    for (std::string_view tok : toks) {
      if (static_cast<long long>(clauses.size()) == num_clauses &&
          pending.empty()) {
        trailing = true;
        break;
      }
      long long v;
      if (!parse_int(tok, v))
        throw InputError("invalid literal '" + std::string(tok) + "'", lineno);
      if (v == 0) {
        clauses.push_back(Clause::from_dimacs(pending));
        pending.clear();
        continue;
      }
      if (v > num_vars || -v > num_vars)
        throw InputError("literal " + std::to_string(v) + " exceeds declared " +
                             std::to_string(num_vars) + " variables",
                         lineno);
      if (pending.empty())
        pending_line = lineno;
      pending.push_back(static_cast<int>(v));
    }
    if (trailing && !trailing_warned) {
      note("trailing content after the declared clauses ignored");
      trailing_warned = true;
    }
  }
  if (!have_header)
    throw InputError("missing 'p cnf' header", lineno);
  if (!pending.empty())
    throw InputError("clause missing terminating 0", pending_line);
  if (static_cast<long long>(clauses.size()) != num_clauses)
    throw InputError("clause count mismatch: header declares " +
                         std::to_string(num_clauses) + ", found " +
                         std::to_string(clauses.size()),
                     lineno);
  return CnfFormula(static_cast<Var>(num_vars), std::move(clauses));
}

CnfFormula parse_dimacs(std::string_view text, const WarningSink &warn) {
  std::istringstream in{std::string(text)};
  return parse_dimacs(in, warn);
}

CnfFormula read_dimacs_file(const std::string &path, const WarningSink &warn) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open '" + path + "'");
  return parse_dimacs(in, warn);
}

void emit_dimacs(std::ostream &out, const CnfFormula &f) {
  out << "p cnf " << f.num_vars() << ' ' << f.size() << '\n';
  for (const Clause &c : f) {
    for (Lit l : c)
      out << l.to_dimacs() << ' ';
    out << "0\n";
  }
}

std::string to_dimacs(const CnfFormula &f) {
  std::ostringstream out;
  emit_dimacs(out, f);
  return out.str();
}

void write_dimacs_file(const std::string &path, const CnfFormula &f) {
  std::ofstream out(path);
  if (!out)
    throw InputError("cannot write '" + path + "'");
  emit_dimacs(out, f);
}

//===----------------------------------------------------------------------===//
// Assignment
//===----------------------------------------------------------------------===//

bool Assignment::satisfies(const Clause &c) const {
  for (Lit l : c)
    if (value(l) == LBool::True)
      return true;
  return false;
}

bool Assignment::satisfies(const CnfFormula &f) const {
  for (const Clause &c : f)
    if (!satisfies(c))
      return false;
  return true;
}

//===----------------------------------------------------------------------===//
// PropagationEngine
//===----------------------------------------------------------------------===//

PropagationEngine::PropagationEngine(const CnfFormula &f) { add_formula(f); }

void PropagationEngine::ensure_var(Var v) {
  if (v <= num_vars_)
    return;
  num_vars_ = v;
  values_.resize(v + 1, LBool::Undef);
  watches_.resize(2 * (v + 1));
}

void PropagationEngine::add_formula(const CnfFormula &f) {
  ensure_var(f.num_vars());
  for (const Clause &c : f)
    add_clause(c);
}

void PropagationEngine::add_clause(const Clause &c) {
  ensure_var(c.max_var());
  if (c.empty()) {
    has_empty_ = true;
    return;
  }
  if (c.size() == 1) {
    units_.push_back(c[0]);
    return;
  }
  auto idx = static_cast<std::uint32_t>(clauses_.size());
  auto start = static_cast<std::uint32_t>(arena_.size());
  arena_.insert(arena_.end(), c.begin(), c.end());
  clauses_.push_back({start, static_cast<std::uint32_t>(c.size())});
  watches_[(~c[0]).code()].push_back(idx);
  watches_[(~c[1]).code()].push_back(idx);
}

LBool PropagationEngine::value(Lit l) const {
  LBool b = values_[l.var()];
  if (b == LBool::Undef || l.positive())
    return b;
  return b == LBool::True ? LBool::False : LBool::True;
}

// Returns false when l is already false.
bool PropagationEngine::assign(Lit l) {
  LBool v = value(l);
  if (v == LBool::True)
    return true;
  if (v == LBool::False)
    return false;
  values_[l.var()] = l.positive() ? LBool::True : LBool::False;
  trail_.push_back(l);
  return true;
}

void PropagationEngine::reset() {
  for (Lit l : trail_)
    values_[l.var()] = LBool::Undef;
  trail_.clear();
}

bool PropagationEngine::run(std::span<const Lit> assumptions,
                            std::vector<Lit> *implied) {
  if (has_empty_)
    return true;
  for (Lit a : assumptions) {
    ensure_var(a.var());
    if (!assign(a))
      return true;
  }
  for (Lit u : units_) {
    bool fresh = value(u) == LBool::Undef;
    if (!assign(u))
      return true;
    if (fresh && implied)
      implied->push_back(u);
  }
  std::size_t head = 0;
  while (head < trail_.size()) {
    Lit p = trail_[head++];
    // Clauses watching ~p: p became true, so ~p is false in them.
    auto &ws = watches_[p.code()];
    std::size_t i = 0, j = 0;
    bool conflict = false;
    for (; i < ws.size(); ++i) {
      std::uint32_t ci = ws[i];
      if (conflict) {
        ws[j++] = ci;
        continue;
      }
      ClauseRef cr = clauses_[ci];
      Lit *lits = arena_.data() + cr.start;
      Lit false_lit = ~p;
      if (lits[0] == false_lit)
        std::swap(lits[0], lits[1]);
      if (value(lits[0]) == LBool::True) {
        ws[j++] = ci;
        continue;
      }
      bool moved = false;
      for (std::uint32_t k = 2; k < cr.size; ++k) {
        if (value(lits[k]) != LBool::False) {
          std::swap(lits[1], lits[k]);
          watches_[(~lits[1]).code()].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved)
        continue;
      ws[j++] = ci;
      if (value(lits[0]) == LBool::False) {
        conflict = true;
        continue;
      }
      assign(lits[0]);
      if (implied)
        implied->push_back(lits[0]);
    }
    ws.resize(j);
    if (conflict)
      return true;
  }
  return false;
}

PropagationResult PropagationEngine::propagate(std::span<const Lit> assumptions) {
  PropagationResult r;
  r.conflict = run(assumptions, &r.implied);
  r.final = Assignment(num_vars_);
  for (Lit l : trail_)
    r.final.set(l);
  reset();
  return r;
}

bool PropagationEngine::forces_or_conflicts(std::span<const Lit> assumptions,
                                            Lit target) {
  ensure_var(target.var());
  bool result = run(assumptions, nullptr) || value(target) == LBool::True;
  reset();
  return result;
}

bool PropagationEngine::conflicts(std::span<const Lit> assumptions) {
  bool result = run(assumptions, nullptr);
  reset();
  return result;
}

PropagationResult unit_propagate(const CnfFormula &f,
                                 std::span<const Lit> assumptions) {
  PropagationEngine engine(f);
  return engine.propagate(assumptions);
}

} // namespace proofdoor
