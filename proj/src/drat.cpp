#include "proofdoor/errors.hpp"
#include "proofdoor/sat.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace proofdoor {

DratCheck check_drat(const CnfFormula &f, const DratTrace &t) {
  PropagationEngine engine(f);
  std::vector<Lit> negated;
  for (std::size_t i = 0; i < t.additions.size(); ++i) {
    const Clause &c = t.additions[i];
    negated.clear();
    for (Lit l : c)
      negated.push_back(~l);
    if (!engine.conflicts(negated)) {
      DratCheck r;
      r.failed_index = i;
      r.message = "addition " + std::to_string(i) + " is not RUP";
      return r;
    }
    engine.add_clause(c);
  }
  DratCheck r;
  if (!t.ends_with_empty_clause()) {
    r.failed_index = t.additions.size();
    r.message = "trace does not end with the empty clause";
    return r;
  }
  r.ok = true;
  r.failed_index = t.additions.size();
  return r;
}

DratTrace parse_drat(std::istream &in, const WarningSink &warn) {
  DratTrace t;
  std::string line;
  std::size_t lineno = 0;
  std::size_t deletions = 0;
  std::vector<int> pending;
  bool deleting = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      if (tok == "c" || tok[0] == 'c')
        break;
      if (tok == "d") {
        if (!pending.empty())
          throw InputError("deletion marker inside a clause", lineno);
        deleting = true;
        continue;
      }
      int v = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || p != tok.data() + tok.size())
        throw InputError("invalid DRAT token '" + tok + "'", lineno);
      if (v != 0) {
        pending.push_back(v);
        continue;
      }
      if (deleting)
        ++deletions;
      else {
        t.additions.push_back(Clause::from_dimacs(pending));
        t.lines.push_back(lineno);
      }
      pending.clear();
      deleting = false;
    }
  }
  if (!pending.empty() || deleting)
    throw InputError("DRAT line missing terminating 0", lineno);
  if (deletions && warn)
    warn("ignored " + std::to_string(deletions) + " DRAT deletion line(s)");
  return t;
}

DratTrace read_drat_file(const std::string &path, const WarningSink &warn) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open DRAT file '" + path + "'");
  return parse_drat(in, warn);
}

void emit_drat(std::ostream &out, const DratTrace &t) {
  for (const Clause &c : t.additions) {
    for (Lit l : c)
      out << l.to_dimacs() << ' ';
    out << "0\n";
  }
}

void write_drat_file(const std::string &path, const DratTrace &t) {
  std::ofstream out(path);
  if (!out)
    throw InputError("cannot write '" + path + "'");
  emit_drat(out, t);
}

} // namespace proofdoor
