#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace proofdoor {

using Var = std::uint32_t;

//===----------------------------------------------------------------------===//
// Literals and clauses
//===----------------------------------------------------------------------===//

// A literal packs variable and sign as 2*var + negative. Variables are dense
// and start at 1, so code 0/1 never appear in a valid literal.
class Lit {
public:
  constexpr Lit() = default;
  constexpr Lit(Var var, bool positive)
      : code_((var << 1) | (positive ? 0u : 1u)) {}

  static Lit from_dimacs(int value);
  static constexpr Lit from_code(std::uint32_t code) {
    Lit l;
    l.code_ = code;
    return l;
  }

  constexpr Var var() const { return code_ >> 1; }
  constexpr bool positive() const { return (code_ & 1u) == 0; }
  constexpr std::uint32_t code() const { return code_; }
  int to_dimacs() const {
    return positive() ? static_cast<int>(var()) : -static_cast<int>(var());
  }

  constexpr Lit operator~() const { return from_code(code_ ^ 1u); }
  constexpr auto operator<=>(const Lit &) const = default;

private:
  std::uint32_t code_ = 0;
};

// A clause is a literal set kept in insertion order. Duplicates are dropped on
// construction; complementary pairs (tautologies) are kept and reported.
class Clause {
public:
  Clause() = default;
  explicit Clause(std::vector<Lit> lits);
  Clause(std::initializer_list<int> dimacs);

  static Clause from_dimacs(std::span<const int> dimacs);

  std::size_t size() const { return lits_.size(); }
  bool empty() const { return lits_.empty(); }
  auto begin() const { return lits_.begin(); }
  auto end() const { return lits_.end(); }
  Lit operator[](std::size_t i) const { return lits_[i]; }
  const std::vector<Lit> &lits() const { return lits_; }

  bool contains(Lit l) const;
  bool is_tautology() const;
  Var max_var() const;

  // Literals sorted by code; the canonical key for set comparisons.
  std::vector<Lit> sorted() const;
  bool same_set(const Clause &other) const { return sorted() == other.sorted(); }
  // True iff every literal of this clause occurs in other.
  bool subset_of(const Clause &other) const;

  bool operator==(const Clause &) const = default;

private:
  std::vector<Lit> lits_;
};

//===----------------------------------------------------------------------===//
// Formulas
//===----------------------------------------------------------------------===//

class CnfFormula {
public:
  CnfFormula() = default;
  // Throws InputError when a literal exceeds num_vars.
  CnfFormula(Var num_vars, std::vector<Clause> clauses);
  // num_vars is the largest variable index that occurs.
  explicit CnfFormula(std::vector<Clause> clauses);

  Var num_vars() const { return num_vars_; }
  std::size_t size() const { return clauses_.size(); }
  bool empty() const { return clauses_.empty(); }
  const std::vector<Clause> &clauses() const { return clauses_; }
  const Clause &operator[](std::size_t i) const { return clauses_[i]; }
  auto begin() const { return clauses_.begin(); }
  auto end() const { return clauses_.end(); }

  // Sorted list of variables that actually occur.
  std::vector<Var> variables() const;

  // Returns a copy with additional clauses; num_vars grows as needed.
  CnfFormula with(std::span<const Clause> extra) const;
  // Conjunction of two formulas in order (this first).
  CnfFormula conjoin(const CnfFormula &other) const;

  bool operator==(const CnfFormula &) const = default;

private:
  Var num_vars_ = 0;
  std::vector<Clause> clauses_;
};

// Clause multiset equality, ignoring clause order and literal order.
bool same_clause_multiset(const CnfFormula &a, const CnfFormula &b);

//===----------------------------------------------------------------------===//
// DIMACS
//===----------------------------------------------------------------------===//

using WarningSink = std::function<void(const std::string &)>;

// Parses DIMACS CNF. A '%' line ends the clause body (SATLIB style); any
// trailing garbage after the last expected clause is skipped with a warning.
// Errors are InputError carrying the offending line number.
CnfFormula parse_dimacs(std::istream &in, const WarningSink &warn = {});
CnfFormula parse_dimacs(std::string_view text, const WarningSink &warn = {});
CnfFormula read_dimacs_file(const std::string &path,
                            const WarningSink &warn = {});

void emit_dimacs(std::ostream &out, const CnfFormula &f);
std::string to_dimacs(const CnfFormula &f);
void write_dimacs_file(const std::string &path, const CnfFormula &f);

// Clause/variable ratio. Throws ContractError for a zero-variable formula.
double cvr(const CnfFormula &f);

//===----------------------------------------------------------------------===//
// Assignments and unit propagation
//===----------------------------------------------------------------------===//

enum class LBool : std::int8_t { False = -1, Undef = 0, True = 1 };

class Assignment {
public:
  Assignment() = default;
  explicit Assignment(Var num_vars) : values_(num_vars + 1, LBool::Undef) {}

  Var num_vars() const {
    return values_.empty() ? 0 : static_cast<Var>(values_.size() - 1);
  }
  LBool value(Var v) const {
    return v < values_.size() ? values_[v] : LBool::Undef;
  }
  LBool value(Lit l) const {
    LBool b = value(l.var());
    if (b == LBool::Undef || l.positive())
      return b;
    return b == LBool::True ? LBool::False : LBool::True;
  }
  void set(Lit l) {
    if (l.var() >= values_.size())
      values_.resize(l.var() + 1, LBool::Undef);
    values_[l.var()] = l.positive() ? LBool::True : LBool::False;
  }
  void unset(Var v) {
    if (v < values_.size())
      values_[v] = LBool::Undef;
  }

  bool satisfies(const Clause &c) const;
  bool satisfies(const CnfFormula &f) const;

  bool operator==(const Assignment &) const = default;

private:
  std::vector<LBool> values_;
};

struct PropagationResult {
  Assignment final;
  bool conflict = false;
  // Literals forced by clauses, in propagation order (assumptions excluded).
  std::vector<Lit> implied;
};

// Two-watched-literal propagation over a growing clause set. One engine per
// thread; propagate() leaves the engine at its empty root state on return.
class PropagationEngine {
public:
  PropagationEngine() = default;
  explicit PropagationEngine(const CnfFormula &f);

  void add_clause(const Clause &c);
  void add_formula(const CnfFormula &f);

  PropagationResult propagate(std::span<const Lit> assumptions);
  // True iff propagation under the assumptions conflicts or assigns target
  // true. Cheaper than propagate(): no result is materialised.
  bool forces_or_conflicts(std::span<const Lit> assumptions, Lit target);
  bool conflicts(std::span<const Lit> assumptions);

  Var num_vars() const { return num_vars_; }

private:
  struct ClauseRef {
    std::uint32_t start;
    std::uint32_t size;
  };

  void ensure_var(Var v);
  LBool value(Lit l) const;
  bool assign(Lit l);
  // Runs assumptions + root units + watches to fixpoint; returns conflict.
  bool run(std::span<const Lit> assumptions, std::vector<Lit> *implied);
  void reset();

  Var num_vars_ = 0;
  std::vector<Lit> arena_;
  std::vector<ClauseRef> clauses_;
  std::vector<std::vector<std::uint32_t>> watches_; // by literal code
  std::vector<Lit> units_;
  bool has_empty_ = false;
  std::vector<LBool> values_;
  std::vector<Lit> trail_;
};

PropagationResult unit_propagate(const CnfFormula &f,
                                 std::span<const Lit> assumptions);

} // namespace proofdoor

template <> struct std::hash<proofdoor::Lit> {
  std::size_t operator()(proofdoor::Lit l) const noexcept {
    return std::hash<std::uint32_t>{}(l.code());
  }
};
