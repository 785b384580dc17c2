#pragma once

#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "flpf/error.hpp"
#include "flpf/rational.hpp"

namespace flpf {

enum class Sign { NonNegative, Free };
enum class Relation { LessEqual, Equal, GreaterEqual };
enum class LPStatus { Optimal, Infeasible, Unbounded };

constexpr const char* to_string(LPStatus s) {
  switch (s) {
    case LPStatus::Optimal: return "optimal";
    case LPStatus::Infeasible: return "infeasible";
    case LPStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

struct Term {
  std::size_t var;
  Rational coef;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Relation relation;
  Rational rhs;
};

struct Variable {
  std::string name;
  Sign sign;
};

/// maximize c'x subject to linear constraints, all data exact rationals.
class LinearProgram {
 public:
  std::size_t add_variable(std::string name, Sign sign = Sign::NonNegative) {
    if (name.empty()) name = "v" + std::to_string(variables_.size());
    if (!var_names_.insert(name).second) throw Error(ErrorCode::MalformedProgram, "duplicate variable '" + name + "'");
    variables_.push_back({std::move(name), sign});
    return variables_.size() - 1;
  }

  void set_objective(std::vector<Term> terms) {
    check_terms(terms);
    objective_ = std::move(terms);
  }

  std::size_t add_constraint(std::string name, std::vector<Term> terms, Relation relation, Rational rhs) {
    check_terms(terms);
    if (name.empty()) name = "c" + std::to_string(constraints_.size());
    if (!con_names_.insert(name).second) throw Error(ErrorCode::MalformedProgram, "duplicate constraint '" + name + "'");
    constraints_.push_back({std::move(name), std::move(terms), relation, std::move(rhs)});
    return constraints_.size() - 1;
  }

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::vector<Term>& objective() const { return objective_; }

 private:
  void check_terms(const std::vector<Term>& terms) const {
    for (const auto& t : terms)
      if (t.var >= variables_.size()) throw Error(ErrorCode::MalformedProgram, "term references unknown variable");
  }

  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::vector<Term> objective_;
  std::unordered_set<std::string> var_names_;
  std::unordered_set<std::string> con_names_;
};

struct LPResult {
  LPStatus status = LPStatus::Infeasible;
  Rational objective = 0;
  std::vector<Rational> values;  // indexed by variable, empty unless optimal
};

struct SolverOptions {
  /// Abort with NumericOverflow once any tableau entry needs more bits.
  std::size_t max_bits = 1U << 16;
};

inline Rational evaluate(const std::vector<Term>& terms, const std::vector<Rational>& x) {
  Rational s = 0;
  for (const auto& t : terms) s += t.coef * x[t.var];
  return s;
}

inline bool satisfies(const Constraint& c, const std::vector<Rational>& x) {
  Rational lhs = evaluate(c.terms, x);
  switch (c.relation) {
    case Relation::LessEqual: return lhs <= c.rhs;
    case Relation::Equal: return lhs == c.rhs;
    case Relation::GreaterEqual: return lhs >= c.rhs;
  }
  return false;
}

inline bool satisfies_all(const LinearProgram& lp, const std::vector<Rational>& x) {
  if (x.size() != lp.variables().size()) return false;
  for (std::size_t v = 0; v < x.size(); ++v)
    if (lp.variables()[v].sign == Sign::NonNegative && is_negative(x[v])) return false;
  for (const auto& c : lp.constraints())
    if (!satisfies(c, x)) return false;
  return true;
}

namespace detail {

// Dense two-phase tableau simplex over the rationals with Bland's rule.
class SimplexTableau {
 public:
  SimplexTableau(const LinearProgram& lp, const SolverOptions& opts) : lp_(lp), opts_(opts) { build(); }

  LPResult run() {
    // Phase 1: maximize -(sum of artificials).
    std::vector<Rational> phase1(num_cols_, Rational(0));
    for (std::size_t j = first_artificial_; j < num_cols_; ++j) phase1[j] = -1;
    load_objective(phase1);
    if (iterate(num_cols_) == LPStatus::Unbounded) throw std::logic_error("phase 1 cannot be unbounded");
    if (is_positive(obj_.back())) return LPResult{LPStatus::Infeasible, 0, {}};
    drive_out_artificials();

    // Phase 2 on the structural and slack columns only.
    std::vector<Rational> phase2(num_cols_, Rational(0));
    for (const auto& t : lp_.objective()) {
      phase2[pos_col_[t.var]] += t.coef;
      if (neg_col_[t.var] != kNone) phase2[neg_col_[t.var]] -= t.coef;
    }
    load_objective(phase2);
    if (iterate(first_artificial_) == LPStatus::Unbounded) return LPResult{LPStatus::Unbounded, 0, {}};

    std::vector<Rational> col_value(num_cols_, Rational(0));
    for (std::size_t i = 0; i < rows_.size(); ++i) col_value[basis_[i]] = rows_[i].back();
    LPResult result;
    result.status = LPStatus::Optimal;
    result.values.resize(lp_.variables().size());
    for (std::size_t v = 0; v < lp_.variables().size(); ++v) {
      result.values[v] = col_value[pos_col_[v]];
      if (neg_col_[v] != kNone) result.values[v] -= col_value[neg_col_[v]];
    }
    result.objective = evaluate(lp_.objective(), result.values);
    if (result.objective != -obj_.back() || !satisfies_all(lp_, result.values))
      throw std::logic_error("simplex produced an assignment that fails re-verification");
    return result;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  void build() {
    const auto& vars = lp_.variables();
    const auto& cons = lp_.constraints();
    std::size_t col = 0;
    pos_col_.resize(vars.size());
    neg_col_.assign(vars.size(), kNone);
    for (std::size_t v = 0; v < vars.size(); ++v) {
      pos_col_[v] = col++;
      if (vars[v].sign == Sign::Free) neg_col_[v] = col++;
    }
    // Normalise to nonnegative right-hand sides.
    std::vector<Relation> rel(cons.size());
    std::vector<bool> flip(cons.size(), false);
    for (std::size_t i = 0; i < cons.size(); ++i) {
      rel[i] = cons[i].relation;
      if (is_negative(cons[i].rhs)) {
        flip[i] = true;
        if (rel[i] == Relation::LessEqual)
          rel[i] = Relation::GreaterEqual;
        else if (rel[i] == Relation::GreaterEqual)
          rel[i] = Relation::LessEqual;
      }
    }
    std::vector<std::size_t> slack(cons.size(), kNone), artificial(cons.size(), kNone);
    for (std::size_t i = 0; i < cons.size(); ++i)
      if (rel[i] != Relation::Equal) slack[i] = col++;
    first_artificial_ = col;
    for (std::size_t i = 0; i < cons.size(); ++i)
      if (rel[i] != Relation::LessEqual) artificial[i] = col++;
    num_cols_ = col;

    rows_.assign(cons.size(), std::vector<Rational>(num_cols_ + 1, Rational(0)));
    basis_.resize(cons.size());
    for (std::size_t i = 0; i < cons.size(); ++i) {
      auto& row = rows_[i];
      for (const auto& t : cons[i].terms) {
        Rational c = flip[i] ? Rational(-t.coef) : t.coef;
        row[pos_col_[t.var]] += c;
        if (neg_col_[t.var] != kNone) row[neg_col_[t.var]] -= c;
      }
      row.back() = flip[i] ? Rational(-cons[i].rhs) : cons[i].rhs;
      if (rel[i] == Relation::LessEqual) {
        row[slack[i]] = 1;
        basis_[i] = slack[i];
      } else {
        if (rel[i] == Relation::GreaterEqual) row[slack[i]] = -1;
        row[artificial[i]] = 1;
        basis_[i] = artificial[i];
      }
    }
  }

  // Reduced-cost row r = c - c_B B^-1 A, with the last entry holding -c_B'x_B.
  void load_objective(const std::vector<Rational>& cost) {
    obj_.assign(num_cols_ + 1, Rational(0));
    for (std::size_t j = 0; j < num_cols_; ++j) obj_[j] = cost[j];
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Rational& cb = cost[basis_[i]];
      if (is_zero(cb)) continue;
      for (std::size_t j = 0; j <= num_cols_; ++j)
        if (!is_zero(rows_[i][j])) obj_[j] -= cb * rows_[i][j];
    }
  }

  // Bland's rule: lowest-index improving column, ties in the ratio test go to
  // the lowest-index basic column.
  LPStatus iterate(std::size_t allowed_cols) {
    while (true) {
      std::size_t enter = kNone;
      for (std::size_t j = 0; j < allowed_cols; ++j)
        if (is_positive(obj_[j])) {
          enter = j;
          break;
        }
      if (enter == kNone) return LPStatus::Optimal;

      std::size_t leave = kNone;
      Rational best_ratio;
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        const Rational& a = rows_[i][enter];
        if (!is_positive(a)) continue;
        Rational ratio = rows_[i].back() / a;
        if (leave == kNone || ratio < best_ratio || (ratio == best_ratio && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = std::move(ratio);
        }
      }
      if (leave == kNone) return LPStatus::Unbounded;
      pivot(leave, enter);
    }
  }

  void pivot(std::size_t r, std::size_t e) {
    auto& prow = rows_[r];
    const Rational inv = 1 / prow[e];
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j <= num_cols_; ++j)
      if (!is_zero(prow[j])) {
        prow[j] *= inv;
        nz.push_back(j);
        if (bit_size(prow[j]) > opts_.max_bits)
          throw Error(ErrorCode::NumericOverflow, "tableau entry exceeds " + std::to_string(opts_.max_bits) + " bits");
      }
    auto eliminate = [&](std::vector<Rational>& row) {
      if (is_zero(row[e])) return;
      const Rational f = row[e];
      for (std::size_t j : nz) row[j] -= f * prow[j];
    };
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (i != r) eliminate(rows_[i]);
    eliminate(obj_);
    basis_[r] = e;
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < rows_.size();) {
      if (basis_[i] < first_artificial_) {
        ++i;
        continue;
      }
      std::size_t enter = kNone;
      for (std::size_t j = 0; j < first_artificial_; ++j)
        if (!is_zero(rows_[i][j])) {
          enter = j;
          break;
        }
      if (enter != kNone) {
        pivot(i, enter);
        ++i;
      } else {
        // Redundant equality: the row is a combination of the others.
        rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(i));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }
  }

  const LinearProgram& lp_;
  SolverOptions opts_;
  std::vector<std::size_t> pos_col_, neg_col_;
  std::size_t first_artificial_ = 0;
  std::size_t num_cols_ = 0;
  std::vector<std::vector<Rational>> rows_;
  std::vector<std::size_t> basis_;
  std::vector<Rational> obj_;
};

}  // namespace detail

/// Exact optimum of `lp`. The returned assignment is re-checked against every
/// constraint before it is handed back.
inline LPResult solve(const LinearProgram& lp, const SolverOptions& opts = {}) {
  return detail::SimplexTableau(lp, opts).run();
}

/// A point satisfying every constraint of `lp` (its objective is ignored).
inline std::optional<std::vector<Rational>> feasible(const LinearProgram& lp, const SolverOptions& opts = {}) {
  LinearProgram copy = lp;
  copy.set_objective({});
  LPResult r = solve(copy, opts);
  if (r.status != LPStatus::Optimal) return std::nullopt;
  return std::move(r.values);
}

/// Plain-text dump in an LP-format-like layout, for debugging.
inline std::string to_lp_text(const LinearProgram& lp) {
  std::ostringstream out;
  auto write_terms = [&](const std::vector<Term>& terms) {
    if (terms.empty()) out << " 0";
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const Rational& c = terms[i].coef;
      out << (i == 0 ? (is_negative(c) ? " -" : " ") : (is_negative(c) ? " - " : " + "));
      Rational mag = is_negative(c) ? Rational(-c) : c;
      if (mag != 1) out << to_string(mag) << ' ';
      out << lp.variables()[terms[i].var].name;
    }
  };
  out << "maximize\n  obj:";
  write_terms(lp.objective());
  out << "\nsubject to\n";
  for (const auto& c : lp.constraints()) {
    out << "  " << c.name << ':';
    write_terms(c.terms);
    out << (c.relation == Relation::LessEqual ? " <= " : c.relation == Relation::Equal ? " = " : " >= ")
        << to_string(c.rhs) << '\n';
  }
  out << "bounds\n";
  for (const auto& v : lp.variables()) out << "  " << v.name << (v.sign == Sign::Free ? " free\n" : " >= 0\n");
  out << "end\n";
  return out.str();
}

}  // namespace flpf
