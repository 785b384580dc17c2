#pragma once

#include <algorithm>
#include <atomic>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "flpf/error.hpp"
#include "flpf/fading.hpp"
#include "flpf/interference.hpp"
#include "flpf/lp.hpp"
#include "flpf/rational.hpp"

namespace flpf {

/// Per-link rates indexed by global link index (size K).
using RateVector = std::vector<Rational>;

/// Phi(L) as data: the marginal pi_L and one schedule matrix (rows = L) per
/// state of its support.
struct PhiDescription {
  LinkSet links;
  FadingStructure marginal;
  std::vector<ScheduleMatrix> matrices;

  /// True when no state turns on any link of L, so Phi(L) = {0}.
  bool vacuous() const {
    return std::all_of(matrices.begin(), matrices.end(), [](const ScheduleMatrix& m) { return m.active_set().empty(); });
  }
};

inline PhiDescription describe_phi(const InterferenceGraph& g, const FadingStructure& f, LinkSet links,
                                   const Limits& limits = Limits::from_env()) {
  if (links.empty()) throw Error(ErrorCode::EmptyActiveSet, "link set L must be nonempty");
  if (!links.is_subset_of(g.all_links())) throw Error(ErrorCode::UnknownLink, "L exceeds graph links");
  if (f.num_links() != g.size()) throw Error(ErrorCode::InvalidState, "fading structure does not match graph size");
  PhiDescription d{links, marginal(f, links), {}};
  for (const auto& ws : d.marginal.states()) d.matrices.push_back(schedule_matrix_for_state(g, ws.state, links, limits));
  return d;
}

inline std::string link_set_name(const InterferenceGraph& g, LinkSet s) {
  std::string out = "{";
  for (std::size_t l : s.members()) {
    if (out.size() > 1) out += ',';
    out += g.labels()[l];
  }
  return out + "}";
}

namespace detail {

inline thread_local bool in_parallel_map = false;

// Runs fn(i) for i in [0, n) on a small worker pool; results land at index i.
// Nested calls run serially on the calling worker.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn) {
  std::vector<std::optional<T>> slots(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    const bool outer = in_parallel_map;
    in_parallel_map = true;
    for (std::size_t i = next++; i < n && !failed; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
    in_parallel_map = outer;
  };
  std::size_t workers = in_parallel_map ? 1 : std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 8);
  workers = std::min(workers, std::max<std::size_t>(n, 1));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// Deterministic preference among minimizers: fewer links, then lexicographic.
inline bool prefer_subset(LinkSet a, LinkSet b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return lex_less(a, b);
}

}  // namespace detail

/// The max-min program whose optimum is the fading local pooling factor of L:
///   max sum_J pi_L(J) a(J)
///   s.t. a(J) <= x'M_J[:,c] <= b(J) for every column c of every state J,
///        sum_J pi_L(J) b(J) = 1,  x >= 0.
inline LinearProgram sigma_dual_program(const PhiDescription& d, const InterferenceGraph& g) {
  LinearProgram lp;
  const auto rows = d.links.members();
  std::vector<std::size_t> x;
  for (std::size_t l : rows) x.push_back(lp.add_variable("x_" + g.labels()[l]));
  std::vector<Term> objective, normalization;
  for (std::size_t s = 0; s < d.matrices.size(); ++s) {
    const Rational& p = d.marginal.states()[s].probability;
    const std::string tag = std::to_string(s);
    const std::size_t a = lp.add_variable("a" + tag, Sign::Free);
    const std::size_t b = lp.add_variable("b" + tag, Sign::Free);
    objective.push_back({a, p});
    normalization.push_back({b, p});
    const ScheduleMatrix& m = d.matrices[s];
    for (std::size_t c = 0; c < m.num_columns(); ++c) {
      std::vector<Term> load;
      for (std::size_t r = 0; r < rows.size(); ++r)
        if (!is_zero(m.entry(r, c))) load.push_back({x[r], m.entry(r, c)});
      std::vector<Term> lower = load, upper = load;
      lower.push_back({a, Rational(-1)});
      upper.push_back({b, Rational(-1)});
      const std::string col = tag + "_" + std::to_string(c);
      lp.add_constraint("floor" + col, std::move(lower), Relation::GreaterEqual, 0);
      lp.add_constraint("ceil" + col, std::move(upper), Relation::LessEqual, 0);
    }
  }
  lp.set_objective(std::move(objective));
  lp.add_constraint("normalize", std::move(normalization), Relation::Equal, 1);
  return lp;
}

/// sigma_L*(pi) via its dual linear program, exactly. When no state turns on
/// any link of L the set Phi(L) is {0}; L then places no restriction and the
/// value 1 is returned.
inline Rational sigma_L_exact(const InterferenceGraph& g, const FadingStructure& f, LinkSet links,
                              const Limits& limits = Limits::from_env()) {
  PhiDescription d = describe_phi(g, f, links, limits);
  if (d.vacuous()) return 1;
  LPResult r = solve(sigma_dual_program(d, g));
  if (r.status != LPStatus::Optimal)
    throw std::logic_error(std::string("pooling program ended ") + to_string(r.status));
  return r.objective;
}

struct SigmaGraphResult {
  Rational value;
  LinkSet argmin;
};

/// sigma_G*(pi): minimum of sigma_L_exact over all nonempty L, with the
/// minimizing L (fewest links, then lexicographically first).
inline SigmaGraphResult sigma_graph_exact(const InterferenceGraph& g, const FadingStructure& f,
                                          const Limits& limits = Limits::from_env()) {
  if (g.size() > limits.max_links)
    throw Error(ErrorCode::LimitExceeded, std::to_string(g.size()) + " links exceed the enumeration cap of " +
                                              std::to_string(limits.max_links));
  std::vector<LinkSet> subsets;
  for_each_subset(g.all_links(), [&](LinkSet s) {
    if (!s.empty()) subsets.push_back(s);
  });
  auto values = detail::parallel_map<Rational>(subsets.size(),
                                                [&](std::size_t i) { return sigma_L_exact(g, f, subsets[i], limits); });
  SigmaGraphResult best{values[0], subsets[0]};
  for (std::size_t i = 1; i < subsets.size(); ++i)
    if (values[i] < best.value || (values[i] == best.value && detail::prefer_subset(subsets[i], best.argmin)))
      best = {values[i], subsets[i]};
  return best;
}

struct Interval {
  Rational lo;
  Rational hi;
  Rational midpoint() const { return (lo + hi) / 2; }
  Rational width() const { return hi - lo; }
};

/// Is there a pair phi1, phi2 in Phi(L) with sigma * phi1 >= phi2?
inline bool sigma_pair_feasible(const PhiDescription& d, const Rational& sigma) {
  LinearProgram lp;
  const auto rows = d.links.members();
  std::vector<std::vector<Term>> per_link(rows.size());
  for (std::size_t s = 0; s < d.matrices.size(); ++s) {
    const Rational& p = d.marginal.states()[s].probability;
    const ScheduleMatrix& m = d.matrices[s];
    std::vector<Term> alpha_sum, beta_sum;
    for (std::size_t c = 0; c < m.num_columns(); ++c) {
      const std::string tag = std::to_string(s) + "_" + std::to_string(c);
      const std::size_t alpha = lp.add_variable("alpha" + tag);
      const std::size_t beta = lp.add_variable("beta" + tag);
      alpha_sum.push_back({alpha, 1});
      beta_sum.push_back({beta, 1});
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const Rational& e = m.entry(r, c);
        if (is_zero(e)) continue;
        per_link[r].push_back({alpha, sigma * p * e});
        per_link[r].push_back({beta, -(p * e)});
      }
    }
    lp.add_constraint("alpha_simplex" + std::to_string(s), std::move(alpha_sum), Relation::Equal, 1);
    lp.add_constraint("beta_simplex" + std::to_string(s), std::move(beta_sum), Relation::Equal, 1);
  }
  for (std::size_t r = 0; r < rows.size(); ++r)
    lp.add_constraint("dominate" + std::to_string(rows[r]), std::move(per_link[r]), Relation::GreaterEqual, 0);
  return feasible(lp).has_value();
}

/// Bisection on the defining infimum, independent of the dual program.
/// Returns [lo, hi] with hi feasible, lo infeasible (or 0) and hi - lo <= tol.
inline Interval sigma_L_bisection(const InterferenceGraph& g, const FadingStructure& f, LinkSet links,
                                  const Rational& tol, const Limits& limits = Limits::from_env()) {
  if (!is_positive(tol)) throw Error(ErrorCode::MalformedProgram, "bisection tolerance must be positive");
  PhiDescription d = describe_phi(g, f, links, limits);
  if (d.vacuous()) return {1, 1};
  Interval iv{0, 1};
  if (sigma_pair_feasible(d, iv.lo)) return {0, 0};
  while (iv.width() > tol) {
    Rational mid = iv.midpoint();
    if (sigma_pair_feasible(d, mid))
      iv.hi = mid;
    else
      iv.lo = mid;
  }
  return iv;
}

/// Convex weights w_J (one vector per marginal state) realizing phi, if any.
inline std::optional<std::vector<std::vector<Rational>>> phi_decomposition(const PhiDescription& d,
                                                                           const RateVector& phi) {
  LinearProgram lp;
  const auto rows = d.links.members();
  for (std::size_t l = 0; l < phi.size(); ++l)
    if (!d.links.contains(l) && !is_zero(phi[l])) return std::nullopt;
  std::vector<std::vector<Term>> per_link(rows.size());
  std::vector<std::vector<std::size_t>> weight_vars(d.matrices.size());
  for (std::size_t s = 0; s < d.matrices.size(); ++s) {
    const Rational& p = d.marginal.states()[s].probability;
    const ScheduleMatrix& m = d.matrices[s];
    std::vector<Term> sum;
    for (std::size_t c = 0; c < m.num_columns(); ++c) {
      const std::size_t w = lp.add_variable("w" + std::to_string(s) + "_" + std::to_string(c));
      weight_vars[s].push_back(w);
      sum.push_back({w, 1});
      for (std::size_t r = 0; r < rows.size(); ++r)
        if (!is_zero(m.entry(r, c))) per_link[r].push_back({w, p * m.entry(r, c)});
    }
    lp.add_constraint("simplex" + std::to_string(s), std::move(sum), Relation::Equal, 1);
  }
  for (std::size_t r = 0; r < rows.size(); ++r)
    lp.add_constraint("match" + std::to_string(rows[r]), std::move(per_link[r]), Relation::Equal, phi.at(rows[r]));
  auto x = feasible(lp);
  if (!x) return std::nullopt;
  std::vector<std::vector<Rational>> weights(d.matrices.size());
  for (std::size_t s = 0; s < d.matrices.size(); ++s)
    for (std::size_t v : weight_vars[s]) weights[s].push_back((*x)[v]);
  return weights;
}

inline bool in_phi(const PhiDescription& d, const RateVector& phi) { return phi_decomposition(d, phi).has_value(); }

/// Upper bound from a witness pair of Phi(L): the smallest sigma with
/// sigma * dominating >= dominated, i.e. max_l dominated(l) / dominating(l).
inline Rational upper_bound_witness_pair(const InterferenceGraph& g, const FadingStructure& f, LinkSet links,
                                         const RateVector& dominated, const RateVector& dominating,
                                         const Limits& limits = Limits::from_env()) {
  if (dominated.size() != g.size() || dominating.size() != g.size())
    throw Error(ErrorCode::NotInPhi, "rate vectors must have one entry per link");
  PhiDescription d = describe_phi(g, f, links, limits);
  if (!in_phi(d, dominated)) throw Error(ErrorCode::NotInPhi, "first vector is not in Phi(L)");
  if (!in_phi(d, dominating)) throw Error(ErrorCode::NotInPhi, "second vector is not in Phi(L)");
  std::optional<Rational> best;
  for (std::size_t l : links.members()) {
    if (is_zero(dominating[l])) {
      if (is_positive(dominated[l]))
        throw Error(ErrorCode::UndefinedRatio, "link " + g.labels()[l] + " is served only by the first vector");
      continue;
    }
    Rational ratio = dominated[l] / dominating[l];
    if (!best || ratio > *best) best = std::move(ratio);
  }
  return best.value_or(Rational(1));
}

/// (mu_J, nu_J, H_J) for one channel state, over all K links.
struct Thm2Triple {
  RateVector mu;
  RateVector nu;
  Rational h;
};

inline bool in_convex_hull(const ScheduleMatrix& m, const RateVector& v) {
  LinearProgram lp;
  std::vector<std::vector<Term>> per_row(m.num_rows());
  std::vector<Term> sum;
  for (std::size_t c = 0; c < m.num_columns(); ++c) {
    const std::size_t w = lp.add_variable("w" + std::to_string(c));
    sum.push_back({w, 1});
    for (std::size_t r = 0; r < m.num_rows(); ++r)
      if (!is_zero(m.entry(r, c))) per_row[r].push_back({w, m.entry(r, c)});
  }
  lp.add_constraint("simplex", std::move(sum), Relation::Equal, 1);
  for (std::size_t r = 0; r < m.num_rows(); ++r)
    lp.add_constraint("row" + std::to_string(r), std::move(per_row[r]), Relation::Equal, v.at(m.row_links()[r]));
  return feasible(lp).has_value();
}

/// Upper bound on sigma_G*(pi) from per-state triples (aligned with
/// f.states()): max_l sum_J pi(J) H_J mu_J(l) / sum_J pi(J) mu_J(l).
inline Rational upper_bound_thm2(const InterferenceGraph& g, const FadingStructure& f,
                                 const std::vector<Thm2Triple>& triples, const Limits& limits = Limits::from_env()) {
  if (triples.size() != f.states().size())
    throw Error(ErrorCode::InvalidTriple, "need one triple per state of the fading structure");
  const std::size_t k = g.size();
  std::vector<Rational> num(k, Rational(0)), den(k, Rational(0));
  for (std::size_t s = 0; s < triples.size(); ++s) {
    const auto& ws = f.states()[s];
    const auto& tr = triples[s];
    const std::string where = "state " + ws.state.to_string() + ": ";
    if (tr.mu.size() != k || tr.nu.size() != k) throw Error(ErrorCode::InvalidTriple, where + "wrong vector length");
    const LinkSet on = ws.state.on_set();
    for (std::size_t l = 0; l < k; ++l) {
      if (!on.contains(l) && !is_zero(tr.mu[l])) throw Error(ErrorCode::InvalidTriple, where + "mu nonzero on an OFF link");
      if (tr.nu[l] > tr.h * tr.mu[l]) throw Error(ErrorCode::InvalidTriple, where + "nu exceeds H * mu");
    }
    ScheduleMatrix m = schedule_matrix_for_state(g, ws.state, g.all_links(), limits);
    if (!in_convex_hull(m, tr.mu)) throw Error(ErrorCode::InvalidTriple, where + "mu outside CH(M_J)");
    if (!in_convex_hull(m, tr.nu)) throw Error(ErrorCode::InvalidTriple, where + "nu outside CH(M_J)");
    for (std::size_t l = 0; l < k; ++l) {
      num[l] += ws.probability * tr.h * tr.mu[l];
      den[l] += ws.probability * tr.mu[l];
    }
  }
  std::optional<Rational> best;
  for (std::size_t l = 0; l < k; ++l) {
    if (!is_positive(den[l])) continue;
    Rational ratio = num[l] / den[l];
    if (!best || ratio > *best) best = std::move(ratio);
  }
  return best.value_or(Rational(1));
}

/// A simple triple per state: mu averages the largest schedules, nu the
/// smallest, H = max nu/mu. Falls back to (mu, mu, 1) when nu uses a link mu
/// never serves.
inline std::vector<Thm2Triple> default_thm2_triples(const InterferenceGraph& g, const FadingStructure& f,
                                                    const Limits& limits = Limits::from_env()) {
  std::vector<Thm2Triple> out;
  const std::size_t k = g.size();
  for (const auto& ws : f.states()) {
    ScheduleMatrix m = schedule_matrix_for_state(g, ws.state, g.all_links(), limits);
    const Rational hi = m.max_column_sum(), lo = m.min_column_sum();
    auto average = [&](const Rational& target) {
      RateVector v(k, Rational(0));
      std::size_t count = 0;
      for (std::size_t c = 0; c < m.num_columns(); ++c) {
        if (m.column_sum(c) != target) continue;
        ++count;
        for (std::size_t r = 0; r < m.num_rows(); ++r) v[m.row_links()[r]] += m.entry(r, c);
      }
      for (auto& e : v) e /= count;
      return v;
    };
    Thm2Triple t{average(hi), average(lo), Rational(1)};
    std::optional<Rational> h;
    bool ok = true;
    for (std::size_t l = 0; l < k && ok; ++l) {
      if (is_zero(t.mu[l])) {
        ok = is_zero(t.nu[l]);
        continue;
      }
      Rational ratio = t.nu[l] / t.mu[l];
      if (!h || ratio > *h) h = std::move(ratio);
    }
    if (ok && h) {
      t.h = *h;
    } else {
      t.nu = t.mu;
      t.h = 1;
    }
    out.push_back(std::move(t));
  }
  return out;
}

struct LowerBound {
  Rational value;
  bool vacuous = false;  // every state turns all of L off
};

/// sum_J pi_L(J) n(M_J) / sum_J pi_L(J) N(M_J), with n and N the smallest and
/// largest schedule sizes of state J. ON/OFF channels only.
inline LowerBound lower_bound_thm3(const InterferenceGraph& g, const FadingStructure& f, LinkSet links,
                                   const Limits& limits = Limits::from_env()) {
  if (f.mode() != ChannelMode::OnOff)
    throw Error(ErrorCode::Unsupported, "the schedule-size lower bound applies to ON/OFF channels only");
  PhiDescription d = describe_phi(g, f, links, limits);
  Rational num = 0, den = 0;
  for (std::size_t s = 0; s < d.matrices.size(); ++s) {
    const Rational& p = d.marginal.states()[s].probability;
    num += p * d.matrices[s].min_column_sum();
    den += p * d.matrices[s].max_column_sum();
  }
  if (is_zero(den)) return {Rational(1), true};
  return {num / den, false};
}

struct LowerBoundGraph {
  Rational value;
  LinkSet argmin;
};

/// Smallest non-vacuous lower_bound_thm3 over all nonempty L: a lower bound
/// on sigma_G*(pi).
inline LowerBoundGraph lower_bound_thm3_graph(const InterferenceGraph& g, const FadingStructure& f,
                                              const Limits& limits = Limits::from_env()) {
  if (g.size() > limits.max_links) throw Error(ErrorCode::LimitExceeded, "too many links for subset scan");
  std::optional<LowerBoundGraph> best;
  for_each_subset(g.all_links(), [&](LinkSet s) {
    if (s.empty()) return;
    LowerBound b = lower_bound_thm3(g, f, s, limits);
    if (b.vacuous) return;
    if (!best || b.value < best->value || (b.value == best->value && detail::prefer_subset(s, best->argmin)))
      best = LowerBoundGraph{b.value, s};
  });
  return best.value_or(LowerBoundGraph{Rational(1), g.all_links()});
}

/// 1 / d_I(G).
inline Rational corollary1_bound(const InterferenceGraph& g) {
  return Rational(1) / Rational(interference_degree_graph(g, g.all_links()));
}

struct BoundReport {
  Rational corollary1;
  std::optional<Rational> lower;  // minimized over L
  std::optional<LinkSet> lower_argmin;
  std::optional<Rational> upper;  // min(1, default triple bound)
  std::optional<Rational> exact;
  std::optional<LinkSet> exact_argmin;
};

struct BoundOptions {
  bool exact = true;
  bool bounds = true;
};

inline BoundReport bound_report(const InterferenceGraph& g, const FadingStructure& f, const BoundOptions& opts = {},
                                const Limits& limits = Limits::from_env()) {
  BoundReport r{corollary1_bound(g), {}, {}, {}, {}, {}};
  if (opts.bounds) {
    if (f.mode() == ChannelMode::OnOff) {
      auto lb = lower_bound_thm3_graph(g, f, limits);
      r.lower = lb.value;
      r.lower_argmin = lb.argmin;
      r.upper = std::min(Rational(1), upper_bound_thm2(g, f, default_thm2_triples(g, f, limits), limits));
    }
  }
  if (opts.exact) {
    auto ex = sigma_graph_exact(g, f, limits);
    r.exact = ex.value;
    r.exact_argmin = ex.argmin;
  }
  return r;
}

/// Per-state scaling s(J) applied to the throughput region.
struct RegionScaling {
  enum class Kind { None, Uniform, PerState, InterferenceDegree };
  Kind kind = Kind::None;
  Rational gamma = 1;
  std::vector<Rational> per_state;  // aligned with FadingStructure::states()

  static RegionScaling none() { return {}; }
  static RegionScaling uniform(Rational g) { return {Kind::Uniform, std::move(g), {}}; }
  static RegionScaling per_state_factors(std::vector<Rational> x) { return {Kind::PerState, 1, std::move(x)}; }
  static RegionScaling interference_degree() { return {Kind::InterferenceDegree, 1, {}}; }
};

/// x(J) = 1/d_I of the subgraph induced by the ON links of J; 1 when at most
/// one link is ON.
inline Rational interference_degree_factor(const InterferenceGraph& g, const GlobalState& s) {
  LinkSet on = s.on_set();
  if (on.size() <= 1) return 1;
  return Rational(1) / Rational(interference_degree_graph(g, on));
}

inline std::vector<Rational> scaling_factors(const InterferenceGraph& g, const FadingStructure& f,
                                             const RegionScaling& scaling) {
  std::vector<Rational> out;
  for (std::size_t s = 0; s < f.states().size(); ++s) {
    switch (scaling.kind) {
      case RegionScaling::Kind::None: out.push_back(1); break;
      case RegionScaling::Kind::Uniform: out.push_back(scaling.gamma); break;
      case RegionScaling::Kind::PerState:
        if (scaling.per_state.size() != f.states().size())
          throw Error(ErrorCode::InvalidState, "need one scaling factor per fading state");
        out.push_back(scaling.per_state[s]);
        break;
      case RegionScaling::Kind::InterferenceDegree:
        out.push_back(interference_degree_factor(g, f.states()[s].state));
        break;
    }
  }
  return out;
}

enum class RegionPosition { Interior, Boundary, Exterior };

constexpr const char* to_string(RegionPosition p) {
  switch (p) {
    case RegionPosition::Interior: return "interior";
    case RegionPosition::Boundary: return "boundary";
    case RegionPosition::Exterior: return "exterior";
  }
  return "unknown";
}

/// Membership of lambda in the scaled region
///   { lambda : lambda <= sum_J s(J) pi(J) eta_J, eta_J in CH(M_{J,K}) }.
/// max_scaling is the largest t with t * lambda in the (closed) region. The
/// certificate c >= 0 has c'lambda = 1 and sum_J s(J) pi(J) max_col c'M_J
/// equal to max_scaling, so c separates lambda whenever max_scaling < 1.
struct RegionVerdict {
  bool inside = true;  // closure membership
  RegionPosition position = RegionPosition::Interior;
  std::optional<Rational> max_scaling;  // absent for lambda = 0
  std::vector<Rational> certificate;    // per link, empty for lambda = 0
};

inline RegionVerdict region_membership(const InterferenceGraph& g, const FadingStructure& f, const RateVector& lambda,
                                       const RegionScaling& scaling, const Limits& limits = Limits::from_env()) {
  const std::size_t k = g.size();
  if (lambda.size() != k) throw Error(ErrorCode::InvalidState, "rate vector length does not match graph");
  for (const auto& v : lambda)
    if (is_negative(v)) throw Error(ErrorCode::InvalidState, "rates must be nonnegative");
  if (std::all_of(lambda.begin(), lambda.end(), [](const Rational& v) { return is_zero(v); })) return {};

  const auto factors = scaling_factors(g, f, scaling);
  std::vector<ScheduleMatrix> matrices;
  for (const auto& ws : f.states()) matrices.push_back(schedule_matrix_for_state(g, ws.state, g.all_links(), limits));

  // Largest t with t * lambda inside.
  LinearProgram primal;
  const std::size_t t = primal.add_variable("t");
  std::vector<std::vector<Term>> per_link(k);
  for (std::size_t l = 0; l < k; ++l)
    if (!is_zero(lambda[l])) per_link[l].push_back({t, lambda[l]});
  for (std::size_t s = 0; s < matrices.size(); ++s) {
    const Rational weight = factors[s] * f.states()[s].probability;
    std::vector<Term> sum;
    for (std::size_t c = 0; c < matrices[s].num_columns(); ++c) {
      const std::size_t w = primal.add_variable("w" + std::to_string(s) + "_" + std::to_string(c));
      sum.push_back({w, 1});
      for (std::size_t l = 0; l < k; ++l)
        if (!is_zero(lambda[l]) && !is_zero(matrices[s].entry(l, c)))
          per_link[l].push_back({w, -(weight * matrices[s].entry(l, c))});
    }
    primal.add_constraint("simplex" + std::to_string(s), std::move(sum), Relation::Equal, 1);
  }
  for (std::size_t l = 0; l < k; ++l)
    if (!is_zero(lambda[l])) primal.add_constraint("link_" + g.labels()[l], std::move(per_link[l]), Relation::LessEqual, 0);
  primal.set_objective({{t, 1}});
  LPResult pr = solve(primal);
  if (pr.status != LPStatus::Optimal) throw std::logic_error("region scaling program not optimal");

  // Separating weights: min sum_J s(J) pi(J) u_J, u_J >= c'M_J[:,col], c'lambda = 1.
  LinearProgram dual;
  std::vector<std::size_t> c(k);
  for (std::size_t l = 0; l < k; ++l) c[l] = dual.add_variable("c_" + g.labels()[l]);
  std::vector<Term> objective, normalize;
  for (std::size_t l = 0; l < k; ++l)
    if (!is_zero(lambda[l])) normalize.push_back({c[l], lambda[l]});
  dual.add_constraint("normalize", std::move(normalize), Relation::Equal, 1);
  for (std::size_t s = 0; s < matrices.size(); ++s) {
    const std::size_t u = dual.add_variable("u" + std::to_string(s), Sign::Free);
    objective.push_back({u, -(factors[s] * f.states()[s].probability)});
    for (std::size_t col = 0; col < matrices[s].num_columns(); ++col) {
      std::vector<Term> terms{{u, 1}};
      for (std::size_t l = 0; l < k; ++l)
        if (!is_zero(matrices[s].entry(l, col))) terms.push_back({c[l], -matrices[s].entry(l, col)});
      dual.add_constraint("cover" + std::to_string(s) + "_" + std::to_string(col), std::move(terms),
                          Relation::GreaterEqual, 0);
    }
  }
  dual.set_objective(std::move(objective));
  LPResult dr = solve(dual);
  if (dr.status != LPStatus::Optimal || -dr.objective != pr.objective)
    throw std::logic_error("region certificate does not match the scaling optimum");

  RegionVerdict v;
  v.max_scaling = pr.objective;
  v.inside = pr.objective >= 1;
  v.position = pr.objective > 1 ? RegionPosition::Interior
               : pr.objective == 1 ? RegionPosition::Boundary
                                   : RegionPosition::Exterior;
  v.certificate.assign(dr.values.begin(), dr.values.begin() + static_cast<std::ptrdiff_t>(k));
  return v;
}

/// One row of an i.i.d. sweep. thm3_lower_min is the lower bound minimized
/// over L (a bound on sigma_G); thm3_lower_full takes L = all links.
struct SweepRow {
  Rational p;
  Rational thm3_lower_min;
  Rational thm3_lower_full;
  Rational corollary1;
  std::optional<Rational> exact;
  std::optional<Rational> upper;
};

struct SweepOptions {
  bool exact = true;
  bool upper = true;
};

/// from, from + step, ... up to and including `to`, exactly.
inline std::vector<Rational> sweep_grid(const Rational& from, const Rational& to, const Rational& step) {
  if (!is_positive(step)) throw Error(ErrorCode::Parse, "sweep step must be positive");
  if (is_negative(from) || to > 1 || from > to) throw Error(ErrorCode::ProbabilityOutOfRange, "sweep range outside [0, 1]");
  std::vector<Rational> out;
  for (Rational p = from; p <= to; p += step) out.push_back(p);
  return out;
}

/// Bounds for i.i.d. ON/OFF fading at each p; rows come back in input order.
inline std::vector<SweepRow> sweep_iid(const InterferenceGraph& g, const std::vector<Rational>& ps,
                                       const SweepOptions& opts = {}, const Limits& limits = Limits::from_env()) {
  const Rational c1 = corollary1_bound(g);
  return detail::parallel_map<SweepRow>(ps.size(), [&](std::size_t i) {
    const FadingStructure f = from_iid_bernoulli(g, ps[i], limits);
    SweepRow row{ps[i], lower_bound_thm3_graph(g, f, limits).value, {}, c1, {}, {}};
    auto full = lower_bound_thm3(g, f, g.all_links(), limits);
    row.thm3_lower_full = full.value;
    if (opts.exact) row.exact = sigma_graph_exact(g, f, limits).value;
    if (opts.upper) row.upper = std::min(Rational(1), upper_bound_thm2(g, f, default_thm2_triples(g, f, limits), limits));
    return row;
  });
}

}  // namespace flpf
