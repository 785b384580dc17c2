#pragma once

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "flpf/error.hpp"
#include "flpf/link_set.hpp"
#include "flpf/rational.hpp"

namespace flpf {

/// Enumeration limits for the exponential parts of the library.
struct Limits {
  std::size_t max_links = 16;

  /// Default limits, with FLPF_MAX_LINKS overriding max_links when set.
  static Limits from_env() {
    Limits limits;
    if (const char* env = std::getenv("FLPF_MAX_LINKS"); env != nullptr && *env != '\0') {
      char* end = nullptr;
      unsigned long v = std::strtoul(env, &end, 10);
      if (end != nullptr && *end == '\0' && v > 0) limits.max_links = std::min<std::size_t>(v, kMaxLinks);
    }
    return limits;
  }
};

struct LinkId {
  std::size_t index = 0;
  std::string label;
};

/// Raw interference description, before validation.
struct InterferenceInput {
  std::vector<std::string> labels;
  /// interferers[l] is the set I_l, as link indices.
  std::vector<std::vector<std::size_t>> interferers;
};

/// Checks symmetry and irreflexivity of the relation, plus index ranges and
/// label uniqueness. Returns the first violation found.
inline std::optional<Error> validate_graph(const InterferenceInput& input) {
  const std::size_t k = input.labels.size();
  if (k > kMaxLinks)
    return Error(ErrorCode::LimitExceeded, "graph has " + std::to_string(k) + " links, at most " +
                                               std::to_string(kMaxLinks) + " supported");
  if (input.interferers.size() != k)
    return Error(ErrorCode::UnknownLink, "interference list count does not match link count");
  std::unordered_set<std::string> seen;
  for (const auto& label : input.labels)
    if (!seen.insert(label).second) return Error(ErrorCode::DuplicateState, "duplicate link label '" + label + "'");

  std::vector<LinkSet> adj(k);
  for (std::size_t l = 0; l < k; ++l) {
    for (std::size_t m : input.interferers[l]) {
      if (m >= k) return Error(ErrorCode::UnknownLink, "link index " + std::to_string(m) + " out of range");
      if (m == l) return Error(ErrorCode::SelfInterference, "link " + input.labels[l] + " interferes with itself");
      adj[l].insert(m);
    }
  }
  for (std::size_t l = 0; l < k; ++l)
    for (std::size_t m : adj[l].members())
      if (!adj[m].contains(l))
        return Error(ErrorCode::AsymmetricInterference,
                     input.labels[m] + " in I_" + input.labels[l] + " but " + input.labels[l] + " not in I_" +
                         input.labels[m]);
  return std::nullopt;
}

/// Links plus a symmetric, irreflexive interference relation. Immutable.
class InterferenceGraph {
 public:
  explicit InterferenceGraph(const InterferenceInput& input) {
    if (auto err = validate_graph(input)) throw *err;
    labels_ = input.labels;
    adjacency_.resize(labels_.size());
    for (std::size_t l = 0; l < labels_.size(); ++l)
      for (std::size_t m : input.interferers[l]) adjacency_[l].insert(m);
  }

  /// Graph over `labels` with undirected interference edges given by index.
  static InterferenceGraph from_edges(std::vector<std::string> labels,
                                      const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    InterferenceInput input{std::move(labels), {}};
    input.interferers.resize(input.labels.size());
    for (auto [a, b] : edges) {
      if (a >= input.labels.size() || b >= input.labels.size())
        throw Error(ErrorCode::UnknownLink, "edge endpoint out of range");
      input.interferers[a].push_back(b);
      if (a != b) input.interferers[b].push_back(a);
    }
    return InterferenceGraph(input);
  }

  std::size_t size() const { return labels_.size(); }
  LinkSet all_links() const { return LinkSet::all(size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  LinkId link(std::size_t l) const { return LinkId{l, labels_.at(l)}; }

  /// The set I_l.
  LinkSet interferers(std::size_t l) const { return adjacency_.at(l); }
  /// {l} together with I_l.
  LinkSet closed_neighborhood(std::size_t l) const { return adjacency_.at(l) | LinkSet::single(l); }
  bool interfere(std::size_t a, std::size_t b) const { return adjacency_.at(a).contains(b); }

  std::optional<std::size_t> index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - labels_.begin());
  }

  bool is_independent(LinkSet s) const {
    for (std::size_t l : s.members())
      if (adjacency_[l].intersects(s)) return false;
    return true;
  }

  /// Independent within `active` and no further link of `active` can join.
  bool is_maximal_independent(LinkSet s, LinkSet active) const {
    if (!s.is_subset_of(active) || !is_independent(s)) return false;
    for (std::size_t l : (active - s).members())
      if (!adjacency_[l].intersects(s)) return false;
    return true;
  }

  friend bool operator==(const InterferenceGraph&, const InterferenceGraph&) = default;

 private:
  std::vector<std::string> labels_;
  std::vector<LinkSet> adjacency_;
};

/// Columns are schedules over the ordered row set; entries are 0/1 for ON/OFF
/// channels and the channel value X_l for multi-state channels.
class ScheduleMatrix {
 public:
  struct Column {
    LinkSet members;
    std::vector<Rational> entries;  // one per row
  };

  ScheduleMatrix(LinkSet rows, LinkSet active, std::vector<Column> columns)
      : rows_(rows), row_links_(rows.members()), active_(active), columns_(std::move(columns)) {}

  LinkSet row_set() const { return rows_; }
  const std::vector<std::size_t>& row_links() const { return row_links_; }
  LinkSet active_set() const { return active_; }
  std::size_t num_rows() const { return row_links_.size(); }
  std::size_t num_columns() const { return columns_.size(); }
  const std::vector<Column>& columns() const { return columns_; }
  const Column& column(std::size_t c) const { return columns_.at(c); }
  const Rational& entry(std::size_t row, std::size_t col) const { return columns_.at(col).entries.at(row); }

  Rational column_sum(std::size_t c) const {
    Rational s = 0;
    for (const auto& v : columns_.at(c).entries) s += v;
    return s;
  }

  /// n(M): smallest column sum.
  Rational min_column_sum() const {
    Rational best = column_sum(0);
    for (std::size_t c = 1; c < num_columns(); ++c) best = std::min(best, column_sum(c));
    return best;
  }

  /// N(M): largest column sum.
  Rational max_column_sum() const {
    Rational best = column_sum(0);
    for (std::size_t c = 1; c < num_columns(); ++c) best = std::max(best, column_sum(c));
    return best;
  }

  friend bool operator==(const ScheduleMatrix& a, const ScheduleMatrix& b) {
    if (a.rows_ != b.rows_ || a.active_ != b.active_ || a.columns_.size() != b.columns_.size()) return false;
    for (std::size_t c = 0; c < a.columns_.size(); ++c)
      if (a.columns_[c].members != b.columns_[c].members || a.columns_[c].entries != b.columns_[c].entries)
        return false;
    return true;
  }

 private:
  LinkSet rows_;
  std::vector<std::size_t> row_links_;
  LinkSet active_;
  std::vector<Column> columns_;
};

namespace detail {

// Bron-Kerbosch with pivoting, run on the complement: maximal cliques of the
// complement are the maximal independent sets of g restricted to `active`.
template <typename Fn>
void enumerate_mis(const InterferenceGraph& g, LinkSet current, LinkSet candidates, LinkSet excluded, Fn& emit) {
  if (candidates.empty()) {
    if (excluded.empty()) emit(current);
    return;
  }
  std::size_t pivot = candidates.front();
  std::size_t best = candidates.size() + 1;
  for (std::size_t u : (candidates | excluded).members()) {
    std::size_t branching = (candidates & g.closed_neighborhood(u)).size();
    if (branching < best) {
      best = branching;
      pivot = u;
    }
  }
  for (std::size_t v : (candidates & g.closed_neighborhood(pivot)).members()) {
    LinkSet blocked = g.closed_neighborhood(v);
    LinkSet next = current;
    next.insert(v);
    enumerate_mis(g, next, candidates - blocked, excluded - blocked, emit);
    candidates.erase(v);
    excluded.insert(v);
  }
}

inline std::vector<LinkSet> maximal_independent_subsets(const InterferenceGraph& g, LinkSet active) {
  std::vector<LinkSet> out;
  auto emit = [&out](LinkSet s) { out.push_back(s); };
  enumerate_mis(g, LinkSet{}, active, LinkSet{}, emit);
  std::sort(out.begin(), out.end(), [](LinkSet a, LinkSet b) { return lex_less(a, b); });
  return out;
}

inline std::size_t max_independent_size(const InterferenceGraph& g, LinkSet active) {
  std::size_t best = 0;
  for (LinkSet s : maximal_independent_subsets(g, active)) best = std::max(best, s.size());
  return best;
}

}  // namespace detail

/// M_{active, rows}: one 0/1 column per maximal independent set of the
/// subgraph induced by `active`, padded with zero rows for rows outside
/// `active`. An empty active set yields a single all-zero column. Columns are
/// in lexicographic order of their member indices.
inline ScheduleMatrix maximal_independent_sets(const InterferenceGraph& g, LinkSet active, LinkSet rows,
                                               const Limits& limits = Limits::from_env()) {
  if (!rows.is_subset_of(g.all_links())) throw Error(ErrorCode::UnknownLink, "row set exceeds graph links");
  if (!active.is_subset_of(rows)) throw Error(ErrorCode::UnknownLink, "active set must be a subset of the rows");
  if (rows.size() > limits.max_links)
    throw Error(ErrorCode::LimitExceeded, std::to_string(rows.size()) + " rows exceed the enumeration cap of " +
                                              std::to_string(limits.max_links));
  const auto row_links = rows.members();
  std::vector<ScheduleMatrix::Column> columns;
  for (LinkSet s : detail::maximal_independent_subsets(g, active)) {
    ScheduleMatrix::Column col{s, std::vector<Rational>(row_links.size(), Rational(0))};
    for (std::size_t r = 0; r < row_links.size(); ++r)
      if (s.contains(row_links[r])) col.entries[r] = 1;
    columns.push_back(std::move(col));
  }
  return ScheduleMatrix(rows, active, std::move(columns));
}

/// d_I(l): the largest number of links of {l} plus I_l that can be active at
/// once. Always at least 1.
inline std::size_t interference_degree_link(const InterferenceGraph& g, std::size_t l) {
  if (l >= g.size()) throw Error(ErrorCode::UnknownLink, "link index out of range");
  return detail::max_independent_size(g, g.closed_neighborhood(l));
}

/// d_I of the subgraph induced by `active`: neighbourhoods are intersected
/// with `active` before measuring.
inline std::size_t interference_degree_graph(const InterferenceGraph& g, LinkSet active) {
  if (active.empty()) throw Error(ErrorCode::EmptyActiveSet, "interference degree of an empty link set");
  if (!active.is_subset_of(g.all_links())) throw Error(ErrorCode::UnknownLink, "active set exceeds graph links");
  std::size_t best = 0;
  for (std::size_t l : active.members())
    best = std::max(best, detail::max_independent_size(g, g.closed_neighborhood(l) & active));
  return best;
}

}  // namespace flpf
