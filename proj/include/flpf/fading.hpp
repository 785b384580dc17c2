#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "flpf/error.hpp"
#include "flpf/interference.hpp"
#include "flpf/link_set.hpp"
#include "flpf/rational.hpp"

namespace flpf {

enum class ChannelMode { OnOff, MultiState };

/// Joint channel realization: one value per link. ON/OFF channels use 0/1.
class GlobalState {
 public:
  GlobalState() = default;
  explicit GlobalState(std::vector<Rational> values) : values_(std::move(values)) {}

  static GlobalState from_on_set(std::size_t num_links, LinkSet on) {
    std::vector<Rational> v(num_links, Rational(0));
    for (std::size_t l : on.members()) v.at(l) = 1;
    return GlobalState(std::move(v));
  }

  std::size_t size() const { return values_.size(); }
  const std::vector<Rational>& values() const { return values_; }
  const Rational& value(std::size_t l) const { return values_.at(l); }

  /// Links with a nonzero channel value.
  LinkSet on_set() const {
    LinkSet s;
    for (std::size_t l = 0; l < values_.size(); ++l)
      if (!is_zero(values_[l])) s.insert(l);
    return s;
  }

  /// Same state with every link outside `links` forced to zero.
  GlobalState restricted_to(LinkSet links) const {
    std::vector<Rational> v = values_;
    for (std::size_t l = 0; l < v.size(); ++l)
      if (!links.contains(l)) v[l] = 0;
    return GlobalState(std::move(v));
  }

  /// "110"-style rendering for 0/1 states, comma-separated values otherwise.
  std::string to_string() const {
    bool binary = std::all_of(values_.begin(), values_.end(), [](const Rational& v) { return v == 0 || v == 1; });
    std::string out;
    for (std::size_t l = 0; l < values_.size(); ++l) {
      if (binary) {
        out += is_zero(values_[l]) ? '0' : '1';
      } else {
        if (l > 0) out += ',';
        out += flpf::to_string(values_[l]);
      }
    }
    return out;
  }

  friend bool operator==(const GlobalState&, const GlobalState&) = default;
  friend bool operator<(const GlobalState& a, const GlobalState& b) { return a.values_ < b.values_; }

 private:
  std::vector<Rational> values_;
};

struct WeightedState {
  GlobalState state;
  Rational probability;
};

/// Exact probability distribution over global channel states. States with
/// zero probability are dropped on construction.
class FadingStructure {
 public:
  std::size_t num_links() const { return num_links_; }
  ChannelMode mode() const { return mode_; }
  /// Admissible channel values, ascending and including 0.
  const std::vector<Rational>& state_space() const { return state_space_; }
  const std::vector<WeightedState>& states() const { return states_; }

  /// Probability of `s`, zero when absent from the support.
  Rational probability(const GlobalState& s) const {
    for (const auto& ws : states_)
      if (ws.state == s) return ws.probability;
    return 0;
  }

  /// Distribution equality, independent of state order.
  friend bool operator==(const FadingStructure& a, const FadingStructure& b) {
    if (a.num_links_ != b.num_links_ || a.mode_ != b.mode_ || a.states_.size() != b.states_.size()) return false;
    for (const auto& ws : a.states_)
      if (b.probability(ws.state) != ws.probability) return false;
    return true;
  }

  static FadingStructure build(std::size_t num_links, ChannelMode mode, std::vector<Rational> state_space,
                               std::vector<WeightedState> states) {
    FadingStructure f;
    f.num_links_ = num_links;
    f.mode_ = mode;
    std::sort(state_space.begin(), state_space.end());
    state_space.erase(std::unique(state_space.begin(), state_space.end()), state_space.end());
    if (state_space.empty() || state_space.front() != 0) state_space.insert(state_space.begin(), Rational(0));
    if (is_negative(state_space.front()))
      throw Error(ErrorCode::InvalidState, "channel values must be nonnegative");
    f.state_space_ = std::move(state_space);

    Rational total = 0;
    for (auto& ws : states) {
      if (ws.state.size() != num_links)
        throw Error(ErrorCode::InvalidState, "state '" + ws.state.to_string() + "' has wrong number of links");
      for (const auto& v : ws.state.values())
        if (!std::binary_search(f.state_space_.begin(), f.state_space_.end(), v))
          throw Error(ErrorCode::InvalidState, "value " + to_string(v) + " outside the declared state space");
      if (is_negative(ws.probability) || ws.probability > 1)
        throw Error(ErrorCode::ProbabilityOutOfRange, "probability " + to_string(ws.probability));
      total += ws.probability;
    }
    for (std::size_t i = 0; i < states.size(); ++i)
      for (std::size_t j = i + 1; j < states.size(); ++j)
        if (states[i].state == states[j].state)
          throw Error(ErrorCode::DuplicateState, "state '" + states[i].state.to_string() + "' listed twice");
    if (total != 1) throw Error(ErrorCode::ProbabilitiesDontSumToOne, "probabilities sum to " + to_string(total));

    for (auto& ws : states)
      if (!is_zero(ws.probability)) f.states_.push_back(std::move(ws));
    return f;
  }

 private:
  std::size_t num_links_ = 0;
  ChannelMode mode_ = ChannelMode::OnOff;
  std::vector<Rational> state_space_;
  std::vector<WeightedState> states_;
};

/// Independent ON/OFF links, each ON with probability p.
inline FadingStructure from_iid_bernoulli(std::size_t num_links, const Rational& p,
                                          const Limits& limits = Limits::from_env()) {
  if (is_negative(p) || p > 1) throw Error(ErrorCode::ProbabilityOutOfRange, "p = " + to_string(p));
  if (num_links > limits.max_links)
    throw Error(ErrorCode::LimitExceeded, "i.i.d. fading over " + std::to_string(num_links) + " links");
  std::vector<WeightedState> states;
  const Rational q = 1 - p;
  for_each_subset(LinkSet::all(num_links), [&](LinkSet on) {
    Rational prob = 1;
    for (std::size_t l = 0; l < num_links; ++l) prob *= on.contains(l) ? p : q;
    if (!is_zero(prob)) states.push_back({GlobalState::from_on_set(num_links, on), prob});
  });
  return FadingStructure::build(num_links, ChannelMode::OnOff, {0, 1}, std::move(states));
}

inline FadingStructure from_iid_bernoulli(const InterferenceGraph& g, const Rational& p,
                                          const Limits& limits = Limits::from_env()) {
  return from_iid_bernoulli(g.size(), p, limits);
}

/// ON/OFF structure from explicit ON sets and their probabilities.
inline FadingStructure from_explicit(std::size_t num_links, const std::vector<LinkSet>& on_sets,
                                     const std::vector<Rational>& probs) {
  if (on_sets.size() != probs.size()) throw Error(ErrorCode::InvalidState, "state/probability count mismatch");
  std::vector<WeightedState> states;
  for (std::size_t i = 0; i < on_sets.size(); ++i) {
    if (!on_sets[i].is_subset_of(LinkSet::all(num_links))) throw Error(ErrorCode::UnknownLink, "state names unknown link");
    states.push_back({GlobalState::from_on_set(num_links, on_sets[i]), probs[i]});
  }
  return FadingStructure::build(num_links, ChannelMode::OnOff, {0, 1}, std::move(states));
}

/// Multi-state structure: each state assigns one value from `state_space`.
inline FadingStructure from_explicit_values(std::size_t num_links, std::vector<Rational> state_space,
                                            const std::vector<std::vector<Rational>>& values,
                                            const std::vector<Rational>& probs) {
  if (values.size() != probs.size()) throw Error(ErrorCode::InvalidState, "state/probability count mismatch");
  std::vector<WeightedState> states;
  for (std::size_t i = 0; i < values.size(); ++i) states.push_back({GlobalState(values[i]), probs[i]});
  return FadingStructure::build(num_links, ChannelMode::MultiState, std::move(state_space), std::move(states));
}

/// No fading: every link ON with probability 1.
inline FadingStructure no_fading(std::size_t num_links) {
  return from_explicit(num_links, {LinkSet::all(num_links)}, {Rational(1)});
}

/// pi_L: states restricted to `links` (other coordinates zeroed), with the
/// probabilities of merged states summed. States keep first-appearance order.
inline FadingStructure marginal(const FadingStructure& f, LinkSet links) {
  std::vector<WeightedState> merged;
  for (const auto& ws : f.states()) {
    GlobalState r = ws.state.restricted_to(links);
    auto it = std::find_if(merged.begin(), merged.end(), [&](const WeightedState& m) { return m.state == r; });
    if (it == merged.end())
      merged.push_back({std::move(r), ws.probability});
    else
      it->probability += ws.probability;
  }
  return FadingStructure::build(f.num_links(), f.mode(), f.state_space(), std::move(merged));
}

/// Draws i.i.d. global states. Probabilities become doubles only here.
class FadingSampler {
 public:
  explicit FadingSampler(const FadingStructure& f) : fading_(&f) {
    std::vector<double> weights;
    for (const auto& ws : f.states()) weights.push_back(to_double(ws.probability));
    dist_ = std::discrete_distribution<std::size_t>(weights.begin(), weights.end());
  }

  template <typename Rng>
  std::size_t draw_index(Rng& rng) {
    return dist_(rng);
  }

  template <typename Rng>
  const GlobalState& operator()(Rng& rng) {
    return fading_->states()[draw_index(rng)].state;
  }

 private:
  const FadingStructure* fading_;
  std::discrete_distribution<std::size_t> dist_;
};

/// Schedule matrix for a channel state: maximal independent sets among the
/// links of `rows` with nonzero channel value, each entry equal to the link's
/// channel value.
inline ScheduleMatrix schedule_matrix_for_state(const InterferenceGraph& g, const GlobalState& s, LinkSet rows,
                                                const Limits& limits = Limits::from_env()) {
  if (s.size() != g.size()) throw Error(ErrorCode::InvalidState, "state size does not match graph");
  ScheduleMatrix base = maximal_independent_sets(g, s.on_set() & rows, rows, limits);
  std::vector<ScheduleMatrix::Column> columns = base.columns();
  const auto& row_links = base.row_links();
  for (auto& col : columns)
    for (std::size_t r = 0; r < row_links.size(); ++r)
      if (!is_zero(col.entries[r])) col.entries[r] = s.value(row_links[r]);
  return ScheduleMatrix(base.row_set(), base.active_set(), std::move(columns));
}

}  // namespace flpf
