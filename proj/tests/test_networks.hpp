#pragma once

#include <algorithm>
#include <random>

#include "flpf/fading.hpp"
#include "flpf/interference.hpp"

namespace flpf::testing {

// Fig. 1 graph, links 1..4 stored as indices 0..3.
inline InterferenceGraph fig1_graph() {
  return InterferenceGraph::from_edges({"1", "2", "3", "4"}, {{0, 1}, {1, 2}, {1, 3}, {2, 3}});
}

inline InterferenceGraph hexagon_graph() {
  return InterferenceGraph::from_edges({"a", "b", "c", "d", "e", "f"},
                                       {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}});
}

inline InterferenceGraph path_abc() { return InterferenceGraph::from_edges({"a", "b", "c"}, {{0, 1}, {1, 2}}); }

inline InterferenceGraph single_link() { return InterferenceGraph::from_edges({"l"}, {}); }

inline InterferenceGraph clique(std::size_t k) {
  std::vector<std::string> labels;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < k; ++i) {
    labels.push_back("l" + std::to_string(i));
    for (std::size_t j = i + 1; j < k; ++j) edges.emplace_back(i, j);
  }
  return InterferenceGraph::from_edges(labels, edges);
}

// pi('110') = pi('011') = pi('111') = 1/3 on the path a-b-c.
inline FadingStructure example_b_fading() {
  const Rational third(1, 3);
  return from_explicit(3, {LinkSet{0, 1}, LinkSet{1, 2}, LinkSet{0, 1, 2}}, {third, third, third});
}

inline InterferenceGraph random_graph(std::size_t k, double edge_prob, std::mt19937_64& rng) {
  std::bernoulli_distribution edge(edge_prob);
  std::vector<std::string> labels;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < k; ++i) {
    labels.push_back("l" + std::to_string(i));
    for (std::size_t j = i + 1; j < k; ++j)
      if (edge(rng)) edges.emplace_back(i, j);
  }
  return InterferenceGraph::from_edges(labels, edges);
}

// Up to max_states distinct ON sets with random positive rational weights.
inline FadingStructure random_explicit_fading(std::size_t k, std::size_t max_states, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint64_t> mask(0, (std::uint64_t{1} << k) - 1);
  std::uniform_int_distribution<std::size_t> count(1, max_states);
  std::uniform_int_distribution<int> weight(1, 6);
  const std::size_t n = count(rng);
  std::vector<LinkSet> sets;
  while (sets.size() < n) {
    LinkSet s(mask(rng));
    if (std::find(sets.begin(), sets.end(), s) == sets.end()) sets.push_back(s);
    if (sets.size() == (std::size_t{1} << k)) break;
  }
  std::vector<int> w;
  int total = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) total += w.emplace_back(weight(rng));
  std::vector<Rational> probs;
  for (int x : w) probs.push_back(make_rational(x, total));
  return from_explicit(k, sets, probs);
}

}  // namespace flpf::testing
