#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "flpf/error.hpp"
#include "flpf/fading.hpp"
#include "flpf/interference.hpp"
#include "flpf/pooling.hpp"
#include "flpf/rational.hpp"
#include "flpf/sim.hpp"

namespace flpf {

// Network files are JSON:
//
//   {
//     "name": "example_b",
//     "links": ["a", "b", "c"],
//     "interference": [["a", "b"], ["b", "c"]],   // or {"a": ["b"], ...}
//     "fading": {"type": "explicit",
//                "states": [{"on": ["a", "b"], "probability": "1/3"}, ...]},
//     "rates": ["5/12", "5/12", "5/12"],
//     "adversarial": {"links": ["a", "b", "c"], "nu": ["1/3", "1/3", "1/3"],
//                     "epsilon": "1/50", "delta": "1/100",
//                     "decomposition": [{"state": ["a", "b"],
//                                        "columns": [{"links": ["a"], "weight": "1"}]}, ...]}
//   }
//
// Other fading types: {"type": "iid", "p": "1/2"}, {"type": "none"}, and
// {"type": "multistate", "values": ["0", "1", "2"],
//  "states": [{"values": ["1", "2", "0"], "probability": "1/2"}, ...]}.
// An "on" entry may also be a 0/1 string in link order, e.g. "110".
// Rationals are "num/den" strings; plain JSON numbers are accepted on input.

enum class FadingKind { Explicit, Iid, None, MultiState };

struct DecompositionColumn {
  LinkSet links;
  Rational weight;
};

struct DecompositionEntry {
  LinkSet state;  // ON links within L
  std::vector<DecompositionColumn> columns;
};

struct AdversarialSpec {
  LinkSet links;
  RateVector nu;
  Rational epsilon = make_rational(1, 50);
  Rational delta = make_rational(1, 100);
  std::vector<DecompositionEntry> decomposition;
};

struct NetworkFile {
  std::string name;
  std::string description;
  InterferenceGraph graph;
  FadingStructure fading;
  FadingKind kind = FadingKind::Explicit;
  std::optional<Rational> iid_p;
  std::optional<RateVector> rates;
  std::optional<AdversarialSpec> adversarial;
};

namespace detail {

using nlohmann::json;

[[noreturn]] inline void parse_fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::Parse, where + ": " + what);
}

inline const json& field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) parse_fail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) parse_fail(where, "missing field '" + key + "'");
  return *it;
}

inline Rational rational_field(const json& v, const std::string& where) {
  try {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_number_float()) return parse_rational(v.dump());
  } catch (const Error& e) {
    parse_fail(where, e.message());
  }
  parse_fail(where, "expected a rational such as \"1/3\"");
}

inline std::vector<Rational> rational_list(const json& v, const std::string& where) {
  if (!v.is_array()) parse_fail(where, "expected an array");
  std::vector<Rational> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(rational_field(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline std::size_t label_index(const InterferenceGraph& g, const json& v, const std::string& where) {
  if (!v.is_string()) parse_fail(where, "expected a link label");
  auto idx = g.index_of(v.get<std::string>());
  if (!idx) throw Error(ErrorCode::UnknownLink, where + ": unknown link '" + v.get<std::string>() + "'");
  return *idx;
}

// A list of labels, or a 0/1 string over all links.
inline LinkSet link_set_field(const InterferenceGraph& g, const json& v, const std::string& where) {
  LinkSet s;
  if (v.is_string()) {
    const std::string bits = v.get<std::string>();
    if (bits.size() != g.size() || bits.find_first_not_of("01") != std::string::npos)
      parse_fail(where, "expected " + std::to_string(g.size()) + " characters of 0/1");
    for (std::size_t l = 0; l < bits.size(); ++l)
      if (bits[l] == '1') s.insert(l);
    return s;
  }
  if (!v.is_array()) parse_fail(where, "expected a list of link labels");
  for (std::size_t i = 0; i < v.size(); ++i) s.insert(label_index(g, v[i], where + "[" + std::to_string(i) + "]"));
  return s;
}

inline json labels_of(const InterferenceGraph& g, LinkSet s) {
  json out = json::array();
  for (std::size_t l : s.members()) out.push_back(g.labels()[l]);
  return out;
}

inline json rationals_json(const std::vector<Rational>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(to_string(x));
  return out;
}

inline InterferenceGraph parse_graph(const json& root) {
  const json& links = field(root, "links", "network");
  if (!links.is_array() || links.empty()) parse_fail("links", "expected a nonempty array of labels");
  InterferenceInput input;
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (!links[i].is_string()) parse_fail("links[" + std::to_string(i) + "]", "expected a string label");
    input.labels.push_back(links[i].get<std::string>());
  }
  if (input.labels.size() > kMaxLinks)
    throw Error(ErrorCode::LimitExceeded, "links: " + std::to_string(input.labels.size()) + " links, at most " +
                                              std::to_string(kMaxLinks) + " supported");
  input.interferers.resize(input.labels.size());
  auto index = [&](const json& v, const std::string& where) -> std::size_t {
    if (!v.is_string()) parse_fail(where, "expected a link label");
    auto it = std::find(input.labels.begin(), input.labels.end(), v.get<std::string>());
    if (it == input.labels.end())
      throw Error(ErrorCode::UnknownLink, where + ": unknown link '" + v.get<std::string>() + "'");
    return static_cast<std::size_t>(it - input.labels.begin());
  };
  auto it = root.find("interference");
  if (it != root.end()) {
    const json& inter = *it;
    if (inter.is_array()) {
      for (std::size_t e = 0; e < inter.size(); ++e) {
        const std::string where = "interference[" + std::to_string(e) + "]";
        if (!inter[e].is_array() || inter[e].size() != 2) parse_fail(where, "expected a pair of labels");
        std::size_t a = index(inter[e][0], where), b = index(inter[e][1], where);
        input.interferers[a].push_back(b);
        if (a != b) input.interferers[b].push_back(a);
      }
    } else if (inter.is_object()) {
      for (auto& [key, list] : inter.items()) {
        const std::string where = "interference." + key;
        std::size_t a = index(json(key), where);
        if (!list.is_array()) parse_fail(where, "expected a list of labels");
        for (const auto& v : list) input.interferers[a].push_back(index(v, where));
      }
    } else {
      parse_fail("interference", "expected an edge list or an object of interferer lists");
    }
  }
  for (auto& list : input.interferers) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  if (auto err = validate_graph(input)) throw Error(err->code(), "interference: " + err->message());
  return InterferenceGraph(input);
}

inline void parse_fading(const json& root, NetworkFile& nf, const Limits& limits) {
  const json& fad = field(root, "fading", "network");
  const json& type = field(fad, "type", "fading");
  if (!type.is_string()) parse_fail("fading.type", "expected a string");
  const std::string t = type.get<std::string>();
  const std::size_t k = nf.graph.size();
  auto wrap = [](const std::string& where, auto&& fn) {
    try {
      return fn();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Parse) throw;
      throw Error(e.code(), where + ": " + e.message());
    }
  };
  if (t == "iid") {
    nf.kind = FadingKind::Iid;
    nf.iid_p = rational_field(field(fad, "p", "fading"), "fading.p");
    nf.fading = wrap("fading.p", [&] { return from_iid_bernoulli(k, *nf.iid_p, limits); });
  } else if (t == "none") {
    nf.kind = FadingKind::None;
    nf.fading = no_fading(k);
  } else if (t == "explicit") {
    nf.kind = FadingKind::Explicit;
    const json& states = field(fad, "states", "fading");
    if (!states.is_array() || states.empty()) parse_fail("fading.states", "expected a nonempty array");
    std::vector<LinkSet> sets;
    std::vector<Rational> probs;
    for (std::size_t i = 0; i < states.size(); ++i) {
      const std::string where = "fading.states[" + std::to_string(i) + "]";
      sets.push_back(link_set_field(nf.graph, field(states[i], "on", where), where + ".on"));
      probs.push_back(rational_field(field(states[i], "probability", where), where + ".probability"));
    }
    nf.fading = wrap("fading.states", [&] { return from_explicit(k, sets, probs); });
  } else if (t == "multistate") {
    nf.kind = FadingKind::MultiState;
    auto space = rational_list(field(fad, "values", "fading"), "fading.values");
    const json& states = field(fad, "states", "fading");
    if (!states.is_array() || states.empty()) parse_fail("fading.states", "expected a nonempty array");
    std::vector<std::vector<Rational>> values;
    std::vector<Rational> probs;
    for (std::size_t i = 0; i < states.size(); ++i) {
      const std::string where = "fading.states[" + std::to_string(i) + "]";
      values.push_back(rational_list(field(states[i], "values", where), where + ".values"));
      if (values.back().size() != k) parse_fail(where + ".values", "expected " + std::to_string(k) + " values");
      probs.push_back(rational_field(field(states[i], "probability", where), where + ".probability"));
    }
    nf.fading = wrap("fading.states", [&] { return from_explicit_values(k, space, values, probs); });
  } else {
    parse_fail("fading.type", "unknown fading type '" + t + "' (explicit, iid, none, multistate)");
  }
}

inline AdversarialSpec parse_adversarial(const json& a, const InterferenceGraph& g) {
  AdversarialSpec spec;
  spec.links = a.contains("links") ? link_set_field(g, a["links"], "adversarial.links") : g.all_links();
  spec.nu = rational_list(field(a, "nu", "adversarial"), "adversarial.nu");
  if (spec.nu.size() != g.size()) parse_fail("adversarial.nu", "expected one rate per link");
  if (a.contains("epsilon")) spec.epsilon = rational_field(a["epsilon"], "adversarial.epsilon");
  if (a.contains("delta")) spec.delta = rational_field(a["delta"], "adversarial.delta");
  const json& dec = field(a, "decomposition", "adversarial");
  if (!dec.is_array()) parse_fail("adversarial.decomposition", "expected an array");
  for (std::size_t i = 0; i < dec.size(); ++i) {
    const std::string where = "adversarial.decomposition[" + std::to_string(i) + "]";
    DecompositionEntry e;
    e.state = link_set_field(g, field(dec[i], "state", where), where + ".state");
    const json& cols = field(dec[i], "columns", where);
    if (!cols.is_array()) parse_fail(where + ".columns", "expected an array");
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const std::string cw = where + ".columns[" + std::to_string(c) + "]";
      e.columns.push_back({link_set_field(g, field(cols[c], "links", cw), cw + ".links"),
                           rational_field(field(cols[c], "weight", cw), cw + ".weight")});
    }
    spec.decomposition.push_back(std::move(e));
  }
  return spec;
}

}  // namespace detail

inline NetworkFile parse_network(const nlohmann::json& root, const Limits& limits = Limits::from_env()) {
  if (!root.is_object()) detail::parse_fail("network", "expected a JSON object");
  InterferenceGraph g = detail::parse_graph(root);
  NetworkFile nf{root.value("name", std::string()), root.value("description", std::string()), g, {}, {}, {}, {}, {}};
  detail::parse_fading(root, nf, limits);
  if (root.contains("rates")) {
    nf.rates = detail::rational_list(root["rates"], "rates");
    if (nf.rates->size() != g.size()) detail::parse_fail("rates", "expected one rate per link");
    for (std::size_t l = 0; l < g.size(); ++l)
      if (is_negative((*nf.rates)[l])) detail::parse_fail("rates[" + std::to_string(l) + "]", "rate must be >= 0");
  }
  if (root.contains("adversarial")) nf.adversarial = detail::parse_adversarial(root["adversarial"], g);
  return nf;
}

inline NetworkFile parse_network_text(const std::string& text, const Limits& limits = Limits::from_env()) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
  return parse_network(root, limits);
}

inline NetworkFile load_network(const std::string& path, const Limits& limits = Limits::from_env()) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_network_text(ss.str(), limits);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.message());
  }
}

inline nlohmann::json to_json(const NetworkFile& nf) {
  using nlohmann::json;
  const auto& g = nf.graph;
  json root;
  if (!nf.name.empty()) root["name"] = nf.name;
  if (!nf.description.empty()) root["description"] = nf.description;
  root["links"] = g.labels();
  json edges = json::array();
  for (std::size_t a = 0; a < g.size(); ++a)
    for (std::size_t b : g.interferers(a).members())
      if (a < b) edges.push_back({g.labels()[a], g.labels()[b]});
  root["interference"] = edges;
  json fad;
  switch (nf.kind) {
    case FadingKind::Iid:
      fad = {{"type", "iid"}, {"p", to_string(*nf.iid_p)}};
      break;
    case FadingKind::None:
      fad = {{"type", "none"}};
      break;
    case FadingKind::Explicit: {
      fad = {{"type", "explicit"}, {"states", json::array()}};
      for (const auto& ws : nf.fading.states())
        fad["states"].push_back({{"on", detail::labels_of(g, ws.state.on_set())}, {"probability", to_string(ws.probability)}});
      break;
    }
    case FadingKind::MultiState: {
      fad = {{"type", "multistate"}, {"values", detail::rationals_json(nf.fading.state_space())}, {"states", json::array()}};
      for (const auto& ws : nf.fading.states())
        fad["states"].push_back({{"values", detail::rationals_json(ws.state.values())}, {"probability", to_string(ws.probability)}});
      break;
    }
  }
  root["fading"] = fad;
  if (nf.rates) root["rates"] = detail::rationals_json(*nf.rates);
  if (nf.adversarial) {
    const auto& a = *nf.adversarial;
    json adv{{"links", detail::labels_of(g, a.links)},
             {"nu", detail::rationals_json(a.nu)},
             {"epsilon", to_string(a.epsilon)},
             {"delta", to_string(a.delta)},
             {"decomposition", json::array()}};
    for (const auto& e : a.decomposition) {
      json cols = json::array();
      for (const auto& c : e.columns) cols.push_back({{"links", detail::labels_of(g, c.links)}, {"weight", to_string(c.weight)}});
      adv["decomposition"].push_back({{"state", detail::labels_of(g, e.state)}, {"columns", cols}});
    }
    root["adversarial"] = adv;
  }
  return root;
}

/// Decomposition entries as per-state weight vectors in describe_phi order.
/// Columns not listed get weight 0; every marginal state must be listed.
inline std::vector<std::vector<Rational>> decomposition_weights(const NetworkFile& nf,
                                                               const Limits& limits = Limits::from_env()) {
  if (!nf.adversarial) throw Error(ErrorCode::DecompositionNotInPhi, "network has no adversarial block");
  const auto& a = *nf.adversarial;
  PhiDescription d = describe_phi(nf.graph, nf.fading, a.links, limits);
  std::vector<std::vector<Rational>> out;
  for (std::size_t s = 0; s < d.matrices.size(); ++s) {
    const LinkSet on = d.marginal.states()[s].state.on_set();
    const auto& m = d.matrices[s];
    auto it = std::find_if(a.decomposition.begin(), a.decomposition.end(),
                           [&](const DecompositionEntry& e) { return e.state == on; });
    if (it == a.decomposition.end())
      throw Error(ErrorCode::DecompositionNotInPhi, "no weights for state " + link_set_name(nf.graph, on));
    std::vector<Rational> w(m.num_columns(), Rational(0));
    for (const auto& col : it->columns) {
      std::size_t c = 0;
      while (c < m.num_columns() && m.column(c).members != col.links) ++c;
      if (c == m.num_columns())
        throw Error(ErrorCode::DecompositionNotInPhi, link_set_name(nf.graph, col.links) +
                                                          " is not a maximal schedule of state " +
                                                          link_set_name(nf.graph, on));
      w[c] += col.weight;
    }
    out.push_back(std::move(w));
  }
  return out;
}

inline ScriptedPattern adversarial_pattern_from(const NetworkFile& nf, SurgeMode surge,
                                                const Limits& limits = Limits::from_env()) {
  const auto& a = nf.adversarial.value();
  AdversarialOptions o;
  o.epsilon = a.epsilon;
  o.delta = a.delta;
  o.surge = surge;
  return build_adversarial_pattern(nf.graph, nf.fading, a.links, a.nu, decomposition_weights(nf, limits), o, limits);
}

}  // namespace flpf
