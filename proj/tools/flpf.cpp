// flpf: command-line front end for the fading local pooling library.
//
// Exit codes: 0 success, 2 parse or validation error, 3 computation limit,
// 4 acceptance-check failure.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "flpf/acceptance.hpp"
#include "flpf/flpf.hpp"

namespace {

using namespace flpf;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitLimit = 3;
constexpr int kExitCheck = 4;

int exit_code_for(ErrorCode c) {
  return c == ErrorCode::LimitExceeded || c == ErrorCode::NumericOverflow ? kExitLimit : kExitInput;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);)
    if (!item.empty()) out.push_back(item);
  return out;
}

// "a,b" labels or "110" bits.
LinkSet parse_subset(const InterferenceGraph& g, const std::string& text) {
  if (text.size() == g.size() && text.find_first_not_of("01") == std::string::npos) {
    LinkSet s;
    for (std::size_t l = 0; l < text.size(); ++l)
      if (text[l] == '1') s.insert(l);
    return s;
  }
  LinkSet s;
  for (const auto& label : split(text, ',')) {
    auto idx = g.index_of(label);
    if (!idx) throw Error(ErrorCode::UnknownLink, "--subset: unknown link '" + label + "'");
    s.insert(*idx);
  }
  if (s.empty()) throw Error(ErrorCode::EmptyActiveSet, "--subset is empty");
  return s;
}

// Comma-separated rationals; a single value applies to every link.
RateVector parse_rates(const std::string& text, std::size_t k) {
  RateVector r;
  for (const auto& item : split(text, ',')) r.push_back(parse_rational(item));
  if (r.size() == 1) r.assign(k, r[0]);
  if (r.size() != k) throw Error(ErrorCode::Parse, "--rates: expected 1 or " + std::to_string(k) + " values");
  for (const auto& v : r)
    if (is_negative(v)) throw Error(ErrorCode::InvalidState, "--rates: rates must be nonnegative");
  return r;
}

RateVector rates_or_file(const std::string& text, const NetworkFile& nf) {
  if (!text.empty()) return parse_rates(text, nf.graph.size());
  if (!nf.rates) throw Error(ErrorCode::Parse, "no --rates given and the network file has none");
  return *nf.rates;
}

std::string opt_str(const std::optional<Rational>& v) { return v ? to_string(*v) : std::string(); }

// ---------------------------------------------------------------------------

struct FlpfArgs {
  std::string file;
  bool exact = false;
  bool bounds = false;
  std::string subset;
  std::string oracle_tol;
  std::string format = "text";
};

int cmd_flpf(const FlpfArgs& a) {
  const Limits limits = Limits::from_env();
  NetworkFile nf = load_network(a.file, limits);
  const auto& g = nf.graph;
  const bool want_exact = a.exact || !a.bounds;
  const bool onoff = nf.fading.mode() == ChannelMode::OnOff;

  std::optional<LinkSet> subset;
  if (!a.subset.empty()) subset = parse_subset(g, a.subset);

  // Report fields, filled for the whole graph or for the chosen subset.
  Rational corollary1 = corollary1_bound(g);
  std::optional<Rational> lower, upper, exact;
  std::optional<LinkSet> lower_at, exact_at;
  if (subset) {
    if (onoff) {
      auto lb = lower_bound_thm3(g, nf.fading, *subset, limits);
      lower = lb.value;
      lower_at = *subset;
    }
    if (want_exact) {
      exact = sigma_L_exact(g, nf.fading, *subset, limits);
      exact_at = *subset;
    }
  } else {
    BoundReport rep = bound_report(g, nf.fading, {want_exact, true}, limits);
    lower = rep.lower;
    lower_at = rep.lower_argmin;
    upper = rep.upper;
    exact = rep.exact;
    exact_at = rep.exact_argmin;
  }

  std::optional<Interval> oracle;
  bool agree = true;
  if (!a.oracle_tol.empty()) {
    const Rational tol = parse_rational(a.oracle_tol);
    LinkSet target = subset ? *subset : exact_at.value_or(g.all_links());
    oracle = sigma_L_bisection(g, nf.fading, target, tol, limits);
    const Rational ref = exact_at == target ? *exact : sigma_L_exact(g, nf.fading, target, limits);
    agree = abs(ref - oracle->midpoint()) <= tol;
    if (!exact_at) exact_at = target;
  }

  const std::string name = nf.name.empty() ? a.file : nf.name;
  if (a.format == "csv") {
    std::cout << "network,corollary1,lower,upper,exact\n"
              << name << ',' << to_string(corollary1) << ',' << opt_str(lower) << ',' << opt_str(upper) << ','
              << opt_str(exact) << '\n';
  } else {
    std::cout << "network: " << name << " (" << g.size() << " links, "
              << (onoff ? "on/off" : "multi-state") << " channels)\n";
    std::cout << "corollary1: " << to_string(corollary1) << "\n";
    if (lower) std::cout << "lower: " << to_string(*lower) << "  L = " << link_set_name(g, *lower_at) << "\n";
    if (upper) std::cout << "upper: " << to_string(*upper) << "\n";
    if (exact) std::cout << "exact: " << to_string(*exact) << "  L = " << link_set_name(g, *exact_at) << "\n";
    if (oracle)
      std::cout << "oracle: [" << to_string(oracle->lo) << ", " << to_string(oracle->hi) << "] ~ "
                << to_double(oracle->midpoint()) << "  agree: " << (agree ? "yes" : "no") << "\n";
  }
  return agree ? kExitOk : kExitCheck;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  std::string file;
  std::string param = "p";
  std::string from = "0.05", to = "1", step = "0.05";
  std::string out;
  bool no_exact = false;
  bool no_upper = false;
  bool decimal = false;
};

int cmd_sweep(const SweepArgs& a) {
  const Limits limits = Limits::from_env();
  if (a.param != "p") throw Error(ErrorCode::Unsupported, "--param: only p is supported");
  NetworkFile nf = load_network(a.file, limits);
  if (nf.kind != FadingKind::Iid) throw Error(ErrorCode::Unsupported, "sweep needs a network with iid fading");
  auto ps = sweep_grid(parse_rational(a.from), parse_rational(a.to), parse_rational(a.step));
  auto rows = sweep_iid(nf.graph, ps, {!a.no_exact, !a.no_upper}, limits);

  auto cell = [&](const std::optional<Rational>& v) -> std::string {
    if (!v) return {};
    if (!a.decimal) return to_string(*v);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", to_double(*v));
    return buf;
  };
  std::ostringstream csv;
  csv << "p,thm3_lower_min,thm3_lower_full,corollary1,exact,upper\n";
  for (const auto& r : rows)
    csv << cell(r.p) << ',' << cell(r.thm3_lower_min) << ',' << cell(r.thm3_lower_full) << ',' << cell(r.corollary1)
        << ',' << cell(r.exact) << ',' << cell(r.upper) << '\n';
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream f(a.out);
    if (!f) throw Error(ErrorCode::Parse, "cannot write '" + a.out + "'");
    f << csv.str();
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string file;
  std::string mode = "iid";
  std::string rates;
  std::uint64_t slots = 1'000'000;
  std::size_t seeds = 1;
  std::uint64_t seed_base = 1;
  std::string surge = "det";
  std::string tie = "lowest";
  std::string order;
  std::string out;
  std::uint64_t record_every = 1000;
  double warmup = 0.2;
  double threshold = 1e-3;
  double bound = 1000;
};

int cmd_simulate(const SimulateArgs& a) {
  const Limits limits = Limits::from_env();
  NetworkFile nf = load_network(a.file, limits);
  const auto& g = nf.graph;

  SimOptions opts;
  opts.tie = a.tie == "highest" ? TieBreak::HighestIndex : a.tie == "random" ? TieBreak::Random : TieBreak::LowestIndex;
  const bool adversarial = a.mode == "adversarial";
  opts.order = adversarial ? SlotOrder::ArrivalFirst : SlotOrder::ServiceFirst;
  if (a.order == "service-first") opts.order = SlotOrder::ServiceFirst;
  if (a.order == "arrival-first") opts.order = SlotOrder::ArrivalFirst;
  VerdictOptions vo;
  vo.warmup_fraction = a.warmup;
  vo.slope_threshold = a.threshold;
  vo.queue_bound = a.bound;

  std::optional<ScriptedPattern> pattern;
  std::vector<double> lambda;
  if (adversarial) {
    if (!nf.adversarial) throw Error(ErrorCode::DecompositionNotInPhi, "network file has no adversarial block");
    pattern = adversarial_pattern_from(nf, a.surge == "prob" ? SurgeMode::Probabilistic : SurgeMode::Deterministic,
                                       limits);
  } else {
    for (const auto& r : rates_or_file(a.rates, nf)) lambda.push_back(to_double(r));
  }

  struct Run {
    SimTrace trace;
    SimVerdict verdict;
    bool equal_queues = true;
  };
  auto runs = flpf::detail::parallel_map<Run>(a.seeds, [&](std::size_t i) {
    SimOptions o = opts;
    o.record_every = i == 0 && !a.out.empty() ? a.record_every : 0;
    Run r;
    if (pattern) {
      auto st = run_scripted(g, *pattern, a.slots, a.seed_base + i, o);
      r.equal_queues = equal_queues_at_boundaries(st, pattern->links);
      r.trace = std::move(st.trace);
    } else {
      r.trace = run_iid(g, nf.fading, lambda, a.slots, a.seed_base + i, o);
    }
    r.verdict = stability_verdict(r.trace, vo);
    return r;
  });

  std::size_t counts[3] = {0, 0, 0};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    nlohmann::json j = verdict_json(runs[i].verdict);
    j["seed"] = a.seed_base + i;
    j["mode"] = a.mode;
    j["slots"] = a.slots;
    j["tie_break"] = to_string(opts.tie);
    if (pattern) {
      j["equal_queues_at_frame_boundaries"] = runs[i].equal_queues;
      j["mean_frame_length"] = to_string(pattern->mean_frame_length());
    }
    std::cout << j.dump() << "\n";
    ++counts[static_cast<int>(runs[i].verdict.verdict)];
  }
  nlohmann::json agg{{"runs", runs.size()},
                     {"stable", counts[static_cast<int>(Verdict::Stable)]},
                     {"unstable", counts[static_cast<int>(Verdict::Unstable)]},
                     {"inconclusive", counts[static_cast<int>(Verdict::Inconclusive)]}};
  std::cout << nlohmann::json{{"aggregate", agg}}.dump() << "\n";

  if (!a.out.empty()) {
    std::ofstream f(a.out);
    if (!f) throw Error(ErrorCode::Parse, "cannot write '" + a.out + "'");
    write_trace_csv(f, runs.front().trace, g);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct RegionArgs {
  std::string file;
  std::string rates;
  std::string scaling = "none";
};

RegionScaling parse_scaling(const std::string& s) {
  if (s == "none") return RegionScaling::none();
  if (s == "idegree") return RegionScaling::interference_degree();
  if (s.rfind("gamma=", 0) == 0) return RegionScaling::uniform(parse_rational(s.substr(6)));
  if (s.rfind("perstate=", 0) == 0) {
    std::vector<Rational> x;
    for (const auto& item : split(s.substr(9), ',')) x.push_back(parse_rational(item));
    return RegionScaling::per_state_factors(std::move(x));
  }
  throw Error(ErrorCode::Parse, "--scaling: expected none, gamma=G, idegree or perstate=x1,x2,...");
}

int cmd_region(const RegionArgs& a) {
  const Limits limits = Limits::from_env();
  NetworkFile nf = load_network(a.file, limits);
  const auto& g = nf.graph;
  RateVector lambda = rates_or_file(a.rates, nf);
  RegionVerdict v = region_membership(g, nf.fading, lambda, parse_scaling(a.scaling), limits);
  std::cout << (v.inside ? "inside" : "outside") << " (" << to_string(v.position) << ")\n";
  if (v.max_scaling) std::cout << "max scaling t*: " << to_string(*v.max_scaling) << "\n";
  if (!v.inside) {
    std::cout << "separating weights c (c'lambda = 1, c'mu <= t* on the region):";
    for (std::size_t l = 0; l < g.size(); ++l) std::cout << ' ' << g.labels()[l] << '=' << to_string(v.certificate[l]);
    std::cout << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ExamplesArgs {
  bool list = false;
  std::string data_dir = FLPF_DATA_DIR;
};

int cmd_examples(const ExamplesArgs& a) {
  acceptance::Config cfg;
  cfg.data_dir = a.data_dir;
  auto all = acceptance::checks(cfg);
  if (a.list) {
    for (const auto& c : all) std::cout << c.id << "  " << c.name << "\n";
    return kExitOk;
  }
  int failed = 0;
  for (const auto& c : all) {
    auto r = c.run();  // flpf::Error (e.g. a corrupted bundled file) propagates to main
    std::cout << "criterion " << r.id << ' ' << (r.passed ? "PASS" : "FAIL") << "  " << r.name << ": " << r.detail
              << "\n";
    std::cout.flush();
    failed += r.passed ? 0 : 1;
  }
  std::cout << failed << " of " << all.size() << " checks failed\n";
  return failed == 0 ? kExitOk : kExitCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fading local pooling factor: exact values, bounds, regions and GMS simulations"};
  app.require_subcommand(1);

  FlpfArgs fa;
  auto* flpf_cmd = app.add_subcommand("flpf", "Report the pooling factor and its bounds for a network file");
  flpf_cmd->add_option("file", fa.file, "network JSON file")->required();
  flpf_cmd->add_flag("--exact", fa.exact, "compute the exact value (default when no flag is given)");
  flpf_cmd->add_flag("--bounds", fa.bounds, "bounds only, unless --exact is also given");
  flpf_cmd->add_option("--subset", fa.subset, "restrict to link set L: labels a,b or bits 110");
  flpf_cmd->add_option("--oracle-tol", fa.oracle_tol, "also bracket the value by bisection to this width (e.g. 1e-6)");
  flpf_cmd->add_option("--format", fa.format, "text or csv")->check(CLI::IsMember({"text", "csv"}));

  SweepArgs sa;
  auto* sweep_cmd = app.add_subcommand("sweep", "Bounds across the i.i.d. ON probability p, as CSV");
  sweep_cmd->add_option("file", sa.file, "network JSON file with iid fading")->required();
  sweep_cmd->add_option("--param", sa.param, "swept parameter (p)");
  sweep_cmd->add_option("--from", sa.from, "first p (decimal or n/d)");
  sweep_cmd->add_option("--to", sa.to, "last p, inclusive");
  sweep_cmd->add_option("--step", sa.step, "grid step");
  sweep_cmd->add_option("--out", sa.out, "CSV output path (stdout when absent)");
  sweep_cmd->add_flag("--no-exact", sa.no_exact, "skip the exact column");
  sweep_cmd->add_flag("--no-upper", sa.no_upper, "skip the upper-bound column");
  sweep_cmd->add_flag("--decimal", sa.decimal, "print decimals instead of exact rationals");

  SimulateArgs ma;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate GMS and print one JSON verdict per seed");
  sim_cmd->add_option("file", ma.file, "network JSON file")->required();
  sim_cmd->add_option("--mode", ma.mode, "iid or adversarial")->check(CLI::IsMember({"iid", "adversarial"}));
  sim_cmd->add_option("--rates", ma.rates, "per-link arrival rates, comma separated (defaults to the file's)");
  sim_cmd->add_option("--slots", ma.slots, "slots per run");
  sim_cmd->add_option("--seeds", ma.seeds, "number of seeds")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed-base", ma.seed_base, "first seed");
  sim_cmd->add_option("--surge", ma.surge, "det or prob")->check(CLI::IsMember({"det", "prob"}));
  sim_cmd->add_option("--tie-break", ma.tie, "lowest, highest or random")
      ->check(CLI::IsMember({"lowest", "highest", "random"}));
  sim_cmd->add_option("--order", ma.order, "service-first or arrival-first")
      ->check(CLI::IsMember({"service-first", "arrival-first"}));
  sim_cmd->add_option("--out", ma.out, "CSV trace of the first seed");
  sim_cmd->add_option("--record-every", ma.record_every, "trace subsampling interval in slots")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--warmup", ma.warmup, "fraction of slots ignored by the verdict");
  sim_cmd->add_option("--slope-threshold", ma.threshold, "growth rate separating stable from unstable");
  sim_cmd->add_option("--queue-bound", ma.bound, "largest max-queue accepted as stable");

  RegionArgs ra;
  auto* region_cmd = app.add_subcommand("region", "Test a rate vector against the (scaled) throughput region");
  region_cmd->add_option("file", ra.file, "network JSON file")->required();
  region_cmd->add_option("--rates", ra.rates, "per-link rates, comma separated (defaults to the file's)");
  region_cmd->add_option("--scaling", ra.scaling, "none, gamma=G, idegree or perstate=x1,x2,...");

  ExamplesArgs ea;
  auto* examples_cmd = app.add_subcommand("examples", "Run the bundled end-to-end checks");
  examples_cmd->add_flag("--list", ea.list, "list the checks without running them");
  examples_cmd->add_option("--data-dir", ea.data_dir, "directory holding the bundled network files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*flpf_cmd) return cmd_flpf(fa);
    if (*sweep_cmd) return cmd_sweep(sa);
    if (*sim_cmd) return cmd_simulate(ma);
    if (*region_cmd) return cmd_region(ra);
    if (*examples_cmd) return cmd_examples(ea);
  } catch (const flpf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
  return kExitOk;
}
