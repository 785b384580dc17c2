#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "flpf/error.hpp"
#include "flpf/fading.hpp"
#include "flpf/interference.hpp"
#include "flpf/pooling.hpp"
#include "flpf/rational.hpp"

namespace flpf {

using Queues = std::vector<std::int64_t>;
using Counts = std::vector<std::int64_t>;

/// Strictly increasing with f(0) = 0. Applied to Q_l * C_l.
using WeightFn = std::function<double(double)>;

inline WeightFn identity_weight() {
  return [](double x) { return x; };
}
inline WeightFn power_weight(double k) {
  return [k](double x) { return std::pow(x, k); };
}

enum class TieBreak { LowestIndex, HighestIndex, Random };

constexpr const char* to_string(TieBreak t) {
  switch (t) {
    case TieBreak::LowestIndex: return "lowest";
    case TieBreak::HighestIndex: return "highest";
    case TieBreak::Random: return "random";
  }
  return "unknown";
}

enum class SlotOrder { ServiceFirst, ArrivalFirst };

/// Integer channel values of a state; the simulator serves whole packets.
inline Counts capacities_of(const GlobalState& s) {
  Counts c;
  for (const auto& v : s.values()) {
    if (denominator(v) != 1)
      throw Error(ErrorCode::Unsupported, "simulation needs integer channel values, got " + to_string(v));
    c.push_back(static_cast<std::int64_t>(numerator(v)));
  }
  return c;
}

/// Greedy maximal scheduling: take the heaviest link by weight(Q*C), drop its
/// interferers, repeat while a positive weight remains. `rng` is only used by
/// TieBreak::Random.
inline LinkSet gms_schedule(const Queues& q, const Counts& capacity, const InterferenceGraph& g,
                            const WeightFn& weight = identity_weight(), TieBreak tie = TieBreak::LowestIndex,
                            std::mt19937_64* rng = nullptr) {
  const std::size_t k = g.size();
  std::vector<double> w(k, 0.0);
  LinkSet remaining;
  for (std::size_t l = 0; l < k; ++l) {
    const std::int64_t product = q[l] * capacity[l];
    if (product <= 0) continue;
    w[l] = weight(static_cast<double>(product));
    if (w[l] > 0) remaining.insert(l);
  }
  LinkSet chosen;
  std::vector<std::size_t> ties;
  while (!remaining.empty()) {
    double best = -1;
    ties.clear();
    for (std::size_t l : remaining.members()) {
      if (w[l] > best) {
        best = w[l];
        ties.assign(1, l);
      } else if (w[l] == best) {
        ties.push_back(l);
      }
    }
    std::size_t pick = ties.front();
    if (tie == TieBreak::HighestIndex) {
      pick = ties.back();
    } else if (tie == TieBreak::Random) {
      if (rng == nullptr) throw std::invalid_argument("random tie-break needs a generator");
      pick = ties[std::uniform_int_distribution<std::size_t>(0, ties.size() - 1)(*rng)];
    }
    chosen.insert(pick);
    remaining = remaining - g.closed_neighborhood(pick);
  }
  return chosen;
}

struct StepResult {
  Queues next;
  Counts served;
};

/// One slot of queue dynamics. ServiceFirst: Q' = (Q - C S)^+ + A.
/// ArrivalFirst: Q' = Q + A - min(Q + A, C S).
inline StepResult step(const Queues& q, const Counts& capacity, LinkSet schedule, const Counts& arrivals,
                       SlotOrder order) {
  StepResult r{q, Counts(q.size(), 0)};
  for (std::size_t l = 0; l < q.size(); ++l) {
    const std::int64_t offer = schedule.contains(l) ? capacity[l] : 0;
    if (order == SlotOrder::ServiceFirst) {
      r.served[l] = std::min(q[l], offer);
      r.next[l] = q[l] - r.served[l] + arrivals[l];
    } else {
      r.served[l] = std::min(q[l] + arrivals[l], offer);
      r.next[l] = q[l] + arrivals[l] - r.served[l];
    }
  }
  return r;
}

/// Per-link snapshot of one slot, kept when a trace records detail.
struct SlotRecord {
  std::uint64_t slot = 0;
  Queues q;  // at the start of the slot
  Counts c;
  LinkSet s;
  Counts a;
  Counts served;
};

struct SimTrace {
  std::size_t num_links = 0;
  std::uint64_t slots = 0;
  std::vector<std::int64_t> max_queue;    // after each slot
  std::vector<std::int64_t> total_queue;  // after each slot
  std::vector<SlotRecord> records;        // every record_every-th slot
  std::uint64_t record_every = 0;         // 0: none
  Queues final_queues;
  std::vector<std::uint64_t> arrivals_total;
};

struct SimOptions {
  SlotOrder order = SlotOrder::ServiceFirst;
  WeightFn weight = identity_weight();
  TieBreak tie = TieBreak::LowestIndex;
  std::uint64_t record_every = 0;
};

namespace detail {

inline void record_slot(SimTrace& t, std::uint64_t slot, const Queues& q, const Counts& c, LinkSet s, const Counts& a,
                        const StepResult& r) {
  std::int64_t mx = 0, total = 0;
  for (auto v : r.next) {
    mx = std::max(mx, v);
    total += v;
  }
  t.max_queue.push_back(mx);
  t.total_queue.push_back(total);
  for (std::size_t l = 0; l < a.size(); ++l) t.arrivals_total[l] += static_cast<std::uint64_t>(a[l]);
  if (t.record_every > 0 && slot % t.record_every == 0) t.records.push_back({slot, q, c, s, a, r.served});
}

inline SimTrace empty_trace(std::size_t k, std::uint64_t slots, std::uint64_t record_every) {
  SimTrace t;
  t.num_links = k;
  t.slots = slots;
  t.record_every = record_every;
  t.max_queue.reserve(slots);
  t.total_queue.reserve(slots);
  t.arrivals_total.assign(k, 0);
  return t;
}

}  // namespace detail

/// i.i.d. channels from f and Bernoulli-batch arrivals: floor(lambda_l) packets
/// plus one more with probability frac(lambda_l). Deterministic given seed.
inline SimTrace run_iid(const InterferenceGraph& g, const FadingStructure& f, const std::vector<double>& lambda,
                        std::uint64_t slots, std::uint64_t seed, const SimOptions& opts = {}) {
  const std::size_t k = g.size();
  if (lambda.size() != k) throw Error(ErrorCode::InvalidState, "rate vector length does not match graph");
  for (double v : lambda)
    if (!(v >= 0) || !std::isfinite(v)) throw Error(ErrorCode::InvalidState, "rates must be finite and nonnegative");
  std::vector<Counts> caps;
  for (const auto& ws : f.states()) caps.push_back(capacities_of(ws.state));
  std::vector<std::int64_t> base(k);
  std::vector<std::bernoulli_distribution> extra;
  for (std::size_t l = 0; l < k; ++l) {
    base[l] = static_cast<std::int64_t>(std::floor(lambda[l]));
    extra.emplace_back(lambda[l] - std::floor(lambda[l]));
  }

  std::mt19937_64 rng(seed);
  FadingSampler sampler(f);
  SimTrace trace = detail::empty_trace(k, slots, opts.record_every);
  Queues q(k, 0);
  Counts a(k);
  for (std::uint64_t t = 0; t < slots; ++t) {
    const Counts& c = caps[sampler.draw_index(rng)];
    for (std::size_t l = 0; l < k; ++l) a[l] = base[l] + (extra[l](rng) ? 1 : 0);
    // Arrivals in service-first mode land after scheduling; the schedule
    // only sees them in arrival-first mode.
    Queues visible = q;
    if (opts.order == SlotOrder::ArrivalFirst)
      for (std::size_t l = 0; l < k; ++l) visible[l] += a[l];
    LinkSet s = gms_schedule(visible, c, g, opts.weight, opts.tie, &rng);
    StepResult r = step(q, c, s, a, opts.order);
    detail::record_slot(trace, t, q, c, s, a, r);
    q = std::move(r.next);
  }
  trace.final_queues = q;
  return trace;
}

// ---------------------------------------------------------------------------
// Adversarial construction.

enum class SurgeMode { Deterministic, Probabilistic };

/// One state's frame: t_i slots per column, one packet per slot to the links
/// of the active column.
struct FrameTemplate {
  GlobalState marginal_state;   // state restricted to L
  GlobalState channel;          // full state used in simulation
  std::vector<Rational> weights;  // r^J
  std::uint64_t length = 0;     // T_J
  std::vector<std::uint64_t> column_slots;  // t_i^J
  std::vector<LinkSet> columns;
  std::uint64_t repetitions = 0;  // n_J
  LinkSet surge_column;           // column active in the final slot
};

struct ScriptedPattern {
  LinkSet links;
  std::size_t num_links = 0;
  std::vector<FrameTemplate> frames;
  std::vector<std::size_t> period;  // frame template index per frame, in order
  Rational epsilon;
  SurgeMode surge = SurgeMode::Deterministic;
  std::uint64_t surge_every = 0;   // deterministic surge period in frames
  std::vector<Rational> channel_fractions;  // per template, over one period
  RateVector target;                        // nu
  RateVector realized_rate;                 // expected arrival rate per link

  std::uint64_t period_slots() const {
    std::uint64_t s = 0;
    for (std::size_t i : period) s += frames[i].length;
    return s;
  }
  /// Mean frame length in slots.
  Rational mean_frame_length() const { return Rational(period_slots()) / Rational(period.size()); }
};

struct AdversarialOptions {
  Rational epsilon = make_rational(1, 50);
  Rational delta = make_rational(1, 100);
  SurgeMode surge = SurgeMode::Deterministic;
  std::uint64_t max_period_slots = 1'000'000;
};

namespace detail {

inline Integer lcm_int(const Integer& a, const Integer& b) { return a / boost::multiprecision::gcd(a, b) * b; }

// Rounds convex weights to multiples of 1/d (largest remainders), keeping the
// sum at 1; each entry moves by less than 1/d.
inline std::vector<Rational> round_weights(const std::vector<Rational>& w, const Integer& d) {
  std::vector<Integer> units;
  std::vector<std::pair<Rational, std::size_t>> rem;
  Integer total = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    Rational scaled = w[i] * Rational(d);
    Integer fl = numerator(scaled) / denominator(scaled);
    units.push_back(fl);
    total += fl;
    rem.emplace_back(scaled - Rational(fl), i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t j = 0; total < d; ++j, ++total) units[rem[j].second] += 1;
  std::vector<Rational> out;
  for (const auto& u : units) out.push_back(Rational(u) / Rational(d));
  return out;
}

}  // namespace detail

/// Frame-based arrival pattern that keeps all queues of L equal at frame
/// boundaries while the surge grows them: GMS serves exactly the arriving
/// column, so the surplus packet per surge accumulates.
///
/// `weights[J]` are the convex weights of nu's decomposition over the columns
/// of M_{J cap L, L}, one vector per state of the marginal pi_L, in the order
/// of describe_phi.
inline ScriptedPattern build_adversarial_pattern(const InterferenceGraph& g, const FadingStructure& f, LinkSet links,
                                                 const RateVector& nu,
                                                 const std::vector<std::vector<Rational>>& weights,
                                                 const AdversarialOptions& opts = {},
                                                 const Limits& limits = Limits::from_env()) {
  if (is_negative(opts.epsilon) || opts.epsilon >= 1 || !is_positive(opts.delta))
    throw Error(ErrorCode::InvalidState, "need 0 <= epsilon < 1 and delta > 0");
  const PhiDescription d = describe_phi(g, f, links, limits);
  const std::size_t k = g.size();
  if (weights.size() != d.matrices.size())
    throw Error(ErrorCode::DecompositionNotInPhi, "need one weight vector per state of the marginal");
  if (nu.size() != k) throw Error(ErrorCode::DecompositionNotInPhi, "nu has wrong length");

  RateVector check(k, Rational(0));
  for (std::size_t s = 0; s < d.matrices.size(); ++s) {
    const auto& m = d.matrices[s];
    const std::string where = "state " + d.marginal.states()[s].state.to_string() + ": ";
    if (weights[s].size() != m.num_columns())
      throw Error(ErrorCode::DecompositionNotInPhi, where + "expected " + std::to_string(m.num_columns()) + " weights");
    Rational sum = 0;
    for (const auto& w : weights[s]) {
      if (is_negative(w)) throw Error(ErrorCode::DecompositionNotInPhi, where + "negative weight");
      sum += w;
    }
    if (sum != 1) throw Error(ErrorCode::DecompositionNotInPhi, where + "weights sum to " + to_string(sum));
    for (std::size_t c = 0; c < m.num_columns(); ++c)
      for (std::size_t r = 0; r < m.num_rows(); ++r)
        check[m.row_links()[r]] += d.marginal.states()[s].probability * weights[s][c] * m.entry(r, c);
  }
  if (check != nu) throw Error(ErrorCode::DecompositionNotInPhi, "weights do not reproduce nu");
  if (f.mode() != ChannelMode::OnOff)
    throw Error(ErrorCode::Unsupported, "the adversarial pattern is defined for ON/OFF channels");

  ScriptedPattern p;
  p.links = links;
  p.num_links = k;
  p.epsilon = opts.epsilon;
  p.surge = opts.surge;
  p.target = nu;
  // Smallest denominator whose grid step is below delta.
  const Integer grid = Integer(numerator(Rational(1) / opts.delta) / denominator(Rational(1) / opts.delta)) + 1;

  for (std::size_t s = 0; s < d.matrices.size(); ++s) {
    const auto& m = d.matrices[s];
    FrameTemplate fr;
    fr.marginal_state = d.marginal.states()[s].state;
    // Most probable full state with this restriction; ties keep the first.
    std::optional<WeightedState> full;
    for (const auto& ws : f.states())
      if (ws.state.restricted_to(links) == fr.marginal_state && (!full || ws.probability > full->probability))
        full = ws;
    fr.channel = full->state;

    Integer lcd = 1;
    for (const auto& w : weights[s]) lcd = detail::lcm_int(lcd, denominator(w));
    fr.weights = lcd > grid ? detail::round_weights(weights[s], grid) : weights[s];
    lcd = 1;
    for (const auto& w : fr.weights) lcd = detail::lcm_int(lcd, denominator(w));
    fr.length = static_cast<std::uint64_t>(lcd);
    for (std::size_t c = 0; c < m.num_columns(); ++c) {
      fr.column_slots.push_back(static_cast<std::uint64_t>(numerator(fr.weights[c] * Rational(lcd))));
      fr.columns.push_back(m.column(c).members);
      if (fr.column_slots.back() > 0) fr.surge_column = m.column(c).members;
    }
    p.frames.push_back(std::move(fr));
  }

  // Repetitions n_J: exact fractions when the period fits, else the smallest
  // budget meeting the tolerance.
  Integer scale = 1;
  std::vector<Rational> per_frame;
  for (std::size_t s = 0; s < p.frames.size(); ++s) {
    per_frame.push_back(d.marginal.states()[s].probability / Rational(p.frames[s].length));
    scale = detail::lcm_int(scale, denominator(per_frame.back()));
  }
  Rational exact_slots = 0;
  for (std::size_t s = 0; s < p.frames.size(); ++s) exact_slots += per_frame[s] * Rational(scale) * Rational(p.frames[s].length);
  if (exact_slots <= Rational(opts.max_period_slots)) {
    for (std::size_t s = 0; s < p.frames.size(); ++s)
      p.frames[s].repetitions = static_cast<std::uint64_t>(numerator(per_frame[s] * Rational(scale)));
  } else {
    const Rational tol = opts.delta / Rational(Integer(1) << links.size());
    bool ok = false;
    for (std::uint64_t budget = 16; budget <= opts.max_period_slots && !ok; budget *= 2) {
      std::uint64_t total = 0;
      for (std::size_t s = 0; s < p.frames.size(); ++s) {
        Rational want = d.marginal.states()[s].probability * Rational(budget) / Rational(p.frames[s].length);
        Integer n = numerator(want) / denominator(want);
        if (want - Rational(n) >= make_rational(1, 2)) n += 1;
        p.frames[s].repetitions = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(n));
        total += p.frames[s].repetitions * p.frames[s].length;
      }
      ok = true;
      for (std::size_t s = 0; s < p.frames.size(); ++s) {
        Rational frac = Rational(p.frames[s].repetitions * p.frames[s].length) / Rational(total);
        if (abs(frac - d.marginal.states()[s].probability) > tol) ok = false;
      }
    }
    if (!ok) throw Error(ErrorCode::LimitExceeded, "no frame schedule within the period cap meets the tolerance");
  }

  for (std::size_t s = 0; s < p.frames.size(); ++s)
    for (std::uint64_t n = 0; n < p.frames[s].repetitions; ++n) p.period.push_back(s);
  const Rational slots(p.period_slots());
  for (const auto& fr : p.frames) p.channel_fractions.push_back(Rational(fr.repetitions * fr.length) / slots);

  if (is_positive(opts.epsilon)) {
    Rational inv = Rational(1) / opts.epsilon;
    Integer up = numerator(inv) / denominator(inv);
    if (Rational(up) < inv) up += 1;
    p.surge_every = static_cast<std::uint64_t>(up);
  }

  // Expected arrivals per slot: column packets plus one extra per link of L
  // per surge.
  p.realized_rate.assign(k, Rational(0));
  const Rational surge_rate =
      p.surge == SurgeMode::Deterministic && p.surge_every > 0 ? Rational(1) / Rational(p.surge_every) : opts.epsilon;
  for (const auto& fr : p.frames) {
    for (std::size_t c = 0; c < fr.columns.size(); ++c)
      for (std::size_t l : fr.columns[c].members())
        p.realized_rate[l] += Rational(fr.repetitions * fr.column_slots[c]) / slots;
    for (std::size_t l : links.members()) p.realized_rate[l] += surge_rate * Rational(fr.repetitions) / slots;
  }
  for (std::size_t l : links.members())
    if (p.realized_rate[l] > nu[l] + opts.epsilon)
      throw Error(ErrorCode::DeltaTooLargeForTargetRate,
                  "link " + g.labels()[l] + " realizes " + to_string(p.realized_rate[l]) + " > nu + epsilon");
  return p;
}

struct ScriptedTrace {
  SimTrace trace;
  std::vector<Queues> frame_snapshots;  // queues after each frame
  std::uint64_t surges = 0;
};

/// Plays the pattern for `slots` slots (arrival-first order), recording the
/// queue vector at every frame boundary. The last frame may be cut short.
inline ScriptedTrace run_scripted(const InterferenceGraph& g, const ScriptedPattern& p, std::uint64_t slots,
                                  std::uint64_t seed, const SimOptions& opts = {SlotOrder::ArrivalFirst}) {
  const std::size_t k = g.size();
  std::vector<Counts> caps;
  for (const auto& fr : p.frames) caps.push_back(capacities_of(fr.channel));
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(to_double(p.epsilon));

  ScriptedTrace out{detail::empty_trace(k, slots, opts.record_every), {}, 0};
  Queues q(k, 0);
  Counts a(k, 0);
  std::uint64_t t = 0, frame_no = 0;
  while (t < slots) {
    const FrameTemplate& fr = p.frames[p.period[frame_no % p.period.size()]];
    const Counts& c = caps[p.period[frame_no % p.period.size()]];
    bool surge = false;
    if (p.surge == SurgeMode::Deterministic)
      surge = p.surge_every > 0 && (frame_no + 1) % p.surge_every == 0;
    else
      surge = coin(rng);
    out.surges += surge ? 1 : 0;
    std::uint64_t in_frame = 0;
    for (std::size_t col = 0; col < fr.columns.size() && t < slots; ++col) {
      for (std::uint64_t i = 0; i < fr.column_slots[col] && t < slots; ++i, ++t) {
        ++in_frame;
        std::fill(a.begin(), a.end(), 0);
        for (std::size_t l : fr.columns[col].members()) a[l] = 1;
        if (surge && in_frame == fr.length)
          for (std::size_t l : p.links.members()) a[l] = fr.surge_column.contains(l) ? 2 : 1;
        Queues visible = q;
        if (opts.order == SlotOrder::ArrivalFirst)
          for (std::size_t l = 0; l < k; ++l) visible[l] += a[l];
        LinkSet s = gms_schedule(visible, c, g, opts.weight, opts.tie, &rng);
        StepResult r = step(q, c, s, a, opts.order);
        detail::record_slot(out.trace, t, q, c, s, a, r);
        q = std::move(r.next);
      }
    }
    if (in_frame == fr.length) out.frame_snapshots.push_back(q);
    ++frame_no;
  }
  out.trace.final_queues = q;
  return out;
}

/// True when every snapshot has all queues of `links` equal.
inline bool equal_queues_at_boundaries(const ScriptedTrace& t, LinkSet links) {
  for (const auto& q : t.frame_snapshots) {
    std::optional<std::int64_t> v;
    for (std::size_t l : links.members()) {
      if (v && *v != q[l]) return false;
      v = q[l];
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Verdicts.

enum class Verdict { Stable, Unstable, Inconclusive };

constexpr const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable: return "stable";
    case Verdict::Unstable: return "unstable";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

struct VerdictOptions {
  double warmup_fraction = 0.2;
  double slope_threshold = 1e-3;
  double queue_bound = 1000;
  std::size_t blocks = 10;
  double band_sigmas = 3;
};

struct SimVerdict {
  Verdict verdict = Verdict::Inconclusive;
  double slope = 0;
  double band_lo = 0;
  double band_hi = 0;
  std::int64_t window_max = 0;
  std::uint64_t window_slots = 0;
};

inline constexpr std::uint64_t kMinVerdictSlots = 10'000;

/// Least-squares slope of the max-queue series after warmup. The band comes
/// from batch means: a line fitted through `blocks` block averages, widened
/// by band_sigmas standard errors of its slope.
inline SimVerdict stability_verdict(const std::vector<std::int64_t>& max_queue, const VerdictOptions& o = {}) {
  if (max_queue.size() < kMinVerdictSlots)
    throw Error(ErrorCode::TraceTooShort,
                std::to_string(max_queue.size()) + " slots, need at least " + std::to_string(kMinVerdictSlots));
  const std::size_t start = static_cast<std::size_t>(o.warmup_fraction * static_cast<double>(max_queue.size()));
  const std::size_t n = max_queue.size() - start;
  SimVerdict v;
  v.window_slots = n;

  auto fit = [](const std::vector<double>& x, const std::vector<double>& y) {
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxx += (x[i] - mx) * (x[i] - mx);
      sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    double ssr = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - my - slope * (x[i] - mx);
      ssr += e * e;
    }
    const double se = x.size() > 2 ? std::sqrt(ssr / static_cast<double>(x.size() - 2) / sxx) : 0.0;
    return std::pair{slope, se};
  };

  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = static_cast<double>(i);
    y[i] = static_cast<double>(max_queue[start + i]);
    v.window_max = std::max(v.window_max, max_queue[start + i]);
  }
  v.slope = fit(x, y).first;

  const std::size_t b = std::max<std::size_t>(o.blocks, 3);
  const std::size_t len = n / b;
  std::vector<double> bx, by;
  for (std::size_t i = 0; i < b; ++i) {
    double sx = 0, sy = 0;
    for (std::size_t j = i * len; j < (i + 1) * len; ++j) {
      sx += x[j];
      sy += y[j];
    }
    bx.push_back(sx / static_cast<double>(len));
    by.push_back(sy / static_cast<double>(len));
  }
  const double se = fit(bx, by).second;
  v.band_lo = v.slope - o.band_sigmas * se;
  v.band_hi = v.slope + o.band_sigmas * se;

  if (v.slope >= o.slope_threshold && v.band_lo > 0)
    v.verdict = Verdict::Unstable;
  else if (std::abs(v.slope) < o.slope_threshold && static_cast<double>(v.window_max) <= o.queue_bound)
    v.verdict = Verdict::Stable;
  else
    v.verdict = Verdict::Inconclusive;
  return v;
}

inline SimVerdict stability_verdict(const SimTrace& t, const VerdictOptions& o = {}) {
  return stability_verdict(t.max_queue, o);
}

inline nlohmann::json verdict_json(const SimVerdict& v) {
  return {{"verdict", to_string(v.verdict)}, {"slope", v.slope},         {"band", {v.band_lo, v.band_hi}},
          {"window_max", v.window_max},      {"window_slots", v.window_slots}};
}

/// CSV with columns slot,link,Q,C,S,A for the recorded slots.
inline void write_trace_csv(std::ostream& out, const SimTrace& t, const InterferenceGraph& g) {
  out << "slot,link,Q,C,S,A\n";
  for (const auto& r : t.records)
    for (std::size_t l = 0; l < t.num_links; ++l)
      out << r.slot << ',' << g.labels()[l] << ',' << r.q[l] << ',' << r.c[l] << ',' << (r.s.contains(l) ? 1 : 0)
          << ',' << r.a[l] << '\n';
}

}  // namespace flpf
