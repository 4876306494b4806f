#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "analysis.hpp"
#include "delta2.hpp"
#include "error.hpp"
#include "func_spec.hpp"
#include "presentation.hpp"
#include "ptr.hpp"

namespace omega_spectra {

enum class EventKind { RequirementInitialized, AttentionReceived, PtrApplied, CompanionAssigned, ValueCommitted };

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::RequirementInitialized: return "requirement-initialized";
    case EventKind::AttentionReceived: return "attention-received";
    case EventKind::PtrApplied: return "ptr-applied";
    case EventKind::CompanionAssigned: return "companion-assigned";
    case EventKind::ValueCommitted: return "value-committed";
  }
  return "?";
}

struct Event {
  EventKind kind = EventKind::RequirementInitialized;
  Nat stage = 0;
  Nat e = 0;
  bool bit = false;              // the approximation X_s(e) the action aims at
  std::string target;            // ptr-applied
  std::size_t b = 0, c = 0, d = 0, fillers = 0;  // ptr-applied split sizes
  std::optional<std::size_t> exponent;           // case (c) run length
  std::vector<Nat> elements;     // companion-assigned
  std::optional<Nat> value;      // value-committed: f_A(2e)
  bool operator==(const Event&) const = default;

  static Event make(EventKind kind, Nat stage, Nat e, bool bit) {
    Event ev;
    ev.kind = kind;
    ev.stage = stage;
    ev.e = e;
    ev.bit = bit;
    return ev;
  }
};

struct CompanionEntry {
  std::vector<Nat> companions;  // in order of assignment
  std::vector<Nat> boundary;    // case (c): elements of the d- and e-blocks
  std::vector<std::size_t> exponents;  // case (c): run length after init and each attention
  bool operator==(const CompanionEntry&) const = default;
};

enum class Variant { FiniteRange, BlockA, BlockB, BlockC };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::FiniteRange: return "finite-range";
    case Variant::BlockA: return "block-a";
    case Variant::BlockB: return "block-b";
    case Variant::BlockC: return "block-c";
  }
  return "?";
}

/// What the requirement for e encodes and how.
struct CaseParams {
  Nat c0 = 0, c1 = 0;                    // finite range: value positions for bit 0 / 1
  std::vector<std::size_t> sigma, tau;   // case (a): bit 0 -> sigma layout, bit 1 -> tau layout
  std::size_t diff = 0;                  // case (a): first index where sigma and tau differ
  std::size_t k = 0;                     // case (b): the recurring type
  std::size_t b = 0, d = 0, e = 0;       // case (c)
  bool operator==(const CaseParams&) const = default;
};

struct ConstructionTrace {
  Variant variant = Variant::FiniteRange;
  FuncSpec spec = FuncSpec::builtin(Builtin::Identity);
  Nat window = 0;      // f tabulated on [0, window]
  Nat stages = 0;
  Nat prefix = 0;      // positions [0, prefix) copied at stage 0 ("M + 1")
  CaseParams params;
  DeltaTwoApprox X;
  std::vector<Nat> final_order;
  std::map<Nat, Nat> entry_stage;
  std::vector<Event> events;
  std::map<Nat, CompanionEntry> companions;  // keyed by 2e
  UnitString source;   // rebuilt from spec and window, not serialized

  /// Elements of A_s in order (order never changes, so filter the final order).
  std::vector<Nat> elements_at(Nat s) const {
    std::vector<Nat> out;
    for (Nat x : final_order)
      if (entry_stage.at(x) <= s) out.push_back(x);
    return out;
  }
  FinitePresentation presentation_at(Nat s) const { return FinitePresentation::induced(elements_at(s), source.values, s); }
};

namespace detail {

inline std::vector<std::size_t> recurrent_symbols(const std::vector<std::size_t>& a) {
  std::set<std::size_t> r(a.begin() + a.size() / 2, a.end());
  return {r.begin(), r.end()};
}

/// Units before and including the last non-recurrent symbol.
inline std::size_t prefix_units(const std::vector<std::size_t>& a) {
  auto rec = recurrent_symbols(a);
  std::size_t cut = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!std::binary_search(rec.begin(), rec.end(), a[i])) cut = i + 1;
  return cut;
}

/// Slots for a fresh group: every position fresh except the anchor.
inline Placement anchor_only(Placement p, std::size_t anchor_slot) {
  for (auto& s : p.slots) s.reset();
  p.slots.at(anchor_slot) = 0;
  return p;
}

struct Requirement {
  bool started = false;
  bool bit = false;
  Nat anchor = 0;               // 2e
  std::vector<Nat> group;       // contiguous region owned by e (anchor included)
  std::size_t m = 0;            // case (c) run length
};

class Engine {
 public:
  Engine(ConstructionTrace& t, FreshSupplier fresh) : t_(t), fresh_(fresh) {}

  void run() {
    const Nat domain = t_.X.domain_end();
    reqs_.resize(domain);
    for (Nat stage = 1; stage <= t_.stages; ++stage) {
      const Nat s = stage - 1;
      for (Nat e = 0; e < domain && e <= s; ++e) {
        const bool bit = t_.X.approx_at(e, s);
        auto& r = reqs_[e];
        if (!r.started) {
          init(stage, e, bit);
        } else if (r.bit != bit) {
          attend(stage, e, bit);
        }
      }
    }
    t_.final_order = order_;
  }

 private:
  ConstructionTrace& t_;
  FreshSupplier fresh_;
  std::vector<Nat> order_;
  std::vector<Requirement> reqs_;
  const UnitString& src() const { return t_.source; }

  void enter(const std::vector<Nat>& xs, Nat stage) {
    for (Nat x : xs) t_.entry_stage.emplace(x, stage);
  }

 public:
  void copy_prefix() {
    for (Nat p = 0; p < t_.prefix; ++p) order_.push_back(2 * p + 1);
    enter(order_, 0);
  }

 private:
  Nat size_of(std::size_t sym) const {
    if (sizes_.empty())
      for (std::size_t u = 0; u < src().units(); ++u) sizes_.emplace(src().symbol[u], src().size(u));
    auto it = sizes_.find(sym);
    if (it == sizes_.end()) fail(ErrorKind::InputError, "symbol " + std::to_string(sym) + " never occurs in the source window");
    return it->second;
  }
  mutable std::map<std::size_t, Nat> sizes_;

  BlockEnd end_for(bool bit) const { return bit ? BlockEnd::Right : BlockEnd::Left; }

  const std::vector<std::size_t>& word_for(bool bit) const { return bit ? t_.params.tau : t_.params.sigma; }

  Placer init_placer(bool bit) const {
    const auto& P = t_.params;
    switch (t_.variant) {
      case Variant::FiniteRange: return value_target(bit ? P.c1 : P.c0).place;
      case Variant::BlockA: {
        Nat off = 0;
        for (std::size_t i = 0; i < P.diff; ++i) off += size_of(word_for(bit)[i]);
        auto rigid = rigid_placer(word_for(bit));
        return [rigid, off](const UnitString& s, std::size_t from) -> std::optional<Placement> {
          auto p = rigid(s, from);
          if (!p) return p;
          return anchor_only(*p, off);
        };
      }
      case Variant::BlockB: {
        auto pl = position_target(P.k, 0, 1, end_for(bit), true, &src(), 0).place;
        return pl;
      }
      case Variant::BlockC: {
        const Nat sd = size_of(P.d), sb = size_of(P.b);
        const Nat slot = sd + (bit ? sb - 1 : 0);
        const std::size_t d = P.d, b = P.b, e = P.e;
        return [=](const UnitString& s, std::size_t from) -> std::optional<Placement> {
          auto occ = find_run(s, d, b, e, 0, from);
          if (!occ) return std::nullopt;
          auto p = detail::rigid_placement(occ->first, occ->second + 2, s);
          p.exponent = occ->second;
          return anchor_only(p, slot);
        };
      }
    }
    fail(ErrorKind::InternalInvariantViolation, "unknown variant");
  }

  std::optional<Nat> value_of(Nat x) const {
    for (std::size_t i = 0; i < order_.size(); ++i)
      if (order_[i] == x) return order_.at(src().values.at(i));
    return std::nullopt;
  }

  void commit_event(Nat stage, Nat e, bool bit) {
    Event v;
    v.kind = EventKind::ValueCommitted;
    v.stage = stage;
    v.e = e;
    v.bit = bit;
    v.value = value_of(2 * e);
    t_.events.push_back(v);
  }

  void init(Nat stage, Nat e, bool bit) {
    auto& r = reqs_[e];
    r.started = true;
    r.bit = bit;
    r.anchor = 2 * e;
    if (order_.size() > src().positions()) fail(ErrorKind::WitnessWindowExceeded, "presentation outgrew the source window");
    const std::size_t from = src().unit_of(order_.size());
    auto g = place_group(order_, src(), from, init_placer(bit), {r.anchor}, fresh_, "initialization of requirement " + std::to_string(e));
    enter(g.fillers, stage);
    enter(g.group, stage);
    r.group = g.group;
    auto& ce = t_.companions[r.anchor];
    ce.companions = g.fresh;
    if (t_.variant == Variant::BlockC) {
      r.m = *g.where.exponent;
      ce.exponents.push_back(r.m);
      const Nat sd = size_of(t_.params.d), se = size_of(t_.params.e);
      ce.boundary.assign(g.group.begin(), g.group.begin() + sd);
      ce.boundary.insert(ce.boundary.end(), g.group.end() - se, g.group.end());
    }
    Event ev;
    ev.kind = EventKind::RequirementInitialized;
    ev.stage = stage;
    ev.e = e;
    ev.bit = bit;
    ev.fillers = g.fillers.size();
    ev.exponent = g.where.exponent;
    t_.events.push_back(ev);
    if (!g.fresh.empty()) {
      Event c = Event::make(EventKind::CompanionAssigned, stage, e, bit);
      c.elements = g.fresh;
      t_.events.push_back(c);
    }
    commit_event(stage, e, bit);
  }

  TargetCondition target_for(const Requirement& r, bool bit, std::size_t offset) const {
    const auto& P = t_.params;
    switch (t_.variant) {
      case Variant::FiniteRange: return value_target(bit ? P.c1 : P.c0);
      case Variant::BlockA: return shape_target(word_for(bit), &src());
      case Variant::BlockB: return position_target(P.k, offset, r.group.size(), end_for(bit), true, &src(), r.anchor);
      case Variant::BlockC: {
        const Nat sd = size_of(P.d), sb = size_of(P.b), se = size_of(P.e);
        StretchSpec spec{P.d, P.b, P.e, r.m, r.m, offset - sd, end_for(bit)};
        TargetCondition t;
        t.description = std::string("anchor at the ") + (bit ? "right" : "left") + " end of a b-block in a longer d b^m e run";
        t.place = stretch_placer(spec, sd, sb, se);
        const Nat anchor = r.anchor;
        const std::size_t b = P.b;
        const UnitString* s = &src();
        t.holds = [=, this](const FinitePresentation& p, const std::vector<Nat>&) { return at_block_end(p, *s, anchor, b, end_for(bit)); };
        return t;
      }
    }
    fail(ErrorKind::InternalInvariantViolation, "unknown variant");
  }

  void attend(Nat stage, Nat e, bool bit) {
    auto& r = reqs_[e];
    t_.events.push_back(Event::make(EventKind::AttentionReceived, stage, e, bit));

    std::unordered_map<Nat, std::size_t> pos;
    for (std::size_t i = 0; i < order_.size(); ++i) pos[order_[i]] = i;
    const std::size_t lo = pos.at(r.group.front());
    PtrSplit split{lo, lo + r.group.size(), {}};
    std::vector<Nat> d_owner;
    for (Nat j = e + 1; j < reqs_.size(); ++j) {
      const auto& q = reqs_[j];
      if (!q.started) continue;
      PtrSplit::Group g{pos.at(q.group.front()), pos.at(q.group.front()) + q.group.size(), {}};
      if (t_.variant == Variant::BlockC) {
        const auto& P = t_.params;
        const Nat sd = size_of(P.d);
        StretchSpec keep{P.d, P.b, P.e, q.m, q.m, pos.at(q.anchor) - g.lo - sd, std::nullopt};
        g.place = stretch_placer(keep, sd, size_of(P.b), size_of(P.e));
      }
      split.d_groups.push_back(g);
      d_owner.push_back(j);
    }
    auto target = target_for(r, bit, pos.at(r.anchor) - lo);
    const auto before = order_;
    auto res = ptr_apply(before, split, target, src(), fresh_);
    auto bad = ptr_check(before, split, res, target, src());
    if (!bad.empty()) fail(ErrorKind::InternalInvariantViolation, "PtR for requirement " + std::to_string(e) + ": " + bad.front());

    order_ = res.order;
    std::vector<Nat> added;
    for (Nat x : res.order)
      if (!t_.entry_stage.count(x)) added.push_back(x);
    enter(added, stage);

    r.bit = bit;
    r.group = res.c_group;
    auto& ce = t_.companions[r.anchor];
    ce.companions.insert(ce.companions.end(), res.c_new.begin(), res.c_new.end());
    if (res.c_exponent) {
      r.m = *res.c_exponent;
      ce.exponents.push_back(r.m);
    }

    Event pe = Event::make(EventKind::PtrApplied, stage, e, bit);
    pe.target = target.description;
    pe.b = split.b_end;
    pe.c = split.c_end - split.b_end;
    pe.d = before.size() - split.c_end;
    pe.fillers = res.fillers.size();
    pe.exponent = res.c_exponent;
    t_.events.push_back(pe);
    if (!res.c_new.empty()) {
      Event c = Event::make(EventKind::CompanionAssigned, stage, e, bit);
      c.elements = res.c_new;
      t_.events.push_back(c);
    }

    for (std::size_t gi = 0; gi < d_owner.size(); ++gi) {
      auto& q = reqs_[d_owner[gi]];
      // the group now runs from its first old element across its new companions
      const auto& extra = res.d_group_new[gi];
      if (res.d_group_exponent[gi]) {
        q.m = *res.d_group_exponent[gi];
        t_.companions[q.anchor].exponents.push_back(q.m);
      }
      if (!extra.empty()) {
        auto& qe = t_.companions[q.anchor];
        qe.companions.insert(qe.companions.end(), extra.begin(), extra.end());
        Event c = Event::make(EventKind::CompanionAssigned, stage, d_owner[gi], q.bit);
        c.elements = extra;
        t_.events.push_back(c);
      }
      const Nat first = q.group.front();
      const std::size_t new_size = q.group.size() + extra.size();
      auto it = std::find(order_.begin(), order_.end(), first);
      q.group.assign(it, it + new_size);
    }
    commit_event(stage, e, bit);
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------

/// Theorem-style construction for a function with finite range: e in X iff f_A(2e)
/// equals the element at position c1 (otherwise c0).
inline ConstructionTrace construct_finite_range(const FuncSpec& f, const DeltaTwoApprox& X, Nat stages, Nat window = 20000) {
  ConstructionTrace t;
  t.variant = Variant::FiniteRange;
  t.spec = f;
  t.window = window;
  t.stages = stages;
  t.X = X;
  t.source = UnitString::points(f.tabulate(window));

  const auto& a = t.source.symbol;
  Nat max_value = *std::max_element(t.source.values.begin(), t.source.values.end());
  if (max_value * 4 >= window) fail(ErrorKind::InputError, "range of f is not finite at this window (max value " + std::to_string(max_value) + ")");
  auto rec = detail::recurrent_symbols(a);
  if (rec.size() < 2) fail(ErrorKind::InputError, "finite-range construction needs two values with infinite preimage");
  t.params.c0 = rec[0];
  t.params.c1 = rec[1];
  t.prefix = std::max<Nat>(max_value + 1, detail::prefix_units(a));
  if (t.prefix * 2 >= window) fail(ErrorKind::WitnessWindowExceeded, "prefix M does not fit in the first half of the window");

  detail::Engine eng(t, FreshSupplier(2 * t.prefix + 1));
  eng.copy_prefix();
  eng.run();
  return t;
}

namespace detail {

inline ConstructionTrace block_trace(Variant v, const FuncSpec& f, const DeltaTwoApprox& X, Nat stages, Nat window) {
  ConstructionTrace t;
  t.variant = v;
  t.spec = f;
  t.window = window;
  t.stages = stages;
  t.X = X;
  auto table = alpha_within(f, window);
  if (table.alpha.size() < 8) fail(ErrorKind::WitnessWindowExceeded, "too few closed blocks within the window");
  t.source = UnitString::blocks(table);
  t.prefix = t.source.begin(prefix_units(table.alpha));
  return t;
}

inline void run_block(ConstructionTrace& t) {
  Engine eng(t, FreshSupplier(2 * t.prefix + 1));
  eng.copy_prefix();
  eng.run();
}

}  // namespace detail

/// Case (a): 2e sits at the left end of the block where sigma and tau first differ;
/// bit 0 keeps the sigma layout, bit 1 the tau layout.
inline ConstructionTrace construct_block_case_a(const FuncSpec& f, const CaseWitness& w, const DeltaTwoApprox& X, Nat stages, Nat window = 20000) {
  if (w.kind != CaseWitness::Case::A) fail(ErrorKind::InputError, "case (a) construction needs an A witness");
  auto t = detail::block_trace(Variant::BlockA, f, X, stages, window);
  t.params.sigma = w.sigma;
  t.params.tau = w.tau;
  while (t.params.diff < w.sigma.size() && w.sigma[t.params.diff] == w.tau[t.params.diff]) ++t.params.diff;
  if (t.params.diff == w.sigma.size()) fail(ErrorKind::InputError, "sigma and tau are equal");
  detail::run_block(t);
  return t;
}

/// Case (b): 2e sits at the right end (bit 1) or left end (bit 0) of a copy of I_k.
inline ConstructionTrace construct_block_case_b(const FuncSpec& f, const CaseWitness& w, const DeltaTwoApprox& X, Nat stages, Nat window = 20000) {
  if (w.kind != CaseWitness::Case::B) fail(ErrorKind::InputError, "case (b) construction needs a B witness");
  auto t = detail::block_trace(Variant::BlockB, f, X, stages, window);
  t.params.k = w.k;
  bool big = false;
  for (std::size_t u = 0; u < t.source.units(); ++u) big = big || (t.source.symbol[u] == w.k && t.source.size(u) >= 2);
  if (!big) fail(ErrorKind::InputError, "case (b) needs |I_k| >= 2");
  detail::run_block(t);
  return t;
}

/// Case (c): companions of 2e form d b^m e with 2e at the right (bit 1) or left
/// (bit 0) end of the first b-block; every attention lengthens the run.
inline ConstructionTrace construct_block_case_c(const FuncSpec& f, const CaseWitness& w, const DeltaTwoApprox& X, Nat stages, Nat window = 20000) {
  if (w.kind != CaseWitness::Case::C) fail(ErrorKind::InputError, "case (c) construction needs a C witness");
  auto t = detail::block_trace(Variant::BlockC, f, X, stages, window);
  t.params.b = w.b;
  t.params.d = w.d;
  t.params.e = w.e;
  for (std::size_t u = 0; u < t.source.units(); ++u)
    if (t.source.symbol[u] == w.b && t.source.size(u) < 2) fail(ErrorKind::InputError, "case (c) needs |I_b| >= 2 so its two ends differ");
  detail::run_block(t);
  return t;
}

// ---------------------------------------------------------------------------
// Decoding and replay.

/// The bit encoded by 2e in A_s.
inline bool decode_at(const ConstructionTrace& t, const FinitePresentation& p, Nat e) {
  const Nat x = 2 * e;
  if (!p.contains(x)) fail(ErrorKind::NotStabilized, "2e not yet in the presentation");
  switch (t.variant) {
    case Variant::FiniteRange: {
      auto v = p.f_value(x);
      if (v == p.element(t.params.c1)) return true;
      if (v == p.element(t.params.c0)) return false;
      fail(ErrorKind::ConditionViolated, "f_A(2e) is neither coded value");
    }
    case Variant::BlockA: {
      auto u = t.source.unit_of(p.position(x));
      auto sym = t.source.symbol.at(u);
      if (sym == t.params.tau[t.params.diff]) return true;
      if (sym == t.params.sigma[t.params.diff]) return false;
      fail(ErrorKind::ConditionViolated, "2e lies in a block of neither coded type");
    }
    case Variant::BlockB:
    case Variant::BlockC: {
      const std::size_t k = t.variant == Variant::BlockB ? t.params.k : t.params.b;
      if (at_block_end(p, t.source, x, k, BlockEnd::Right)) return true;
      if (at_block_end(p, t.source, x, k, BlockEnd::Left)) return false;
      fail(ErrorKind::ConditionViolated, "2e is at neither end of a coded block");
    }
  }
  fail(ErrorKind::InternalInvariantViolation, "unknown variant");
}

/// Decode X(e) from the final presentation; refuses if 2e moved in the last K stages.
inline bool decode_X_from_trace(const ConstructionTrace& t, Nat e, Nat K = 1) {
  const Nat x = 2 * e;
  std::optional<std::size_t> last;
  for (Nat s = t.stages >= K ? t.stages - K : 0; s <= t.stages; ++s) {
    auto els = t.elements_at(s);
    auto it = std::find(els.begin(), els.end(), x);
    if (it == els.end()) fail(ErrorKind::NotStabilized, "2e entered within the last " + std::to_string(K) + " stages");
    std::size_t p = static_cast<std::size_t>(it - els.begin());
    if (last && *last != p) fail(ErrorKind::NotStabilized, "2e moved within the last " + std::to_string(K) + " stages");
    last = p;
  }
  return decode_at(t, t.presentation_at(t.stages), e);
}

struct ConstructionAudit {
  std::vector<std::string> failures;
  std::map<Nat, std::size_t> moves;  // element -> number of stages where its position changed
  std::size_t ptr_applications = 0;
  bool ok() const { return failures.empty(); }
};

/// Replays the trace and checks every stage invariant.
inline ConstructionAudit audit_construction(const ConstructionTrace& t) {
  ConstructionAudit a;
  auto bad = [&](std::string m) {
    if (a.failures.size() < 50) a.failures.push_back(std::move(m));
  };
  const Nat domain = t.X.domain_end();

  std::set<Nat> companion_set;
  for (auto& [x, ce] : t.companions)
    for (Nat c : ce.companions) {
      if (!companion_set.insert(c).second) bad("companion " + std::to_string(c) + " belongs to two requirements");
      if (c % 2 == 0) bad("even companion " + std::to_string(c));
    }
  std::map<Nat, Nat> owner;
  for (auto& [x, ce] : t.companions)
    for (Nat c : ce.companions) owner[c] = x / 2;

  std::map<Nat, std::set<Nat>> acting;  // stage -> requirements that acted
  for (auto& ev : t.events) {
    if (ev.kind == EventKind::PtrApplied) ++a.ptr_applications;
    if (ev.kind == EventKind::PtrApplied || ev.kind == EventKind::RequirementInitialized) acting[ev.stage].insert(ev.e);
  }

  std::optional<FinitePresentation> prev;
  std::unordered_map<Nat, std::size_t> prev_pos;
  std::map<Nat, Nat> filler_value;
  for (Nat s = 0; s <= t.stages; ++s) {
    auto p = t.presentation_at(s);
    std::unordered_map<Nat, std::size_t> pos;
    for (std::size_t i = 0; i < p.size(); ++i) pos[p.element(i)] = i;
    if (prev) {
      if (!p.extends_in_order(*prev)) bad("stage " + std::to_string(s) + " reorders elements");
      for (auto& [x, i] : prev_pos)
        if (pos.at(x) != i) ++a.moves[x];
      for (Nat j = 0; j < domain; ++j) {
        Nat x = 2 * j;
        if (!prev->contains(x) || acting[s].count(j)) continue;
        if (prev->f_value(x) != p.f_value(x)) bad("f_A(" + std::to_string(x) + ") changed at stage " + std::to_string(s) + " by another requirement");
      }
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
      Nat x = p.element(i);
      if (x % 2 == 0 || companion_set.count(x)) continue;
      Nat v = *p.f_value(x);
      auto [it, fresh] = filler_value.emplace(x, v);
      if (!fresh && it->second != v) bad("filler " + std::to_string(x) + " changed value at stage " + std::to_string(s));
    }
    for (Nat e = 0; e < domain; ++e) {
      const Nat settled = std::max(t.X.last_flip(e), e) + 1;
      if (s < settled) continue;
      try {
        if (decode_at(t, p, e) != t.X.limit_value(e)) bad("requirement " + std::to_string(e) + " fails at stage " + std::to_string(s));
      } catch (const Error& err) {
        bad("requirement " + std::to_string(e) + " at stage " + std::to_string(s) + ": " + err.what());
      }
    }
    prev = std::move(p);
    prev_pos = std::move(pos);
  }

  // Movement bound: flips of even indices at or below x, plus x's owner.
  const auto& order = t.final_order;
  std::size_t budget = 0;
  std::vector<std::size_t> bound(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    Nat x = order[i];
    if (x % 2 == 0 && x / 2 < domain) budget += t.X.flip_count(x / 2);
    bound[i] = budget;
    auto o = owner.find(x);
    if (o != owner.end()) {
      Nat anchor = 2 * o->second;
      auto ai = std::find(order.begin(), order.end(), anchor) - order.begin();
      if (static_cast<std::size_t>(ai) > i) bound[i] += t.X.flip_count(o->second);
    }
    if (a.moves[x] > bound[i])
      bad("element " + std::to_string(x) + " moved " + std::to_string(a.moves[x]) + " times, bound " + std::to_string(bound[i]));
  }

  if (t.variant == Variant::BlockC)
    for (auto& [x, ce] : t.companions)
      for (std::size_t i = 1; i < ce.exponents.size(); ++i)
        if (ce.exponents[i] <= ce.exponents[i - 1]) bad("run length of " + std::to_string(x) + " did not grow");
  return a;
}

// ---------------------------------------------------------------------------
// Quasi-block function from a sequence g by inserting fixed-point fillers.

struct GSequence {
  std::vector<Nat> values;
  bool complete = false;  // true: g ends here; false: a prefix of an infinite sequence
};

struct MichalFunction {
  FuncSpec f = FuncSpec::builtin(Builtin::Identity);
  std::vector<Nat> values;
  std::vector<bool> filler;   // fixed points inserted by the builder
  std::size_t consumed = 0;   // entries of g used
};

inline MichalFunction michal_build(const GSequence& g, Nat N) {
  MichalFunction out;
  auto& v = out.values;
  auto put = [&](Nat val, bool fill) {
    if (v.size() < N) {
      v.push_back(val);
      out.filler.push_back(fill);
    }
  };
  std::size_t m = 0;
  while (v.size() < N && m < g.values.size()) {
    const Nat gm = g.values[m];
    if (gm > v.size())
      for (Nat i = v.size(); i <= gm; ++i) put(i, true);
    if (v.size() == gm) put(gm, true);  // keep every fixed point a filler
    if (v.size() >= N) break;
    put(gm, false);
    ++m;
  }
  out.consumed = m;
  if (v.size() < N) {
    if (!g.complete) fail(ErrorKind::PrefixExhausted, "g prefix of length " + std::to_string(g.values.size()) + " is too short for N = " + std::to_string(N));
    while (v.size() < N) put(v.size(), true);
  }
  out.f = FuncSpec::table(v, "michal");
  return out;
}

/// f(k) <= k (so every [0, n] is closed under f), fillers are exactly the fixed
/// points, and the non-filler values spell out the consumed part of g.
inline std::vector<std::string> audit_michal(const MichalFunction& m, const GSequence& g) {
  std::vector<std::string> bad;
  if (m.values.size() != m.filler.size()) bad.push_back("filler flags do not match the table");
  std::vector<Nat> spelled;
  for (std::size_t k = 0; k < m.values.size() && k < m.filler.size(); ++k) {
    if (m.values[k] > k) bad.push_back("f(" + std::to_string(k) + ") > " + std::to_string(k));
    if (m.filler[k] != (m.values[k] == k)) bad.push_back("filler flag wrong at " + std::to_string(k));
    if (!m.filler[k]) spelled.push_back(m.values[k]);
  }
  if (m.consumed > g.values.size() || !std::equal(spelled.begin(), spelled.end(), g.values.begin(), g.values.begin() + std::min(m.consumed, g.values.size())) ||
      spelled.size() != m.consumed)
    bad.push_back("non-filler values differ from g");
  return bad;
}

}  // namespace omega_spectra
