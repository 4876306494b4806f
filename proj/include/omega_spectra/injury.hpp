#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "pairing.hpp"
#include "presentation.hpp"

namespace omega_spectra {

// ---------------------------------------------------------------------------
// Requirements and the oracle-machine model.

enum class ReqKind { I, J, R };

struct ReqId {
  ReqKind kind = ReqKind::I;
  Nat e = 0;                // I_e, J_e
  Nat e1 = 0, e2 = 0, n = 0;  // R<e1,e2,n>
  static ReqId I(Nat e) { return {ReqKind::I, e}; }
  static ReqId J(Nat e) { return {ReqKind::J, e}; }
  static ReqId R(Nat e1, Nat e2, Nat n) { return {ReqKind::R, 0, e1, e2, n}; }
  Nat index() const { return kind == ReqKind::R ? pair_encode(e1, pair_encode(e2, n)) : e; }
  std::string label() const {
    switch (kind) {
      case ReqKind::I: return "I" + std::to_string(e);
      case ReqKind::J: return "J" + std::to_string(e);
      case ReqKind::R: return "R<" + std::to_string(e1) + "," + std::to_string(e2) + "," + std::to_string(n) + ">";
    }
    return "?";
  }
  bool operator==(const ReqId&) const = default;
};

/// One line of a decision list: on `input` (any if empty), if every query agrees with
/// the oracle, output `output`; the computation halts after `steps` steps.
struct Rule {
  std::optional<Nat> input;
  std::vector<std::pair<Nat, bool>> queries;
  Nat output = 0;
  Nat steps = 0;
  bool operator==(const Rule&) const = default;
};

struct OracleProgram {
  Nat index = 0;
  std::vector<Rule> rules;
  bool operator==(const OracleProgram&) const = default;
};

struct Computation {
  Nat output = 0;
  std::vector<std::pair<Nat, bool>> use;
};

/// Oracle answers; nullopt means the query lies outside the available prefix.
using OracleFn = std::function<std::optional<bool>(Nat)>;

/// Φ_{e,s}^X(x): among rules that halt within s steps, only query below s and agree
/// with X, the one halting first wins. Answers are therefore monotone in s.
inline std::optional<Computation> run_program(const OracleProgram* p, Nat x, const OracleFn& oracle, Nat s) {
  if (!p) return std::nullopt;
  const Rule* best = nullptr;
  for (const auto& r : p->rules) {
    if (r.input && *r.input != x) continue;
    if (r.steps > s) continue;
    if (best && best->steps <= r.steps) continue;
    bool ok = true;
    for (auto [q, bit] : r.queries) {
      if (q >= s) { ok = false; break; }
      auto a = oracle(q);
      if (!a || *a != bit) { ok = false; break; }
    }
    if (ok) best = &r;
  }
  if (!best) return std::nullopt;
  return Computation{best->output, best->queries};
}

/// W_n as a list of (number, stage it is enumerated).
struct Enumeration {
  Nat index = 0;
  std::vector<std::pair<Nat, Nat>> items;
  bool contains(Nat w, Nat s) const {
    for (auto [x, st] : items)
      if (x == w && st <= s) return true;
    return false;
  }
  bool operator==(const Enumeration&) const = default;
};

struct ProgramFamily {
  std::map<Nat, OracleProgram> programs;
  std::map<Nat, Enumeration> enums;
  const OracleProgram* program(Nat e) const {
    auto it = programs.find(e);
    return it == programs.end() ? nullptr : &it->second;
  }
  bool W(Nat n, Nat w, Nat s) const {
    auto it = enums.find(n);
    return it != enums.end() && it->second.contains(w, s);
  }
  bool operator==(const ProgramFamily&) const = default;
};

enum class TicketMode { Faithful, Rank };

inline const char* to_string(TicketMode m) { return m == TicketMode::Faithful ? "faithful" : "rank"; }

struct InjuryConfig {
  Nat stages = 0;
  std::vector<ReqId> priority;
  ProgramFamily family;
  TicketMode mode = TicketMode::Faithful;
  Nat max_exponent = 16;           // cycle length 2^exponent
  Nat max_elements = 1u << 22;
  bool operator==(const InjuryConfig&) const = default;
};

/// The least z with pair < z < s satisfying (α) and (β), if any.
/// gamma is Γ_{f_{A_s}}; W is W_{n,s}.
inline std::optional<Nat> needs_attention_R(const ProgramFamily& fam, const ReqId& r, Nat pair, const OracleFn& gamma, Nat s) {
  if (s < pair + 2) return std::nullopt;
  const auto* p1 = fam.program(r.e1);
  const auto* p2 = fam.program(r.e2);
  if (!p2) return std::nullopt;
  const auto target = gamma(pair);
  // (α) holds for z up to the first disagreement
  auto alpha_ok = [&, agreed = Nat{0}](Nat z) mutable {
    while (agreed < z) {
      auto c = run_program(p1, agreed, gamma, s);
      if (!c || c->output != (fam.W(r.n, agreed, s) ? 1u : 0u)) return false;
      ++agreed;
    }
    return true;
  };
  for (Nat z = pair + 1; z < s; ++z) {
    if (!alpha_ok(z)) return std::nullopt;
    OracleFn wz = [&](Nat q) -> std::optional<bool> {
      if (q >= z) return std::nullopt;
      return fam.W(r.n, q, s);
    };
    auto c = run_program(p2, pair, wz, s);
    if (c && target && c->output == (*target ? 1u : 0u)) return z;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Trace.

struct ReservationRecord {
  ReqId req;
  Nat stage = 0;
  Nat u = 0, v = 0, pair = 0;
  std::array<Nat, 3> tickets{};
  std::vector<Nat> attention_stages;
  std::vector<Nat> witnesses;        // z for each attention
  std::optional<Nat> cancelled_at;
  std::vector<Nat> region;           // labels of the C_{t0} + C_{t1} region, in order
  bool operator==(const ReservationRecord&) const = default;
};

struct WitnessRecord {
  ReqId req;
  Nat stage = 0;
  Nat x = 0;
  std::optional<Nat> acted_at;
  std::vector<std::pair<Nat, bool>> use;  // frozen computation's queries
  std::optional<Nat> cancelled_at;
  bool operator==(const WitnessRecord&) const = default;
};

struct Increment {
  Nat n = 0;      // cycle type
  Nat k = 0;      // ticket entering I that caused it
  Nat stage = 0;
  Nat amount = 0;
  bool operator==(const Increment&) const = default;
};

struct InjuryEvent {
  Nat stage = 0;
  std::string kind;  // reserve, attention-1, attention-2, act, cancel
  std::string req;
  std::string detail;
  bool operator==(const InjuryEvent&) const = default;
};

struct LayoutSnapshot {
  Nat stage = 0;
  std::vector<Nat> blocks;  // cycle types in order
  bool operator==(const LayoutSnapshot&) const = default;
};

struct InjuryTrace {
  InjuryConfig config;
  std::vector<Nat> final_order;
  std::map<Nat, Nat> entry_stage;
  std::map<Nat, std::size_t> reservation_of;  // labels placed by a reservation
  std::vector<LayoutSnapshot> layouts;        // one per stage where A changed
  std::map<Nat, Nat> exponent;                // cycle type -> log2 of its length
  std::map<Nat, Nat> I_entries, J_entries;    // number -> stage enumerated
  std::vector<ReservationRecord> reservations;
  std::vector<WitnessRecord> witnesses;
  std::vector<Increment> increments;
  std::vector<InjuryEvent> events;

  Nat cycle_length(Nat type) const { return Nat{1} << exponent.at(type); }

  std::vector<Nat> elements_at(Nat s) const {
    std::vector<Nat> out;
    for (Nat x : final_order)
      if (entry_stage.at(x) <= s) out.push_back(x);
    return out;
  }
  const std::vector<Nat>& blocks_at(Nat s) const {
    static const std::vector<Nat> none;
    const std::vector<Nat>* b = &none;
    for (const auto& l : layouts) {
      if (l.stage > s) break;
      b = &l.blocks;
    }
    return *b;
  }
  /// Stages where A changed, in order.
  std::vector<Nat> change_stages() const {
    std::vector<Nat> v;
    for (const auto& l : layouts) v.push_back(l.stage);
    return v;
  }
  FinitePresentation presentation_at(Nat s) const {
    auto els = elements_at(s);
    std::vector<std::optional<std::size_t>> img(els.size());
    std::size_t at = 0;
    for (Nat t : blocks_at(s)) {
      const std::size_t len = cycle_length(t);
      for (std::size_t i = 0; i < len; ++i) img.at(at + i) = at + (i + 1) % len;
      at += len;
    }
    if (at != els.size()) fail(ErrorKind::InternalInvariantViolation, "layout does not cover A_s at stage " + std::to_string(s));
    return FinitePresentation(els, img, s);
  }
  /// f_A_s(x) without building the whole presentation; empty if x is not in A_s.
  std::optional<Nat> f_value_at(Nat s, Nat x) const {
    std::size_t pos = 0;
    bool seen = false;
    for (Nat y : final_order) {
      if (y == x) {
        seen = entry_stage.at(y) <= s;
        break;
      }
      pos += entry_stage.at(y) <= s;
    }
    if (!seen) return std::nullopt;
    std::size_t at = 0, img = 0;
    for (Nat type : blocks_at(s)) {
      const std::size_t len = cycle_length(type);
      if (pos < at + len) {
        img = at + (pos - at + 1) % len;
        break;
      }
      at += len;
    }
    for (Nat y : final_order)
      if (entry_stage.at(y) <= s && img-- == 0) return y;
    fail(ErrorKind::InternalInvariantViolation, "layout does not cover A_s at stage " + std::to_string(s));
  }
  std::map<Nat, Nat> counts_at(Nat s) const {
    std::map<Nat, Nat> c;
    for (Nat t : blocks_at(s)) ++c[t];
    return c;
  }
  bool in_I(Nat x, Nat s) const {
    auto it = I_entries.find(x);
    return it != I_entries.end() && it->second <= s;
  }
  bool in_J(Nat x, Nat s) const {
    auto it = J_entries.find(x);
    return it != J_entries.end() && it->second <= s;
  }
};

/// Γ of a presentation: ⟨a,b⟩ ↦ [f(a) = b].
inline bool gamma_of(const FinitePresentation& p, Nat q) {
  auto [a, b] = pair_decode(q);
  if (!p.contains(a) || !p.contains(b)) return false;
  return p.f_value(a) == b;
}

// ---------------------------------------------------------------------------
// Engine.

namespace detail {

class InjuryEngine {
 public:
  explicit InjuryEngine(const InjuryConfig& c) { t_.config = c; }

  InjuryTrace run() {
    const auto& cfg = t_.config;
    slots_.assign(cfg.priority.size(), {});
    for (Nat stage = 1; stage <= cfg.stages; ++stage) {
      const Nat s = stage - 1;
      changed_ = false;
      bool acted = false;
      for (std::size_t p = 0; p < slots_.size() && !acted; ++p) acted = try_attend(p, s, stage);
      if (!acted)
        for (std::size_t p = 0; p < slots_.size(); ++p)
          if (!slots_[p]) {
            reserve(p, stage);
            break;
          }
      if (changed_) t_.layouts.push_back({stage, blocks_});
    }
    t_.final_order = order_;
    return std::move(t_);
  }

 private:
  InjuryTrace t_;
  std::vector<std::optional<std::size_t>> slots_;  // index into reservations or witnesses
  std::vector<Nat> order_;
  std::vector<Nat> blocks_;
  Nat next_number_ = 0;   // witnesses, tickets, uses
  Nat next_label_ = 0;    // elements of A
  Nat tickets_issued_ = 0;
  bool changed_ = false;

  const ReqId& req(std::size_t p) const { return t_.config.priority[p]; }

  Nat fresh_number() { return next_number_++; }
  void mention(Nat x) { next_number_ = std::max(next_number_, x + 1); }

  FinitePresentation current(Nat s) const {
    std::vector<std::optional<std::size_t>> img(order_.size());
    std::size_t at = 0;
    for (Nat t : blocks_) {
      const std::size_t len = t_.cycle_length(t);
      for (std::size_t i = 0; i < len; ++i) img[at + i] = at + (i + 1) % len;
      at += len;
    }
    return FinitePresentation(order_, img, s);
  }

  bool try_attend(std::size_t p, Nat s, Nat stage) {
    if (!slots_[p]) return false;
    const auto& r = req(p);
    const auto& fam = t_.config.family;
    if (r.kind == ReqKind::R) {
      auto& res = t_.reservations[*slots_[p]];
      if (s < res.pair + 2) return false;  // no z with <u,v> < z < s
      auto pres = current(s);
      OracleFn gamma = [&](Nat q) -> std::optional<bool> { return gamma_of(pres, q); };
      auto z = needs_attention_R(fam, r, res.pair, gamma, s);
      if (!z) return false;
      if (res.attention_stages.size() >= 2)
        fail(ErrorKind::InternalInvariantViolation, r.label() + " needs attention a third time with the same reservation");
      attend_R(p, res, *z, stage);
      return true;
    }
    auto& w = t_.witnesses[*slots_[p]];
    if (w.acted_at) return false;
    const bool mine_I = r.kind == ReqKind::I;
    if (mine_I ? t_.in_I(w.x, s) : t_.in_J(w.x, s)) return false;
    OracleFn other = [&](Nat q) -> std::optional<bool> { return mine_I ? t_.in_J(q, s) : t_.in_I(q, s); };
    auto c = run_program(fam.program(r.e), w.x, other, s);
    if (!c || c->output != 0) return false;
    (mine_I ? t_.I_entries : t_.J_entries).emplace(w.x, stage);
    w.acted_at = stage;
    w.use = c->use;
    for (auto [q, bit] : c->use) mention(q);
    t_.events.push_back({stage, "act", r.label(), "x=" + std::to_string(w.x)});
    cancel_below(p, stage);
    return true;
  }

  void cancel_below(std::size_t p, Nat stage) {
    for (std::size_t q = p + 1; q < slots_.size(); ++q) {
      if (!slots_[q]) continue;
      if (req(q).kind == ReqKind::R) t_.reservations[*slots_[q]].cancelled_at = stage;
      else t_.witnesses[*slots_[q]].cancelled_at = stage;
      t_.events.push_back({stage, "cancel", req(q).label(), ""});
      slots_[q].reset();
    }
  }

  Nat exponent_for(Nat ticket) {
    Nat e = t_.config.mode == TicketMode::Faithful ? ticket : tickets_issued_;
    ++tickets_issued_;
    if (e > t_.config.max_exponent)
      fail(ErrorKind::BudgetExceeded, "ticket " + std::to_string(ticket) + " needs cycles of length 2^" + std::to_string(e) + " (max_exponent " +
                                          std::to_string(t_.config.max_exponent) + ")");
    t_.exponent[ticket] = e;
    return e;
  }

  std::vector<Nat> fresh_labels(std::size_t k) {
    if (order_.size() + k > t_.config.max_elements) fail(ErrorKind::BudgetExceeded, "presentation would exceed max_elements");
    std::vector<Nat> v(k);
    for (auto& x : v) x = next_label_++;
    return v;
  }

  void enter(const std::vector<Nat>& xs, Nat stage) {
    for (Nat x : xs) t_.entry_stage.emplace(x, stage);
  }

  void reserve(std::size_t p, Nat stage) {
    const auto& r = req(p);
    changed_ = changed_ || r.kind == ReqKind::R;
    if (r.kind != ReqKind::R) {
      WitnessRecord w;
      w.req = r;
      w.stage = stage;
      w.x = fresh_number();
      slots_[p] = t_.witnesses.size();
      t_.events.push_back({stage, "reserve", r.label(), "x=" + std::to_string(w.x)});
      t_.witnesses.push_back(w);
      return;
    }
    ReservationRecord res;
    res.req = r;
    res.stage = stage;
    // least <u,v> with u, v both new to A: u = L + 1, v = L
    res.v = next_label_;
    res.u = next_label_ + 1;
    res.pair = pair_encode(res.u, res.v);
    for (auto& t : res.tickets) t = fresh_number();
    const Nat e0 = exponent_for(res.tickets[0]), e1 = exponent_for(res.tickets[1]);
    exponent_for(res.tickets[2]);
    const std::size_t n0 = std::size_t{1} << e0, n1 = std::size_t{1} << e1;
    auto labels = fresh_labels(n0 + n1);
    // labels[0] = v, labels[1] = u; the rest fill the cycles in increasing order
    std::vector<Nat> region;
    std::size_t next = 2;
    for (std::size_t i = 0; i + 1 < n0; ++i) region.push_back(labels[next++]);
    region.push_back(res.u);
    region.push_back(res.v);
    for (std::size_t i = 1; i < n1; ++i) region.push_back(labels[next++]);
    res.region = region;
    order_.insert(order_.end(), region.begin(), region.end());
    blocks_.push_back(res.tickets[0]);
    blocks_.push_back(res.tickets[1]);
    enter(region, stage);
    const std::size_t idx = t_.reservations.size();
    for (Nat x : region) t_.reservation_of[x] = idx;
    t_.I_entries.emplace(res.tickets[0], stage);
    t_.increments.push_back({res.tickets[0], res.tickets[0], stage, 1});
    t_.increments.push_back({res.tickets[1], res.tickets[0], stage, 1});
    t_.events.push_back({stage, "reserve", r.label(),
                         "<u,v>=<" + std::to_string(res.u) + "," + std::to_string(res.v) + ">=" + std::to_string(res.pair) + " tickets " +
                             std::to_string(res.tickets[0]) + "," + std::to_string(res.tickets[1]) + "," + std::to_string(res.tickets[2])});
    slots_[p] = idx;
    t_.reservations.push_back(std::move(res));
  }

  void attend_R(std::size_t p, ReservationRecord& res, Nat z, Nat stage) {
    changed_ = true;
    const std::size_t which = res.attention_stages.size() + 1;  // 1 or 2
    const Nat k = res.tickets[which];

    // locate C: the region's two blocks
    auto it = std::find(order_.begin(), order_.end(), res.region.front());
    const std::size_t cB = static_cast<std::size_t>(it - order_.begin());
    std::size_t bi = 0, at = 0;
    while (at < cB) at += t_.cycle_length(blocks_.at(bi++));
    if (at != cB || !std::equal(res.region.begin(), res.region.end(), order_.begin() + cB))
      fail(ErrorKind::InternalInvariantViolation, "reservation region of " + res.req.label() + " is not an aligned contiguous pair of cycles");

    const std::size_t tail = order_.size() - cB;  // |C| + |D|
    auto F = fresh_labels(tail);
    std::vector<Nat> order;
    order.reserve(order_.size() + tail);
    order.insert(order.end(), order_.begin(), order_.begin() + cB);
    order.insert(order.end(), F.begin(), F.end());
    order.insert(order.end(), order_.begin() + cB, order_.end());

    std::vector<Nat> blocks(blocks_.begin(), blocks_.begin() + bi);
    for (std::size_t b = bi; b < blocks_.size(); ++b) {
      blocks.push_back(blocks_[b]);
      t_.increments.push_back({blocks_[b], k, stage, 1});
    }
    blocks.push_back(blocks_[bi + 1]);  // C' swaps the two cycles
    blocks.push_back(blocks_[bi]);
    blocks.insert(blocks.end(), blocks_.begin() + bi + 2, blocks_.end());

    order_ = std::move(order);
    blocks_ = std::move(blocks);
    enter(F, stage);
    t_.I_entries.emplace(k, stage);
    res.attention_stages.push_back(stage);
    res.witnesses.push_back(z);
    t_.events.push_back({stage, "attention-" + std::to_string(which), res.req.label(), "z=" + std::to_string(z) + " ticket " + std::to_string(k)});
    cancel_below(p, stage);
  }
};

}  // namespace detail

inline InjuryTrace run_injury(const InjuryConfig& cfg) { return detail::InjuryEngine(cfg).run(); }

// ---------------------------------------------------------------------------
// Audits and decoders.

struct CountingAudit {
  std::vector<Increment> increments;  // every (n, k, stage) triple
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

/// Every c_f(n) increment is caused by a ticket k <= n + 2 and the recorded
/// increments account exactly for the change in block counts.
inline CountingAudit audit_counting(const InjuryTrace& t) {
  CountingAudit a;
  a.increments = t.increments;
  for (const auto& inc : t.increments)
    if (inc.k > inc.n + 2)
      a.failures.push_back("c_f(" + std::to_string(inc.n) + ") increased at stage " + std::to_string(inc.stage) + " by ticket " + std::to_string(inc.k));
  std::map<Nat, std::map<Nat, Nat>> by_stage;
  for (const auto& inc : t.increments) by_stage[inc.stage][inc.n] += inc.amount;
  std::map<Nat, Nat> prev;
  const auto changes = t.change_stages();
  for (Nat s : changes) {
    auto cur = t.counts_at(s);
    std::map<Nat, Nat> diff;
    for (auto [n, c] : cur) {
      Nat before = prev.count(n) ? prev.at(n) : 0;
      if (c < before) a.failures.push_back("c_f(" + std::to_string(n) + ") decreased at stage " + std::to_string(s));
      else if (c > before) diff[n] = c - before;
    }
    if (diff != by_stage[s]) a.failures.push_back("increments at stage " + std::to_string(s) + " do not match the block counts");
    prev = std::move(cur);
  }
  for (auto& [s, m] : by_stage)
    if (!m.empty() && !std::binary_search(changes.begin(), changes.end(), s))
      a.failures.push_back("increment recorded at stage " + std::to_string(s) + " where A did not change");
  return a;
}

struct InjuryAudit {
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

/// Stage invariants other than counting.
inline InjuryAudit audit_injury(const InjuryTrace& t) {
  InjuryAudit a;
  auto bad = [&](std::string m) {
    if (a.failures.size() < 50) a.failures.push_back(std::move(m));
  };

  // Tickets: consecutive and above every number mentioned earlier.
  {
    std::map<Nat, Nat> mentioned_at;  // number -> first stage it was used
    auto note = [&](Nat x, Nat s) {
      auto [it, ok] = mentioned_at.emplace(x, s);
      if (!ok) it->second = std::min(it->second, s);
    };
    for (const auto& w : t.witnesses) {
      note(w.x, w.stage);
      if (w.acted_at)
        for (auto [q, b] : w.use) note(q, *w.acted_at);
    }
    for (const auto& r : t.reservations)
      for (Nat k : r.tickets) note(k, r.stage);
    for (const auto& r : t.reservations) {
      if (r.tickets[1] != r.tickets[0] + 1 || r.tickets[2] != r.tickets[0] + 2) bad(r.req.label() + ": tickets not consecutive");
      for (auto [x, s] : mentioned_at)
        if (s < r.stage && x >= r.tickets[0]) bad(r.req.label() + ": ticket " + std::to_string(r.tickets[0]) + " not fresh at stage " + std::to_string(r.stage));
      if (r.attention_stages.size() > 2) bad(r.req.label() + ": more than two attentions");
    }
  }

  // Γ lifecycle and preservation of f outside the acting region.
  std::optional<FinitePresentation> prev;
  for (Nat s : t.change_stages()) {
    auto p = t.presentation_at(s);
    if (prev && !p.extends_in_order(*prev)) bad("stage " + std::to_string(s) + " reorders A");
    for (const auto& r : t.reservations) {
      if (r.stage > s) continue;
      const std::size_t done = std::count_if(r.attention_stages.begin(), r.attention_stages.end(), [s](Nat x) { return x <= s; });
      if (gamma_of(p, r.pair) != (done == 1)) bad(r.req.label() + ": Γ(<u,v>) wrong at stage " + std::to_string(s));
    }
    if (prev) {
      std::set<Nat> acting;
      for (const auto& r : t.reservations)
        if (std::find(r.attention_stages.begin(), r.attention_stages.end(), s) != r.attention_stages.end()) acting.insert(r.region.begin(), r.region.end());
      for (std::size_t i = 0; i < prev->size(); ++i) {
        Nat x = prev->element(i);
        if (!acting.count(x) && prev->f_value(x) != p.f_value(x)) bad("f_A(" + std::to_string(x) + ") changed at stage " + std::to_string(s));
      }
    }
    prev = std::move(p);
  }

  // Frozen computations survive until cancelled.
  for (const auto& w : t.witnesses) {
    if (!w.acted_at) continue;
    const Nat until = w.cancelled_at ? *w.cancelled_at : t.config.stages;
    for (auto [q, bit] : w.use) {
      const auto& other = w.req.kind == ReqKind::I ? t.J_entries : t.I_entries;
      auto it = other.find(q);
      bool now = it != other.end() && it->second <= *w.acted_at - 1;
      if (now != bit) bad(w.req.label() + ": frozen use disagrees at freezing");
      if (it != other.end() && it->second > *w.acted_at - 1 && it->second <= until)
        bad(w.req.label() + ": frozen computation injured at stage " + std::to_string(it->second));
    }
  }
  return a;
}

/// c_f(n) computed from I: count C_n once I restricted to [0, n+2] has settled.
inline Nat decode_cf_from_I(const InjuryTrace& t, Nat n, Nat K = 1) {
  Nat settle = 0;
  for (auto [x, s] : t.I_entries)
    if (x <= n + 2) settle = std::max(settle, s);
  if (settle + K > t.config.stages) fail(ErrorKind::NotStabilized, "I below " + std::to_string(n + 2) + " changed within the last " + std::to_string(K) + " stages");
  auto c = t.counts_at(settle);
  return c.count(n) ? c.at(n) : 0;
}

/// f_A(x) using only the counting function (given as an oracle) and the construction.
inline Nat decode_fA_from_cf(const InjuryTrace& t, Nat x, const std::function<Nat(Nat)>& cf) {
  auto e = t.entry_stage.find(x);
  if (e == t.entry_stage.end()) fail(ErrorKind::NotStabilized, std::to_string(x) + " never entered A");
  auto r = t.reservation_of.find(x);
  Nat s = e->second;
  if (r != t.reservation_of.end()) {
    const Nat t0 = t.reservations.at(r->second).tickets[0];
    const Nat want = cf(t0);
    std::optional<Nat> found;
    for (Nat st : t.change_stages()) {
      if (st < s) continue;
      auto c = t.counts_at(st);
      if (c.count(t0) && c.at(t0) == want) {
        found = st;
        break;
      }
    }
    if (!found) fail(ErrorKind::NotStabilized, "A never shows c_f(" + std::to_string(t0) + ") copies of its cycle");
    s = *found;
  }
  return *t.f_value_at(s, x);
}

}  // namespace omega_spectra
