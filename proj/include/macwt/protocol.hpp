#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "macwt/errors.hpp"
#include "macwt/format.hpp"
#include "macwt/rate_region.hpp"

namespace macwt {

/// Slot geometry: part 1 has n1 channel uses, part 2 has n2 = l * n1.
struct SlotConfig {
  std::uint64_t n1 = 1;
  std::uint64_t l = 1;
  double epsilon = 0.1;  ///< leakage budget per n1 uses, bits
  std::uint64_t N1 = 0;  ///< protected window, slots

  std::uint64_t n2() const noexcept { return l * n1; }
  std::uint64_t n() const noexcept { return n1 + n2(); }

  void validate() const {
    if (n1 == 0) throw ValidationError("slot config: n1 must be positive");
    if (l == 0) throw ValidationError("slot config: l must be positive");
    if (!(epsilon > 0.0)) throw ValidationError("slot config: epsilon must be positive");
  }

  bool operator==(const SlotConfig&) const = default;
};

struct KeySegment {
  std::uint64_t origin_slot = 0;
  std::uint64_t bits = 0;
  bool operator==(const KeySegment&) const = default;
};

/// Result of a FIFO withdrawal.
struct KeyWithdrawal {
  std::uint64_t bits = 0;
  std::vector<std::uint64_t> origins;  ///< ascending, one entry per touched segment
};

/// Unbounded FIFO key store. Segments are strictly increasing in origin slot
/// and total_bits() always equals the sum of segment sizes.
class KeyBuffer {
 public:
  const std::deque<KeySegment>& segments() const noexcept { return segments_; }
  std::uint64_t total_bits() const noexcept { return total_; }

  std::optional<std::uint64_t> oldest_origin() const {
    if (segments_.empty()) return std::nullopt;
    return segments_.front().origin_slot;
  }

  /// Appends `bits` bits tagged with `origin`. Zero bits is a no-op.
  void deposit(std::uint64_t origin, std::uint64_t bits) {
    if (bits == 0) return;
    if (origin == 0) throw ArgumentError("key segment origin must be >= 1");
    if (!segments_.empty() && segments_.back().origin_slot >= origin) {
      throw ArgumentError("key segments must arrive in increasing origin order");
    }
    segments_.push_back({origin, bits});
    total_ += bits;
  }

  /// Bits held in segments with origin <= max_origin.
  std::uint64_t eligible_bits(std::uint64_t max_origin) const noexcept {
    std::uint64_t sum = 0;
    for (const auto& s : segments_) {
      if (s.origin_slot > max_origin) break;
      sum += s.bits;
    }
    return sum;
  }

  /// Removes `bits` oldest bits, all of which must come from origin <= max_origin.
  KeyWithdrawal withdraw(std::uint64_t bits, std::uint64_t max_origin) {
    const std::uint64_t eligible = eligible_bits(max_origin);
    if (bits > eligible) {
      throw ProtocolError("key request of " + std::to_string(bits) + " bits exceeds the " +
                              std::to_string(eligible) + " eligible bits (origin <= " +
                              std::to_string(max_origin) + "); shortfall " + std::to_string(bits - eligible),
                          bits - eligible);
    }
    KeyWithdrawal w;
    w.bits = bits;
    std::uint64_t need = bits;
    while (need > 0) {
      KeySegment& front = segments_.front();
      const std::uint64_t take = std::min(need, front.bits);
      w.origins.push_back(front.origin_slot);
      front.bits -= take;
      need -= take;
      total_ -= take;
      if (front.bits == 0) segments_.pop_front();
    }
    return w;
  }

 private:
  std::deque<KeySegment> segments_;
  std::uint64_t total_ = 0;
};

/// Per-user per-slot ledger entry.
struct SlotRecord {
  std::uint64_t slot = 0;
  int user = 1;
  std::uint64_t wiretap_bits = 0;
  std::uint64_t keyed_bits = 0;
  std::uint64_t key_consumed = 0;
  std::uint64_t key_stored = 0;
  std::uint64_t buffer_before = 0;
  std::uint64_t buffer_after = 0;
  std::vector<std::uint64_t> key_origins;
  bool window_strict = false;  ///< key limit for this slot was k - N1 - 1

  std::optional<std::uint64_t> oldest_origin_used() const {
    if (key_origins.empty()) return std::nullopt;
    return key_origins.front();
  }
  std::optional<std::uint64_t> newest_origin_used() const {
    if (key_origins.empty()) return std::nullopt;
    return key_origins.back();
  }
  /// Every consumed bit has origin <= slot - N1 - 1.
  bool satisfies_window(std::uint64_t N1) const {
    if (key_origins.empty()) return true;
    return key_origins.back() + N1 + 1 <= slot;
  }
};

struct UserPlan {
  std::uint64_t wiretap_bits = 0;
  std::uint64_t keyed_bits = 0;
};

struct SlotPlan {
  std::array<UserPlan, 2> users{};
};

/// Rates the scheduler works from: part 1 carries the wiretap-coded pair,
/// part 2 is capped at the saturated pair (R1*, R2*).
struct ProtocolRates {
  RatePair wiretap;
  RatePair keyed_cap;

  static ProtocolRates from(const RampSchedule& s) { return {s.first_part, s.saturated}; }
};

/// Transmitter key buffers of both users plus the slot counter. Bob's buffers
/// are a deterministic mirror of these and are not stored separately.
///
/// Key eligibility in slot k: once a segment with origin <= k - N1 - 1 has been
/// present at the start of a slot, the window is engaged for that user and
/// only such segments may be used. Before that (bootstrap) any buffered bits,
/// all of origin <= k - 1, may be used.
class ProtocolState {
 public:
  explicit ProtocolState(SlotConfig cfg) : cfg_(cfg) { cfg_.validate(); }

  const SlotConfig& config() const noexcept { return cfg_; }
  std::uint64_t slot() const noexcept { return slot_; }
  const KeyBuffer& buffer(int user) const { return buffers_.at(index(user)); }
  bool window_engaged(int user) const { return engaged_.at(index(user)); }

  /// True when slot k's key limit for `user` is the strict window.
  bool strict_this_slot(int user) const {
    const std::size_t u = index(user);
    if (engaged_[u]) return true;
    if (slot_ <= cfg_.N1 + 1) return false;
    const auto oldest = buffers_[u].oldest_origin();
    return oldest && *oldest <= slot_ - cfg_.N1 - 1;
  }

  /// Largest origin usable as key in the current slot (0: nothing usable).
  std::uint64_t key_limit(int user) const {
    if (strict_this_slot(user)) return slot_ > cfg_.N1 + 1 ? slot_ - cfg_.N1 - 1 : 0;
    return slot_ - 1;
  }

  std::uint64_t eligible_bits(int user) const { return buffer(user).eligible_bits(key_limit(user)); }

  /// Executes one slot: withdraws keyed_bits FIFO from eligible segments,
  /// banks everything transmitted as a new segment, and advances the counter.
  /// Throws ProtocolError (state unchanged) if a plan over-requests.
  std::array<SlotRecord, 2> advance(const SlotPlan& plan) {
    for (int user = 1; user <= 2; ++user) {
      const std::uint64_t want = plan.users[index(user)].keyed_bits;
      const std::uint64_t have = eligible_bits(user);
      if (want > have) {
        throw ProtocolError("slot " + std::to_string(slot_) + " user " + std::to_string(user) + " requests " +
                                std::to_string(want) + " key bits but only " + std::to_string(have) +
                                " are eligible; shortfall " + std::to_string(want - have),
                            want - have);
      }
    }
    std::array<SlotRecord, 2> records;
    for (int user = 1; user <= 2; ++user) {
      const std::size_t u = index(user);
      const UserPlan& p = plan.users[u];
      SlotRecord& r = records[u];
      r.slot = slot_;
      r.user = user;
      r.wiretap_bits = p.wiretap_bits;
      r.keyed_bits = p.keyed_bits;
      r.buffer_before = buffers_[u].total_bits();
      r.window_strict = strict_this_slot(user);
      const std::uint64_t limit = key_limit(user);
      if (r.window_strict) engaged_[u] = true;
      KeyWithdrawal w = buffers_[u].withdraw(p.keyed_bits, limit);
      r.key_consumed = w.bits;
      r.key_origins = std::move(w.origins);
      r.key_stored = p.wiretap_bits + p.keyed_bits;
      buffers_[u].deposit(slot_, r.key_stored);
      r.buffer_after = buffers_[u].total_bits();
    }
    ++slot_;
    return records;
  }

 private:
  static std::size_t index(int user) {
    if (user != 1 && user != 2) throw ArgumentError("user must be 1 or 2");
    return static_cast<std::size_t>(user - 1);
  }

  SlotConfig cfg_;
  std::uint64_t slot_ = 1;
  std::array<KeyBuffer, 2> buffers_{};
  std::array<bool, 2> engaged_{false, false};
};

inline ProtocolState init_protocol(const SlotConfig& cfg) { return ProtocolState(cfg); }

/// Part 1: floor(n1 * wiretap rate) bits. Part 2: min(eligible key bits,
/// floor(n2 * keyed cap)). Never over-requests.
inline SlotPlan plan_slot(const ProtocolState& state, const SlotConfig& cfg, const ProtocolRates& rates) {
  SlotPlan plan;
  const double wt[2] = {rates.wiretap.r1, rates.wiretap.r2};
  const double cap[2] = {rates.keyed_cap.r1, rates.keyed_cap.r2};
  for (int user = 1; user <= 2; ++user) {
    const std::size_t u = static_cast<std::size_t>(user - 1);
    plan.users[u].wiretap_bits = floor_bits(static_cast<double>(cfg.n1) * wt[u]);
    plan.users[u].keyed_bits =
        std::min(state.eligible_bits(user), floor_bits(static_cast<double>(cfg.n2()) * cap[u]));
  }
  return plan;
}

inline std::array<SlotRecord, 2> advance_slot(ProtocolState& state, const SlotPlan& plan) {
  return state.advance(plan);
}

struct ProtocolRun {
  SlotConfig config;
  std::vector<std::array<SlotRecord, 2>> slots;
  /// First slot from which every consumed key bit has origin <= k - N1 - 1.
  std::array<std::uint64_t, 2> n2_observed{1, 1};
  std::array<double, 2> avg_keyed_rate{};    ///< keyed bits / (K n2)
  std::array<double, 2> avg_wiretap_rate{};  ///< wiretap bits / (K n1)
  std::array<double, 2> avg_rate{};          ///< all bits / (K n)

  std::uint64_t n2_overall() const { return std::max(n2_observed[0], n2_observed[1]); }
};

/// Slots 1..K of the deterministic scheduler.
inline ProtocolRun run_protocol(const SlotConfig& cfg, const ProtocolRates& rates, std::uint64_t horizon) {
  if (horizon == 0) throw ArgumentError("run_protocol: horizon must be >= 1");
  ProtocolState state = init_protocol(cfg);
  ProtocolRun run;
  run.config = cfg;
  run.slots.reserve(horizon);
  std::array<std::uint64_t, 2> keyed{}, wiretap{};
  for (std::uint64_t k = 1; k <= horizon; ++k) {
    auto rec = advance_slot(state, plan_slot(state, cfg, rates));
    for (std::size_t u = 0; u < 2; ++u) {
      keyed[u] += rec[u].keyed_bits;
      wiretap[u] += rec[u].wiretap_bits;
      if (!rec[u].satisfies_window(cfg.N1)) run.n2_observed[u] = k + 1;
    }
    run.slots.push_back(std::move(rec));
  }
  const double K = static_cast<double>(horizon);
  for (std::size_t u = 0; u < 2; ++u) {
    run.avg_keyed_rate[u] = static_cast<double>(keyed[u]) / (K * static_cast<double>(cfg.n2()));
    run.avg_wiretap_rate[u] = static_cast<double>(wiretap[u]) / (K * static_cast<double>(cfg.n1));
    run.avg_rate[u] = static_cast<double>(keyed[u] + wiretap[u]) / (K * static_cast<double>(cfg.n()));
  }
  return run;
}

inline ProtocolRun run_protocol(const SlotConfig& cfg, const RampSchedule& schedule, std::uint64_t horizon) {
  return run_protocol(cfg, ProtocolRates::from(schedule), horizon);
}

inline CsvWriter ledger_csv(const ProtocolRun& run) {
  CsvWriter csv({"slot", "user", "wiretap_bits", "keyed_bits", "key_consumed", "key_stored", "buffer_after",
                 "oldest_origin_used"});
  for (const auto& slot : run.slots) {
    for (const auto& r : slot) {
      const auto oldest = r.oldest_origin_used();
      csv.row({fmt_int(r.slot), fmt_int(r.user), fmt_int(r.wiretap_bits), fmt_int(r.keyed_bits),
               fmt_int(r.key_consumed), fmt_int(r.key_stored), fmt_int(r.buffer_after),
               oldest ? fmt_int(*oldest) : std::string()});
    }
  }
  return csv;
}

}  // namespace macwt
