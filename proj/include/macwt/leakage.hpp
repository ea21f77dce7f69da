#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "macwt/channel.hpp"
#include "macwt/codec.hpp"
#include "macwt/errors.hpp"
#include "macwt/format.hpp"
#include "macwt/information.hpp"

namespace macwt {

/// A finite experiment audited by exact enumeration.
///
/// The experiment draws independent discrete sources, maps each joint value
/// deterministically to a pair of input sequences of `channel_uses` symbols,
/// and Eve observes them through `channel` use by use. The leakage is
/// I(A; Z^T | C) where A is the tuple of the first `target_count` sources and
/// C = condition(values) (constant when no condition is set).
struct LeakageModel {
  using Transmit = std::function<void(const std::vector<std::size_t>& values, std::vector<std::uint8_t>& x1,
                                      std::vector<std::uint8_t>& x2)>;
  using Condition = std::function<std::uint64_t(const std::vector<std::size_t>& values)>;

  std::string quantity;
  MacWiretapChannel channel;
  std::size_t channel_uses = 0;
  std::vector<std::vector<double>> sources;
  std::size_t target_count = 1;
  Transmit transmit;
  Condition condition;
};

namespace detail {

inline std::vector<double> uniform_pmf(std::size_t n) {
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

/// Advances a mixed-radix counter over digits [first, last); false on wrap.
inline bool odometer(std::vector<std::size_t>& v, const std::vector<std::vector<double>>& src, std::size_t first,
                     std::size_t last) {
  for (std::size_t i = last; i-- > first;) {
    if (++v[i] < src[i].size()) return true;
    v[i] = 0;
  }
  return false;
}

}  // namespace detail

/// Exact I(A; Z^T | C) in bits, clamped at zero.
inline double exact_leakage(const LeakageModel& m) {
  const auto& ch = m.channel;
  const std::size_t T = m.channel_uses;
  if (T == 0) throw ArgumentError("leakage model has no channel uses");
  if (m.sources.empty() || m.target_count == 0 || m.target_count > m.sources.size()) {
    throw ArgumentError("leakage model needs at least one target source");
  }
  if (!m.transmit) throw ArgumentError("leakage model has no transmit map");

  const std::uint64_t zspace = detail::checked_pow(ch.z_size(), T);
  if (zspace > CapacityError::kSupportGuard) throw CapacityError("eavesdropper output space too large", zspace);
  std::uint64_t assignments = 1;
  for (const auto& s : m.sources) {
    if (s.empty()) throw ArgumentError("leakage source with empty support");
    InputDistribution::check_pmf(s, "leakage source");
    assignments = detail::checked_mul(assignments, s.size());
  }
  if (assignments > CapacityError::kSupportGuard) throw CapacityError("too many source assignments", assignments);

  // Sparse per-use Eve law p(z|x1,x2).
  std::vector<std::vector<std::pair<std::size_t, double>>> eve(ch.x1_size() * ch.x2_size());
  for (std::size_t a = 0; a < ch.x1_size(); ++a)
    for (std::size_t b = 0; b < ch.x2_size(); ++b)
      for (std::size_t z = 0; z < ch.z_size(); ++z) {
        const double p = ch.eve(a, b, z);
        if (p > kStructuralZero) eve[a * ch.x2_size() + b].emplace_back(z, p);
      }

  const std::size_t zsize = static_cast<std::size_t>(zspace);
  std::map<std::uint64_t, std::vector<double>> mass_c;
  std::map<std::uint64_t, std::vector<double>> mass_ac;
  double h_given_ac = 0.0;

  std::vector<std::size_t> values(m.sources.size(), 0);
  std::vector<std::uint8_t> x1(T), x2(T);
  std::vector<std::pair<std::size_t, double>> cur, next;
  const std::size_t nt = m.target_count;

  auto guard_cells = [&](std::size_t distinct) {
    const std::uint64_t cells = detail::checked_mul(distinct, zsize);
    if (cells > CapacityError::kSupportGuard) throw CapacityError("conditioning support too large", cells);
  };

  do {
    mass_ac.clear();
    double w_target = 1.0;
    for (std::size_t i = 0; i < nt; ++i) w_target *= m.sources[i][values[i]];
    std::fill(values.begin() + static_cast<std::ptrdiff_t>(nt), values.end(), 0);
    if (w_target > 0.0) {
      do {
        double w = w_target;
        for (std::size_t i = nt; i < values.size() && w > 0.0; ++i) w *= m.sources[i][values[i]];
        if (w <= 0.0) continue;
        m.transmit(values, x1, x2);
        if (x1.size() != T || x2.size() != T) throw ShapeError("transmit map produced the wrong length");
        const std::uint64_t c = m.condition ? m.condition(values) : 0;
        auto it = mass_ac.find(c);
        if (it == mass_ac.end()) {
          guard_cells(mass_ac.size() + 1);
          it = mass_ac.emplace(c, std::vector<double>(zsize, 0.0)).first;
        }
        cur.assign(1, {0, w});
        for (std::size_t t = 0; t < T; ++t) {
          if (x1[t] >= ch.x1_size() || x2[t] >= ch.x2_size()) throw ArgumentError("transmit symbol outside alphabet");
          const auto& row = eve[x1[t] * ch.x2_size() + x2[t]];
          next.clear();
          for (const auto& [idx, p] : cur)
            for (const auto& [z, q] : row) next.emplace_back(idx * ch.z_size() + z, p * q);
          cur.swap(next);
        }
        auto& dst = it->second;
        for (const auto& [idx, p] : cur) dst[idx] += p;
      } while (detail::odometer(values, m.sources, nt, values.size()));
    }
    for (auto& [c, mass] : mass_ac) {
      h_given_ac += weighted_entropy_bits(mass);
      auto it = mass_c.find(c);
      if (it == mass_c.end()) {
        guard_cells(mass_c.size() + 1);
        mass_c.emplace(c, std::move(mass));
      } else {
        for (std::size_t i = 0; i < zsize; ++i) it->second[i] += mass[i];
      }
    }
  } while (detail::odometer(values, m.sources, 0, nt));

  double h_given_c = 0.0;
  for (const auto& [c, mass] : mass_c) h_given_c += weighted_entropy_bits(mass);
  return detail::clamp_nonneg(h_given_c - h_given_ac);
}

/// Upper bound on collective leakage from the two individual leakages.
inline double leakage_chain_bound(double individual1, double individual2) {
  if (individual1 < 0.0 || individual2 < 0.0) throw ArgumentError("leakage values must be nonnegative");
  return individual1 + individual2;
}

// ---------------------------------------------------------------------------
// Reports

struct LeakageReport {
  std::string scenario;
  std::string quantity;
  double value_bits = 0.0;
  double budget_bits = 0.0;       ///< n1 * epsilon
  double budget_slot_bits = 0.0;  ///< n * epsilon, reported alongside
  bool satisfied = true;
};

inline LeakageReport make_report(std::string scenario, std::string quantity, double value, double budget,
                                 double budget_slot = 0.0) {
  return {std::move(scenario), std::move(quantity), value, budget, budget_slot, value <= budget};
}

inline LeakageReport exact_leakage(const LeakageModel& m, const std::string& scenario, double budget_bits,
                                   double budget_slot_bits = 0.0) {
  return make_report(scenario, m.quantity, exact_leakage(m), budget_bits, budget_slot_bits);
}

inline CsvWriter leakage_csv(const std::vector<LeakageReport>& reports) {
  CsvWriter csv({"scenario", "quantity", "value_bits", "budget_bits", "satisfied"});
  for (const auto& r : reports) {
    csv.row({r.scenario, "\"" + r.quantity + "\"", fmt_double(r.value_bits), fmt_double(r.budget_bits),
             r.satisfied ? "true" : "false"});
  }
  return csv;
}

// ---------------------------------------------------------------------------
// Model builders

/// Eve reads user 1's binary input exactly; user 2 is absent.
inline MacWiretapChannel noiseless_eve_channel() {
  return MacWiretapChannel(2, 1, 1, 2, {1.0, 0.0, 0.0, 1.0});
}

/// One-time pad: an L-bit uniform message XORed with an independent uniform
/// L-bit key, sent over a channel Eve reads exactly.
inline LeakageModel otp_model(unsigned bits) {
  if (bits == 0 || bits > 12) throw ArgumentError("otp_model: message length must be in [1, 12]");
  const std::size_t size = std::size_t{1} << bits;
  LeakageModel m{"I(W;W^K)", noiseless_eve_channel(), bits, {detail::uniform_pmf(size), detail::uniform_pmf(size)},
                 1, nullptr, nullptr};
  m.transmit = [bits](const std::vector<std::size_t>& v, std::vector<std::uint8_t>& x1,
                      std::vector<std::uint8_t>& x2) {
    // encode_keyed on the bit expansions, without the temporaries.
    const std::size_t cipher = v[0] ^ v[1];
    x1.resize(bits);
    for (unsigned i = 0; i < bits; ++i) x1[bits - 1 - i] = static_cast<std::uint8_t>((cipher >> i) & 1u);
    x2.assign(bits, 0);
  };
  return m;
}

enum class LeakageTarget { individual1, individual2, collective };

inline const char* to_string(LeakageTarget t) {
  switch (t) {
    case LeakageTarget::individual1: return "individual1";
    case LeakageTarget::individual2: return "individual2";
    default: return "collective";
  }
}

/// One wiretap-coded block per user: uniform messages and confusion indices.
/// Individual targets condition on the other user's codeword, collective
/// targets are unconditioned.
inline LeakageModel wiretap_slot_model(const MacWiretapChannel& ch, const BinningCodebook& cb1,
                                       const BinningCodebook& cb2, LeakageTarget target) {
  if (cb1.n != cb2.n) throw ShapeError("wiretap_slot_model: codebook blocklengths differ");
  if (cb1.alphabet != ch.x1_size() || cb2.alphabet != ch.x2_size()) {
    throw ShapeError("wiretap_slot_model: codebook alphabets do not match the channel");
  }
  const std::size_t n = cb1.n;
  using detail::uniform_pmf;
  LeakageModel m{"", ch, n, {}, 1, nullptr, nullptr};
  // Source order: W1, R1, W2, R2 with the target first.
  std::array<std::size_t, 4> pos{};  // position of W1, R1, W2, R2
  switch (target) {
    case LeakageTarget::individual1:
      m.quantity = "I(W1;Z^n|X2^n)";
      pos = {0, 1, 2, 3};
      m.sources = {uniform_pmf(cb1.messages()), uniform_pmf(cb1.bin_size()), uniform_pmf(cb2.messages()),
                   uniform_pmf(cb2.bin_size())};
      m.condition = [cb2, pos](const std::vector<std::size_t>& v) {
        return cb2.codeword_index(v[pos[2]], v[pos[3]]);
      };
      break;
    case LeakageTarget::individual2:
      m.quantity = "I(W2;Z^n|X1^n)";
      pos = {2, 3, 0, 1};
      m.sources = {uniform_pmf(cb2.messages()), uniform_pmf(cb2.bin_size()), uniform_pmf(cb1.messages()),
                   uniform_pmf(cb1.bin_size())};
      m.condition = [cb1, pos](const std::vector<std::size_t>& v) {
        return cb1.codeword_index(v[pos[0]], v[pos[1]]);
      };
      break;
    case LeakageTarget::collective:
      m.quantity = "I(W1,W2;Z^n)";
      pos = {0, 2, 1, 3};
      m.target_count = 2;
      m.sources = {uniform_pmf(cb1.messages()), uniform_pmf(cb2.messages()), uniform_pmf(cb1.bin_size()),
                   uniform_pmf(cb2.bin_size())};
      break;
  }
  m.transmit = [cb1, cb2, pos](const std::vector<std::size_t>& v, std::vector<std::uint8_t>& x1,
                                             std::vector<std::uint8_t>& x2) {
    const auto a = cb1.codeword(v[pos[0]], v[pos[1]]);
    const auto b = cb2.codeword(v[pos[2]], v[pos[3]]);
    x1.assign(a.begin(), a.end());
    x2.assign(b.begin(), b.end());
  };
  return m;
}

/// Codebooks of one user in the two-slot key-recycling scheme: `wiretap`
/// codes part 1 of both slots, `keyed` (no confusion bits) carries the
/// slot-2 part-2 message XORed with the slot-1 message.
struct TwoSlotCodes {
  BinningCodebook wiretap;
  BinningCodebook keyed;
};

/// Two slots of the key-recycling scheme. Slot 1 is wiretap-coded part 1
/// only; slot 2 sends a fresh wiretap-coded block followed by the keyed block
/// W_{2,2} ^ W_1. Measures I(W_{2,1}, W_{2,2}; Z_1, Z_2 | X_2^{(o)}) for the
/// target user, where X_2^{(o)} is the other user's full slot-2 input.
inline LeakageModel two_slot_model(const MacWiretapChannel& ch, TwoSlotCodes user1, TwoSlotCodes user2,
                                   int target_user = 1) {
  if (target_user != 1 && target_user != 2) throw ArgumentError("target user must be 1 or 2");
  for (const TwoSlotCodes* c : {&user1, &user2}) {
    if (c->keyed.confusion_bits != 0) throw ArgumentError("two_slot_model: keyed code must be deterministic");
    if (c->keyed.message_bits != c->wiretap.message_bits) {
      throw ArgumentError("two_slot_model: keyed message length must equal the slot-1 message length");
    }
  }
  const std::size_t n1 = user1.wiretap.n;
  const std::size_t n2 = user1.keyed.n;
  if (user2.wiretap.n != n1 || user2.keyed.n != n2) throw ShapeError("two_slot_model: blocklengths differ");
  if (user1.wiretap.alphabet != ch.x1_size() || user1.keyed.alphabet != ch.x1_size() ||
      user2.wiretap.alphabet != ch.x2_size() || user2.keyed.alphabet != ch.x2_size()) {
    throw ShapeError("two_slot_model: codebook alphabets do not match the channel");
  }

  const TwoSlotCodes tgt = target_user == 1 ? user1 : user2;
  const TwoSlotCodes oth = target_user == 1 ? user2 : user1;
  using detail::uniform_pmf;
  // 0 W21, 1 W22, 2 W1, 3 R1, 4 R21 (target user); 5 W1, 6 R1, 7 W21, 8 R21, 9 W22 (other user).
  LeakageModel m{target_user == 1 ? "I(W2^(1);Z1,Z2|X2^(2))" : "I(W2^(2);Z1,Z2|X2^(1))",
                 ch,
                 2 * n1 + n2,
                 {uniform_pmf(tgt.wiretap.messages()), uniform_pmf(tgt.keyed.messages()),
                  uniform_pmf(tgt.wiretap.messages()), uniform_pmf(tgt.wiretap.bin_size()),
                  uniform_pmf(tgt.wiretap.bin_size()), uniform_pmf(oth.wiretap.messages()),
                  uniform_pmf(oth.wiretap.bin_size()), uniform_pmf(oth.wiretap.messages()),
                  uniform_pmf(oth.wiretap.bin_size()), uniform_pmf(oth.keyed.messages())},
                 2,
                 nullptr,
                 nullptr};

  auto sequence = [n1, n2](const TwoSlotCodes& c, std::size_t w1, std::size_t r1, std::size_t w21, std::size_t r21,
                           std::size_t w22, std::vector<std::uint8_t>& x) {
    x.resize(2 * n1 + n2);
    auto a = c.wiretap.codeword(w1, r1);
    auto b = c.wiretap.codeword(w21, r21);
    auto k = c.keyed.codeword(w22 ^ w1, 0);
    std::copy(a.begin(), a.end(), x.begin());
    std::copy(b.begin(), b.end(), x.begin() + static_cast<std::ptrdiff_t>(n1));
    std::copy(k.begin(), k.end(), x.begin() + static_cast<std::ptrdiff_t>(2 * n1));
  };
  m.transmit = [=](const std::vector<std::size_t>& v, std::vector<std::uint8_t>& x1, std::vector<std::uint8_t>& x2) {
    auto& xt = target_user == 1 ? x1 : x2;
    auto& xo = target_user == 1 ? x2 : x1;
    sequence(tgt, v[2], v[3], v[0], v[4], v[1], xt);
    sequence(oth, v[5], v[6], v[7], v[8], v[9], xo);
  };
  m.condition = [oth, n2](const std::vector<std::size_t>& v) {
    const std::uint64_t part1 = oth.wiretap.codeword_index(v[7], v[8]);
    const std::uint64_t part2 = oth.keyed.codeword_index(v[9] ^ v[5], 0);
    return part1 * detail::checked_pow(oth.keyed.alphabet, n2) + part2;
  };
  return m;
}

/// Mean exact individual leakage of user 1 per channel use over seeded random
/// codebooks. Seed s uses derive_seed(base, 2s) for user 1 and
/// derive_seed(base, 2s + 1) for user 2; both users share the same dimensions.
inline double mean_wiretap_leakage_rate(const MacWiretapChannel& ch, const InputDistribution& q, std::size_t n,
                                        unsigned message_bits, unsigned confusion_bits, std::uint64_t base_seed,
                                        std::size_t seeds, std::vector<double>* per_seed = nullptr) {
  if (seeds == 0) throw ArgumentError("mean_wiretap_leakage_rate: need at least one seed");
  double sum = 0.0;
  for (std::size_t s = 0; s < seeds; ++s) {
    const auto cb1 = build_codebook(ch, q, 1, n, message_bits, confusion_bits, derive_seed(base_seed, 2 * s));
    const auto cb2 = build_codebook(ch, q, 2, n, message_bits, confusion_bits, derive_seed(base_seed, 2 * s + 1));
    const double v = exact_leakage(wiretap_slot_model(ch, cb1, cb2, LeakageTarget::individual1)) /
                     static_cast<double>(n);
    if (per_seed) per_seed->push_back(v);
    sum += v;
  }
  return sum / static_cast<double>(seeds);
}

}  // namespace macwt
