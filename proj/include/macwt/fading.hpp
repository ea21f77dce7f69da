#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "macwt/errors.hpp"
#include "macwt/format.hpp"
#include "macwt/protocol.hpp"
#include "macwt/random.hpp"

namespace macwt {

/// Block-fading power gains for one slot.
struct FadingDraw {
  std::uint64_t slot = 0;
  double h1 = 0.0, h2 = 0.0;  ///< to Bob
  double g1 = 0.0, g2 = 0.0;  ///< to Eve
};

/// Law of one power gain.
struct GainDistribution {
  enum class Kind { exponential, constant, uniform };
  Kind kind = Kind::exponential;
  double a = 1.0;  ///< exponential: mean; constant: value; uniform: lower end
  double b = 0.0;  ///< uniform: upper end

  static GainDistribution exponential(double mean) { return {Kind::exponential, mean, 0.0}; }
  static GainDistribution constant(double value) { return {Kind::constant, value, 0.0}; }
  static GainDistribution uniform(double lo, double hi) { return {Kind::uniform, lo, hi}; }

  void validate(const std::string& name) const {
    switch (kind) {
      case Kind::exponential:
        if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError(name + ": exponential mean must be positive");
        break;
      case Kind::constant:
        if (!(a >= 0.0) || !std::isfinite(a)) throw ValidationError(name + ": constant gain must be >= 0");
        break;
      case Kind::uniform:
        if (!(a >= 0.0) || !(b >= a) || !std::isfinite(b)) throw ValidationError(name + ": need 0 <= low <= high");
        break;
    }
  }

  double sample(Engine& rng) const {
    switch (kind) {
      case Kind::exponential: return sample_exponential(rng, a);
      case Kind::constant: return a;
      case Kind::uniform: return a + (b - a) * uniform01(rng);
    }
    return 0.0;
  }

  bool operator==(const GainDistribution&) const = default;
};

/// Four independent gains, i.i.d. across slots, drawn from one seeded engine
/// in the order h1, h2, g1, g2 each slot.
struct GainModel {
  GainDistribution h1 = GainDistribution::exponential(1.0);
  GainDistribution h2 = GainDistribution::exponential(1.0);
  GainDistribution g1 = GainDistribution::exponential(1.0);
  GainDistribution g2 = GainDistribution::exponential(1.0);
  std::uint64_t seed = 0;

  void validate() const {
    h1.validate("gain_model.h1");
    h2.validate("gain_model.h2");
    g1.validate("gain_model.g1");
    g2.validate("gain_model.g2");
  }

  bool operator==(const GainModel&) const = default;
};

class GainProcess {
 public:
  explicit GainProcess(const GainModel& m) : model_(m), rng_(m.seed) { m.validate(); }

  FadingDraw next() {
    FadingDraw d;
    d.slot = ++slot_;
    d.h1 = model_.h1.sample(rng_);
    d.h2 = model_.h2.sample(rng_);
    d.g1 = model_.g1.sample(rng_);
    d.g2 = model_.g2.sample(rng_);
    return d;
  }

 private:
  GainModel model_;
  Engine rng_;
  std::uint64_t slot_ = 0;
};

/// Power policy (P1, P2) = f(h, g) with a declared long-term budget.
/// `constant` always transmits at the budget. `on_off` transmits at `on_power`
/// when the user's Bob gain is at least `threshold`, and is silent otherwise.
struct PowerPolicy {
  enum class Kind { constant, on_off };
  Kind kind = Kind::constant;
  std::array<double, 2> budget{1.0, 1.0};
  std::array<double, 2> on_power{0.0, 0.0};
  std::array<double, 2> threshold{0.0, 0.0};

  static PowerPolicy constant(double p1, double p2) { return {Kind::constant, {p1, p2}, {p1, p2}, {0.0, 0.0}}; }
  static PowerPolicy on_off(std::array<double, 2> budget, std::array<double, 2> on_power,
                            std::array<double, 2> threshold) {
    return {Kind::on_off, budget, on_power, threshold};
  }

  void validate() const {
    for (int i = 0; i < 2; ++i) {
      if (!(budget[i] >= 0.0) || !std::isfinite(budget[i])) throw ValidationError("power_policy.budget must be >= 0");
      if (kind == Kind::on_off && (!(on_power[i] >= 0.0) || !std::isfinite(on_power[i]))) {
        throw ValidationError("power_policy.on_power must be >= 0");
      }
    }
  }

  std::array<double, 2> operator()(const FadingDraw& d) const {
    if (kind == Kind::constant) return budget;
    return {d.h1 >= threshold[0] ? on_power[0] : 0.0, d.h2 >= threshold[1] ? on_power[1] : 0.0};
  }

  bool operator==(const PowerPolicy&) const = default;
};

/// Noise variances at Bob (sigma1_sq) and Eve (sigma2_sq).
struct NoiseVariances {
  double sigma1_sq = 1.0;
  double sigma2_sq = 1.0;

  void validate() const {
    if (!(sigma1_sq > 0.0) || !(sigma2_sq > 0.0)) throw ValidationError("noise variances must be positive");
  }
  bool operator==(const NoiseVariances&) const = default;
};

struct CapacityTerms {
  double C1 = 0.0, C2 = 0.0;    ///< single-user rates at Bob
  double C1e = 0.0, C2e = 0.0;  ///< Eve, other user's signal as noise
  double C = 0.0;               ///< sum rate at Bob
};

inline double half_log2_1p(double snr) { return 0.5 * std::log2(1.0 + snr); }

inline CapacityTerms capacity_terms(const FadingDraw& d, std::array<double, 2> p, const NoiseVariances& noise) {
  noise.validate();
  CapacityTerms t;
  t.C1 = half_log2_1p(d.h1 * p[0] / noise.sigma1_sq);
  t.C2 = half_log2_1p(d.h2 * p[1] / noise.sigma1_sq);
  t.C1e = half_log2_1p(d.g1 * p[0] / (noise.sigma2_sq + d.g2 * p[1]));
  t.C2e = half_log2_1p(d.g2 * p[1] / (noise.sigma2_sq + d.g1 * p[0]));
  t.C = half_log2_1p((d.h1 * p[0] + d.h2 * p[1]) / noise.sigma1_sq);
  return t;
}

/// Fresh wiretap-coded bits of each user in part 1: floor(n1 (Ci - Cie)^+),
/// and nothing when hi <= gi.
inline std::array<std::uint64_t, 2> secrecy_increment(const FadingDraw& d, std::array<double, 2> p,
                                                      const NoiseVariances& noise, std::uint64_t n1) {
  const CapacityTerms t = capacity_terms(d, p, noise);
  const double n = static_cast<double>(n1);
  return {d.h1 > d.g1 ? floor_bits(n * std::max(t.C1 - t.C1e, 0.0)) : 0,
          d.h2 > d.g2 ? floor_bits(n * std::max(t.C2 - t.C2e, 0.0)) : 0};
}

struct FadingSlot {
  FadingDraw draw;
  std::array<double, 2> power{};
  CapacityTerms terms;
  std::array<SlotRecord, 2> records;
};

struct ErgodicReport {
  std::uint64_t horizon = 0;
  std::array<double, 2> avg_power{};
  std::array<double, 2> power_budget{};
  std::array<double, 2> avg_rate{};          ///< all bits / (K n)
  std::array<double, 2> avg_keyed_rate{};    ///< keyed bits / (K n2)
  std::array<double, 2> avg_wiretap_rate{};  ///< wiretap bits / (K n1)
  std::array<double, 2> target_rate{};       ///< sample mean of Ci: the l -> infinity limit
  std::array<double, 2> target_rate_half{};  ///< half of target_rate, the displayed prefactor
  double target_sum = 0.0;                   ///< sample mean of C
  double target_sum_half = 0.0;
  std::array<double, 2> first_part_rate{};   ///< sample mean of (Ci - Cie)^+ on slots with hi > gi
  std::array<double, 2> dilution{};          ///< (target - first_part) / (l + 1)
  std::array<double, 2> eve_benchmark{};     ///< sample mean of (Ci - Cie)^+
  double eve_benchmark_sum = 0.0;            ///< sample mean of (C - C1e - C2e)^+
  std::array<std::uint64_t, 2> final_buffer{};
  std::array<std::uint64_t, 2> min_buffer_last_decade{};
  std::array<double, 2> frac_h_gt_g{};
  std::array<double, 2> limsup_surrogate{};  ///< max running avg_rate over slots [K/10, K]
  std::array<std::uint64_t, 2> n2_observed{1, 1};
  bool csi_at_transmitters = true;
};

struct FadingRun {
  ErgodicReport report;
  std::vector<FadingSlot> ledger;  ///< empty unless requested
};

struct FadingOptions {
  bool csi_at_transmitters = true;  ///< false: transmitters ignore the policy and send at the budget
  bool keep_ledger = true;
};

/// Simulates K slots of the key-recycling scheme on the block-fading MAC-WT.
/// Part 1 carries secrecy_increment bits, part 2 carries
/// min(eligible key bits, floor(n2 Ci)) keyed bits.
inline FadingRun run_fading(const GainModel& model, const PowerPolicy& policy, const SlotConfig& cfg,
                            const NoiseVariances& noise, std::uint64_t horizon, FadingOptions opts = {}) {
  if (horizon == 0) throw ArgumentError("run_fading: horizon must be >= 1");
  model.validate();
  policy.validate();
  noise.validate();
  cfg.validate();

  GainProcess gains(model);
  ProtocolState state(cfg);
  FadingRun run;
  if (opts.keep_ledger) run.ledger.reserve(horizon);
  ErgodicReport& rep = run.report;
  rep.horizon = horizon;
  rep.power_budget = policy.budget;
  rep.csi_at_transmitters = opts.csi_at_transmitters;

  const double n1 = static_cast<double>(cfg.n1);
  const double n2 = static_cast<double>(cfg.n2());
  const double n = static_cast<double>(cfg.n());
  const std::uint64_t decade_start = std::max<std::uint64_t>(1, horizon / 10);

  std::array<double, 2> power_sum{}, c_sum{}, first_sum{}, bench_sum{};
  std::array<std::uint64_t, 2> keyed{}, wiretap{}, positive{};
  double csum = 0.0, bench_total = 0.0;
  rep.min_buffer_last_decade = {UINT64_MAX, UINT64_MAX};
  rep.limsup_surrogate = {0.0, 0.0};

  for (std::uint64_t k = 1; k <= horizon; ++k) {
    const FadingDraw d = gains.next();
    const std::array<double, 2> p = opts.csi_at_transmitters ? policy(d) : policy.budget;
    const CapacityTerms t = capacity_terms(d, p, noise);
    const auto fresh = secrecy_increment(d, p, noise, cfg.n1);
    const std::array<double, 2> ci{t.C1, t.C2};
    const std::array<double, 2> cie{t.C1e, t.C2e};
    const std::array<bool, 2> advantage{d.h1 > d.g1, d.h2 > d.g2};

    SlotPlan plan;
    for (int u = 0; u < 2; ++u) {
      plan.users[u].wiretap_bits = fresh[u];
      plan.users[u].keyed_bits = std::min(state.eligible_bits(u + 1), floor_bits(n2 * ci[u]));
    }
    auto rec = state.advance(plan);

    csum += t.C;
    bench_total += std::max(t.C - t.C1e - t.C2e, 0.0);
    for (int u = 0; u < 2; ++u) {
      power_sum[u] += p[u];
      c_sum[u] += ci[u];
      const double gap = std::max(ci[u] - cie[u], 0.0);
      bench_sum[u] += gap;
      if (advantage[u]) {
        ++positive[u];
        first_sum[u] += gap;
      }
      keyed[u] += rec[u].keyed_bits;
      wiretap[u] += rec[u].wiretap_bits;
      if (!rec[u].satisfies_window(cfg.N1)) rep.n2_observed[u] = k + 1;
      if (k >= decade_start) {
        const double kk = static_cast<double>(k);
        rep.limsup_surrogate[u] =
            std::max(rep.limsup_surrogate[u], static_cast<double>(keyed[u] + wiretap[u]) / (kk * n));
        rep.min_buffer_last_decade[u] = std::min(rep.min_buffer_last_decade[u], rec[u].buffer_after);
      }
    }
    if (opts.keep_ledger) run.ledger.push_back({d, p, t, std::move(rec)});
  }

  const double K = static_cast<double>(horizon);
  const double l = static_cast<double>(cfg.l);
  for (int u = 0; u < 2; ++u) {
    rep.avg_power[u] = power_sum[u] / K;
    rep.avg_keyed_rate[u] = static_cast<double>(keyed[u]) / (K * n2);
    rep.avg_wiretap_rate[u] = static_cast<double>(wiretap[u]) / (K * n1);
    rep.avg_rate[u] = static_cast<double>(keyed[u] + wiretap[u]) / (K * n);
    rep.target_rate[u] = c_sum[u] / K;
    rep.target_rate_half[u] = 0.5 * rep.target_rate[u];
    rep.first_part_rate[u] = first_sum[u] / K;
    rep.dilution[u] = (rep.target_rate[u] - rep.first_part_rate[u]) / (l + 1.0);
    rep.eve_benchmark[u] = bench_sum[u] / K;
    rep.final_buffer[u] = state.buffer(u + 1).total_bits();
    rep.frac_h_gt_g[u] = static_cast<double>(positive[u]) / K;
  }
  rep.target_sum = csum / K;
  rep.target_sum_half = 0.5 * rep.target_sum;
  rep.eve_benchmark_sum = bench_total / K;
  return run;
}

struct PowerCheck {
  bool pass = true;
  std::array<double, 2> average{};
  std::array<std::vector<double>, 2> running;  ///< running mean after each slot
};

/// Pass iff the mean used power of each user is at most budget * (1 + 1e-6).
inline PowerCheck check_power_constraint(const std::vector<FadingSlot>& ledger, const PowerPolicy& policy) {
  if (ledger.empty()) throw ArgumentError("check_power_constraint: empty ledger");
  PowerCheck c;
  std::array<double, 2> sum{};
  for (std::size_t k = 0; k < ledger.size(); ++k) {
    for (int u = 0; u < 2; ++u) {
      sum[u] += ledger[k].power[u];
      c.running[u].push_back(sum[u] / static_cast<double>(k + 1));
    }
  }
  for (int u = 0; u < 2; ++u) {
    c.average[u] = c.running[u].back();
    if (c.average[u] > policy.budget[u] * (1.0 + 1e-6)) c.pass = false;
  }
  return c;
}

inline CsvWriter fading_ledger_csv(const std::vector<FadingSlot>& ledger) {
  CsvWriter csv({"slot", "h1", "h2", "g1", "g2", "P1", "P2", "C1", "C2", "C1e", "C2e", "C", "wiretap_bits_1",
                 "keyed_bits_1", "buffer1", "wiretap_bits_2", "keyed_bits_2", "buffer2"});
  for (const auto& s : ledger) {
    csv.row({fmt_int(s.draw.slot), fmt_double(s.draw.h1), fmt_double(s.draw.h2), fmt_double(s.draw.g1),
             fmt_double(s.draw.g2), fmt_double(s.power[0]), fmt_double(s.power[1]), fmt_double(s.terms.C1),
             fmt_double(s.terms.C2), fmt_double(s.terms.C1e), fmt_double(s.terms.C2e), fmt_double(s.terms.C),
             fmt_int(s.records[0].wiretap_bits), fmt_int(s.records[0].keyed_bits), fmt_int(s.records[0].buffer_after),
             fmt_int(s.records[1].wiretap_bits), fmt_int(s.records[1].keyed_bits),
             fmt_int(s.records[1].buffer_after)});
  }
  return csv;
}

/// Flat JSON; per-user fields are suffixed _1 and _2.
inline nlohmann::ordered_json ergodic_report_json(const ErgodicReport& r) {
  nlohmann::ordered_json j;
  j["horizon"] = r.horizon;
  j["csi_at_transmitters"] = r.csi_at_transmitters;
  auto pair = [&](const std::string& name, const auto& v) {
    j[name + "_1"] = v[0];
    j[name + "_2"] = v[1];
  };
  pair("avg_power", r.avg_power);
  pair("power_budget", r.power_budget);
  pair("avg_rate", r.avg_rate);
  pair("avg_keyed_rate", r.avg_keyed_rate);
  pair("avg_wiretap_rate", r.avg_wiretap_rate);
  pair("target_rate", r.target_rate);
  pair("target_rate_half", r.target_rate_half);
  j["target_sum"] = r.target_sum;
  j["target_sum_half"] = r.target_sum_half;
  pair("first_part_rate", r.first_part_rate);
  pair("dilution", r.dilution);
  pair("eve_benchmark", r.eve_benchmark);
  j["eve_benchmark_sum"] = r.eve_benchmark_sum;
  pair("final_buffer", r.final_buffer);
  pair("min_buffer_last_decade", r.min_buffer_last_decade);
  pair("frac_h_gt_g", r.frac_h_gt_g);
  pair("limsup_surrogate", r.limsup_surrogate);
  pair("n2_observed", r.n2_observed);
  return j;
}

}  // namespace macwt
