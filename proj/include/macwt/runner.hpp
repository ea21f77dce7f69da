#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "macwt/channel.hpp"
#include "macwt/codec.hpp"
#include "macwt/errors.hpp"
#include "macwt/fading.hpp"
#include "macwt/format.hpp"
#include "macwt/information.hpp"
#include "macwt/leakage.hpp"
#include "macwt/protocol.hpp"
#include "macwt/random.hpp"
#include "macwt/rate_region.hpp"
#include "macwt/scenario.hpp"

namespace macwt {

inline constexpr const char* kVersion = "0.1.0";

/// 64-bit FNV-1a, hex encoded.
inline std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xf];
  return out;
}

inline std::string scenario_hash(const Scenario& s) { return fnv1a_hex(scenario_to_json(s).dump()); }

// ---------------------------------------------------------------------------
// Plot data

struct LeakagePoint {
  std::size_t n = 0;
  double mean_rate = 0.0;
  std::size_t seeds = 0;
};

/// Results a run hands to emit_plotdata. Absent parts produce no file.
struct RunArtifacts {
  std::optional<RateRegion> secrecy_region;
  std::optional<RateRegion> capacity_region;
  std::optional<RampSchedule> schedule;
  std::uint64_t l = 1;
  std::optional<std::vector<std::array<std::uint64_t, 2>>> buffer;  ///< buffer after each slot
  std::optional<std::vector<LeakagePoint>> leakage_vs_n;
};

inline CsvWriter plot_regions_csv(const RateRegion* secrecy, const RateRegion* capacity) {
  CsvWriter csv({"region", "r1", "r2"});
  for (auto [name, r] : {std::pair{"secrecy", secrecy}, std::pair{"capacity", capacity}}) {
    if (!r) continue;
    for (const auto& v : r->vertices) csv.row({name, fmt_double(v.r1), fmt_double(v.r2)});
  }
  return csv;
}

/// Second-part rate per keyed slot.
inline CsvWriter plot_staircase_csv(const RampSchedule* s) {
  CsvWriter csv({"slot", "r1", "r2"});
  if (!s) return csv;
  for (const auto& step : s->per_slot) {
    csv.row({fmt_int(step.slot), fmt_double(step.second_part.r1), fmt_double(step.second_part.r2)});
  }
  return csv;
}

inline CsvWriter plot_buffer_csv(const std::vector<std::array<std::uint64_t, 2>>& buffer) {
  CsvWriter csv({"slot", "buffer1", "buffer2"});
  for (std::size_t k = 0; k < buffer.size(); ++k) {
    csv.row({fmt_int(k + 1), fmt_int(buffer[k][0]), fmt_int(buffer[k][1])});
  }
  return csv;
}

inline CsvWriter plot_leakage_csv(const std::vector<LeakagePoint>& points) {
  CsvWriter csv({"n", "mean_leakage_rate", "seeds"});
  for (const auto& p : points) csv.row({fmt_int(p.n), fmt_double(p.mean_rate), fmt_int(p.seeds)});
  return csv;
}

struct OutputFile {
  std::string file;
  std::string module;
  std::string operation;
};

/// Writes one CSV per figure for the parts present in `a`.
inline std::vector<OutputFile> emit_plotdata(const RunArtifacts& a, const std::filesystem::path& dir) {
  std::vector<OutputFile> out;
  if (a.secrecy_region || a.capacity_region) {
    plot_regions_csv(a.secrecy_region ? &*a.secrecy_region : nullptr, a.capacity_region ? &*a.capacity_region : nullptr)
        .save((dir / "plot_regions.csv").string());
    out.push_back({"plot_regions.csv", "cli-runner", "emit_plotdata"});
  }
  if (a.schedule) {
    plot_staircase_csv(&*a.schedule).save((dir / "plot_staircase.csv").string());
    out.push_back({"plot_staircase.csv", "cli-runner", "emit_plotdata"});
  }
  if (a.buffer) {
    plot_buffer_csv(*a.buffer).save((dir / "plot_buffer.csv").string());
    out.push_back({"plot_buffer.csv", "cli-runner", "emit_plotdata"});
  }
  if (a.leakage_vs_n) {
    plot_leakage_csv(*a.leakage_vs_n).save((dir / "plot_leakage_vs_n.csv").string());
    out.push_back({"plot_leakage_vs_n.csv", "cli-runner", "emit_plotdata"});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Leakage audit helpers

/// Deterministic keyed-part code: row m is the bits of m tiled to length n.
inline BinningCodebook tiled_bits_code(int user, std::size_t n, unsigned message_bits) {
  if (message_bits == 0 || message_bits > n) throw ArgumentError("tiled_bits_code: need 1 <= message_bits <= n");
  std::vector<std::uint8_t> table;
  for (std::size_t m = 0; m < (std::size_t{1} << message_bits); ++m) {
    const auto bits = index_to_bits(m, message_bits);
    for (std::size_t t = 0; t < n; ++t) table.push_back(bits[t % message_bits]);
  }
  return codebook_from_table(user, 2, n, message_bits, 0, std::move(table));
}

struct TwoSlotAudit {
  double slot1 = 0.0;     ///< I(W1^(1); Z1 | X1^(2))
  double two_slot = 0.0;  ///< I(W2^(1); Z1, Z2 | X2^(2))
};

/// Two-slot audit on a binary-input channel with random part-1 codebooks
/// (seeds derive_seed(seed, 0) and derive_seed(seed, 1)) and tiled keyed codes.
inline TwoSlotAudit two_slot_audit(const MacWiretapChannel& ch, const InputDistribution& q, std::size_t n1,
                                   std::size_t l, unsigned message_bits, unsigned confusion_bits, std::uint64_t seed) {
  if (ch.x1_size() != 2 || ch.x2_size() != 2) throw ArgumentError("two-slot audit needs binary inputs");
  TwoSlotCodes u1{build_codebook(ch, q, 1, n1, message_bits, confusion_bits, derive_seed(seed, 0)),
                  tiled_bits_code(1, l * n1, message_bits)};
  TwoSlotCodes u2{build_codebook(ch, q, 2, n1, message_bits, confusion_bits, derive_seed(seed, 1)),
                  tiled_bits_code(2, l * n1, message_bits)};
  TwoSlotAudit r;
  r.slot1 = exact_leakage(wiretap_slot_model(ch, u1.wiretap, u2.wiretap, LeakageTarget::individual1));
  r.two_slot = exact_leakage(two_slot_model(ch, u1, u2, 1));
  return r;
}

/// Bits per block for a sweep entry at blocklength n.
inline std::pair<unsigned, unsigned> sweep_bits(std::size_t n, double rate, double confusion_rate) {
  const double nn = static_cast<double>(n);
  const auto mb = std::max<std::uint64_t>(1, floor_bits(nn * rate));
  return {static_cast<unsigned>(mb), static_cast<unsigned>(floor_bits(nn * confusion_rate))};
}

// ---------------------------------------------------------------------------
// Runner

struct RunResult {
  std::filesystem::path output_dir;
  std::vector<OutputFile> outputs;
  RunArtifacts artifacts;
};

namespace detail {

inline void save_json(const nlohmann::ordered_json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
}

inline nlohmann::ordered_json info_terms_json(const InfoTerms& t) {
  nlohmann::ordered_json j;
  j["i_x1_y_given_x2"] = t.i_x1_y_given_x2;
  j["i_x2_y_given_x1"] = t.i_x2_y_given_x1;
  j["i_x12_y"] = t.i_x12_y;
  j["i_x1_z"] = t.i_x1_z;
  j["i_x2_z"] = t.i_x2_z;
  return j;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline InfoTerms scenario_terms(const Scenario& s) {
  if (s.info_terms) return *s.info_terms;
  const auto ch = s.channel->resolve();
  return info_terms(ch, s.input ? *s.input : InputDistribution::uniform(ch));
}

}  // namespace detail

/// Executes a validated scenario, writing artifacts and manifest.json into
/// s.output_dir. Every file except the manifest is a pure function of the scenario.
inline RunResult run(const Scenario& s) {
  namespace fs = std::filesystem;
  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = detail::utc_timestamp();
  RunResult res;
  res.output_dir = s.output_dir;
  fs::create_directories(res.output_dir);
  const fs::path dir = res.output_dir;
  auto& outs = res.outputs;
  auto& art = res.artifacts;

  switch (s.mode) {
    case Mode::region: {
      const auto ch = s.channel->resolve();
      const auto grid = s.input ? std::vector<InputDistribution>{*s.input} : uniform_grid(ch, s.grid);
      art.secrecy_region = hull_over_inputs(ch, grid, RegionKind::secrecy);
      art.capacity_region = hull_over_inputs(ch, grid, RegionKind::capacity);
      region_csv(*art.secrecy_region).save((dir / "region_secrecy.csv").string());
      region_csv(*art.capacity_region).save((dir / "region_capacity.csv").string());
      outs.push_back({"region_secrecy.csv", "rate-regions", "hull_over_inputs"});
      outs.push_back({"region_capacity.csv", "rate-regions", "hull_over_inputs"});
      nlohmann::ordered_json j;
      j["grid_points"] = grid.size();
      j["secrecy_vertices"] = art.secrecy_region->vertices.size();
      j["capacity_vertices"] = art.capacity_region->vertices.size();
      j["uniform_input_terms"] = detail::info_terms_json(info_terms(ch, InputDistribution::uniform(ch)));
      detail::save_json(j, dir / "region_summary.json");
      outs.push_back({"region_summary.json", "channel-core", "info_terms"});
      break;
    }
    case Mode::ramp: {
      const InfoTerms t = detail::scenario_terms(s);
      art.schedule = ramp_schedule(t);
      art.l = s.slot.l;
      schedule_csv(*art.schedule, s.slot.l).save((dir / "schedule.csv").string());
      outs.push_back({"schedule.csv", "rate-regions", "ramp_schedule"});
      nlohmann::ordered_json j;
      j["info_terms"] = detail::info_terms_json(t);
      j["lambda1"] = art.schedule->lambda1 ? nlohmann::ordered_json(*art.schedule->lambda1) : nullptr;
      j["lambda2"] = art.schedule->lambda2 ? nlohmann::ordered_json(*art.schedule->lambda2) : nullptr;
      j["lambda_star"] = art.schedule->lambda_star;
      j["first_part"] = {art.schedule->first_part.r1, art.schedule->first_part.r2};
      j["saturated"] = {art.schedule->saturated.r1, art.schedule->saturated.r2};
      const RatePair avg = slot_average_rate(art.schedule->saturated, art.schedule->first_part, s.slot.l);
      j["slot_average_saturated"] = {avg.r1, avg.r2};
      detail::save_json(j, dir / "ramp.json");
      outs.push_back({"ramp.json", "rate-regions", "ramp_schedule"});
      break;
    }
    case Mode::protocol: {
      ProtocolRates rates;
      if (s.rates) {
        rates = *s.rates;
      } else {
        art.schedule = ramp_schedule(detail::scenario_terms(s));
        rates = ProtocolRates::from(*art.schedule);
      }
      const ProtocolRun pr = run_protocol(s.slot, rates, s.horizon);
      ledger_csv(pr).save((dir / "ledger.csv").string());
      outs.push_back({"ledger.csv", "slot-protocol", "run_protocol"});
      art.buffer.emplace();
      for (const auto& slot : pr.slots) art.buffer->push_back({slot[0].buffer_after, slot[1].buffer_after});
      nlohmann::ordered_json j;
      j["horizon"] = s.horizon;
      j["wiretap_rate"] = {rates.wiretap.r1, rates.wiretap.r2};
      j["keyed_cap"] = {rates.keyed_cap.r1, rates.keyed_cap.r2};
      j["n2_observed"] = pr.n2_observed;
      j["avg_keyed_rate"] = pr.avg_keyed_rate;
      j["avg_wiretap_rate"] = pr.avg_wiretap_rate;
      j["avg_rate"] = pr.avg_rate;
      j["final_buffer"] = art.buffer->back();
      detail::save_json(j, dir / "protocol_summary.json");
      outs.push_back({"protocol_summary.json", "slot-protocol", "run_protocol"});
      break;
    }
    case Mode::leakage_audit: {
      const auto ch = s.channel->resolve();
      const auto q = s.input ? *s.input : InputDistribution::uniform(ch);
      // Budgets are epsilon times the audited block's part-1 length (and whole slot).
      const double eps = s.slot.epsilon;
      std::vector<LeakageReport> reports;
      for (std::size_t i = 0; i < s.leakage.size(); ++i) {
        const LeakageAudit& a = s.leakage[i];
        const std::uint64_t seed = derive_seed(s.seed, i);
        const std::string tag = "audit" + std::to_string(i) + "_" + a.kind;
        if (a.kind == "otp") {
          reports.push_back(exact_leakage(otp_model(a.bits), tag + "_" + std::to_string(a.bits), a.bits * eps, a.bits * eps));
        } else if (a.kind == "wiretap") {
          const auto cb1 = build_codebook(ch, q, 1, a.n, a.message_bits, a.confusion_bits, derive_seed(seed, 0));
          const auto cb2 = build_codebook(ch, q, 2, a.n, a.message_bits, a.confusion_bits, derive_seed(seed, 1));
          const LeakageTarget target = a.target == "individual1"   ? LeakageTarget::individual1
                                       : a.target == "individual2" ? LeakageTarget::individual2
                                                                   : LeakageTarget::collective;
          reports.push_back(exact_leakage(wiretap_slot_model(ch, cb1, cb2, target), tag, a.n * eps, a.n * eps));
        } else if (a.kind == "two_slot") {
          const TwoSlotAudit r = two_slot_audit(ch, q, a.n, a.l, a.message_bits, a.confusion_bits, seed);
          const double b1 = static_cast<double>(a.n) * eps;
          const double bs = static_cast<double>(a.n * (a.l + 1)) * eps;
          reports.push_back(make_report(tag + "_slot1", "I(W1^(1);Z1|X1^(2))", r.slot1, b1, bs));
          reports.push_back(make_report(tag, "I(W2^(1);Z1,Z2|X2^(2))", r.two_slot, b1, bs));
        } else {
          if (!art.leakage_vs_n) art.leakage_vs_n.emplace();
          for (std::size_t n : a.ns) {
            const auto [mb, cb] = sweep_bits(n, a.rate, a.confusion_rate);
            const double v = mean_wiretap_leakage_rate(ch, q, n, mb, cb, seed, a.seeds);
            art.leakage_vs_n->push_back({n, v, a.seeds});
            reports.push_back(
                make_report(tag + "_n" + std::to_string(n), "mean I(W1;Z^n|X2^n)/n", v, eps, eps));
          }
        }
      }
      leakage_csv(reports).save((dir / "leakage.csv").string());
      outs.push_back({"leakage.csv", "binning-codec", "exact_leakage"});
      break;
    }
    case Mode::fading: {
      GainModel gm = *s.gain_model;
      gm.seed = s.seed;
      const FadingRun fr = run_fading(gm, *s.power_policy, s.slot, s.noise, s.horizon, {s.csi_at_transmitters, true});
      fading_ledger_csv(fr.ledger).save((dir / "fading_ledger.csv").string());
      outs.push_back({"fading_ledger.csv", "fading-sim", "run_fading"});
      auto j = ergodic_report_json(fr.report);
      const PowerCheck pc = check_power_constraint(fr.ledger, *s.power_policy);
      j["power_constraint_pass"] = pc.pass;
      detail::save_json(j, dir / "ergodic_report.json");
      outs.push_back({"ergodic_report.json", "fading-sim", "run_fading"});
      art.buffer.emplace();
      for (const auto& slot : fr.ledger) {
        art.buffer->push_back({slot.records[0].buffer_after, slot.records[1].buffer_after});
      }
      break;
    }
  }

  for (auto& f : emit_plotdata(art, dir)) outs.push_back(std::move(f));

  const auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  nlohmann::ordered_json m;
  m["scenario_hash"] = scenario_hash(s);
  m["seed"] = s.seed;
  m["mode"] = to_string(s.mode);
  m["version"] = kVersion;
  m["started_at"] = started;
  m["elapsed_ms"] = elapsed;
  m["outputs"] = nlohmann::ordered_json::array();
  for (const auto& f : outs) {
    m["outputs"].push_back({{"file", f.file}, {"module", f.module}, {"operation", f.operation}});
  }
  detail::save_json(m, dir / "manifest.json");
  return res;
}

}  // namespace macwt
