#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "macwt/channel.hpp"
#include "macwt/errors.hpp"
#include "macwt/fading.hpp"
#include "macwt/information.hpp"
#include "macwt/protocol.hpp"

namespace macwt {

enum class Mode { region, ramp, protocol, leakage_audit, fading };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::region: return "region";
    case Mode::ramp: return "ramp";
    case Mode::protocol: return "protocol";
    case Mode::leakage_audit: return "leakage-audit";
    case Mode::fading: return "fading";
  }
  return "?";
}

inline Mode parse_mode(const std::string& s) {
  if (s == "region") return Mode::region;
  if (s == "ramp") return Mode::ramp;
  if (s == "protocol") return Mode::protocol;
  if (s == "leakage-audit") return Mode::leakage_audit;
  if (s == "fading") return Mode::fading;
  throw ValidationError("mode: unknown mode '" + s + "'");
}

/// Where the discrete channel comes from. Exactly one of preset / file / inline.
struct ChannelSpec {
  std::string preset;        ///< "binary_xor" or "noiseless_pair"
  double bob_flip = 0.0;     ///< binary_xor
  double eve_flip = 0.0;     ///< binary_xor
  bool eve_taps_x1 = true;   ///< binary_xor
  bool eve_taps_x2 = true;   ///< binary_xor
  std::string file;          ///< path, resolved against the scenario's directory
  std::optional<MacWiretapChannel> inline_channel;

  MacWiretapChannel resolve() const {
    if (inline_channel) return *inline_channel;
    if (!file.empty()) return load_channel_file(file);
    if (preset == "binary_xor") return binary_xor_channel(bob_flip, eve_flip, eve_taps_x1, eve_taps_x2);
    if (preset == "noiseless_pair") return noiseless_pair_channel();
    throw ValidationError("channel.preset: unknown preset '" + preset + "'");
  }

  bool operator==(const ChannelSpec&) const = default;
};

/// One entry of a leakage audit.
///  otp       : bits
///  wiretap   : n, message_bits, confusion_bits, target
///  two_slot  : n1, l, message_bits, confusion_bits (keyed part uses a repetition code)
///  sweep     : ns, rate, confusion_rate, seeds
struct LeakageAudit {
  std::string kind;
  unsigned bits = 0;
  std::size_t n = 0;
  std::size_t l = 1;
  unsigned message_bits = 0;
  unsigned confusion_bits = 0;
  std::string target = "individual1";
  std::vector<std::size_t> ns;
  double rate = 0.0;
  double confusion_rate = 0.0;
  std::size_t seeds = 1;

  bool operator==(const LeakageAudit&) const = default;
};

struct Scenario {
  Mode mode = Mode::region;
  std::uint64_t seed = 0;
  std::uint64_t horizon = 100;
  std::string output_dir = "out";
  std::optional<ChannelSpec> channel;
  std::optional<InfoTerms> info_terms;
  std::optional<InputDistribution> input;
  std::optional<ProtocolRates> rates;
  SlotConfig slot;
  std::size_t grid = 11;
  // fading
  std::optional<GainModel> gain_model;
  std::optional<PowerPolicy> power_policy;
  NoiseVariances noise;
  bool csi_at_transmitters = true;
  // leakage-audit
  std::vector<LeakageAudit> leakage;

  bool operator==(const Scenario& o) const {
    return mode == o.mode && seed == o.seed && horizon == o.horizon && output_dir == o.output_dir &&
           channel == o.channel && info_terms == o.info_terms && input == o.input && rates_equal(o) &&
           slot == o.slot && grid == o.grid && gain_model == o.gain_model && power_policy == o.power_policy &&
           noise == o.noise && csi_at_transmitters == o.csi_at_transmitters && leakage == o.leakage;
  }

 private:
  bool rates_equal(const Scenario& o) const {
    if (rates.has_value() != o.rates.has_value()) return false;
    if (!rates) return true;
    return rates->wiretap == o.rates->wiretap && rates->keyed_cap == o.rates->keyed_cap;
  }
};

namespace detail {

using nlohmann::json;

/// Field access with messages that name the offending path.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_ + ": expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }
  std::string name(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
  const json& at(const char* key) const { return j_.at(key); }

  void allow(std::initializer_list<const char*> keys) const {
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!ok.count(it.key())) throw ValidationError(name(it.key().c_str()) + ": unknown field");
    }
  }

  double number(const char* key, std::optional<double> dflt = std::nullopt) const {
    if (!has(key)) {
      if (dflt) return *dflt;
      throw ValidationError(name(key) + ": required field missing");
    }
    if (!at(key).is_number()) throw ValidationError(name(key) + ": expected a number");
    return at(key).get<double>();
  }

  std::uint64_t u64(const char* key, std::optional<std::uint64_t> dflt = std::nullopt) const {
    if (!has(key)) {
      if (dflt) return *dflt;
      throw ValidationError(name(key) + ": required field missing");
    }
    if (!at(key).is_number_unsigned() && !(at(key).is_number_integer() && at(key).get<std::int64_t>() >= 0)) {
      throw ValidationError(name(key) + ": expected a nonnegative integer");
    }
    return at(key).get<std::uint64_t>();
  }

  bool boolean(const char* key, bool dflt) const {
    if (!has(key)) return dflt;
    if (!at(key).is_boolean()) throw ValidationError(name(key) + ": expected true or false");
    return at(key).get<bool>();
  }

  std::string string(const char* key, std::optional<std::string> dflt = std::nullopt) const {
    if (!has(key)) {
      if (dflt) return *dflt;
      throw ValidationError(name(key) + ": required field missing");
    }
    if (!at(key).is_string()) throw ValidationError(name(key) + ": expected a string");
    return at(key).get<std::string>();
  }

  std::vector<double> numbers(const char* key) const {
    if (!has(key) || !at(key).is_array()) throw ValidationError(name(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : at(key)) {
      if (!v.is_number()) throw ValidationError(name(key) + ": expected an array of numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }

  std::array<double, 2> pair(const char* key, std::optional<std::array<double, 2>> dflt = std::nullopt) const {
    if (!has(key) && dflt) return *dflt;
    const auto v = numbers(key);
    if (v.size() != 2) throw ValidationError(name(key) + ": expected two numbers");
    return {v[0], v[1]};
  }

  Fields sub(const char* key) const {
    if (!has(key)) throw ValidationError(name(key) + ": required field missing");
    return Fields(at(key), name(key));
  }

 private:
  const json& j_;
  std::string path_;
};

inline GainDistribution gain_from_json(const Fields& f) {
  f.allow({"kind", "mean", "value", "low", "high"});
  const std::string kind = f.string("kind");
  GainDistribution g;
  if (kind == "exponential") {
    g = GainDistribution::exponential(f.number("mean", 1.0));
  } else if (kind == "constant") {
    g = GainDistribution::constant(f.number("value"));
  } else if (kind == "uniform") {
    g = GainDistribution::uniform(f.number("low"), f.number("high"));
  } else {
    throw ValidationError(f.name("kind") + ": unknown gain distribution '" + kind + "'");
  }
  return g;
}

inline json gain_to_json(const GainDistribution& g) {
  switch (g.kind) {
    case GainDistribution::Kind::exponential: return {{"kind", "exponential"}, {"mean", g.a}};
    case GainDistribution::Kind::constant: return {{"kind", "constant"}, {"value", g.a}};
    case GainDistribution::Kind::uniform: return {{"kind", "uniform"}, {"low", g.a}, {"high", g.b}};
  }
  return {};
}

inline std::string resolve_path(const std::string& p, const std::filesystem::path& base) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal().string();
}

}  // namespace detail

/// Parses and validates a scenario object. Relative channel file paths are
/// resolved against `base_dir`.
inline Scenario scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  using detail::Fields;
  Fields f(j, "");
  f.allow({"mode", "seed", "horizon", "output_dir", "channel", "info_terms", "input", "rates", "slot", "grid",
           "gain_model", "power_policy", "noise", "csi_at_transmitters", "leakage"});
  Scenario s;
  s.mode = parse_mode(f.string("mode"));
  s.seed = f.u64("seed");
  const bool fading = s.mode == Mode::fading;
  s.horizon = f.u64("horizon", fading ? 10000 : 100);
  if (s.horizon == 0) throw ValidationError("horizon: must be >= 1");
  s.output_dir = f.string("output_dir", std::string("out"));

  for (const char* key : {"gain_model", "power_policy", "noise", "csi_at_transmitters"}) {
    if (!fading && f.has(key)) throw ValidationError(std::string(key) + ": only allowed in fading mode");
  }
  if (fading && f.has("channel")) throw ValidationError("channel: not used in fading mode");
  if (s.mode != Mode::leakage_audit && f.has("leakage")) {
    throw ValidationError("leakage: only allowed in leakage-audit mode");
  }
  if (s.mode != Mode::ramp && s.mode != Mode::protocol && f.has("info_terms")) {
    throw ValidationError("info_terms: only allowed in ramp and protocol modes");
  }
  if (s.mode != Mode::protocol && f.has("rates")) throw ValidationError("rates: only allowed in protocol mode");

  if (f.has("channel")) {
    Fields c = f.sub("channel");
    c.allow({"preset", "bob_flip", "eve_flip", "eve_taps_x1", "eve_taps_x2", "file", "inline"});
    const int sources = int(c.has("preset")) + int(c.has("file")) + int(c.has("inline"));
    if (sources != 1) throw ValidationError("channel: exactly one of preset, file, inline is required");
    ChannelSpec spec;
    if (c.has("preset")) {
      spec.preset = c.string("preset");
      if (spec.preset == "binary_xor") {
        spec.bob_flip = c.number("bob_flip");
        spec.eve_flip = c.number("eve_flip");
        spec.eve_taps_x1 = c.boolean("eve_taps_x1", true);
        spec.eve_taps_x2 = c.boolean("eve_taps_x2", true);
      } else if (spec.preset == "noiseless_pair") {
        for (const char* k : {"bob_flip", "eve_flip", "eve_taps_x1", "eve_taps_x2"}) {
          if (c.has(k)) throw ValidationError(c.name(k) + ": not a parameter of preset noiseless_pair");
        }
      } else {
        throw ValidationError("channel.preset: unknown preset '" + spec.preset + "'");
      }
    } else if (c.has("file")) {
      spec.file = detail::resolve_path(c.string("file"), base_dir);
      if (!std::filesystem::exists(spec.file)) throw ValidationError("channel.file: '" + spec.file + "' does not exist");
    } else {
      try {
        spec.inline_channel = channel_from_json(c.at("inline"));
      } catch (const Error& e) {
        throw ValidationError(std::string("channel.inline: ") + e.what());
      }
    }
    try {
      spec.resolve();
    } catch (const ValidationError& e) {
      const std::string what = e.what();
      throw ValidationError(what.rfind("channel", 0) == 0 ? what : "channel: " + what);
    } catch (const Error& e) {
      throw ValidationError(std::string("channel: ") + e.what());
    }
    s.channel = spec;
  }

  if (f.has("info_terms")) {
    if (f.has("channel")) throw ValidationError("info_terms: give either channel or info_terms, not both");
    Fields t = f.sub("info_terms");
    t.allow({"i_x1_y_given_x2", "i_x2_y_given_x1", "i_x12_y", "i_x1_z", "i_x2_z"});
    InfoTerms it;
    it.i_x1_y_given_x2 = t.number("i_x1_y_given_x2");
    it.i_x2_y_given_x1 = t.number("i_x2_y_given_x1");
    it.i_x12_y = t.number("i_x12_y");
    it.i_x1_z = t.number("i_x1_z");
    it.i_x2_z = t.number("i_x2_z");
    for (double v : {it.i_x1_y_given_x2, it.i_x2_y_given_x1, it.i_x12_y, it.i_x1_z, it.i_x2_z}) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("info_terms: values must be finite and >= 0");
    }
    s.info_terms = it;
  }

  if (f.has("input")) {
    Fields q = f.sub("input");
    q.allow({"p1", "p2"});
    s.input = InputDistribution{q.numbers("p1"), q.numbers("p2")};
    InputDistribution::check_pmf(s.input->p1, "input.p1");
    InputDistribution::check_pmf(s.input->p2, "input.p2");
    if (s.channel) {
      try {
        s.input->validate(s.channel->resolve());
      } catch (const Error& e) {
        throw ValidationError(std::string("input: ") + e.what());
      }
    }
  }

  if (f.has("rates")) {
    Fields r = f.sub("rates");
    r.allow({"wiretap", "keyed_cap"});
    const auto w = r.pair("wiretap");
    const auto k = r.pair("keyed_cap");
    for (double v : {w[0], w[1], k[0], k[1]}) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("rates: values must be finite and >= 0");
    }
    s.rates = ProtocolRates{{w[0], w[1]}, {k[0], k[1]}};
  }

  if (f.has("slot")) {
    Fields c = f.sub("slot");
    c.allow({"n1", "l", "epsilon", "N1"});
    s.slot.n1 = c.u64("n1", 1);
    s.slot.l = c.u64("l", 1);
    s.slot.epsilon = c.number("epsilon", 0.1);
    s.slot.N1 = c.u64("N1", 0);
  }
  try {
    s.slot.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("slot: ") + e.what());
  }

  s.grid = static_cast<std::size_t>(f.u64("grid", 11));
  if (s.grid < 1) throw ValidationError("grid: must be >= 1");

  const bool needs_channel = s.mode == Mode::region || s.mode == Mode::leakage_audit;
  if (needs_channel && !s.channel) throw ValidationError("channel: required in " + std::string(to_string(s.mode)) + " mode");
  if ((s.mode == Mode::ramp || s.mode == Mode::protocol) && !s.channel && !s.info_terms && !s.rates) {
    throw ValidationError("channel: required (or info_terms) in " + std::string(to_string(s.mode)) + " mode");
  }

  if (fading) {
    if (!f.has("gain_model")) throw ValidationError("gain_model: required in fading mode");
    if (!f.has("power_policy")) throw ValidationError("power_policy: required in fading mode");
    Fields g = f.sub("gain_model");
    g.allow({"h1", "h2", "g1", "g2"});
    GainModel gm;
    gm.h1 = detail::gain_from_json(g.sub("h1"));
    gm.h2 = detail::gain_from_json(g.sub("h2"));
    gm.g1 = detail::gain_from_json(g.sub("g1"));
    gm.g2 = detail::gain_from_json(g.sub("g2"));
    gm.seed = s.seed;
    gm.validate();
    s.gain_model = gm;

    Fields p = f.sub("power_policy");
    p.allow({"kind", "budget", "on_power", "threshold"});
    const std::string kind = p.string("kind");
    if (kind == "constant") {
      const auto b = p.pair("budget");
      s.power_policy = PowerPolicy::constant(b[0], b[1]);
    } else if (kind == "on_off") {
      s.power_policy = PowerPolicy::on_off(p.pair("budget"), p.pair("on_power"), p.pair("threshold"));
    } else {
      throw ValidationError("power_policy.kind: unknown policy '" + kind + "'");
    }
    s.power_policy->validate();

    if (f.has("noise")) {
      Fields n = f.sub("noise");
      n.allow({"sigma1_sq", "sigma2_sq"});
      s.noise.sigma1_sq = n.number("sigma1_sq", 1.0);
      s.noise.sigma2_sq = n.number("sigma2_sq", 1.0);
    }
    if (!(s.noise.sigma1_sq > 0.0) || !(s.noise.sigma2_sq > 0.0)) {
      throw ValidationError("noise: variances must be positive");
    }
    s.csi_at_transmitters = f.boolean("csi_at_transmitters", true);
  }

  if (s.mode == Mode::leakage_audit) {
    if (!f.has("leakage") || !f.at("leakage").is_array() || f.at("leakage").empty()) {
      throw ValidationError("leakage: required nonempty array in leakage-audit mode");
    }
    std::size_t idx = 0;
    for (const auto& item : f.at("leakage")) {
      const std::string path = "leakage[" + std::to_string(idx++) + "]";
      Fields a(item, path);
      LeakageAudit audit;
      audit.kind = a.string("kind");
      if (audit.kind == "otp") {
        a.allow({"kind", "bits"});
        audit.bits = static_cast<unsigned>(a.u64("bits"));
        if (audit.bits < 1 || audit.bits > 12) throw ValidationError(path + ".bits: must be in [1, 12]");
      } else if (audit.kind == "wiretap") {
        a.allow({"kind", "n", "message_bits", "confusion_bits", "target"});
        audit.n = a.u64("n");
        audit.message_bits = static_cast<unsigned>(a.u64("message_bits"));
        audit.confusion_bits = static_cast<unsigned>(a.u64("confusion_bits", 0));
        audit.target = a.string("target", std::string("individual1"));
        if (audit.target != "individual1" && audit.target != "individual2" && audit.target != "collective") {
          throw ValidationError(path + ".target: expected individual1, individual2 or collective");
        }
        if (audit.n < 1) throw ValidationError(path + ".n: must be >= 1");
      } else if (audit.kind == "two_slot") {
        a.allow({"kind", "n", "l", "message_bits", "confusion_bits"});
        audit.n = a.u64("n");
        audit.l = a.u64("l", 1);
        audit.message_bits = static_cast<unsigned>(a.u64("message_bits"));
        audit.confusion_bits = static_cast<unsigned>(a.u64("confusion_bits", 0));
        if (audit.n < 1 || audit.l < 1) throw ValidationError(path + ": n and l must be >= 1");
      } else if (audit.kind == "sweep") {
        a.allow({"kind", "ns", "rate", "confusion_rate", "seeds"});
        for (double v : a.numbers("ns")) {
          if (!(v >= 1.0) || v != std::floor(v)) throw ValidationError(path + ".ns: expected positive integers");
          audit.ns.push_back(static_cast<std::size_t>(v));
        }
        if (audit.ns.empty()) throw ValidationError(path + ".ns: must be nonempty");
        audit.rate = a.number("rate");
        audit.confusion_rate = a.number("confusion_rate", 0.0);
        audit.seeds = a.u64("seeds", 20);
        if (!(audit.rate > 0.0) || audit.confusion_rate < 0.0 || audit.seeds < 1) {
          throw ValidationError(path + ": rate must be positive, confusion_rate >= 0, seeds >= 1");
        }
      } else {
        throw ValidationError(path + ".kind: unknown audit kind '" + audit.kind + "'");
      }
      s.leakage.push_back(std::move(audit));
    }
  }
  return s;
}

inline nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json j;
  j["mode"] = to_string(s.mode);
  j["seed"] = s.seed;
  j["horizon"] = s.horizon;
  j["output_dir"] = s.output_dir;
  if (s.channel) {
    const auto& c = *s.channel;
    if (c.inline_channel) {
      j["channel"] = {{"inline", channel_to_json(*c.inline_channel)}};
    } else if (!c.file.empty()) {
      j["channel"] = {{"file", c.file}};
    } else if (c.preset == "binary_xor") {
      j["channel"] = {{"preset", c.preset},
                      {"bob_flip", c.bob_flip},
                      {"eve_flip", c.eve_flip},
                      {"eve_taps_x1", c.eve_taps_x1},
                      {"eve_taps_x2", c.eve_taps_x2}};
    } else {
      j["channel"] = {{"preset", c.preset}};
    }
  }
  if (s.info_terms) {
    const auto& t = *s.info_terms;
    j["info_terms"] = {{"i_x1_y_given_x2", t.i_x1_y_given_x2}, {"i_x2_y_given_x1", t.i_x2_y_given_x1},
                       {"i_x12_y", t.i_x12_y},                 {"i_x1_z", t.i_x1_z},
                       {"i_x2_z", t.i_x2_z}};
  }
  if (s.input) j["input"] = {{"p1", s.input->p1}, {"p2", s.input->p2}};
  if (s.rates) {
    j["rates"] = {{"wiretap", {s.rates->wiretap.r1, s.rates->wiretap.r2}},
                  {"keyed_cap", {s.rates->keyed_cap.r1, s.rates->keyed_cap.r2}}};
  }
  j["slot"] = {{"n1", s.slot.n1}, {"l", s.slot.l}, {"epsilon", s.slot.epsilon}, {"N1", s.slot.N1}};
  j["grid"] = s.grid;
  if (s.mode == Mode::fading) {
    const auto& g = *s.gain_model;
    j["gain_model"] = {{"h1", detail::gain_to_json(g.h1)},
                       {"h2", detail::gain_to_json(g.h2)},
                       {"g1", detail::gain_to_json(g.g1)},
                       {"g2", detail::gain_to_json(g.g2)}};
    const auto& p = *s.power_policy;
    if (p.kind == PowerPolicy::Kind::constant) {
      j["power_policy"] = {{"kind", "constant"}, {"budget", p.budget}};
    } else {
      j["power_policy"] = {
          {"kind", "on_off"}, {"budget", p.budget}, {"on_power", p.on_power}, {"threshold", p.threshold}};
    }
    j["noise"] = {{"sigma1_sq", s.noise.sigma1_sq}, {"sigma2_sq", s.noise.sigma2_sq}};
    j["csi_at_transmitters"] = s.csi_at_transmitters;
  }
  if (s.mode == Mode::leakage_audit) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& a : s.leakage) {
      if (a.kind == "otp") {
        arr.push_back({{"kind", a.kind}, {"bits", a.bits}});
      } else if (a.kind == "wiretap") {
        arr.push_back({{"kind", a.kind},
                       {"n", a.n},
                       {"message_bits", a.message_bits},
                       {"confusion_bits", a.confusion_bits},
                       {"target", a.target}});
      } else if (a.kind == "two_slot") {
        arr.push_back({{"kind", a.kind},
                       {"n", a.n},
                       {"l", a.l},
                       {"message_bits", a.message_bits},
                       {"confusion_bits", a.confusion_bits}});
      } else {
        arr.push_back({{"kind", a.kind},
                       {"ns", a.ns},
                       {"rate", a.rate},
                       {"confusion_rate", a.confusion_rate},
                       {"seeds", a.seeds}});
      }
    }
    j["leakage"] = arr;
  }
  return j;
}

/// Reads, parses and validates a scenario file. Parse errors report the byte
/// offset and line.
inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open scenario '" + path + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ValidationError("scenario '" + path + "' line " + std::to_string(line) + ": " + e.what());
  }
  return scenario_from_json(j, std::filesystem::path(path).parent_path());
}

}  // namespace macwt
