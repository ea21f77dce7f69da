// macwt: run MAC wiretap scenarios from JSON files.
//
//   macwt <region|ramp|protocol|leakage-audit|fading> --scenario FILE
//         [--out DIR] [--seed U64] [--horizon K]
//
// Exit codes: 0 success, 2 validation, 3 capacity guard, 4 internal.
// Failures print one JSON error record on stderr.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "macwt/runner.hpp"
#include "macwt/scenario.hpp"

namespace {

int report_error(const std::string& kind, const std::string& message, int code) {
  nlohmann::ordered_json rec;
  rec["error"] = kind;
  rec["message"] = message;
  rec["exit_code"] = code;
  std::cerr << rec.dump() << '\n';
  return code;
}

int exit_code_for(const macwt::Error& e) {
  const std::string kind = e.kind();
  if (kind == "capacity") return 3;
  if (kind == "validation" || kind == "shape" || kind == "argument") return 2;
  return 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MAC wiretap channel simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> horizon;

  for (const char* mode : {"region", "ramp", "protocol", "leakage-audit", "fading"}) {
    auto* sub = app.add_subcommand(mode, std::string("run a ") + mode + " scenario");
    sub->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides the file)");
    sub->add_option("--seed", seed, "seed (overrides the file)");
    sub->add_option("--horizon", horizon, "horizon K in slots (overrides the file)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("argument", e.what(), 2);
  }

  const std::string mode = app.get_subcommands().front()->get_name();
  try {
    macwt::Scenario s = macwt::load_scenario(scenario_path);
    if (macwt::to_string(s.mode) != mode) {
      throw macwt::ValidationError("mode: scenario is '" + std::string(macwt::to_string(s.mode)) +
                                   "' but subcommand is '" + mode + "'");
    }
    if (out_dir) s.output_dir = *out_dir;
    if (seed) {
      s.seed = *seed;
      if (s.gain_model) s.gain_model->seed = *seed;
    }
    if (horizon) {
      if (*horizon == 0) throw macwt::ValidationError("horizon: must be >= 1");
      s.horizon = *horizon;
    }
    const auto res = macwt::run(s);
    std::cout << res.output_dir.string() << '\n';
    for (const auto& f : res.outputs) std::cout << "  " << f.file << '\n';
    std::cout << "  manifest.json\n";
    return 0;
  } catch (const macwt::Error& e) {
    return report_error(e.kind(), e.what(), exit_code_for(e));
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), 4);
  }
}
