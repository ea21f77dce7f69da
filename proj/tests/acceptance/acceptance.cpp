// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   macwt_acceptance [criterion ...]   (default: all, 1..10)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "macwt/macwt.hpp"
#include "oracles/frozen_values.hpp"

using namespace macwt;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

MacWiretapChannel random_channel(Engine& rng, std::size_t y, std::size_t z) {
  std::vector<double> law(4 * y * z);
  const std::size_t row = y * z;
  for (std::size_t r = 0; r < 4; ++r) {
    double s = 0;
    for (std::size_t i = 0; i < row; ++i) s += law[r * row + i] = sample_exponential(rng, 1.0);
    for (std::size_t i = 0; i < row; ++i) law[r * row + i] /= s;
  }
  return MacWiretapChannel(2, 2, y, z, std::move(law));
}

// 1 -------------------------------------------------------------------------
Outcome region_containment() {
  Engine rng(derive_seed(2024, 1));
  std::size_t violations = 0, checks = 0;
  for (int c = 0; c < 1000; ++c) {
    const auto ch = random_channel(rng, 4, 4);
    for (const auto& q : uniform_grid(ch, 11)) {
      const auto t = info_terms(ch, q);
      const auto sec = secrecy_pentagon(t);
      const auto cap = capacity_pentagon(t);
      ++checks;
      bool ok = sec.subset_of(cap);
      for (const auto& v : sec.vertices()) ok = ok && cap.contains(v);
      violations += !ok;
    }
  }
  return {violations == 0, fmt("%zu violations in %zu (channel, input) pairs", violations, checks)};
}

// 2 -------------------------------------------------------------------------
Outcome ramp_correctness() {
  Engine rng(derive_seed(2024, 2));
  std::size_t lambda_bad = 0, rate_bad = 0;
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    InfoTerms t;
    t.i_x1_y_given_x2 = 0.2 + 1.8 * uniform01(rng);
    t.i_x2_y_given_x1 = 0.2 + 1.8 * uniform01(rng);
    const double lo = std::max(t.i_x1_y_given_x2, t.i_x2_y_given_x1);
    t.i_x12_y = lo + (t.i_x1_y_given_x2 + t.i_x2_y_given_x1 - lo) * uniform01(rng);
    // Eve terms leave a positive margin on every bound.
    const double room = 0.95 * std::min({t.i_x1_y_given_x2, t.i_x2_y_given_x1, t.i_x12_y / 2});
    t.i_x1_z = room * uniform01(rng);
    t.i_x2_z = room * uniform01(rng);

    const auto s = ramp_schedule(t);
    const auto lam = [](double c, double e) { return static_cast<std::uint64_t>(std::ceil(c / (c - e))); };
    if (s.lambda1 != lam(t.i_x1_y_given_x2, t.i_x1_z) || s.lambda2 != lam(t.i_x2_y_given_x1, t.i_x2_z)) {
      ++lambda_bad;
    }
    const double c1 = std::min(t.i_x1_y_given_x2, t.i_x12_y), c2 = std::min(t.i_x2_y_given_x1, t.i_x12_y);
    const double e1 = t.i_x1_y_given_x2 - t.i_x1_z, e2 = t.i_x2_y_given_x1 - t.i_x2_z;
    const double es = t.i_x12_y - t.i_x1_z - t.i_x2_z;
    for (std::uint64_t k = 1; k <= s.lambda_star + 5; ++k) {
      const double kk = static_cast<double>(k);
      double a = std::min(kk * e1, c1), b = std::min(kk * e2, c2);
      const double sum = std::min(kk * es, t.i_x12_y);
      if (a + b > sum) {
        const double tot = a + b;
        a = sum * a / tot;
        b = sum * b / tot;
      }
      const auto r = s.step_rate(k);
      const double err = std::max(std::abs(r.r1 - a), std::abs(r.r2 - b));
      worst = std::max(worst, err);
      if (err > 1e-12) ++rate_bad;
      if (k <= s.per_slot.size() && !(s.per_slot[k - 1].second_part == r)) ++rate_bad;
    }
  }
  return {lambda_bad == 0 && rate_bad == 0,
          fmt("100 term sets: %zu lambda mismatches, %zu rate mismatches, max rate error %.2e", lambda_bad,
              rate_bad, worst)};
}

// 3 -------------------------------------------------------------------------
Outcome otp_exactness() {
  double worst = 0;
  for (unsigned bits = 1; bits <= 12; ++bits) worst = std::max(worst, std::abs(exact_leakage(otp_model(bits))));
  return {worst <= 1e-12, fmt("max |I(W;W^K)| over lengths 1..12 = %.3e bits", worst)};
}

// 4 -------------------------------------------------------------------------
Outcome wiretap_leakage_trend() {
  const auto ch = binary_xor_channel(0.05, 0.25);
  const auto q = InputDistribution::uniform(ch);
  std::vector<double> mean;
  std::string detail;
  for (std::size_t n : {4u, 6u, 8u}) {
    const auto [mb, cb] = sweep_bits(n, 0.125, 0.25);
    std::vector<double> per;
    mean.push_back(mean_wiretap_leakage_rate(ch, q, n, mb, cb, 2024, 20, &per));
    double var = 0;
    for (double v : per) var += (v - mean.back()) * (v - mean.back());
    const double se = std::sqrt(var / (per.size() - 1) / per.size());
    detail += fmt("n=%zu (mb=%u cb=%u) %.6f +- %.6f; ", n, mb, cb, mean.back(), se);
  }
  const bool monotone = mean[1] <= mean[0] && mean[2] <= mean[1];
  const bool drop = mean[2] <= 0.8 * mean[0];
  detail += fmt("non-increasing: %s, n=8 vs n=4 drop %.1f%%", monotone ? "yes" : "no",
                100.0 * (1.0 - mean[2] / mean[0]));
  return {monotone && drop, detail};
}

// 5 -------------------------------------------------------------------------
Outcome two_slot_audit_check() {
  const auto ch = binary_xor_channel(0.05, 0.25);
  const auto r = two_slot_audit(ch, InputDistribution::uniform(ch), 4, 1, 1, 1, 2024);
  return {r.two_slot <= r.slot1 + 1e-9,
          fmt("n1=4: two-slot %.9f vs slot-1 %.9f bits (excess %.3e)", r.two_slot, r.slot1, r.two_slot - r.slot1)};
}

// 6 -------------------------------------------------------------------------
Outcome buffer_recursion() {
  const auto ch = binary_xor_channel(0.11, 0.25, true, false);
  const auto sched = ramp_schedule(info_terms(ch, InputDistribution::uniform(ch)));
  std::string detail;
  bool ok = true;
  for (std::uint64_t N1 : {0u, 1u, 5u, 20u}) {
    const SlotConfig cfg{16, 4, 0.1, N1};
    const auto run = run_protocol(cfg, sched, 10000);
    std::size_t bad = 0, window_bad = 0;
    std::array<std::uint64_t, 2> b{0, 0};
    for (const auto& slot : run.slots) {
      for (std::size_t u = 0; u < 2; ++u) {
        const auto& r = slot[u];
        if (r.buffer_before != b[u] || r.buffer_after != b[u] + r.key_stored - r.key_consumed) ++bad;
        if (r.slot >= run.n2_observed[u] && !r.satisfies_window(N1)) ++window_bad;
        b[u] = r.buffer_after;
      }
    }
    const bool engaged = run.n2_overall() < 10000;
    ok = ok && bad == 0 && window_bad == 0 && engaged;
    detail += fmt("N1=%llu: N2=%llu, %zu recursion / %zu window errors; ", static_cast<unsigned long long>(N1),
                  static_cast<unsigned long long>(run.n2_overall()), bad, window_bad);
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

// 7 -------------------------------------------------------------------------
Outcome slot_average_identity() {
  Engine rng(derive_seed(2024, 7));
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const RatePair second{2 * uniform01(rng), 2 * uniform01(rng)};
    const RatePair first{second.r1 * uniform01(rng), second.r2 * uniform01(rng)};
    for (std::uint64_t l : {1u, 4u, 16u, 64u}) {
      const RatePair avg = slot_average_rate(second, first, l);
      const double d = static_cast<double>(l) + 1.0;
      worst = std::max({worst, std::abs((second.r1 - avg.r1) - (second.r1 - first.r1) / d),
                        std::abs((second.r2 - avg.r2) - (second.r2 - first.r2) / d)});
    }
  }
  return {worst <= 1e-12, fmt("max identity error over 1000 pairs x l in {1,4,16,64}: %.2e", worst)};
}

// 8 -------------------------------------------------------------------------
double quadrature_half_log(double pbar) {
  // E[0.5 log2(1 + pbar h)], h ~ Exp(1): composite Simpson on [0, 60].
  const int m = 600000;
  const double b = 60.0, h = b / m;
  auto f = [pbar](double x) { return 0.5 * std::log2(1.0 + pbar * x) * std::exp(-x); };
  double s = f(0.0) + f(b);
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

Outcome fading_ergodic() {
  const double oracle = frozen::kErgodicPbar4;
  const double local = quadrature_half_log(4.0);
  const SlotConfig cfg{16, 64, 0.1, 0};
  double worst = 0;
  double slowest = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GainModel m;
    m.seed = derive_seed(2024, 80 + seed);
    const auto t0 = std::chrono::steady_clock::now();
    const auto run = run_fading(m, PowerPolicy::constant(4, 4), cfg, {1.0, 1.0}, 100000, {true, false});
    slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    for (int u = 0; u < 2; ++u) worst = std::max(worst, std::abs(run.report.avg_keyed_rate[u] - oracle) / oracle);
  }
  const bool ok = worst <= 0.02 && std::abs(local - oracle) <= 1e-6 && slowest < 120.0;
  return {ok, fmt("quadrature %.10f (Simpson check %.10f); max relative keyed-rate error over 10 seeds x 2 users "
                  "%.3f%%; slowest seed %.2f s",
                  oracle, local, 100 * worst, slowest)};
}

// 9 -------------------------------------------------------------------------
Outcome zero_secrecy() {
  GainModel m;
  m.seed = derive_seed(2024, 9);
  m.h1 = GainDistribution::uniform(0.0, 1.0);
  m.g1 = GainDistribution::uniform(1.0, 2.0);  // g1 >= h1 always
  const SlotConfig cfg{16, 16, 0.1, 1};
  const auto run = run_fading(m, PowerPolicy::constant(4, 4), cfg, {}, 20000);
  std::uint64_t bits = 0, nonzero_slots = 0;
  for (const auto& s : run.ledger) {
    bits += s.records[0].wiretap_bits + s.records[0].keyed_bits;
    nonzero_slots += bits != 0;
  }
  std::string horizons;
  bool ok = nonzero_slots == 0;
  for (std::uint64_t K : {1u, 10u, 100u, 1000u, 20000u}) {
    const auto r = run_fading(m, PowerPolicy::constant(4, 4), cfg, {}, K, {true, false});
    ok = ok && r.report.avg_rate[0] == 0.0;
    horizons += fmt(" K=%llu:%g", static_cast<unsigned long long>(K), r.report.avg_rate[0]);
  }
  return {ok, fmt("user-1 running rate nonzero in %llu of 20000 slots; rate at%s; user-2 rate %.4f",
                  static_cast<unsigned long long>(nonzero_slots), horizons.c_str(), run.report.avg_rate[1])};
}

// 10 ------------------------------------------------------------------------
std::string file_hash(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return fnv1a_hex(ss.str());
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "macwt_acceptance_determinism";
  fs::remove_all(root);
  std::size_t files = 0, mismatches = 0, scenarios = 0;
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(MACWT_SCENARIO_DIR)) {
    if (e.path().extension() == ".json") paths.push_back(e.path());
  }
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    Scenario s = load_scenario(p.string());
    ++scenarios;
    std::array<RunResult, 2> runs;
    for (int i = 0; i < 2; ++i) {
      s.output_dir = (root / p.stem() / std::to_string(i)).string();
      runs[i] = run(s);
    }
    for (const auto& f : runs[0].outputs) {
      ++files;
      if (file_hash(runs[0].output_dir / f.file) != file_hash(runs[1].output_dir / f.file)) ++mismatches;
    }
  }
  fs::remove_all(root);
  return {mismatches == 0 && files > 0,
          fmt("%zu scenarios, %zu artifact files, %zu hash mismatches (manifest.json excluded: wall-clock fields)",
              scenarios, files, mismatches)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"region containment (1000 random channels)", region_containment},
      {"lambda and ramp correctness", ramp_correctness},
      {"one-time-pad exactness", otp_exactness},
      {"wiretap leakage decreases with n", wiretap_leakage_trend},
      {"two-slot leakage within slot-1 leakage", two_slot_audit_check},
      {"buffer recursion and window", buffer_recursion},
      {"slot-average identity", slot_average_identity},
      {"fading ergodic keyed rate", fading_ergodic},
      {"zero-secrecy user stays at rate 0", zero_secrecy},
      {"byte-identical reruns", determinism},
  };
  const double limits[] = {60, 1e9, 5, 600, 120, 10, 1e9, 1200, 1e9, 1e9};

  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!pick.empty() && !pick.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > limits[i]) {
      o.pass = false;
      o.detail += fmt(" [runtime limit %.0f s exceeded]", limits[i]);
    }
    failed += !o.pass;
    std::printf("[%s] %2d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
