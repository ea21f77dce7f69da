#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "macwt/channel.hpp"
#include "macwt/errors.hpp"
#include "macwt/format.hpp"
#include "macwt/information.hpp"

namespace macwt {

struct RatePair {
  double r1 = 0.0;
  double r2 = 0.0;

  bool operator==(const RatePair&) const = default;
  friend bool operator<(const RatePair& a, const RatePair& b) {
    return a.r1 < b.r1 || (a.r1 == b.r1 && a.r2 < b.r2);
  }
};

/// {(R1,R2) >= 0 : R1 <= r1_max, R2 <= r2_max, R1 + R2 <= rsum_max}, stored in
/// consistent form: max(r1_max, r2_max) <= rsum_max <= r1_max + r2_max.
struct RatePentagon {
  double r1_max = 0.0;
  double r2_max = 0.0;
  double rsum_max = 0.0;

  /// The region is the single point (0,0).
  bool is_trivial() const noexcept { return rsum_max <= 0.0; }

  bool contains(RatePair p, double tol = 1e-12) const noexcept {
    return p.r1 >= -tol && p.r2 >= -tol && p.r1 <= r1_max + tol && p.r2 <= r2_max + tol &&
           p.r1 + p.r2 <= rsum_max + tol;
  }

  /// Constraint-wise containment; for consistent pentagons this is set inclusion.
  bool subset_of(const RatePentagon& other, double tol = 1e-12) const noexcept {
    return r1_max <= other.r1_max + tol && r2_max <= other.r2_max + tol &&
           rsum_max <= other.rsum_max + tol;
  }

  /// Corner points counterclockwise from the origin, duplicates removed.
  std::vector<RatePair> vertices() const {
    const RatePair corners[] = {{0.0, 0.0},
                                {r1_max, 0.0},
                                {r1_max, rsum_max - r1_max},
                                {rsum_max - r2_max, r2_max},
                                {0.0, r2_max}};
    auto same = [](RatePair a, RatePair b) {
      return std::abs(a.r1 - b.r1) <= 1e-12 && std::abs(a.r2 - b.r2) <= 1e-12;
    };
    std::vector<RatePair> out;
    for (const auto& c : corners) {
      if (out.empty() || !same(out.back(), c)) out.push_back(c);
    }
    while (out.size() > 1 && same(out.back(), out.front())) out.pop_back();
    return out;
  }

  bool operator==(const RatePentagon&) const = default;
};

/// Applies (.)^+ to the three raw bounds, then materializes the feasible set:
/// rsum <= r1 + r2, and r1, r2 lowered to rsum where they exceed it.
inline RatePentagon make_pentagon(double r1, double r2, double rsum) {
  RatePentagon p;
  p.r1_max = std::max(r1, 0.0);
  p.r2_max = std::max(r2, 0.0);
  p.rsum_max = std::min(std::max(rsum, 0.0), p.r1_max + p.r2_max);
  p.r1_max = std::min(p.r1_max, p.rsum_max);
  p.r2_max = std::min(p.r2_max, p.rsum_max);
  return p;
}

inline RatePentagon secrecy_pentagon(const InfoTerms& t) {
  return make_pentagon(t.i_x1_y_given_x2 - t.i_x1_z, t.i_x2_y_given_x1 - t.i_x2_z,
                       t.i_x12_y - t.i_x1_z - t.i_x2_z);
}

inline RatePentagon capacity_pentagon(const InfoTerms& t) {
  return make_pentagon(t.i_x1_y_given_x2, t.i_x2_y_given_x1, t.i_x12_y);
}

// ---------------------------------------------------------------------------
// Convex regions

/// Convex polygon, counterclockwise, first vertex lexicographically smallest.
struct RateRegion {
  std::vector<RatePair> vertices;

  bool contains(RatePair p, double tol = 1e-12) const {
    const std::size_t n = vertices.size();
    if (n == 0) return false;
    if (n == 1) return std::abs(p.r1 - vertices[0].r1) <= tol && std::abs(p.r2 - vertices[0].r2) <= tol;
    if (n == 2) return on_segment(vertices[0], vertices[1], p, tol);
    for (std::size_t i = 0; i < n; ++i) {
      const RatePair& a = vertices[i];
      const RatePair& b = vertices[(i + 1) % n];
      const double ex = b.r1 - a.r1, ey = b.r2 - a.r2;
      const double len = std::hypot(ex, ey);
      const double cross = ex * (p.r2 - a.r2) - ey * (p.r1 - a.r1);
      if (cross < -tol * std::max(len, 1.0)) return false;
    }
    return true;
  }

 private:
  static bool on_segment(RatePair a, RatePair b, RatePair p, double tol) {
    const double ex = b.r1 - a.r1, ey = b.r2 - a.r2;
    const double len2 = ex * ex + ey * ey;
    double t = len2 > 0 ? ((p.r1 - a.r1) * ex + (p.r2 - a.r2) * ey) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(a.r1 + t * ex - p.r1, a.r2 + t * ey - p.r2) <= tol;
  }
};

namespace detail {
inline double cross(RatePair o, RatePair a, RatePair b) {
  return (a.r1 - o.r1) * (b.r2 - o.r2) - (a.r2 - o.r2) * (b.r1 - o.r1);
}
}  // namespace detail

/// Andrew's monotone chain. Collinear and near-collinear points (|cross| <= 1e-12)
/// are dropped so that every output vertex is extreme.
inline RateRegion convex_hull(std::vector<RatePair> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() <= 1) return {pts};
  constexpr double eps = 1e-12;
  std::vector<RatePair> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && detail::cross(hull[k - 2], hull[k - 1], p) <= eps) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && detail::cross(hull[k - 2], hull[k - 1], pts[i]) <= eps) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return {hull};
}

enum class RegionKind { secrecy, capacity };

inline const char* to_string(RegionKind k) { return k == RegionKind::secrecy ? "secrecy" : "capacity"; }

/// Simplex lattice with `points_per_axis - 1` steps: every pmf over `size`
/// symbols whose entries are multiples of 1/(points_per_axis - 1).
inline std::vector<std::vector<double>> simplex_lattice(std::size_t size, std::size_t points_per_axis) {
  if (size == 0 || points_per_axis == 0) throw ArgumentError("simplex_lattice: empty lattice");
  if (size == 1) return {{1.0}};
  if (points_per_axis == 1) return {std::vector<double>(size, 1.0 / static_cast<double>(size))};
  const std::size_t steps = points_per_axis - 1;
  std::vector<std::vector<double>> out;
  std::vector<std::size_t> counts(size, 0);
  // Enumerate compositions of `steps` into `size` parts, first entry ascending.
  auto rec = [&](auto&& self, std::size_t pos, std::size_t left) -> void {
    if (pos + 1 == size) {
      counts[pos] = left;
      std::vector<double> p(size);
      for (std::size_t i = 0; i < size; ++i) p[i] = static_cast<double>(counts[i]) / static_cast<double>(steps);
      out.push_back(std::move(p));
      return;
    }
    for (std::size_t c = 0; c <= left; ++c) {
      counts[pos] = c;
      self(self, pos + 1, left - c);
    }
  };
  rec(rec, 0, steps);
  return out;
}

/// Product grid of simplex lattices for both users (11 points per axis gives
/// the default 11 x 11 grid on binary inputs).
inline std::vector<InputDistribution> uniform_grid(const MacWiretapChannel& ch, std::size_t points_per_axis) {
  const auto a = simplex_lattice(ch.x1_size(), points_per_axis);
  const auto b = simplex_lattice(ch.x2_size(), points_per_axis);
  std::vector<InputDistribution> grid;
  grid.reserve(a.size() * b.size());
  for (const auto& p1 : a)
    for (const auto& p2 : b) grid.push_back({p1, p2});
  return grid;
}

inline RateRegion hull_over_inputs(const MacWiretapChannel& ch, const std::vector<InputDistribution>& grid,
                                   RegionKind which) {
  if (grid.empty()) throw ArgumentError("hull_over_inputs: empty input grid");
  std::vector<RatePair> pts;
  for (const auto& q : grid) {
    const InfoTerms t = info_terms(ch, q);
    const RatePentagon p = which == RegionKind::secrecy ? secrecy_pentagon(t) : capacity_pentagon(t);
    const auto v = p.vertices();
    pts.insert(pts.end(), v.begin(), v.end());
  }
  return convex_hull(std::move(pts));
}

inline CsvWriter region_csv(const RateRegion& region) {
  CsvWriter csv({"r1", "r2"});
  for (const auto& v : region.vertices) csv.row({fmt_double(v.r1), fmt_double(v.r2)});
  return csv;
}

// ---------------------------------------------------------------------------
// Key-recycling ramp

/// (l * second + first) / (l + 1), componentwise.
inline RatePair slot_average_rate(RatePair second_part, RatePair first_part, std::uint64_t l) {
  if (l == 0) throw ArgumentError("slot_average_rate: l must be >= 1");
  const double w = static_cast<double>(l);
  return {(w * second_part.r1 + first_part.r1) / (w + 1.0), (w * second_part.r2 + first_part.r2) / (w + 1.0)};
}

struct RampStep {
  std::uint64_t slot = 0;
  RatePair second_part;
  RatePair first_part;
};

/// Rate ramp of the key-recycling scheme. Step k is the k-th slot whose second
/// part is keyed, so its rate is min(k * secrecy, capacity) per user with the
/// sum clipped to min(k * secrecy_sum, capacity_sum).
struct RampSchedule {
  std::optional<std::uint64_t> lambda1;  ///< nullopt: user 1 has zero secrecy rate
  std::optional<std::uint64_t> lambda2;
  std::uint64_t lambda_star = 0;
  std::vector<RampStep> per_slot;

  RatePair secrecy_rate;     ///< raw (I(Xi;Y|Xj) - I(Xi;Z))^+
  double secrecy_sum = 0.0;  ///< raw (I(X1,X2;Y) - I(X1;Z) - I(X2;Z))^+
  RatePair capacity_rate;
  double capacity_sum = 0.0;
  RatePair first_part;  ///< wiretap-coded rate pair (step 1 of the ramp)
  RatePair saturated;   ///< (R1*, R2*)

  /// Second-part rate at step k >= 1 (defined for every k, not only the stored steps).
  RatePair step_rate(std::uint64_t k) const {
    if (k == 0) return {};
    const double kk = static_cast<double>(k);
    double s1 = std::min(kk * secrecy_rate.r1, capacity_rate.r1);
    double s2 = std::min(kk * secrecy_rate.r2, capacity_rate.r2);
    const double cap_sum = std::min(kk * secrecy_sum, capacity_sum);
    if (s1 + s2 > cap_sum) {
      // Proportional split of the sum-clipped rate.
      const double total = s1 + s2;
      s1 = cap_sum * (s1 / total);
      s2 = cap_sum * (s2 / total);
    }
    return {s1, s2};
  }
};

inline RampSchedule ramp_schedule(const InfoTerms& t, std::uint64_t max_steps = 1'000'000) {
  RampSchedule s;
  const RatePentagon cap = capacity_pentagon(t);
  s.capacity_rate = {cap.r1_max, cap.r2_max};
  s.capacity_sum = cap.rsum_max;
  s.secrecy_rate = {std::max(t.i_x1_y_given_x2 - t.i_x1_z, 0.0), std::max(t.i_x2_y_given_x1 - t.i_x2_z, 0.0)};
  s.secrecy_sum = std::max(t.i_x12_y - t.i_x1_z - t.i_x2_z, 0.0);

  auto lambda = [](double c, double e) -> std::optional<std::uint64_t> {
    if (!(c - e > 0.0)) return std::nullopt;
    return static_cast<std::uint64_t>(std::ceil(c / (c - e)));
  };
  s.lambda1 = lambda(t.i_x1_y_given_x2, t.i_x1_z);
  s.lambda2 = lambda(t.i_x2_y_given_x1, t.i_x2_z);
  if (!s.lambda1 && !s.lambda2) {
    throw ArgumentError("ramp_schedule: both users have zero secrecy rate");
  }

  // Every min() in step_rate is saturated from k_sat on.
  std::uint64_t k_sat = std::max(s.lambda1.value_or(1), s.lambda2.value_or(1));
  if (s.secrecy_sum > 0.0) {
    const double need = std::ceil(s.capacity_sum / s.secrecy_sum);
    k_sat = std::max<std::uint64_t>(k_sat, need > 1.0 ? static_cast<std::uint64_t>(need) : 1);
  }
  if (k_sat > max_steps) {
    throw CapacityError("ramp_schedule: ramp does not saturate within the step budget", k_sat);
  }

  s.first_part = s.step_rate(1);
  s.saturated = s.step_rate(k_sat);

  // First k at which the pair stops changing (pair(k) == pair(k-1) == final),
  // and never before every per-user ramp has completed.
  auto same = [](RatePair a, RatePair b) {
    return std::abs(a.r1 - b.r1) <= 1e-12 && std::abs(a.r2 - b.r2) <= 1e-12;
  };
  std::uint64_t first_final = k_sat;
  while (first_final > 1 && same(s.step_rate(first_final - 1), s.saturated)) --first_final;
  const std::uint64_t max_lambda = std::max(s.lambda1.value_or(0), s.lambda2.value_or(0));
  s.lambda_star = std::max(first_final + 1, max_lambda + 1);

  const std::uint64_t steps = std::max(s.lambda_star, k_sat + 1);
  s.per_slot.reserve(steps);
  for (std::uint64_t k = 1; k <= steps; ++k) s.per_slot.push_back({k, s.step_rate(k), s.first_part});
  return s;
}

/// Schedule export: slot, second-part rates, and slot-average rates for `l`.
inline CsvWriter schedule_csv(const RampSchedule& s, std::uint64_t l) {
  CsvWriter csv({"slot", "r1_part2", "r2_part2", "r1_avg", "r2_avg"});
  for (const auto& step : s.per_slot) {
    const RatePair avg = slot_average_rate(step.second_part, step.first_part, l);
    csv.row({fmt_int(step.slot), fmt_double(step.second_part.r1), fmt_double(step.second_part.r2),
             fmt_double(avg.r1), fmt_double(avg.r2)});
  }
  return csv;
}

}  // namespace macwt
