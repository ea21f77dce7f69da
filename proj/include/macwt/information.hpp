#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "macwt/channel.hpp"

namespace macwt {

/// Probabilities below this are structural zeros in entropy sums.
inline constexpr double kStructuralZero = 1e-15;

/// Shannon entropy in bits; 0 log 0 = 0.
inline double entropy_bits(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > kStructuralZero) h -= v * std::log2(v);
  }
  return h;
}

/// Entropy of an unnormalized mass vector scaled by its total:
/// returns total * H(mass / total), i.e. -sum m log2(m / total).
inline double weighted_entropy_bits(std::span<const double> mass) {
  double total = 0.0;
  for (double v : mass) total += v;
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double v : mass) {
    if (v > kStructuralZero * total) h -= v * std::log2(v / total);
  }
  return h;
}

/// Single-letter information terms, bits per channel use.
struct InfoTerms {
  double i_x1_y_given_x2 = 0.0;
  double i_x2_y_given_x1 = 0.0;
  double i_x12_y = 0.0;
  double i_x1_z = 0.0;
  double i_x2_z = 0.0;

  bool operator==(const InfoTerms&) const = default;
};

namespace detail {
inline double clamp_nonneg(double v) { return v < 0.0 ? 0.0 : v; }
}  // namespace detail

/// Exact mutual-information terms under the product input law.
/// Axis bits for JointDistribution::marginal: x1 = 1, x2 = 2, y = 4, z = 8.
inline InfoTerms info_terms(const JointDistribution& j) {
  constexpr unsigned X1 = 1, X2 = 2, Y = 4, Z = 8;
  auto H = [&](unsigned keep) { return entropy_bits(j.marginal(keep)); };
  const double h_x1 = H(X1), h_x2 = H(X2), h_y = H(Y), h_z = H(Z);
  const double h_x12 = H(X1 | X2);
  const double h_x12y = H(X1 | X2 | Y);
  InfoTerms t;
  t.i_x1_y_given_x2 = detail::clamp_nonneg(h_x12 + H(X2 | Y) - h_x12y - h_x2);
  t.i_x2_y_given_x1 = detail::clamp_nonneg(h_x12 + H(X1 | Y) - h_x12y - h_x1);
  t.i_x12_y = detail::clamp_nonneg(h_x12 + h_y - h_x12y);
  t.i_x1_z = detail::clamp_nonneg(h_x1 + h_z - H(X1 | Z));
  t.i_x2_z = detail::clamp_nonneg(h_x2 + h_z - H(X2 | Z));
  return t;
}

inline InfoTerms info_terms(const MacWiretapChannel& ch, const InputDistribution& q) {
  return info_terms(marginals(ch, q));
}

}  // namespace macwt
