#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "macwt/errors.hpp"

namespace macwt {

/// Two-user discrete memoryless MAC with an eavesdropper output.
///
/// The law p(y,z|x1,x2) is stored dense in row-major (x1, x2, y, z) order.
/// Instances are immutable and always valid: the constructor enforces
/// nonnegativity and that every (x1,x2) slice sums to one within 1e-12.
class MacWiretapChannel {
 public:
  static constexpr double kRowSumTolerance = 1e-12;

  MacWiretapChannel(std::size_t x1_size, std::size_t x2_size, std::size_t y_size,
                    std::size_t z_size, std::vector<double> law)
      : sizes_{x1_size, x2_size, y_size, z_size}, law_(std::move(law)) {
    for (std::size_t s : sizes_) {
      if (s == 0) throw ValidationError("channel alphabet sizes must be >= 1");
    }
    const std::uint64_t expected = detail::checked_mul(
        detail::checked_mul(x1_size, x2_size), detail::checked_mul(y_size, z_size));
    if (law_.size() != expected) {
      throw ShapeError("channel law has " + std::to_string(law_.size()) + " entries, expected " +
                       std::to_string(expected));
    }
    const std::size_t row = y_size * z_size;
    for (std::size_t r = 0; r < x1_size * x2_size; ++r) {
      double sum = 0.0;
      for (std::size_t i = 0; i < row; ++i) {
        const double p = law_[r * row + i];
        if (!std::isfinite(p) || p < 0.0) {
          throw ValidationError("channel law entry " + std::to_string(r * row + i) +
                                " is negative or not finite");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance) {
        throw ValidationError("channel law slice (x1=" + std::to_string(r / x2_size) +
                              ", x2=" + std::to_string(r % x2_size) + ") sums to " +
                              std::to_string(sum));
      }
    }
  }

  std::size_t x1_size() const noexcept { return sizes_[0]; }
  std::size_t x2_size() const noexcept { return sizes_[1]; }
  std::size_t y_size() const noexcept { return sizes_[2]; }
  std::size_t z_size() const noexcept { return sizes_[3]; }
  const std::array<std::size_t, 4>& sizes() const noexcept { return sizes_; }

  std::size_t index(std::size_t x1, std::size_t x2, std::size_t y, std::size_t z) const noexcept {
    return ((x1 * sizes_[1] + x2) * sizes_[2] + y) * sizes_[3] + z;
  }

  double operator()(std::size_t x1, std::size_t x2, std::size_t y, std::size_t z) const noexcept {
    return law_[index(x1, x2, y, z)];
  }

  std::span<const double> law() const noexcept { return law_; }

  /// Eve's marginal p(z|x1,x2).
  double eve(std::size_t x1, std::size_t x2, std::size_t z) const noexcept {
    double s = 0.0;
    for (std::size_t y = 0; y < sizes_[2]; ++y) s += (*this)(x1, x2, y, z);
    return s;
  }

  /// Bob's marginal p(y|x1,x2).
  double bob(std::size_t x1, std::size_t x2, std::size_t y) const noexcept {
    double s = 0.0;
    for (std::size_t z = 0; z < sizes_[3]; ++z) s += (*this)(x1, x2, y, z);
    return s;
  }

  bool operator==(const MacWiretapChannel&) const = default;

 private:
  std::array<std::size_t, 4> sizes_;
  std::vector<double> law_;
};

/// Independent input laws for the two users; the joint input law is always p1 x p2.
struct InputDistribution {
  std::vector<double> p1;
  std::vector<double> p2;

  static constexpr double kSumTolerance = 1e-12;

  static InputDistribution uniform(const MacWiretapChannel& ch) {
    return {std::vector<double>(ch.x1_size(), 1.0 / static_cast<double>(ch.x1_size())),
            std::vector<double>(ch.x2_size(), 1.0 / static_cast<double>(ch.x2_size()))};
  }

  /// Throws ValidationError on a bad vector, ShapeError if sizes disagree with `ch`.
  void validate(const MacWiretapChannel& ch) const {
    if (p1.size() != ch.x1_size() || p2.size() != ch.x2_size()) {
      throw ShapeError("input distribution sizes (" + std::to_string(p1.size()) + ", " +
                       std::to_string(p2.size()) + ") do not match channel inputs (" +
                       std::to_string(ch.x1_size()) + ", " + std::to_string(ch.x2_size()) + ")");
    }
    check_pmf(p1, "p1");
    check_pmf(p2, "p2");
  }

  bool operator==(const InputDistribution&) const = default;

  static void check_pmf(std::span<const double> p, const char* name) {
    double s = 0.0;
    for (double v : p) {
      if (!std::isfinite(v) || v < 0.0) {
        throw ValidationError(std::string(name) + " has a negative or non-finite entry");
      }
      s += v;
    }
    if (std::abs(s - 1.0) > kSumTolerance) {
      throw ValidationError(std::string(name) + " sums to " + std::to_string(s));
    }
  }
};

/// Exact joint p(x1) p(x2) p(y,z|x1,x2), dense row-major (x1, x2, y, z).
struct JointDistribution {
  std::array<std::size_t, 4> sizes;
  std::vector<double> p;

  double operator()(std::size_t x1, std::size_t x2, std::size_t y, std::size_t z) const noexcept {
    return p[((x1 * sizes[1] + x2) * sizes[2] + y) * sizes[3] + z];
  }

  /// Marginal over the axes whose bit is set in `keep` (bit 0 = x1 ... bit 3 = z),
  /// returned dense in row-major order of the kept axes.
  std::vector<double> marginal(unsigned keep) const {
    std::array<std::size_t, 4> stride{};
    std::size_t total = 1;
    for (int axis = 3; axis >= 0; --axis) {
      if (keep & (1u << axis)) {
        stride[axis] = total;
        total *= sizes[axis];
      }
    }
    std::vector<double> out(total, 0.0);
    std::size_t flat = 0;
    for (std::size_t a = 0; a < sizes[0]; ++a)
      for (std::size_t b = 0; b < sizes[1]; ++b)
        for (std::size_t c = 0; c < sizes[2]; ++c)
          for (std::size_t d = 0; d < sizes[3]; ++d, ++flat) {
            const std::size_t idx = a * stride[0] + b * stride[1] + c * stride[2] + d * stride[3];
            out[idx] += p[flat];
          }
    return out;
  }
};

inline JointDistribution marginals(const MacWiretapChannel& ch, const InputDistribution& q) {
  q.validate(ch);
  JointDistribution j{ch.sizes(), std::vector<double>(ch.law().size())};
  const auto law = ch.law();
  const std::size_t row = ch.y_size() * ch.z_size();
  for (std::size_t x1 = 0; x1 < ch.x1_size(); ++x1) {
    for (std::size_t x2 = 0; x2 < ch.x2_size(); ++x2) {
      const double w = q.p1[x1] * q.p2[x2];
      const std::size_t base = (x1 * ch.x2_size() + x2) * row;
      for (std::size_t i = 0; i < row; ++i) j.p[base + i] = w * law[base + i];
    }
  }
  return j;
}

/// n-fold memoryless extension. Sequences are indexed base-|alphabet| with
/// the first channel use as the most significant digit.
inline MacWiretapChannel product_extension(const MacWiretapChannel& ch, std::size_t n) {
  if (n == 0) throw ArgumentError("product_extension: n must be positive");
  if (n == 1) return ch;
  const std::uint64_t per_use = detail::checked_mul(detail::checked_mul(ch.x1_size(), ch.x2_size()),
                                                    detail::checked_mul(ch.y_size(), ch.z_size()));
  const std::uint64_t support = detail::checked_pow(per_use, n);
  if (support > CapacityError::kSupportGuard) {
    throw CapacityError("product_extension: n=" + std::to_string(n) + " exceeds enumeration guard",
                        support);
  }
  std::array<std::size_t, 4> ext{};
  for (std::size_t a = 0; a < 4; ++a) ext[a] = static_cast<std::size_t>(detail::checked_pow(ch.sizes()[a], n));

  std::vector<double> law(static_cast<std::size_t>(support));
  std::array<std::vector<std::size_t>, 4> digits;
  for (auto& d : digits) d.resize(n);
  auto decode = [n](std::size_t v, std::size_t base, std::vector<std::size_t>& out) {
    for (std::size_t t = n; t-- > 0;) {
      out[t] = v % base;
      v /= base;
    }
  };
  std::size_t flat = 0;
  for (std::size_t a = 0; a < ext[0]; ++a) {
    decode(a, ch.x1_size(), digits[0]);
    for (std::size_t b = 0; b < ext[1]; ++b) {
      decode(b, ch.x2_size(), digits[1]);
      for (std::size_t c = 0; c < ext[2]; ++c) {
        decode(c, ch.y_size(), digits[2]);
        for (std::size_t d = 0; d < ext[3]; ++d, ++flat) {
          decode(d, ch.z_size(), digits[3]);
          double prod = 1.0;
          for (std::size_t t = 0; t < n && prod != 0.0; ++t) {
            prod *= ch(digits[0][t], digits[1][t], digits[2][t], digits[3][t]);
          }
          law[flat] = prod;
        }
      }
    }
  }
  return MacWiretapChannel(ext[0], ext[1], ext[2], ext[3], std::move(law));
}

/// i.i.d. extension of an input law, matching product_extension's indexing.
inline std::vector<double> product_pmf(std::span<const double> p, std::size_t n) {
  std::vector<double> out{1.0};
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<double> next(out.size() * p.size());
    for (std::size_t i = 0; i < out.size(); ++i)
      for (std::size_t s = 0; s < p.size(); ++s) next[i * p.size() + s] = out[i] * p[s];
    out = std::move(next);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Presets

/// Binary MAC-WT with Y = X1 ^ X2 ^ N and Z = (a1 X1) ^ (a2 X2) ^ N',
/// independent noises with P(N=1) = bob_flip and P(N'=1) = eve_flip.
/// `eve_taps_x1` / `eve_taps_x2` select which inputs reach Eve.
inline MacWiretapChannel binary_xor_channel(double bob_flip, double eve_flip, bool eve_taps_x1 = true,
                                            bool eve_taps_x2 = true) {
  if (!(bob_flip >= 0.0 && bob_flip <= 1.0) || !(eve_flip >= 0.0 && eve_flip <= 1.0)) {
    throw ValidationError("flip probabilities must lie in [0, 1]");
  }
  std::vector<double> law(16);
  for (std::size_t x1 = 0; x1 < 2; ++x1)
    for (std::size_t x2 = 0; x2 < 2; ++x2)
      for (std::size_t y = 0; y < 2; ++y)
        for (std::size_t z = 0; z < 2; ++z) {
          const std::size_t ny = y ^ x1 ^ x2;
          const std::size_t eve_in = (eve_taps_x1 ? x1 : 0) ^ (eve_taps_x2 ? x2 : 0);
          const std::size_t nz = z ^ eve_in;
          law[((x1 * 2 + x2) * 2 + y) * 2 + z] =
              (ny ? bob_flip : 1.0 - bob_flip) * (nz ? eve_flip : 1.0 - eve_flip);
        }
  return MacWiretapChannel(2, 2, 2, 2, std::move(law));
}

/// Noiseless Y = (X1, X2) as y = 2*x1 + x2; Z constant.
inline MacWiretapChannel noiseless_pair_channel() {
  std::vector<double> law(2 * 2 * 4 * 1, 0.0);
  for (std::size_t x1 = 0; x1 < 2; ++x1)
    for (std::size_t x2 = 0; x2 < 2; ++x2) law[(x1 * 2 + x2) * 4 + (2 * x1 + x2)] = 1.0;
  return MacWiretapChannel(2, 2, 4, 1, std::move(law));
}

// ---------------------------------------------------------------------------
// JSON channel definition files

inline MacWiretapChannel channel_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("channel definition must be a JSON object");
  auto size_field = [&](const char* name) -> std::size_t {
    if (!j.contains(name) || !j.at(name).is_number_integer()) {
      throw ValidationError(std::string("channel field '") + name + "' must be an integer");
    }
    const auto v = j.at(name).get<std::int64_t>();
    if (v < 1) throw ValidationError(std::string("channel field '") + name + "' must be >= 1");
    return static_cast<std::size_t>(v);
  };
  const std::size_t x1 = size_field("x1_size");
  const std::size_t x2 = size_field("x2_size");
  const std::size_t y = size_field("y_size");
  const std::size_t z = size_field("z_size");
  if (!j.contains("law") || !j.at("law").is_array()) {
    throw ValidationError("channel field 'law' must be an array");
  }
  std::vector<double> law;
  law.reserve(j.at("law").size());
  for (const auto& v : j.at("law")) {
    if (!v.is_number()) throw ValidationError("channel field 'law' must contain numbers");
    law.push_back(v.get<double>());
  }
  return MacWiretapChannel(x1, x2, y, z, std::move(law));
}

inline nlohmann::json channel_to_json(const MacWiretapChannel& ch) {
  return {{"x1_size", ch.x1_size()},
          {"y_size", ch.y_size()},
          {"x2_size", ch.x2_size()},
          {"z_size", ch.z_size()},
          {"law", std::vector<double>(ch.law().begin(), ch.law().end())}};
}

inline MacWiretapChannel load_channel_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open channel file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("channel file '" + path + "': " + e.what());
  }
  return channel_from_json(j);
}

}  // namespace macwt
