#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "macwt/channel.hpp"
#include "macwt/errors.hpp"
#include "macwt/information.hpp"
#include "macwt/random.hpp"

namespace macwt {

/// Random-binning (Wyner) codebook for one user: 2^message_bits bins of
/// 2^confusion_bits codewords each. Row (m, c) is stored at index
/// m * 2^confusion_bits + c, each row n symbols, all rows contiguous.
struct BinningCodebook {
  int user = 1;
  std::size_t n = 0;
  unsigned message_bits = 0;
  unsigned confusion_bits = 0;
  std::size_t alphabet = 2;
  std::uint64_t seed = 0;
  std::vector<std::uint8_t> symbols;

  std::size_t messages() const noexcept { return std::size_t{1} << message_bits; }
  std::size_t bin_size() const noexcept { return std::size_t{1} << confusion_bits; }
  std::size_t rows() const noexcept { return messages() * bin_size(); }

  std::span<const std::uint8_t> codeword(std::size_t message, std::size_t confusion) const {
    if (message >= messages()) throw ArgumentError("message index out of range");
    if (confusion >= bin_size()) throw ArgumentError("confusion index out of range");
    return {symbols.data() + (message * bin_size() + confusion) * n, n};
  }

  /// Codeword as a base-|alphabet| integer, first symbol most significant.
  std::uint64_t codeword_index(std::size_t message, std::size_t confusion) const {
    std::uint64_t v = 0;
    for (std::uint8_t s : codeword(message, confusion)) v = v * alphabet + s;
    return v;
  }

  bool operator==(const BinningCodebook&) const = default;
};

namespace detail {
inline void check_codebook_dims(std::size_t alphabet, std::size_t n, unsigned message_bits, unsigned confusion_bits) {
  if (n == 0) throw ArgumentError("codebook blocklength must be positive");
  if (alphabet == 0 || alphabet > 256) throw ArgumentError("codebook alphabet must be in [1, 256]");
  if (message_bits + confusion_bits > 24) {
    throw CapacityError("codebook has too many rows", detail::checked_pow(2, message_bits + confusion_bits));
  }
  const std::uint64_t seqs = detail::checked_pow(alphabet, n);
  if (seqs > CapacityError::kSupportGuard) throw CapacityError("codebook blocklength exceeds enumeration guard", seqs);
  const std::uint64_t cells = detail::checked_mul(std::uint64_t{1} << (message_bits + confusion_bits), n);
  if (cells > CapacityError::kSupportGuard) throw CapacityError("codebook table exceeds enumeration guard", cells);
}
}  // namespace detail

/// Draws every codeword symbol i.i.d. from the user's input law with a
/// dedicated mt19937_64 seeded by `seed`; the same seed gives the same bytes.
inline BinningCodebook build_codebook(const MacWiretapChannel& ch, const InputDistribution& q, int user,
                                      std::size_t n, unsigned message_bits, unsigned confusion_bits,
                                      std::uint64_t seed) {
  if (user != 1 && user != 2) throw ArgumentError("user must be 1 or 2");
  q.validate(ch);
  const auto& pmf = user == 1 ? q.p1 : q.p2;
  detail::check_codebook_dims(pmf.size(), n, message_bits, confusion_bits);

  const InfoTerms t = info_terms(ch, q);
  const double bound = user == 1 ? t.i_x1_y_given_x2 : t.i_x2_y_given_x1;
  if (static_cast<double>(message_bits) / static_cast<double>(n) > bound + 1e-12) {
    throw ArgumentError("message rate " + std::to_string(static_cast<double>(message_bits) / static_cast<double>(n)) +
                        " exceeds the user's capacity bound " + std::to_string(bound));
  }

  BinningCodebook cb;
  cb.user = user;
  cb.n = n;
  cb.message_bits = message_bits;
  cb.confusion_bits = confusion_bits;
  cb.alphabet = pmf.size();
  cb.seed = seed;
  cb.symbols.resize(cb.rows() * n);
  Engine rng(seed);
  for (auto& s : cb.symbols) s = static_cast<std::uint8_t>(sample_index(rng, pmf));
  return cb;
}

/// Codebook from an explicit row-major table (hand-built or deterministic codes).
inline BinningCodebook codebook_from_table(int user, std::size_t alphabet, std::size_t n, unsigned message_bits,
                                           unsigned confusion_bits, std::vector<std::uint8_t> symbols) {
  if (user != 1 && user != 2) throw ArgumentError("user must be 1 or 2");
  detail::check_codebook_dims(alphabet, n, message_bits, confusion_bits);
  BinningCodebook cb;
  cb.user = user;
  cb.n = n;
  cb.message_bits = message_bits;
  cb.confusion_bits = confusion_bits;
  cb.alphabet = alphabet;
  if (symbols.size() != cb.rows() * n) throw ShapeError("codebook table has the wrong number of symbols");
  for (auto s : symbols) {
    if (s >= alphabet) throw ValidationError("codebook symbol outside the alphabet");
  }
  cb.symbols = std::move(symbols);
  return cb;
}

inline std::vector<std::uint8_t> encode_wiretap(const BinningCodebook& cb, std::size_t message, std::size_t randomness) {
  if (message >= cb.messages()) {
    throw ArgumentError("message " + std::to_string(message) + " out of range for " +
                        std::to_string(cb.message_bits) + "-bit messages");
  }
  const auto row = cb.codeword(message, randomness);
  return {row.begin(), row.end()};
}

/// Confusion index drawn uniformly from `rng`.
inline std::vector<std::uint8_t> encode_wiretap(const BinningCodebook& cb, std::size_t message, Engine& rng) {
  if (message >= cb.messages()) {
    throw ArgumentError("message " + std::to_string(message) + " out of range for " +
                        std::to_string(cb.message_bits) + "-bit messages");
  }
  return encode_wiretap(cb, message, static_cast<std::size_t>(uniform_below(rng, cb.bin_size())));
}

/// One-time pad: componentwise XOR of equal-length bit vectors.
inline std::vector<std::uint8_t> encode_keyed(std::span<const std::uint8_t> message, std::span<const std::uint8_t> key) {
  if (message.size() != key.size()) {
    throw ArgumentError("encode_keyed: message has " + std::to_string(message.size()) + " bits, key has " +
                        std::to_string(key.size()));
  }
  std::vector<std::uint8_t> out(message.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<std::uint8_t>((message[i] ^ key[i]) & 1u);
  return out;
}

/// Bits of `v`, most significant first.
inline std::vector<std::uint8_t> index_to_bits(std::uint64_t v, unsigned width) {
  std::vector<std::uint8_t> bits(width);
  for (unsigned i = 0; i < width; ++i) bits[width - 1 - i] = static_cast<std::uint8_t>((v >> i) & 1u);
  return bits;
}

inline std::uint64_t bits_to_index(std::span<const std::uint8_t> bits) {
  std::uint64_t v = 0;
  for (auto b : bits) v = (v << 1) | (b & 1u);
  return v;
}

struct JointDecision {
  std::size_t message1 = 0;
  std::size_t message2 = 0;
  std::size_t confusion1 = 0;
  std::size_t confusion2 = 0;
  double log_likelihood = 0.0;
};

/// Maximum-likelihood joint decoding over all codeword pairs. Candidates are
/// scanned in lexicographic (m1, m2, c1, c2) order and a later candidate wins
/// only if its log-likelihood is larger by more than 1e-9 bits, so ties go to
/// the smallest tuple.
inline JointDecision decode_joint(const MacWiretapChannel& ch, const BinningCodebook& cb1, const BinningCodebook& cb2,
                                  std::span<const std::uint8_t> y) {
  if (cb1.n != cb2.n || y.size() != cb1.n) throw ShapeError("decode_joint: blocklengths disagree");
  if (cb1.alphabet != ch.x1_size() || cb2.alphabet != ch.x2_size()) {
    throw ShapeError("decode_joint: codebook alphabets do not match the channel");
  }
  for (auto s : y) {
    if (s >= ch.y_size()) throw ArgumentError("decode_joint: received symbol outside Y");
  }
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  std::vector<double> logp(ch.x1_size() * ch.x2_size() * ch.y_size());
  for (std::size_t a = 0; a < ch.x1_size(); ++a)
    for (std::size_t b = 0; b < ch.x2_size(); ++b)
      for (std::size_t s = 0; s < ch.y_size(); ++s) {
        const double p = ch.bob(a, b, s);
        logp[(a * ch.x2_size() + b) * ch.y_size() + s] = p > 0.0 ? std::log2(p) : kNegInf;
      }

  const std::size_t n = cb1.n;
  JointDecision best;
  bool have = false;
  for (std::size_t m1 = 0; m1 < cb1.messages(); ++m1)
    for (std::size_t m2 = 0; m2 < cb2.messages(); ++m2)
      for (std::size_t c1 = 0; c1 < cb1.bin_size(); ++c1) {
        const auto x1 = cb1.codeword(m1, c1);
        for (std::size_t c2 = 0; c2 < cb2.bin_size(); ++c2) {
          const auto x2 = cb2.codeword(m2, c2);
          double score = 0.0;
          for (std::size_t t = 0; t < n && score != kNegInf; ++t) {
            score += logp[(x1[t] * ch.x2_size() + x2[t]) * ch.y_size() + y[t]];
          }
          if (!have || (score != kNegInf && (best.log_likelihood == kNegInf || score > best.log_likelihood + 1e-9))) {
            best = {m1, m2, c1, c2, score};
            have = true;
          }
        }
      }
  return best;
}

/// Draws y^n from Bob's marginal given both input sequences.
inline std::vector<std::uint8_t> sample_bob(const MacWiretapChannel& ch, std::span<const std::uint8_t> x1,
                                            std::span<const std::uint8_t> x2, Engine& rng) {
  if (x1.size() != x2.size()) throw ShapeError("sample_bob: input lengths differ");
  std::vector<std::uint8_t> y(x1.size());
  std::vector<double> pmf(ch.y_size());
  for (std::size_t t = 0; t < y.size(); ++t) {
    for (std::size_t s = 0; s < ch.y_size(); ++s) pmf[s] = ch.bob(x1[t], x2[t], s);
    y[t] = static_cast<std::uint8_t>(sample_index(rng, pmf));
  }
  return y;
}

// ---------------------------------------------------------------------------
// Flat binary layout:
//   "MWCB" | u32 version=1 | u32 user | u32 n | u32 message_bits |
//   u32 confusion_bits | u32 alphabet | u64 seed | rows*n symbol bytes
// All integers little-endian.

inline std::vector<std::uint8_t> serialize_codebook(const BinningCodebook& cb) {
  std::vector<std::uint8_t> out{'M', 'W', 'C', 'B'};
  auto put = [&](std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  put(1, 4);
  put(static_cast<std::uint64_t>(cb.user), 4);
  put(cb.n, 4);
  put(cb.message_bits, 4);
  put(cb.confusion_bits, 4);
  put(cb.alphabet, 4);
  put(cb.seed, 8);
  out.insert(out.end(), cb.symbols.begin(), cb.symbols.end());
  return out;
}

inline BinningCodebook deserialize_codebook(std::span<const std::uint8_t> bytes) {
  constexpr std::size_t kHeader = 4 + 6 * 4 + 8;
  if (bytes.size() < kHeader || std::memcmp(bytes.data(), "MWCB", 4) != 0) {
    throw ValidationError("not a serialized codebook");
  }
  std::size_t pos = 4;
  auto get = [&](int n) {
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(bytes[pos++]) << (8 * i);
    return v;
  };
  if (get(4) != 1) throw ValidationError("unsupported codebook version");
  const auto user = static_cast<int>(get(4));
  const auto n = static_cast<std::size_t>(get(4));
  const auto mb = static_cast<unsigned>(get(4));
  const auto cbits = static_cast<unsigned>(get(4));
  const auto alphabet = static_cast<std::size_t>(get(4));
  const std::uint64_t seed = get(8);
  std::vector<std::uint8_t> table(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  try {
    BinningCodebook cb = codebook_from_table(user, alphabet, n, mb, cbits, std::move(table));
    cb.seed = seed;
    return cb;
  } catch (const ShapeError& e) {
    throw ValidationError(std::string("corrupt codebook: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ValidationError(std::string("corrupt codebook: ") + e.what());
  }
}

}  // namespace macwt
