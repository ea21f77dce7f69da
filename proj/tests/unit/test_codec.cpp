#include <gtest/gtest.h>

#include <cmath>

#include "macwt/codec.hpp"

using namespace macwt;

TEST(Codebook, SameSeedSameBytes) {
  const auto ch = binary_xor_channel(0.05, 0.25);
  const auto q = InputDistribution::uniform(ch);
  const auto a = build_codebook(ch, q, 1, 6, 1, 2, 77);
  const auto b = build_codebook(ch, q, 1, 6, 1, 2, 77);
  const auto c = build_codebook(ch, q, 1, 6, 1, 2, 78);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.symbols, c.symbols);
  EXPECT_EQ(a.rows(), 8u);
  EXPECT_EQ(a.symbols.size(), 48u);
}

TEST(Codebook, SymbolFrequenciesFollowInputLaw) {
  const auto ch = binary_xor_channel(0.05, 0.25);
  const InputDistribution q{{0.3, 0.7}, {0.5, 0.5}};
  std::size_t ones = 0, total = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto cb = build_codebook(ch, q, 1, 6, 1, 2, derive_seed(5, s));
    for (auto v : cb.symbols) ones += v;
    total += cb.symbols.size();
  }
  const double mean = 0.7 * static_cast<double>(total);
  const double sigma = std::sqrt(static_cast<double>(total) * 0.7 * 0.3);
  EXPECT_LE(std::abs(static_cast<double>(ones) - mean), 3 * sigma);
}

TEST(Codebook, RejectsRateAboveConditionalInformation) {
  const auto ch = binary_xor_channel(0.11, 0.25);
  const auto q = InputDistribution::uniform(ch);
  EXPECT_THROW(build_codebook(ch, q, 1, 4, 3, 0, 1), ArgumentError);
  EXPECT_NO_THROW(build_codebook(ch, q, 1, 4, 2, 0, 1));
  EXPECT_THROW(build_codebook(ch, q, 3, 4, 1, 0, 1), ArgumentError);
  EXPECT_THROW(build_codebook(ch, q, 1, 25, 1, 0, 1), CapacityError);
}

TEST(Codebook, TableValidation) {
  EXPECT_THROW(codebook_from_table(1, 2, 2, 1, 0, {0, 1, 1}), ShapeError);
  EXPECT_THROW(codebook_from_table(1, 2, 2, 1, 0, {0, 1, 1, 2}), ValidationError);
}

TEST(Encode, WiretapLooksUpRows) {
  const auto cb = codebook_from_table(1, 2, 3, 1, 1, {0, 0, 1, 1, 1, 0, 1, 0, 1, 0, 1, 1});
  EXPECT_EQ(encode_wiretap(cb, 1, 0), (std::vector<std::uint8_t>{1, 0, 1}));
  EXPECT_EQ(encode_wiretap(cb, 0, 1), (std::vector<std::uint8_t>{1, 1, 0}));
  EXPECT_EQ(cb.codeword_index(1, 1), 3u);
  EXPECT_THROW(encode_wiretap(cb, 2, 0), ArgumentError);
  EXPECT_THROW(encode_wiretap(cb, 0, 2), ArgumentError);
  Engine rng(1);
  for (int i = 0; i < 50; ++i) {
    const auto x = encode_wiretap(cb, 1, rng);
    EXPECT_TRUE(x == encode_wiretap(cb, 1, 0) || x == encode_wiretap(cb, 1, 1));
  }
}

TEST(Encode, KeyedXor) {
  Engine rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = index_to_bits(uniform_below(rng, 1024), 10);
    const auto k = index_to_bits(uniform_below(rng, 1024), 10);
    const auto c = encode_keyed(m, k);
    EXPECT_EQ(encode_keyed(c, k), m);
    EXPECT_EQ(bits_to_index(c), bits_to_index(m) ^ bits_to_index(k));
  }
  EXPECT_THROW(encode_keyed(std::vector<std::uint8_t>{1, 0}, std::vector<std::uint8_t>{1}), ArgumentError);
  EXPECT_EQ(index_to_bits(6, 4), (std::vector<std::uint8_t>{0, 1, 1, 0}));
}

TEST(Decode, NoiselessChannelRecoversEverything) {
  const auto ch = noiseless_pair_channel();
  const auto cb1 = codebook_from_table(1, 2, 2, 1, 1, {0, 0, 0, 1, 1, 0, 1, 1});
  const auto cb2 = codebook_from_table(2, 2, 2, 1, 0, {0, 0, 1, 1});
  for (std::size_t m1 = 0; m1 < 2; ++m1)
    for (std::size_t c1 = 0; c1 < 2; ++c1)
      for (std::size_t m2 = 0; m2 < 2; ++m2) {
        const auto a = cb1.codeword(m1, c1);
        const auto b = cb2.codeword(m2, 0);
        std::vector<std::uint8_t> y{static_cast<std::uint8_t>(2 * a[0] + b[0]),
                                    static_cast<std::uint8_t>(2 * a[1] + b[1])};
        const auto d = decode_joint(ch, cb1, cb2, y);
        EXPECT_EQ(d.message1, m1);
        EXPECT_EQ(d.confusion1, c1);
        EXPECT_EQ(d.message2, m2);
        EXPECT_NEAR(d.log_likelihood, 0.0, 1e-12);
      }
}

TEST(Decode, TiesGoToSmallestTuple) {
  const auto ch = noiseless_pair_channel();
  const auto cb1 = codebook_from_table(1, 2, 2, 1, 0, {0, 1, 1, 0});
  const auto cb2 = codebook_from_table(2, 2, 2, 1, 0, {1, 1, 1, 1});
  const std::vector<std::uint8_t> y{3, 1};  // x1 = 10, x2 = 11
  const auto d = decode_joint(ch, cb1, cb2, y);
  EXPECT_EQ(d.message1, 1u);
  EXPECT_EQ(d.message2, 0u);
  EXPECT_THROW(decode_joint(ch, cb1, cb2, std::vector<std::uint8_t>{3}), ShapeError);
}

TEST(Decode, ErrorRateInsideVersusOutsideRegion) {
  const auto ch = binary_xor_channel(0.05, 0.25);
  const auto q = InputDistribution::uniform(ch);
  auto bler = [&](unsigned mb, std::uint64_t seed) {
    const auto cb1 = build_codebook(ch, q, 1, 8, mb, 0, derive_seed(seed, 1));
    const auto cb2 = build_codebook(ch, q, 2, 8, mb, 0, derive_seed(seed, 2));
    Engine rng(derive_seed(seed, 3));
    int errors = 0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
      const std::size_t m1 = uniform_below(rng, cb1.messages());
      const std::size_t m2 = uniform_below(rng, cb2.messages());
      const auto y = sample_bob(ch, cb1.codeword(m1, 0), cb2.codeword(m2, 0), rng);
      const auto d = decode_joint(ch, cb1, cb2, y);
      errors += d.message1 != m1 || d.message2 != m2;
    }
    return static_cast<double>(errors) / trials;
  };
  // Sum rate 0.25 vs 1.0 bits/use against I(X1,X2;Y) = 1 - h(0.05) ~ 0.71.
  const double inside = bler(1, 41);
  const double outside = bler(4, 41);
  EXPECT_LT(inside, 0.2);
  EXPECT_GT(outside, 0.5);
  EXPECT_LT(inside, outside);
}

TEST(Serialization, RoundTripAndRejectsGarbage) {
  const auto ch = binary_xor_channel(0.05, 0.25);
  const auto cb = build_codebook(ch, InputDistribution::uniform(ch), 2, 5, 1, 3, 99);
  const auto bytes = serialize_codebook(cb);
  EXPECT_EQ(bytes.size(), 4u + 6 * 4 + 8 + cb.symbols.size());
  EXPECT_EQ(deserialize_codebook(bytes), cb);
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(deserialize_codebook(bad), ValidationError);
  auto cut = bytes;
  cut.pop_back();
  EXPECT_THROW(deserialize_codebook(cut), ValidationError);
}
