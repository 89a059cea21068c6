/* Copyright 2026 The Syneval Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "syneval/embed.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>

#include "syneval/error.hpp"
#include "test_support.hpp"

namespace syneval {
namespace {

using testing::MakeSet;
using testing::RandomImage;
using testing::TempDir;

ErrorKind KindOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorKind::kIo;
}

TEST(EmbedReference, ConstantImage) {
  const EmbeddingMatrix m = EmbedReference(MakeSet({GrayImage(28, 28, 128.0)}));
  ASSERT_EQ(m.rows(), 1u);
  ASSERT_EQ(m.dims(), 64u);
  EXPECT_EQ(m.embedder_id(), "ref-avgpool-64");
  for (float v : m.values()) EXPECT_FLOAT_EQ(v, 128.0f / 255.0f);
  EXPECT_NEAR(m.at(0, 0), 0.50196, 1e-5);
}

TEST(EmbedReference, ZeroImage) {
  const EmbeddingMatrix m = EmbedReference(MakeSet({GrayImage(9, 13, 0.0)}));
  for (float v : m.values()) EXPECT_EQ(v, 0.0f);
}

TEST(EmbedReference, ExactPoolingOnDivisibleSize) {
  // 16x16 -> each cell is a 2x2 block.
  std::mt19937_64 rng(1);
  const GrayImage img = RandomImage(rng, 16, 16);
  const EmbeddingMatrix m = EmbedReference(MakeSet({img}));
  for (std::size_t gr = 0; gr < 8; ++gr) {
    for (std::size_t gc = 0; gc < 8; ++gc) {
      const double block = img.at(2 * gr, 2 * gc) + img.at(2 * gr, 2 * gc + 1) +
                           img.at(2 * gr + 1, 2 * gc) + img.at(2 * gr + 1, 2 * gc + 1);
      EXPECT_NEAR(m.at(0, gr * 8 + gc), block / 4.0 / 255.0, 1e-6);
    }
  }
}

TEST(EmbedReference, FractionalCellsWeightByOverlap) {
  // 12 rows split 8 ways: cell 0 covers rows [0, 1.5).
  GrayImage img(12, 8, 0.0);
  for (std::size_t c = 0; c < 8; ++c) img.at(1, c) = 255.0;
  const EmbeddingMatrix m = EmbedReference(MakeSet({img}));
  EXPECT_NEAR(m.at(0, 0), 0.5 / 1.5, 1e-6);   // row 1 contributes 0.5 of 1.5
  EXPECT_NEAR(m.at(0, 8), 0.5 / 1.5, 1e-6);   // cell 1 covers [1.5, 3)
  EXPECT_NEAR(m.at(0, 16), 0.0, 1e-7);
}

TEST(EmbedReference, UnitRangeMatchesByteRange) {
  std::mt19937_64 rng(2);
  const ImageSet bytes = MakeSet({RandomImage(rng, 28, 28), RandomImage(rng, 28, 28)});
  const EmbeddingMatrix a = EmbedReference(bytes);
  const EmbeddingMatrix b = EmbedReference(ConvertValueRange(bytes, ValueRange::kUnit));
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    EXPECT_NEAR(a.values()[i], b.values()[i], 1e-6);
  }
}

TEST(EmbedReference, DeterministicAndPermutationEquivariant) {
  std::mt19937_64 rng(3);
  std::vector<GrayImage> images;
  for (int i = 0; i < 6; ++i) images.push_back(RandomImage(rng, 28, 28));
  const ImageSet set = MakeSet(images);
  const EmbeddingMatrix once = EmbedReference(set);
  EXPECT_EQ(once, EmbedReference(set));

  std::vector<std::size_t> perm(images.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  const EmbeddingMatrix permuted = EmbedReference(SelectImages(set, perm));
  for (std::size_t r = 0; r < perm.size(); ++r) {
    for (std::size_t c = 0; c < 64; ++c) EXPECT_EQ(permuted.at(r, c), once.at(perm[r], c));
  }
}

TEST(EmbedReference, RejectsTinyImages) {
  EXPECT_EQ(KindOf([] { EmbedReference(MakeSet({GrayImage(7, 28)})); }),
            ErrorKind::kDimensionMismatch);
}

TEST(EmbeddingMatrix, Invariants) {
  EXPECT_EQ(KindOf([] { EmbeddingMatrix(1, 1, {0.0f}, "x"); }), ErrorKind::kInvalidArgument);
  EXPECT_EQ(KindOf([] { EmbeddingMatrix(0, 2, {}, "x"); }), ErrorKind::kInvalidArgument);
  EXPECT_EQ(KindOf([] { EmbeddingMatrix(1, 2, {0.0f}, "x"); }),
            ErrorKind::kDimensionMismatch);
  EXPECT_EQ(KindOf([] { EmbeddingMatrix(1, 2, {0.0f, NAN}, "x"); }),
            ErrorKind::kNumerical);
}

TEST(Emb1, MinimalFile) {
  std::vector<std::uint8_t> bytes = {'E', 'M', 'B', '1', 1, 0, 'z', 1, 0, 0, 0, 2, 0, 0, 0};
  for (float f : {0.0f, 1.0f}) {
    const auto bits = std::bit_cast<std::uint32_t>(f);
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  const EmbeddingMatrix m = DecodeEmbeddings(bytes);
  EXPECT_EQ(m.rows(), 1u);
  EXPECT_EQ(m.dims(), 2u);
  EXPECT_EQ(m.embedder_id(), "z");
  EXPECT_EQ(m.at(0, 0), 0.0f);
  EXPECT_EQ(m.at(0, 1), 1.0f);
  EXPECT_EQ(EncodeEmbeddings(m), bytes);
}

TEST(Emb1, TruncatedPayload) {
  const EmbeddingMatrix m(2, 2, {1, 2, 3, 4}, "id");
  auto bytes = EncodeEmbeddings(m);
  bytes.resize(bytes.size() - 8);
  EXPECT_EQ(KindOf([&] { DecodeEmbeddings(bytes); }), ErrorKind::kTruncation);
}

TEST(Emb1, BadMagicAndTrailingBytes) {
  const EmbeddingMatrix m(1, 2, {1, 2}, "id");
  auto bytes = EncodeEmbeddings(m);
  auto bad = bytes;
  bad[3] = '2';
  EXPECT_EQ(KindOf([&] { DecodeEmbeddings(bad); }), ErrorKind::kFormat);
  bytes.push_back(0);
  EXPECT_EQ(KindOf([&] { DecodeEmbeddings(bytes); }), ErrorKind::kFormat);
  EXPECT_EQ(KindOf([] { DecodeEmbeddings(std::vector<std::uint8_t>{'E', 'M'}); }),
            ErrorKind::kFormat);
}

TEST(Emb1, FileRoundTripIsBitExact) {
  TempDir tmp;
  std::mt19937_64 rng(4);
  for (int round = 0; round < 5; ++round) {
    const std::size_t n = 1 + rng() % 7;
    const std::size_t d = 2 + rng() % 70;
    std::vector<float> values(n * d);
    std::uniform_int_distribution<std::uint32_t> bits;
    for (float& v : values) {
      do {
        v = std::bit_cast<float>(bits(rng));
      } while (!std::isfinite(v));
    }
    const EmbeddingMatrix m(n, d, values, "rand-" + std::to_string(round));
    const auto path = tmp.path() / "m.emb";
    WriteEmbeddings(m, path);
    const EmbeddingMatrix back = ReadEmbeddings(path);
    EXPECT_EQ(back, m);
    for (std::size_t i = 0; i < values.size(); ++i) {
      EXPECT_EQ(std::bit_cast<std::uint32_t>(back.values()[i]),
                std::bit_cast<std::uint32_t>(values[i]));
    }
  }
}

TEST(EmbedderRegistry, BuiltinsAndDuplicates) {
  EmbedderRegistry registry = EmbedderRegistry::WithBuiltins();
  EXPECT_TRUE(registry.Contains(kReferenceEmbedderId));
  EXPECT_EQ(registry.Spec(kReferenceEmbedderId).dims, 64u);
  EXPECT_THROW(registry.Register({kReferenceEmbedderId, 64, "dup"}, EmbedReference), Error);
  EXPECT_THROW(registry.Spec("nope"), Error);
  registry.Register({"const", 2, "test"}, [](const ImageSet& s) {
    return EmbeddingMatrix(s.size(), 2, std::vector<float>(s.size() * 2, 1.0f), "const");
  });
  const EmbeddingMatrix m = registry.Embed("const", MakeSet({GrayImage(8, 8)}));
  EXPECT_EQ(m.embedder_id(), "const");
  EXPECT_EQ(registry.Ids().size(), 2u);
}

}  // namespace
}  // namespace syneval
