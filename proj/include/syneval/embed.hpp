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

// Image embeddings: a pluggable embedder interface, the built-in reference
// embedder and the EMB1 file format for externally computed features.
//
// FID and cosine-distance values are only comparable between runs that use
// the same embedder. Every matrix carries its embedder id and the metrics
// refuse to mix ids.

#ifndef SYNEVAL_EMBED_HPP_
#define SYNEVAL_EMBED_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "syneval/dataset.hpp"

namespace syneval {

inline constexpr char kReferenceEmbedderId[] = "ref-avgpool-64";

// N x D float32 matrix, row-major, one row per image. Entries are finite,
// N >= 1 and D >= 2.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix(std::size_t rows, std::size_t dims, std::vector<float> values,
                  std::string embedder_id);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dims() const noexcept { return dims_; }
  const std::string& embedder_id() const noexcept { return embedder_id_; }
  std::span<const float> values() const noexcept { return values_; }
  std::span<const float> row(std::size_t i) const noexcept {
    return std::span<const float>(values_).subspan(i * dims_, dims_);
  }
  float at(std::size_t r, std::size_t c) const noexcept {
    return values_[r * dims_ + c];
  }

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t dims_;
  std::vector<float> values_;
  std::string embedder_id_;
};

EmbeddingMatrix SelectRows(const EmbeddingMatrix& matrix,
                           std::span<const std::size_t> indices);

// Area-average pools each image onto an 8x8 grid (pixel weights are their
// exact overlap with each cell, so sizes need not be multiples of 8),
// flattens row-major and divides by the dynamic range so values lie in
// [0, 1]. Requires images of at least 8x8.
EmbeddingMatrix EmbedReference(const ImageSet& set);

struct EmbedderSpec {
  std::string id;
  std::size_t dims = 0;
  std::string description;
};

using EmbedFunction = std::function<EmbeddingMatrix(const ImageSet&)>;

class EmbedderRegistry {
 public:
  // Registry pre-populated with the reference embedder.
  static EmbedderRegistry WithBuiltins();

  // Throws kInvalidArgument on a duplicate id.
  void Register(EmbedderSpec spec, EmbedFunction fn);
  bool Contains(const std::string& id) const { return entries_.count(id) > 0; }
  const EmbedderSpec& Spec(const std::string& id) const;
  EmbeddingMatrix Embed(const std::string& id, const ImageSet& set) const;
  std::vector<std::string> Ids() const;

 private:
  struct Entry {
    EmbedderSpec spec;
    EmbedFunction fn;
  };
  std::map<std::string, Entry> entries_;
};

// EMB1 layout (all integers little-endian):
//   "EMB1" | u16 id length | id bytes (UTF-8) | u32 N | u32 D |
//   N*D float32 row-major
void WriteEmbeddings(const EmbeddingMatrix& matrix,
                     const std::filesystem::path& path);
EmbeddingMatrix ReadEmbeddings(const std::filesystem::path& path);

std::vector<std::uint8_t> EncodeEmbeddings(const EmbeddingMatrix& matrix);
EmbeddingMatrix DecodeEmbeddings(std::span<const std::uint8_t> bytes);

}  // namespace syneval

#endif  // SYNEVAL_EMBED_HPP_
