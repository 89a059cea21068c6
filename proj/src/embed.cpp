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

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <utility>

#include "syneval/error.hpp"

namespace syneval {

namespace fs = std::filesystem;

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dims,
                                 std::vector<float> values,
                                 std::string embedder_id)
    : rows_(rows),
      dims_(dims),
      values_(std::move(values)),
      embedder_id_(std::move(embedder_id)) {
  if (rows_ < 1 || dims_ < 2) {
    throw Error(ErrorKind::kInvalidArgument,
                "embedding matrix needs N >= 1 and D >= 2, got " +
                    std::to_string(rows_) + "x" + std::to_string(dims_));
  }
  if (values_.size() != rows_ * dims_) {
    throw Error(ErrorKind::kDimensionMismatch,
                "embedding buffer holds " + std::to_string(values_.size()) +
                    " values, expected " + std::to_string(rows_ * dims_));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(ErrorKind::kNumerical,
                  "non-finite embedding value at row " +
                      std::to_string(i / dims_) + ", column " +
                      std::to_string(i % dims_));
    }
  }
}

EmbeddingMatrix SelectRows(const EmbeddingMatrix& matrix,
                           std::span<const std::size_t> indices) {
  std::vector<float> values;
  values.reserve(indices.size() * matrix.dims());
  for (std::size_t i : indices) {
    if (i >= matrix.rows()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "row " + std::to_string(i) + " out of range");
    }
    const auto row = matrix.row(i);
    values.insert(values.end(), row.begin(), row.end());
  }
  return EmbeddingMatrix(indices.size(), matrix.dims(), std::move(values),
                         matrix.embedder_id());
}

namespace {

constexpr std::size_t kGrid = 8;

// weights[g * extent + p]: overlap of pixel [p, p+1) with cell g of a
// kGrid-way split of [0, extent).
std::vector<double> CellOverlaps(std::size_t extent) {
  std::vector<double> weights(kGrid * extent, 0.0);
  const double cell = static_cast<double>(extent) / kGrid;
  for (std::size_t g = 0; g < kGrid; ++g) {
    const double lo = cell * static_cast<double>(g);
    const double hi = cell * static_cast<double>(g + 1);
    for (std::size_t p = 0; p < extent; ++p) {
      const double overlap = std::min(hi, static_cast<double>(p + 1)) -
                             std::max(lo, static_cast<double>(p));
      if (overlap > 0.0) weights[g * extent + p] = overlap;
    }
  }
  return weights;
}

}  // namespace

EmbeddingMatrix EmbedReference(const ImageSet& set) {
  const std::size_t h = set.height();
  const std::size_t w = set.width();
  if (h < kGrid || w < kGrid) {
    throw Error(ErrorKind::kDimensionMismatch,
                "reference embedder needs images of at least 8x8, got " +
                    std::to_string(h) + "x" + std::to_string(w));
  }
  const auto row_w = CellOverlaps(h);
  const auto col_w = CellOverlaps(w);
  const double area = (static_cast<double>(h) / kGrid) * (static_cast<double>(w) / kGrid);
  const double scale = DynamicRange(set.value_range());

  std::vector<float> values;
  values.reserve(set.size() * kGrid * kGrid);
  std::vector<double> col_pooled(h * kGrid);
  for (const GrayImage& img : set.images()) {
    // Pool columns first: col_pooled[r * kGrid + gc].
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t gc = 0; gc < kGrid; ++gc) {
        double acc = 0.0;
        for (std::size_t c = 0; c < w; ++c) acc += col_w[gc * w + c] * img.at(r, c);
        col_pooled[r * kGrid + gc] = acc;
      }
    }
    for (std::size_t gr = 0; gr < kGrid; ++gr) {
      for (std::size_t gc = 0; gc < kGrid; ++gc) {
        double acc = 0.0;
        for (std::size_t r = 0; r < h; ++r) acc += row_w[gr * h + r] * col_pooled[r * kGrid + gc];
        values.push_back(static_cast<float>(acc / area / scale));
      }
    }
  }
  return EmbeddingMatrix(set.size(), kGrid * kGrid, std::move(values),
                         kReferenceEmbedderId);
}

// ---------------------------------------------------------------------------

EmbedderRegistry EmbedderRegistry::WithBuiltins() {
  EmbedderRegistry registry;
  registry.Register({kReferenceEmbedderId, kGrid * kGrid,
                     "8x8 area-average pooling, pixels scaled to [0,1]"},
                    EmbedReference);
  return registry;
}

void EmbedderRegistry::Register(EmbedderSpec spec, EmbedFunction fn) {
  const std::string id = spec.id;
  if (!entries_.emplace(id, Entry{std::move(spec), std::move(fn)}).second) {
    throw Error(ErrorKind::kInvalidArgument,
                "embedder '" + id + "' is already registered");
  }
}

const EmbedderSpec& EmbedderRegistry::Spec(const std::string& id) const {
  const auto it = entries_.find(id);
  if (it == entries_.end()) {
    throw Error(ErrorKind::kInvalidArgument, "unknown embedder '" + id + "'");
  }
  return it->second.spec;
}

EmbeddingMatrix EmbedderRegistry::Embed(const std::string& id,
                                        const ImageSet& set) const {
  Spec(id);
  return entries_.at(id).fn(set);
}

std::vector<std::string> EmbedderRegistry::Ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, entry] : entries_) ids.push_back(id);
  return ids;
}

// ---------------------------------------------------------------------------
// EMB1

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};

void PutLe(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t GetLe(std::span<const std::uint8_t> in, std::size_t offset, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= std::uint64_t{in[offset + i]} << (8 * i);
  return v;
}

void Need(std::span<const std::uint8_t> bytes, std::size_t end,
          const char* what) {
  if (bytes.size() < end) {
    throw Error(ErrorKind::kTruncation,
                std::string("EMB1 ") + what + " truncated: expected " +
                    std::to_string(end) + " bytes, got " +
                    std::to_string(bytes.size()));
  }
}

}  // namespace

std::vector<std::uint8_t> EncodeEmbeddings(const EmbeddingMatrix& matrix) {
  const std::string& id = matrix.embedder_id();
  if (id.size() > 0xFFFF) {
    throw Error(ErrorKind::kInvalidArgument, "embedder id longer than 65535 bytes");
  }
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  PutLe(out, id.size(), 2);
  out.insert(out.end(), id.begin(), id.end());
  PutLe(out, matrix.rows(), 4);
  PutLe(out, matrix.dims(), 4);
  out.reserve(out.size() + matrix.values().size() * 4);
  for (float v : matrix.values()) PutLe(out, std::bit_cast<std::uint32_t>(v), 4);
  return out;
}

EmbeddingMatrix DecodeEmbeddings(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || !std::equal(std::begin(kMagic), std::end(kMagic),
                                      bytes.begin())) {
    throw Error(ErrorKind::kFormat, "bad EMB1 magic at offset 0");
  }
  Need(bytes, 6, "header");
  const std::size_t id_len = GetLe(bytes, 4, 2);
  Need(bytes, 6 + id_len + 8, "header");
  std::string id(bytes.begin() + 6, bytes.begin() + 6 + static_cast<std::ptrdiff_t>(id_len));
  const std::size_t base = 6 + id_len;
  const std::uint64_t rows = GetLe(bytes, base, 4);
  const std::uint64_t dims = GetLe(bytes, base + 4, 4);
  const std::size_t payload = base + 8;
  const std::uint64_t expected = payload + rows * dims * 4;
  Need(bytes, expected, "payload");
  if (bytes.size() > expected) {
    throw Error(ErrorKind::kFormat,
                "EMB1 has " + std::to_string(bytes.size() - expected) +
                    " trailing bytes at offset " + std::to_string(expected));
  }
  std::vector<float> values(rows * dims);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::bit_cast<float>(
        static_cast<std::uint32_t>(GetLe(bytes, payload + 4 * i, 4)));
  }
  try {
    return EmbeddingMatrix(rows, dims, std::move(values), std::move(id));
  } catch (const Error& e) {
    throw Error(ErrorKind::kFormat, std::string("EMB1 content invalid: ") + e.what());
  }
}

void WriteEmbeddings(const EmbeddingMatrix& matrix, const fs::path& path) {
  const auto bytes = EncodeEmbeddings(matrix);
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
}

EmbeddingMatrix ReadEmbeddings(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  try {
    return DecodeEmbeddings(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace syneval
