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

#include "syneval/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "syneval/error.hpp"
#include "syneval/rng.hpp"

namespace syneval {

namespace fs = std::filesystem;

std::string_view ProvenanceName(Provenance p) {
  return p == Provenance::kReal ? "real" : "synthetic";
}

Provenance ParseProvenance(std::string_view name) {
  if (name == "real") return Provenance::kReal;
  if (name == "synthetic") return Provenance::kSynthetic;
  throw Error(ErrorKind::kInvalidArgument,
              "unknown provenance '" + std::string(name) +
                  "' (expected real or synthetic)");
}

double DynamicRange(ValueRange range) {
  return range == ValueRange::kByte ? 255.0 : 1.0;
}

GrayImage::GrayImage(std::size_t height, std::size_t width, double fill)
    : height_(height), width_(width), pixels_(height * width, fill) {}

GrayImage::GrayImage(std::size_t height, std::size_t width,
                     std::vector<double> pixels)
    : height_(height), width_(width), pixels_(std::move(pixels)) {
  if (pixels_.size() != height * width) {
    throw Error(ErrorKind::kDimensionMismatch,
                "pixel buffer of " + std::to_string(pixels_.size()) +
                    " values does not match " + std::to_string(height) + "x" +
                    std::to_string(width));
  }
}

ImageSet::ImageSet(std::string class_label, Provenance provenance,
                   ValueRange range, std::vector<GrayImage> images)
    : class_label_(std::move(class_label)),
      provenance_(provenance),
      value_range_(range),
      images_(std::move(images)) {
  if (images_.empty()) {
    throw Error(ErrorKind::kEmptySet, "image set '" + class_label_ + "' (" +
                                          std::string(ProvenanceName(provenance_)) +
                                          ") is empty");
  }
  height_ = images_.front().height();
  width_ = images_.front().width();
  if (height_ == 0 || width_ == 0) {
    throw Error(ErrorKind::kDimensionMismatch, "images must be non-empty");
  }
  const double hi = DynamicRange(range);
  for (std::size_t i = 0; i < images_.size(); ++i) {
    const GrayImage& img = images_[i];
    if (img.height() != height_ || img.width() != width_) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "image " + std::to_string(i) + " is " +
                      std::to_string(img.height()) + "x" +
                      std::to_string(img.width()) + ", expected " +
                      std::to_string(height_) + "x" + std::to_string(width_));
    }
    for (double v : img.pixels()) {
      if (!(v >= 0.0 && v <= hi)) {
        throw Error(ErrorKind::kInvalidArgument,
                    "image " + std::to_string(i) + " has pixel " +
                        std::to_string(v) + " outside the declared range");
      }
    }
  }
}

ImageSet ConvertValueRange(const ImageSet& set, ValueRange target) {
  if (set.value_range() == target) return set;
  std::vector<GrayImage> out(set.images().begin(), set.images().end());
  for (GrayImage& img : out) {
    for (double& v : img.mutable_pixels()) {
      v = target == ValueRange::kUnit ? v / 255.0 : std::round(v * 255.0);
    }
  }
  return ImageSet(set.class_label(), set.provenance(), target, std::move(out));
}

ImageSet SelectImages(const ImageSet& set,
                      std::span<const std::size_t> indices) {
  std::vector<GrayImage> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= set.size()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "index " + std::to_string(i) + " out of range");
    }
    out.push_back(set[i]);
  }
  return ImageSet(set.class_label(), set.provenance(), set.value_range(),
                  std::move(out));
}

// ---------------------------------------------------------------------------
// IDX

namespace {

std::uint32_t ReadBigEndian32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
         (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
}

void AppendBigEndian32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::vector<std::uint8_t> ReadFileBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

}  // namespace

ImageSet ParseIdx(std::span<const std::uint8_t> bytes, std::string class_label,
                  Provenance provenance) {
  constexpr std::size_t kHeader = 16;
  if (bytes.size() < 4 || bytes[0] != 0x00 || bytes[1] != 0x00 ||
      bytes[2] != 0x08 || bytes[3] != 0x03) {
    throw Error(ErrorKind::kFormat,
                "bad IDX magic at offset 0 (expected 00 00 08 03)");
  }
  if (bytes.size() < kHeader) {
    throw Error(ErrorKind::kTruncation,
                "IDX header truncated: expected " + std::to_string(kHeader) +
                    " bytes, got " + std::to_string(bytes.size()));
  }
  const std::uint64_t count = ReadBigEndian32(bytes.data() + 4);
  const std::uint64_t rows = ReadBigEndian32(bytes.data() + 8);
  const std::uint64_t cols = ReadBigEndian32(bytes.data() + 12);
  const std::uint64_t expected = kHeader + count * rows * cols;
  if (bytes.size() < expected) {
    throw Error(ErrorKind::kTruncation,
                "IDX payload truncated: expected " + std::to_string(expected) +
                    " bytes, got " + std::to_string(bytes.size()));
  }
  if (bytes.size() > expected) {
    throw Error(ErrorKind::kFormat, "IDX file has " +
                                        std::to_string(bytes.size() - expected) +
                                        " trailing bytes at offset " +
                                        std::to_string(expected));
  }
  std::vector<GrayImage> images;
  images.reserve(count);
  const std::size_t plane = rows * cols;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint8_t* src = bytes.data() + kHeader + i * plane;
    images.emplace_back(rows, cols, std::vector<double>(src, src + plane));
  }
  return ImageSet(std::move(class_label), provenance, ValueRange::kByte,
                  std::move(images));
}

ImageSet LoadIdx(const fs::path& path, std::string class_label,
                 Provenance provenance) {
  const std::vector<std::uint8_t> bytes = ReadFileBytes(path);
  try {
    return ParseIdx(bytes, std::move(class_label), provenance);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void WriteIdx(const ImageSet& set, const fs::path& path) {
  if (set.value_range() != ValueRange::kByte) {
    throw Error(ErrorKind::kInvalidArgument, "IDX export needs a byte-range set");
  }
  std::vector<std::uint8_t> out = {0x00, 0x00, 0x08, 0x03};
  AppendBigEndian32(out, static_cast<std::uint32_t>(set.size()));
  AppendBigEndian32(out, static_cast<std::uint32_t>(set.height()));
  AppendBigEndian32(out, static_cast<std::uint32_t>(set.width()));
  for (const GrayImage& img : set.images()) {
    for (double v : img.pixels()) out.push_back(static_cast<std::uint8_t>(v));
  }
  std::ofstream file(path, std::ios::binary);
  file.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
  if (!file) throw Error(ErrorKind::kIo, "cannot write " + path.string());
}

// ---------------------------------------------------------------------------
// Image directories

ImageSet LoadImageDir(const fs::path& dir, std::string class_label,
                      Provenance provenance) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorKind::kIo, dir.string() + " is not a directory");
  }
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") {
      names.push_back(entry.path().filename().string());
    }
  }
  if (names.empty()) {
    throw Error(ErrorKind::kEmptySet, dir.string() + " contains no PNG images");
  }
  // std::string comparison is byte-lexicographic.
  std::sort(names.begin(), names.end());
  std::vector<GrayImage> images;
  images.reserve(names.size());
  for (const std::string& name : names) {
    GrayImage img = ReadPngGray(dir / name);
    if (!images.empty() && (img.height() != images.front().height() ||
                            img.width() != images.front().width())) {
      throw Error(ErrorKind::kDimensionMismatch,
                  (dir / name).string() + " is " + std::to_string(img.height()) +
                      "x" + std::to_string(img.width()) + ", expected " +
                      std::to_string(images.front().height()) + "x" +
                      std::to_string(images.front().width()) + " (from " +
                      names.front() + ")");
    }
    images.push_back(std::move(img));
  }
  return ImageSet(std::move(class_label), provenance, ValueRange::kByte,
                  std::move(images));
}

void WriteImageDir(const ImageSet& set, const fs::path& dir) {
  if (set.value_range() != ValueRange::kByte) {
    throw Error(ErrorKind::kInvalidArgument,
                "image directory export needs a byte-range set");
  }
  fs::create_directories(dir);
  const int digits = std::max<int>(6, static_cast<int>(std::to_string(set.size()).size()));
  for (std::size_t i = 0; i < set.size(); ++i) {
    std::string name = std::to_string(i);
    name.insert(0, static_cast<std::size_t>(digits) - name.size(), '0');
    WritePngGray(set[i], dir / (name + ".png"));
  }
}

// ---------------------------------------------------------------------------
// Manifest

namespace {

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

}  // namespace

Manifest Manifest::Parse(std::string_view text, fs::path root) {
  Manifest manifest;
  manifest.root_ = std::move(root);
  std::set<std::pair<std::string, Provenance>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    const auto fields = SplitTabs(line);
    const std::string where = "manifest line " + std::to_string(line_no);
    if (fields.size() != 4) {
      throw Error(ErrorKind::kManifest,
                  where + ": expected 4 tab-separated fields, got " +
                      std::to_string(fields.size()));
    }
    ManifestEntry entry;
    entry.class_label = std::string(fields[0]);
    if (entry.class_label.empty()) {
      throw Error(ErrorKind::kManifest, where + ": empty class label");
    }
    try {
      entry.provenance = ParseProvenance(fields[1]);
    } catch (const Error& e) {
      throw Error(ErrorKind::kManifest, where + ": " + e.what());
    }
    if (fields[2] == "idx") {
      entry.format = SourceFormat::kIdx;
    } else if (fields[2] == "image_dir") {
      entry.format = SourceFormat::kImageDir;
    } else {
      throw Error(ErrorKind::kManifest, where + ": unknown format '" +
                                            std::string(fields[2]) + "'");
    }
    if (fields[3] == "-") {
      entry.path = manifest.root_ / entry.class_label /
                   std::string(ProvenanceName(entry.provenance));
    } else {
      fs::path p{std::string(fields[3])};
      entry.path = p.is_absolute() ? p : manifest.root_ / p;
    }
    if (!seen.emplace(entry.class_label, entry.provenance).second) {
      throw Error(ErrorKind::kManifest,
                  where + ": duplicate entry for (" + entry.class_label + ", " +
                      std::string(ProvenanceName(entry.provenance)) + ")");
    }
    manifest.entries_.push_back(std::move(entry));
  }
  return manifest;
}

Manifest Manifest::Load(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorKind::kManifest, "cannot open manifest " + file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  fs::path root = file.parent_path();
  if (root.empty()) root = ".";
  Manifest manifest = Parse(buffer.str(), root);
  for (const ManifestEntry& entry : manifest.entries_) {
    if (!fs::exists(entry.path)) {
      throw Error(ErrorKind::kManifest,
                  "manifest entry (" + entry.class_label + ", " +
                      std::string(ProvenanceName(entry.provenance)) +
                      ") points to missing path " + entry.path.string());
    }
  }
  return manifest;
}

const ManifestEntry* Manifest::Find(std::string_view class_label,
                                    Provenance provenance) const noexcept {
  for (const ManifestEntry& entry : entries_) {
    if (entry.class_label == class_label && entry.provenance == provenance) {
      return &entry;
    }
  }
  return nullptr;
}

ImageSet LoadEntry(const ManifestEntry& entry) {
  if (entry.format == SourceFormat::kIdx) {
    return LoadIdx(entry.path, entry.class_label, entry.provenance);
  }
  return LoadImageDir(entry.path, entry.class_label, entry.provenance);
}

// ---------------------------------------------------------------------------
// Subsampling

std::size_t SubsampleCount(std::size_t count, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "fraction " + std::to_string(fraction) + " outside (0, 1]");
  }
  const double n = std::floor(fraction * static_cast<double>(count) + 1e-9);
  return std::min(count, static_cast<std::size_t>(n));
}

std::vector<std::size_t> SubsampleIndices(std::size_t count,
                                          const SubsampleSpec& spec) {
  const std::size_t n = SubsampleCount(count, spec.fraction);
  if (n < 2) {
    throw Error(ErrorKind::kTooFewSamples,
                "fraction " + std::to_string(spec.fraction) + " of " +
                    std::to_string(count) + " items leaves " +
                    std::to_string(n) + " (need at least 2)");
  }
  return SampleIndices(count, n, spec.seed);
}

std::vector<std::size_t> SampleIndices(std::size_t count, std::size_t n,
                                       std::uint64_t seed) {
  if (n > count) {
    throw Error(ErrorKind::kInvalidArgument,
                "cannot draw " + std::to_string(n) + " of " +
                    std::to_string(count) + " items");
  }
  std::vector<std::size_t> indices(count);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  if (n == count) return indices;
  Xoshiro256StarStar rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.UniformBelow(count - i));
    std::swap(indices[i], indices[j]);
  }
  indices.resize(n);
  std::sort(indices.begin(), indices.end());
  return indices;
}

ImageSet Subsample(const ImageSet& set, const SubsampleSpec& spec) {
  const std::vector<std::size_t> indices = SubsampleIndices(set.size(), spec);
  if (indices.size() == set.size()) return set;
  return SelectImages(set, indices);
}

}  // namespace syneval
