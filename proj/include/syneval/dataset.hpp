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

// Image ingestion and seeded subsampling.

#ifndef SYNEVAL_DATASET_HPP_
#define SYNEVAL_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace syneval {

enum class Provenance { kReal, kSynthetic };

std::string_view ProvenanceName(Provenance p);
// Accepts "real" or "synthetic"; throws kInvalidArgument otherwise.
Provenance ParseProvenance(std::string_view name);

// Declared pixel scale of an image set. kByte: integers in [0, 255].
// kUnit: reals in [0, 1].
enum class ValueRange { kByte, kUnit };

// Dynamic range L used by SSIM: 255 for kByte, 1 for kUnit.
double DynamicRange(ValueRange range);

// Row-major grayscale image.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(std::size_t height, std::size_t width, double fill = 0.0);
  GrayImage(std::size_t height, std::size_t width, std::vector<double> pixels);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::span<const double> pixels() const noexcept { return pixels_; }
  std::span<double> mutable_pixels() noexcept { return pixels_; }

  double at(std::size_t row, std::size_t col) const noexcept {
    return pixels_[row * width_ + col];
  }
  double& at(std::size_t row, std::size_t col) noexcept {
    return pixels_[row * width_ + col];
  }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> pixels_;
};

// A labeled, non-empty collection of same-shape grayscale images. Immutable
// once constructed; the constructor enforces every invariant.
class ImageSet {
 public:
  ImageSet(std::string class_label, Provenance provenance, ValueRange range,
           std::vector<GrayImage> images);

  const std::string& class_label() const noexcept { return class_label_; }
  Provenance provenance() const noexcept { return provenance_; }
  ValueRange value_range() const noexcept { return value_range_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return images_.size(); }
  const GrayImage& operator[](std::size_t i) const { return images_[i]; }
  std::span<const GrayImage> images() const noexcept { return images_; }

 private:
  std::string class_label_;
  Provenance provenance_;
  ValueRange value_range_;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<GrayImage> images_;
};

// Same images, rescaled to the target range (byte -> unit divides by 255,
// unit -> byte multiplies by 255 and rounds).
ImageSet ConvertValueRange(const ImageSet& set, ValueRange target);

// Images at the given indices, in the given order.
ImageSet SelectImages(const ImageSet& set, std::span<const std::size_t> indices);

// ---------------------------------------------------------------------------
// IDX (MNIST family): magic 00 00 08 03, then big-endian u32 count, rows,
// cols, then count*rows*cols unsigned bytes, row-major.

ImageSet LoadIdx(const std::filesystem::path& path,
                 std::string class_label = "",
                 Provenance provenance = Provenance::kReal);
ImageSet ParseIdx(std::span<const std::uint8_t> bytes,
                  std::string class_label = "",
                  Provenance provenance = Provenance::kReal);
void WriteIdx(const ImageSet& set, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Image directories: every *.png in the directory (non-recursive), loaded in
// byte-lexicographic filename order.

GrayImage ReadPngGray(const std::filesystem::path& path);
void WritePngGray(const GrayImage& image, const std::filesystem::path& path);

ImageSet LoadImageDir(const std::filesystem::path& dir, std::string class_label,
                      Provenance provenance);
// Writes images as 000000.png, 000001.png, ... so that LoadImageDir restores
// the original order. Requires a kByte set.
void WriteImageDir(const ImageSet& set, const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Manifest: UTF-8 text, one entry per line,
//   class_label <TAB> provenance <TAB> format <TAB> path
// Blank lines and lines starting with '#' are ignored. Relative paths resolve
// against the manifest's directory. A path of "-" selects the default layout
// <root>/<class_label>/<provenance>.

enum class SourceFormat { kIdx, kImageDir };

struct ManifestEntry {
  std::string class_label;
  Provenance provenance = Provenance::kReal;
  SourceFormat format = SourceFormat::kImageDir;
  std::filesystem::path path;
};

class Manifest {
 public:
  // Parses manifest text; does not touch the filesystem.
  static Manifest Parse(std::string_view text, std::filesystem::path root);
  // Reads and parses a manifest file and checks every path exists.
  static Manifest Load(const std::filesystem::path& file);

  const std::filesystem::path& root() const noexcept { return root_; }
  std::span<const ManifestEntry> entries() const noexcept { return entries_; }
  const ManifestEntry* Find(std::string_view class_label,
                            Provenance provenance) const noexcept;

 private:
  std::filesystem::path root_;
  std::vector<ManifestEntry> entries_;
};

ImageSet LoadEntry(const ManifestEntry& entry);

// ---------------------------------------------------------------------------
// Subsampling.

struct SubsampleSpec {
  double fraction = 1.0;
  std::uint64_t seed = 0;
};

// floor(fraction * count). A 1e-9 guard absorbs representation error so that
// e.g. 0.29 * 100 yields 29.
std::size_t SubsampleCount(std::size_t count, double fraction);

// Indices of a uniform without-replacement sample of SubsampleCount(count)
// elements, ascending. Selection: partial Fisher-Yates over [0, count) driven
// by Xoshiro256StarStar(seed), j = i + UniformBelow(count - i) for the first
// n positions, then sorted. fraction == 1 yields the identity.
std::vector<std::size_t> SubsampleIndices(std::size_t count,
                                          const SubsampleSpec& spec);

// The selection primitive behind SubsampleIndices: n of count indices,
// ascending; identity when n == count.
std::vector<std::size_t> SampleIndices(std::size_t count, std::size_t n,
                                       std::uint64_t seed);

ImageSet Subsample(const ImageSet& set, const SubsampleSpec& spec);

}  // namespace syneval

#endif  // SYNEVAL_DATASET_HPP_
