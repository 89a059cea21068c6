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

#include <png.h>

#include <cstring>
#include <string>
#include <vector>

#include "syneval/dataset.hpp"
#include "syneval/error.hpp"

namespace syneval {

GrayImage ReadPngGray(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw Error(ErrorKind::kFormat,
                "cannot decode PNG " + path.string() + ": " + image.message);
  }
  if ((image.format & PNG_FORMAT_FLAG_COLOR) != 0 ||
      (image.format & PNG_FORMAT_FLAG_LINEAR) != 0) {
    png_image_free(&image);
    throw Error(ErrorKind::kFormat,
                "PNG " + path.string() + " is not 8-bit grayscale");
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    throw Error(ErrorKind::kFormat,
                "cannot decode PNG " + path.string() + ": " + image.message);
  }
  std::vector<double> pixels(buffer.begin(), buffer.end());
  return GrayImage(image.height, image.width, std::move(pixels));
}

void WritePngGray(const GrayImage& image, const std::filesystem::path& path) {
  std::vector<png_byte> buffer(image.pixels().size());
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    const double v = image.pixels()[i];
    if (!(v >= 0.0 && v <= 255.0) || v != static_cast<double>(static_cast<int>(v))) {
      throw Error(ErrorKind::kInvalidArgument,
                  "PNG export needs integer pixels in [0,255]");
    }
    buffer[i] = static_cast<png_byte>(v);
  }
  png_image out;
  std::memset(&out, 0, sizeof(out));
  out.version = PNG_IMAGE_VERSION;
  out.width = static_cast<png_uint_32>(image.width());
  out.height = static_cast<png_uint_32>(image.height());
  out.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&out, path.c_str(), 0, buffer.data(), 0,
                               nullptr)) {
    throw Error(ErrorKind::kIo,
                "cannot write PNG " + path.string() + ": " + out.message);
  }
}

}  // namespace syneval
