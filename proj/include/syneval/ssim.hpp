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

// Single-scale SSIM and multi-scale MS-SSIM for grayscale images.
//
// Moments are taken under a normalized Gaussian window evaluated only at
// "valid" positions (the window lies entirely inside the image; no padding).
//
// Small images: MS-SSIM normally uses five dyadic scales. An image only
// supports scale j if floor(min(H, W) / 2^(j-1)) >= window_size, so the
// number of scales is truncated to the largest feasible M and the first M
// weights are renormalized to sum to 1. For 28x28 inputs and an 11-pixel
// window that gives M = 2 (28 -> 14; 7 is too small).

#ifndef SYNEVAL_SSIM_HPP_
#define SYNEVAL_SSIM_HPP_

#include <cstddef>
#include <vector>

#include "syneval/dataset.hpp"

namespace syneval {

struct SsimParams {
  std::size_t window_size = 11;
  double window_sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  // Dynamic range L of the pixel values.
  double dynamic_range = 255.0;
  std::vector<double> scale_weights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

  double c1() const { return (k1 * dynamic_range) * (k1 * dynamic_range); }
  double c2() const { return (k2 * dynamic_range) * (k2 * dynamic_range); }
  double c3() const { return c2() / 2.0; }

  // Throws kInvalidArgument if any invariant is violated.
  void Validate() const;
};

struct SsimScore {
  double value = 0.0;
  int scales_used = 1;
};

// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
std::vector<double> GaussianWindow(std::size_t size, double sigma);

// Number of MS-SSIM scales supported by an image of the given size.
// Returns 0 when even the first scale does not fit.
int MsSsimScales(std::size_t height, std::size_t width, std::size_t window_size,
                 std::size_t max_scales = 5);

SsimScore Ssim(const GrayImage& a, const GrayImage& b, const SsimParams& params);
SsimScore MsSsim(const GrayImage& a, const GrayImage& b, const SsimParams& params);

// 2x2 average pooling; an odd trailing row/column is dropped.
GrayImage Downsample2x(const GrayImage& image);

}  // namespace syneval

#endif  // SYNEVAL_SSIM_HPP_
