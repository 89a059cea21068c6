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

#include "syneval/ssim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "syneval/error.hpp"

namespace syneval {

void SsimParams::Validate() const {
  if (window_size < 3 || window_size % 2 == 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "SSIM window size must be odd and >= 3, got " +
                    std::to_string(window_size));
  }
  if (!(window_sigma > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "SSIM window sigma must be > 0");
  }
  if (!(k1 > 0.0) || !(k2 > 0.0) || !(dynamic_range > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "SSIM needs K1, K2, L > 0");
  }
  if (scale_weights.empty() ||
      std::any_of(scale_weights.begin(), scale_weights.end(),
                  [](double w) { return !(w > 0.0); })) {
    throw Error(ErrorKind::kInvalidArgument,
                "MS-SSIM scale weights must be non-empty and positive");
  }
}

std::vector<double> GaussianWindow(std::size_t size, double sigma) {
  std::vector<double> taps(size);
  const double center = static_cast<double>(size - 1) / 2.0;
  for (std::size_t i = 0; i < size; ++i) {
    const double d = static_cast<double>(i) - center;
    taps[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
  }
  const double sum = std::accumulate(taps.begin(), taps.end(), 0.0);
  for (double& t : taps) t /= sum;
  return taps;
}

int MsSsimScales(std::size_t height, std::size_t width, std::size_t window_size,
                 std::size_t max_scales) {
  const std::size_t side = std::min(height, width);
  int scales = 0;
  for (std::size_t j = 0; j < max_scales; ++j) {
    if ((side >> j) < window_size) break;
    ++scales;
  }
  return scales;
}

GrayImage Downsample2x(const GrayImage& image) {
  const std::size_t h = image.height() / 2;
  const std::size_t w = image.width() / 2;
  GrayImage out(h, w);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      out.at(r, c) = (image.at(2 * r, 2 * c) + image.at(2 * r, 2 * c + 1) +
                      image.at(2 * r + 1, 2 * c) + image.at(2 * r + 1, 2 * c + 1)) /
                     4.0;
    }
  }
  return out;
}

namespace {

// Valid-mode separable filtering of a row-major plane.
std::vector<double> FilterValid(const std::vector<double>& plane, std::size_t h,
                                std::size_t w, const std::vector<double>& taps) {
  const std::size_t k = taps.size();
  const std::size_t oh = h - k + 1;
  const std::size_t ow = w - k + 1;
  std::vector<double> rows(h * ow);
  for (std::size_t r = 0; r < h; ++r) {
    const double* src = plane.data() + r * w;
    for (std::size_t c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) acc += taps[t] * src[c + t];
      rows[r * ow + c] = acc;
    }
  }
  std::vector<double> out(oh * ow);
  for (std::size_t r = 0; r < oh; ++r) {
    for (std::size_t c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) acc += taps[t] * rows[(r + t) * ow + c];
      out[r * ow + c] = acc;
    }
  }
  return out;
}

struct ScaleTerms {
  double mean_lcs = 0.0;  // mean of l*c*s over windows
  double mean_cs = 0.0;   // mean of c*s over windows
};

ScaleTerms ComputeScale(const GrayImage& a, const GrayImage& b,
                        const SsimParams& params,
                        const std::vector<double>& taps) {
  const std::size_t h = a.height();
  const std::size_t w = a.width();
  const std::size_t n = h * w;
  std::vector<double> x(a.pixels().begin(), a.pixels().end());
  std::vector<double> y(b.pixels().begin(), b.pixels().end());
  std::vector<double> xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mu_x = FilterValid(x, h, w, taps);
  const auto mu_y = FilterValid(y, h, w, taps);
  const auto e_xx = FilterValid(xx, h, w, taps);
  const auto e_yy = FilterValid(yy, h, w, taps);
  const auto e_xy = FilterValid(xy, h, w, taps);

  const double c1 = params.c1();
  const double c2 = params.c2();
  const double c3 = params.c3();
  double sum_lcs = 0.0;
  double sum_cs = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double mx = mu_x[i];
    const double my = mu_y[i];
    const double var_x = std::max(0.0, e_xx[i] - mx * mx);
    const double var_y = std::max(0.0, e_yy[i] - my * my);
    const double cov = e_xy[i] - mx * my;
    const double sx = std::sqrt(var_x);
    const double sy = std::sqrt(var_y);
    const double l = (2.0 * mx * my + c1) / (mx * mx + my * my + c1);
    const double c = (2.0 * sx * sy + c2) / (var_x + var_y + c2);
    const double s = (cov + c3) / (sx * sy + c3);
    sum_cs += c * s;
    sum_lcs += l * c * s;
  }
  const auto count = static_cast<double>(mu_x.size());
  return {sum_lcs / count, sum_cs / count};
}

void CheckInputs(const GrayImage& a, const GrayImage& b,
                 const SsimParams& params) {
  params.Validate();
  if (a.height() != b.height() || a.width() != b.width()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "SSIM inputs differ in size: " + std::to_string(a.height()) + "x" +
                    std::to_string(a.width()) + " vs " +
                    std::to_string(b.height()) + "x" + std::to_string(b.width()));
  }
  if (a.height() < params.window_size || a.width() < params.window_size) {
    throw Error(ErrorKind::kDimensionMismatch,
                "SSIM needs images of at least " +
                    std::to_string(params.window_size) + "x" +
                    std::to_string(params.window_size) + ", got " +
                    std::to_string(a.height()) + "x" + std::to_string(a.width()));
  }
}

}  // namespace

SsimScore Ssim(const GrayImage& a, const GrayImage& b, const SsimParams& params) {
  CheckInputs(a, b, params);
  const auto taps = GaussianWindow(params.window_size, params.window_sigma);
  return {ComputeScale(a, b, params, taps).mean_lcs, 1};
}

SsimScore MsSsim(const GrayImage& a, const GrayImage& b, const SsimParams& params) {
  CheckInputs(a, b, params);
  const int scales = MsSsimScales(a.height(), a.width(), params.window_size,
                                  params.scale_weights.size());
  const double weight_sum =
      std::accumulate(params.scale_weights.begin(),
                      params.scale_weights.begin() + scales, 0.0);
  const auto taps = GaussianWindow(params.window_size, params.window_sigma);

  GrayImage x = a;
  GrayImage y = b;
  double value = 1.0;
  for (int j = 0; j < scales; ++j) {
    const double weight = params.scale_weights[static_cast<std::size_t>(j)] / weight_sum;
    const ScaleTerms terms = ComputeScale(x, y, params, taps);
    if (j + 1 < scales) {
      value *= std::pow(std::max(0.0, terms.mean_cs), weight);
      x = Downsample2x(x);
      y = Downsample2x(y);
    } else {
      value *= std::pow(std::max(0.0, terms.mean_lcs), weight);
    }
  }
  return {value, scales};
}

}  // namespace syneval
