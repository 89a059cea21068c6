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

// Intra-class diversity (mean pairwise MS-SSIM, mean pairwise cosine
// distance) and quality (Frechet distance between fitted Gaussians).

#ifndef SYNEVAL_METRICS_HPP_
#define SYNEVAL_METRICS_HPP_

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "syneval/dataset.hpp"
#include "syneval/embed.hpp"
#include "syneval/ssim.hpp"

namespace syneval {

enum class MetricId { kMsSsimDiversity, kCosineDiversity, kFid };

std::string_view MetricName(MetricId id);
MetricId ParseMetric(std::string_view name);

struct PairingSpec {
  std::size_t pair_count = 100;
  std::uint64_t seed = 0;
  // All C(N,2) pairs are used when C(N,2) <= exhaustive_threshold.
  std::size_t exhaustive_threshold = 200;
};

using IndexPair = std::pair<std::size_t, std::size_t>;

// Unordered pairs (i < j) over n items, sorted lexicographically. All pairs
// when C(n,2) <= exhaustive_threshold or pair_count >= C(n,2); otherwise
// pair_count distinct pairs drawn by Xoshiro256StarStar(seed): i uniform in
// [0,n), j uniform in [0,n-1) shifted past i, duplicates redrawn.
std::vector<IndexPair> SelectPairs(std::size_t n, const PairingSpec& pairing);

struct MetricReport {
  MetricId metric = MetricId::kFid;
  std::string class_label;
  // "real", "synthetic", or "real_vs_synthetic" for FID.
  std::string provenance;
  double value = 0.0;
  double fraction = 1.0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  // Pairs evaluated (diversity metrics); 0 for FID.
  std::size_t pair_count = 0;
  // Images per set that entered the computation.
  std::size_t sample_count = 0;
  std::optional<std::string> embedder_id;

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

struct GaussianStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  std::size_t sample_count = 0;
  std::string embedder_id;
};

// Mean of MsSsim over the selected pairs; lower means more diverse. The
// dynamic range comes from the set's value-range tag.
MetricReport MsSsimDiversity(const ImageSet& set, const PairingSpec& pairing,
                             SsimParams params);

// Mean of 1 - cos(u, v) over the selected pairs, in [0, 2]; higher means
// more diverse. Zero rows are rejected.
MetricReport CosineDiversity(const EmbeddingMatrix& emb,
                             const PairingSpec& pairing);

// Column means and unbiased (N-1) covariance, symmetrized.
GaussianStats FitGaussian(const EmbeddingMatrix& emb);

// ||mu_r - mu_s||^2 + Tr(S_r) + Tr(S_s) - 2 Tr((S_r^1/2 S_s S_r^1/2)^1/2).
//
// Square roots come from symmetric eigendecompositions with eigenvalues
// clamped at 0. If a decomposition fails or yields non-finite values, both
// covariances get eps*I added (eps = 1e-10, then x10) for up to 3 retries.
// Results in [-1e-6, 0) clamp to 0; anything lower is a numerical error.
MetricReport Fid(const GaussianStats& real, const GaussianStats& synth);

}  // namespace syneval

#endif  // SYNEVAL_METRICS_HPP_
