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

#include "syneval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "syneval/error.hpp"
#include "syneval/rng.hpp"

namespace syneval {

std::string_view MetricName(MetricId id) {
  switch (id) {
    case MetricId::kMsSsimDiversity: return "ms_ssim_diversity";
    case MetricId::kCosineDiversity: return "cosine_diversity";
    case MetricId::kFid: return "fid";
  }
  return "unknown";
}

MetricId ParseMetric(std::string_view name) {
  if (name == "ms_ssim_diversity") return MetricId::kMsSsimDiversity;
  if (name == "cosine_diversity") return MetricId::kCosineDiversity;
  if (name == "fid") return MetricId::kFid;
  throw Error(ErrorKind::kInvalidArgument, "unknown metric '" + std::string(name) + "'");
}

std::vector<IndexPair> SelectPairs(std::size_t n, const PairingSpec& pairing) {
  if (n < 2) {
    throw Error(ErrorKind::kTooFewSamples,
                "pairwise metrics need at least 2 items, got " + std::to_string(n));
  }
  if (pairing.pair_count < 1) {
    throw Error(ErrorKind::kInvalidArgument, "pair_count must be >= 1");
  }
  const std::size_t total = n * (n - 1) / 2;
  std::vector<IndexPair> pairs;
  if (total <= pairing.exhaustive_threshold || pairing.pair_count >= total) {
    pairs.reserve(total);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    }
    return pairs;
  }
  Xoshiro256StarStar rng(pairing.seed);
  std::set<IndexPair> chosen;
  while (chosen.size() < pairing.pair_count) {
    std::size_t i = rng.UniformBelow(n);
    std::size_t j = rng.UniformBelow(n - 1);
    if (j >= i) ++j;
    if (i > j) std::swap(i, j);
    chosen.emplace(i, j);
  }
  pairs.assign(chosen.begin(), chosen.end());
  return pairs;
}

MetricReport MsSsimDiversity(const ImageSet& set, const PairingSpec& pairing,
                             SsimParams params) {
  params.dynamic_range = DynamicRange(set.value_range());
  const auto pairs = SelectPairs(set.size(), pairing);
  double sum = 0.0;
  for (const auto& [i, j] : pairs) sum += MsSsim(set[i], set[j], params).value;

  MetricReport report;
  report.metric = MetricId::kMsSsimDiversity;
  report.class_label = set.class_label();
  report.provenance = std::string(ProvenanceName(set.provenance()));
  report.value = sum / static_cast<double>(pairs.size());
  report.seed = pairing.seed;
  report.pair_count = pairs.size();
  report.sample_count = set.size();
  return report;
}

MetricReport CosineDiversity(const EmbeddingMatrix& emb,
                             const PairingSpec& pairing) {
  const std::size_t d = emb.dims();
  std::vector<double> sq_norms(emb.rows());
  for (std::size_t r = 0; r < emb.rows(); ++r) {
    double acc = 0.0;
    for (float v : emb.row(r)) acc += static_cast<double>(v) * v;
    if (acc == 0.0) {
      throw Error(ErrorKind::kUndefinedDirection,
                  "embedding row " + std::to_string(r) +
                      " has zero norm; cosine distance is undefined");
    }
    sq_norms[r] = acc;
  }
  const auto pairs = SelectPairs(emb.rows(), pairing);
  double sum = 0.0;
  for (const auto& [i, j] : pairs) {
    const auto u = emb.row(i);
    const auto v = emb.row(j);
    double dot = 0.0;
    for (std::size_t k = 0; k < d; ++k) dot += static_cast<double>(u[k]) * v[k];
    const double cosine = dot / std::sqrt(sq_norms[i] * sq_norms[j]);
    sum += std::clamp(1.0 - cosine, 0.0, 2.0);
  }

  MetricReport report;
  report.metric = MetricId::kCosineDiversity;
  report.value = sum / static_cast<double>(pairs.size());
  report.seed = pairing.seed;
  report.pair_count = pairs.size();
  report.sample_count = emb.rows();
  report.embedder_id = emb.embedder_id();
  return report;
}

GaussianStats FitGaussian(const EmbeddingMatrix& emb) {
  const std::size_t n = emb.rows();
  const std::size_t d = emb.dims();
  if (n < 2) {
    throw Error(ErrorKind::kTooFewSamples,
                "Gaussian fit needs at least 2 samples, got " + std::to_string(n));
  }
  Eigen::MatrixXd x(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) x(r, c) = emb.at(r, c);
  }
  GaussianStats stats;
  stats.mean = x.colwise().mean().transpose();
  x.rowwise() -= stats.mean.transpose();
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
  stats.cov = (cov + cov.transpose()) / 2.0;
  stats.sample_count = n;
  stats.embedder_id = emb.embedder_id();
  return stats;
}

namespace {

constexpr double kFirstJitter = 1e-10;
constexpr int kJitterRetries = 3;
constexpr double kNegativeTolerance = 1e-6;

// Returns false if the decomposition failed or produced non-finite values.
bool SymmetricSqrt(const Eigen::MatrixXd& m, Eigen::MatrixXd& out) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) return false;
  const Eigen::VectorXd roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  out = solver.eigenvectors() * roots.asDiagonal() * solver.eigenvectors().transpose();
  return out.allFinite();
}

bool TraceOfSqrtProduct(const Eigen::MatrixXd& cov_r, const Eigen::MatrixXd& cov_s,
                        double& trace) {
  Eigen::MatrixXd sqrt_r;
  if (!SymmetricSqrt(cov_r, sqrt_r)) return false;
  Eigen::MatrixXd inner = sqrt_r * cov_s * sqrt_r;
  inner = (inner + inner.transpose()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(inner, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) return false;
  trace = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::isfinite(trace);
}

}  // namespace

MetricReport Fid(const GaussianStats& real, const GaussianStats& synth) {
  if (real.embedder_id != synth.embedder_id) {
    throw Error(ErrorKind::kEmbedderMismatch,
                "refusing to compare embeddings from '" + real.embedder_id +
                    "' and '" + synth.embedder_id + "'");
  }
  const Eigen::Index d = real.mean.size();
  if (synth.mean.size() != d || real.cov.rows() != d || real.cov.cols() != d ||
      synth.cov.rows() != d || synth.cov.cols() != d) {
    throw Error(ErrorKind::kDimensionMismatch,
                "FID inputs have dimensions " + std::to_string(d) + " and " +
                    std::to_string(synth.mean.size()));
  }
  if (!real.mean.allFinite() || !synth.mean.allFinite() ||
      !real.cov.allFinite() || !synth.cov.allFinite()) {
    throw Error(ErrorKind::kNumerical, "FID inputs contain non-finite values");
  }

  const double mean_term = (real.mean - synth.mean).squaredNorm();
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(d, d);
  double value = 0.0;
  bool solved = false;
  double jitter = 0.0;
  for (int attempt = 0; attempt <= kJitterRetries && !solved; ++attempt) {
    if (attempt > 0) jitter = attempt == 1 ? kFirstJitter : jitter * 10.0;
    const Eigen::MatrixXd cov_r = real.cov + jitter * identity;
    const Eigen::MatrixXd cov_s = synth.cov + jitter * identity;
    double trace_sqrt = 0.0;
    if (!TraceOfSqrtProduct(cov_r, cov_s, trace_sqrt)) continue;
    value = mean_term + cov_r.trace() + cov_s.trace() - 2.0 * trace_sqrt;
    solved = std::isfinite(value);
  }
  if (!solved) {
    throw Error(ErrorKind::kNumerical,
                "covariance square root failed after " +
                    std::to_string(kJitterRetries) + " jitter retries");
  }
  if (value < -kNegativeTolerance) {
    throw Error(ErrorKind::kNumerical,
                "FID evaluated to " + std::to_string(value) +
                    ", below the negative tolerance");
  }

  MetricReport report;
  report.metric = MetricId::kFid;
  report.provenance = "real_vs_synthetic";
  report.value = std::max(0.0, value);
  report.sample_count = real.sample_count;
  report.embedder_id = real.embedder_id;
  return report;
}

}  // namespace syneval
