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

// Sample-size sensitivity sweeps.
//
// For every configured fraction f and trial t, both the real and the
// synthetic set are cut down to n = floor(f * min(N_real, N_synth)) items
// (so every evaluation is 1:1), all selected metrics are computed, and the
// per-(metric, provenance, fraction) results are summarized by mean,
// standard deviation and a percentile-bootstrap confidence interval of the
// mean.
//
// Seeds: trial seed = DeriveTrialSeed(base_seed, f, t). From it, the real
// subsample uses SubStream(seed, 1), the synthetic subsample
// SubStream(seed, 2) and pair selection SubStream(seed, 3); real and
// synthetic diversity therefore use the same pair positions.

#ifndef SYNEVAL_SWEEP_HPP_
#define SYNEVAL_SWEEP_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "syneval/dataset.hpp"
#include "syneval/embed.hpp"
#include "syneval/metrics.hpp"
#include "syneval/ssim.hpp"

namespace syneval {

struct SweepConfig {
  std::vector<double> fractions = {0.25, 0.5, 0.75, 1.0};
  std::size_t trials_per_fraction = 10;
  // Trials at fraction 1.0, where only pair selection is random.
  std::size_t full_fraction_trials = 1;
  std::uint64_t base_seed = 0;
  std::vector<MetricId> metrics = {MetricId::kMsSsimDiversity,
                                   MetricId::kCosineDiversity, MetricId::kFid};
  // pairing.seed is ignored; each trial derives its own.
  PairingSpec pairing;
  SsimParams ssim_params;
  std::size_t bootstrap_resamples = 1000;
  double confidence = 0.95;

  std::size_t TrialsFor(double fraction) const {
    return fraction == 1.0 ? full_fraction_trials : trials_per_fraction;
  }
  bool Uses(MetricId id) const;
  void Validate() const;
};

// One side of a comparison. Images are needed for MS-SSIM diversity,
// embeddings (one row per image, same order) for cosine diversity and FID.
struct EvaluationSet {
  std::string class_label;
  std::optional<ImageSet> images;
  std::optional<EmbeddingMatrix> embeddings;

  std::size_t size() const;
};

struct Aggregate {
  MetricId metric = MetricId::kFid;
  std::string provenance;
  double fraction = 1.0;
  std::size_t trials = 0;
  std::size_t sample_count = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;

  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

struct SweepResult {
  SweepConfig config;
  std::string class_label;
  // Sorted by (metric, fraction, trial, provenance).
  std::vector<MetricReport> reports;
  // Sorted by (metric, provenance, fraction).
  std::vector<Aggregate> aggregates;
};

SweepResult RunSweep(const EvaluationSet& real, const EvaluationSet& synth,
                     const SweepConfig& config);

// Convenience wrapper: embeds both sets with `embed` when an
// embedding-based metric is selected.
SweepResult RunSweep(const ImageSet& real, const ImageSet& synth,
                     const SweepConfig& config, const EmbedFunction& embed);

// Percentile-bootstrap interval for the mean of `values`; resample b draws
// values[UniformBelow(k)] k times from Xoshiro256StarStar(seed). Quantiles
// interpolate linearly between order statistics.
struct Interval {
  double low = 0.0;
  double high = 0.0;
};
Interval BootstrapMeanInterval(std::span<const double> values,
                               std::size_t resamples, double confidence,
                               std::uint64_t seed);

// Aggregates for a report list, recomputed from scratch.
std::vector<Aggregate> Summarize(std::span<const MetricReport> reports,
                                 const SweepConfig& config);

struct StabilityVerdict {
  MetricId metric = MetricId::kFid;
  bool stable = true;
  // Sub-1.0 fractions whose interval misses the fraction-1.0 estimate for
  // at least one provenance.
  std::vector<double> offending_fractions;
};

// "stable" iff, for every provenance, every fraction below 1.0 has a
// confidence interval containing the fraction-1.0 mean. Needs fraction 1.0
// plus at least one smaller fraction, each smaller fraction with >= 2 trials.
std::vector<StabilityVerdict> AssessStability(const SweepResult& result);

// CSV header: metric,class,provenance,fraction,trial,seed,count,value.
// count is the pair count for diversity metrics and the per-set sample
// count for FID.
void WriteSweepCsv(const SweepResult& result, std::ostream& out);
void WriteReportsCsv(std::span<const MetricReport> reports, std::ostream& out);

nlohmann::json ToJson(const SweepConfig& config);
nlohmann::json ToJson(const SweepResult& result,
                      std::span<const StabilityVerdict> verdicts);

// Shortest round-trip decimal form.
std::string FormatDouble(double v);

}  // namespace syneval

#endif  // SYNEVAL_SWEEP_HPP_
