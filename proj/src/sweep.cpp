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

#include "syneval/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "syneval/error.hpp"
#include "syneval/rng.hpp"

namespace syneval {

bool SweepConfig::Uses(MetricId id) const {
  return std::find(metrics.begin(), metrics.end(), id) != metrics.end();
}

void SweepConfig::Validate() const {
  if (fractions.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "sweep needs at least one fraction");
  }
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (!(fractions[i] > 0.0 && fractions[i] <= 1.0)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "fraction " + FormatDouble(fractions[i]) + " outside (0, 1]");
    }
    if (i > 0 && !(fractions[i] > fractions[i - 1])) {
      throw Error(ErrorKind::kInvalidArgument,
                  "fractions must be strictly ascending");
    }
  }
  if (trials_per_fraction < 1 || full_fraction_trials < 1) {
    throw Error(ErrorKind::kInvalidArgument, "trials per fraction must be >= 1");
  }
  if (metrics.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "sweep needs at least one metric");
  }
  if (pairing.pair_count < 1) {
    throw Error(ErrorKind::kInvalidArgument, "pair_count must be >= 1");
  }
  if (bootstrap_resamples < 1 || !(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "invalid bootstrap settings");
  }
  ssim_params.Validate();
}

std::size_t EvaluationSet::size() const {
  if (images) return images->size();
  if (embeddings) return embeddings->rows();
  return 0;
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

constexpr std::uint64_t kRealStream = 1;
constexpr std::uint64_t kSynthStream = 2;
constexpr std::uint64_t kPairStream = 3;
constexpr std::uint64_t kBootstrapTag = 0xB0075A4D;

int ProvenanceOrder(const std::string& p) {
  if (p == "real") return 0;
  if (p == "synthetic") return 1;
  return 2;
}

auto ReportKey(const MetricReport& r) {
  return std::make_tuple(static_cast<int>(r.metric), r.fraction, r.trial,
                         ProvenanceOrder(r.provenance));
}

struct Subset {
  std::optional<ImageSet> images;
  std::optional<EmbeddingMatrix> embeddings;
};

Subset Select(const EvaluationSet& set, std::span<const std::size_t> indices) {
  Subset out;
  const bool whole = indices.size() == set.size();
  if (set.images) {
    out.images = whole ? *set.images : SelectImages(*set.images, indices);
  }
  if (set.embeddings) {
    out.embeddings = whole ? *set.embeddings : SelectRows(*set.embeddings, indices);
  }
  return out;
}

void CheckInputs(const EvaluationSet& real, const EvaluationSet& synth,
                 const SweepConfig& config) {
  for (const EvaluationSet* set : {&real, &synth}) {
    if (config.Uses(MetricId::kMsSsimDiversity) && !set->images) {
      throw Error(ErrorKind::kInvalidArgument,
                  "MS-SSIM diversity needs images for both sets");
    }
    if ((config.Uses(MetricId::kCosineDiversity) || config.Uses(MetricId::kFid)) &&
        !set->embeddings) {
      throw Error(ErrorKind::kInvalidArgument,
                  "cosine diversity and FID need embeddings for both sets");
    }
    if (set->images && set->embeddings &&
        set->images->size() != set->embeddings->rows()) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "embedding rows (" + std::to_string(set->embeddings->rows()) +
                      ") do not match image count (" +
                      std::to_string(set->images->size()) + ")");
    }
  }
  if (real.images && synth.images &&
      (real.images->height() != synth.images->height() ||
       real.images->width() != synth.images->width())) {
    throw Error(ErrorKind::kDimensionMismatch,
                "real and synthetic images differ in size");
  }
  if (real.embeddings && synth.embeddings &&
      real.embeddings->dims() != synth.embeddings->dims()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "real and synthetic embeddings differ in dimension");
  }
}

void RunTrial(const EvaluationSet& real, const EvaluationSet& synth,
              const SweepConfig& config, double fraction, std::size_t trial,
              std::vector<MetricReport>& reports) {
  const std::uint64_t seed = DeriveTrialSeed(config.base_seed, fraction, trial);
  const std::size_t n = SubsampleCount(std::min(real.size(), synth.size()), fraction);
  if (n < 2) {
    throw Error(ErrorKind::kTooFewSamples,
                "fraction " + FormatDouble(fraction) + " of " +
                    std::to_string(std::min(real.size(), synth.size())) +
                    " items leaves " + std::to_string(n) + " (need at least 2)");
  }
  const auto real_idx = SampleIndices(real.size(), n, SubStream(seed, kRealStream));
  const auto synth_idx = SampleIndices(synth.size(), n, SubStream(seed, kSynthStream));
  const Subset r = Select(real, real_idx);
  const Subset s = Select(synth, synth_idx);
  PairingSpec pairing = config.pairing;
  pairing.seed = SubStream(seed, kPairStream);

  auto emit = [&](MetricReport report, const std::string& provenance) {
    report.class_label = real.class_label;
    report.provenance = provenance;
    report.fraction = fraction;
    report.trial = trial;
    report.seed = seed;
    report.sample_count = n;
    reports.push_back(std::move(report));
  };
  for (MetricId metric : config.metrics) {
    switch (metric) {
      case MetricId::kMsSsimDiversity:
        emit(MsSsimDiversity(*r.images, pairing, config.ssim_params), "real");
        emit(MsSsimDiversity(*s.images, pairing, config.ssim_params), "synthetic");
        break;
      case MetricId::kCosineDiversity:
        emit(CosineDiversity(*r.embeddings, pairing), "real");
        emit(CosineDiversity(*s.embeddings, pairing), "synthetic");
        break;
      case MetricId::kFid:
        emit(Fid(FitGaussian(*r.embeddings), FitGaussian(*s.embeddings)),
             "real_vs_synthetic");
        break;
    }
  }
}

double Quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

Interval BootstrapMeanInterval(std::span<const double> values,
                               std::size_t resamples, double confidence,
                               std::uint64_t seed) {
  if (values.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "bootstrap of an empty sample");
  }
  const std::size_t k = values.size();
  Xoshiro256StarStar rng(seed);
  std::vector<double> means(resamples);
  for (double& m : means) {
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += values[rng.UniformBelow(k)];
    m = acc / static_cast<double>(k);
  }
  std::sort(means.begin(), means.end());
  const double tail = (1.0 - confidence) / 2.0;
  Interval out{Quantile(means, tail), Quantile(means, 1.0 - tail)};
  // Resample means of identical values can differ from the values in the
  // last ulp; keep the interval inside the observed range.
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  out.low = std::clamp(out.low, *mn, *mx);
  out.high = std::clamp(out.high, *mn, *mx);
  return out;
}

std::vector<Aggregate> Summarize(std::span<const MetricReport> reports,
                                 const SweepConfig& config) {
  std::map<std::tuple<int, int, double>, std::vector<const MetricReport*>> groups;
  for (const MetricReport& r : reports) {
    groups[{static_cast<int>(r.metric), ProvenanceOrder(r.provenance), r.fraction}]
        .push_back(&r);
  }
  std::vector<Aggregate> out;
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end(),
              [](const MetricReport* a, const MetricReport* b) { return a->trial < b->trial; });
    std::vector<double> values;
    for (const MetricReport* r : members) values.push_back(r->value);
    Aggregate agg;
    agg.metric = members.front()->metric;
    agg.provenance = members.front()->provenance;
    agg.fraction = members.front()->fraction;
    agg.trials = values.size();
    agg.sample_count = members.front()->sample_count;
    const double k = static_cast<double>(values.size());
    agg.mean = std::accumulate(values.begin(), values.end(), 0.0) / k;
    if (values.size() > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - agg.mean) * (v - agg.mean);
      agg.stddev = std::sqrt(ss / (k - 1.0));
    }
    const std::uint64_t seed =
        SubStream(DeriveTrialSeed(config.base_seed, agg.fraction, kBootstrapTag),
                  static_cast<std::uint64_t>(std::get<0>(key) * 8 + std::get<1>(key)));
    const Interval ci =
        BootstrapMeanInterval(values, config.bootstrap_resamples, config.confidence, seed);
    agg.ci_low = ci.low;
    agg.ci_high = ci.high;
    out.push_back(agg);
  }
  return out;
}

SweepResult RunSweep(const EvaluationSet& real, const EvaluationSet& synth,
                     const SweepConfig& config) {
  config.Validate();
  CheckInputs(real, synth, config);
  SweepResult result;
  result.config = config;
  result.class_label = real.class_label;
  for (double fraction : config.fractions) {
    for (std::size_t trial = 0; trial < config.TrialsFor(fraction); ++trial) {
      try {
        RunTrial(real, synth, config, fraction, trial, result.reports);
      } catch (const Error& e) {
        throw Error(e.kind(), std::string(e.what()) + " (fraction " +
                                  FormatDouble(fraction) + ", trial " +
                                  std::to_string(trial) + ")");
      }
    }
  }
  std::stable_sort(result.reports.begin(), result.reports.end(),
                   [](const MetricReport& a, const MetricReport& b) {
                     return ReportKey(a) < ReportKey(b);
                   });
  result.aggregates = Summarize(result.reports, config);
  return result;
}

SweepResult RunSweep(const ImageSet& real, const ImageSet& synth,
                     const SweepConfig& config, const EmbedFunction& embed) {
  EvaluationSet r{real.class_label(), real, std::nullopt};
  EvaluationSet s{real.class_label(), synth, std::nullopt};
  if (config.Uses(MetricId::kCosineDiversity) || config.Uses(MetricId::kFid)) {
    r.embeddings = embed(real);
    s.embeddings = embed(synth);
  }
  return RunSweep(r, s, config);
}

std::vector<StabilityVerdict> AssessStability(const SweepResult& result) {
  std::vector<StabilityVerdict> verdicts;
  for (MetricId metric : result.config.metrics) {
    std::map<std::string, const Aggregate*> full;
    std::vector<const Aggregate*> partial;
    for (const Aggregate& agg : result.aggregates) {
      if (agg.metric != metric) continue;
      if (agg.fraction == 1.0) {
        full[agg.provenance] = &agg;
      } else {
        partial.push_back(&agg);
      }
    }
    const std::string name(MetricName(metric));
    if (full.empty() || partial.empty()) {
      throw Error(ErrorKind::kTooFewSamples,
                  "stability of " + name +
                      " needs fraction 1.0 and at least one smaller fraction");
    }
    StabilityVerdict verdict;
    verdict.metric = metric;
    for (const Aggregate* agg : partial) {
      if (agg->trials < 2) {
        throw Error(ErrorKind::kTooFewSamples,
                    "stability of " + name + " needs >= 2 trials at fraction " +
                        FormatDouble(agg->fraction));
      }
      const auto it = full.find(agg->provenance);
      if (it == full.end()) continue;
      const double point = it->second->mean;
      if (point < agg->ci_low || point > agg->ci_high) {
        verdict.stable = false;
        if (std::find(verdict.offending_fractions.begin(),
                      verdict.offending_fractions.end(),
                      agg->fraction) == verdict.offending_fractions.end()) {
          verdict.offending_fractions.push_back(agg->fraction);
        }
      }
    }
    std::sort(verdict.offending_fractions.begin(), verdict.offending_fractions.end());
    verdicts.push_back(std::move(verdict));
  }
  return verdicts;
}

void WriteReportsCsv(std::span<const MetricReport> reports, std::ostream& out) {
  out << "metric,class,provenance,fraction,trial,seed,count,value\n";
  for (const MetricReport& r : reports) {
    const std::size_t count =
        r.metric == MetricId::kFid ? r.sample_count : r.pair_count;
    out << MetricName(r.metric) << ',' << r.class_label << ',' << r.provenance
        << ',' << FormatDouble(r.fraction) << ',' << r.trial << ',' << r.seed
        << ',' << count << ',' << FormatDouble(r.value) << '\n';
  }
}

void WriteSweepCsv(const SweepResult& result, std::ostream& out) {
  WriteReportsCsv(result.reports, out);
}

nlohmann::json ToJson(const SweepConfig& config) {
  nlohmann::json metrics = nlohmann::json::array();
  for (MetricId m : config.metrics) metrics.push_back(std::string(MetricName(m)));
  return {
      {"fractions", config.fractions},
      {"trials_per_fraction", config.trials_per_fraction},
      {"full_fraction_trials", config.full_fraction_trials},
      {"base_seed", config.base_seed},
      {"metrics", metrics},
      {"pairing",
       {{"pair_count", config.pairing.pair_count},
        {"exhaustive_threshold", config.pairing.exhaustive_threshold}}},
      {"ssim",
       {{"window_size", config.ssim_params.window_size},
        {"window_sigma", config.ssim_params.window_sigma},
        {"k1", config.ssim_params.k1},
        {"k2", config.ssim_params.k2},
        {"scale_weights", config.ssim_params.scale_weights}}},
      {"bootstrap",
       {{"resamples", config.bootstrap_resamples},
        {"confidence", config.confidence},
        {"method", "percentile"}}},
  };
}

nlohmann::json ToJson(const SweepResult& result,
                      std::span<const StabilityVerdict> verdicts) {
  nlohmann::json aggregates = nlohmann::json::array();
  for (const Aggregate& a : result.aggregates) {
    aggregates.push_back({{"metric", std::string(MetricName(a.metric))},
                          {"provenance", a.provenance},
                          {"fraction", a.fraction},
                          {"trials", a.trials},
                          {"sample_count", a.sample_count},
                          {"mean", a.mean},
                          {"stddev", a.stddev},
                          {"ci_low", a.ci_low},
                          {"ci_high", a.ci_high}});
  }
  nlohmann::json stability = nlohmann::json::array();
  for (const StabilityVerdict& v : verdicts) {
    stability.push_back({{"metric", std::string(MetricName(v.metric))},
                         {"verdict", v.stable ? "stable" : "sensitive"},
                         {"offending_fractions", v.offending_fractions}});
  }
  return {{"class", result.class_label},
          {"config", ToJson(result.config)},
          {"aggregates", aggregates},
          {"stability", stability}};
}

}  // namespace syneval
