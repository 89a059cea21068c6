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

// Acceptance suite: one PASS/FAIL line per criterion; exits with status 1 on
// failure if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "syneval/cli.hpp"
#include "syneval/dataset.hpp"
#include "syneval/embed.hpp"
#include "syneval/metrics.hpp"
#include "syneval/rng.hpp"
#include "syneval/ssim.hpp"
#include "syneval/sweep.hpp"
#include "test_support.hpp"

namespace syneval {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

GaussianStats Stats(std::vector<double> mean, std::vector<double> var) {
  GaussianStats s;
  s.mean = Eigen::Map<Eigen::VectorXd>(mean.data(), mean.size());
  s.cov = Eigen::VectorXd::Map(var.data(), var.size()).asDiagonal();
  s.sample_count = 100;
  s.embedder_id = "fixture";
  return s;
}

EmbeddingMatrix Normals(Xoshiro256StarStar& rng, std::size_t n, std::size_t d,
                        std::vector<double> shift = {}) {
  std::vector<float> values(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      values[i * d + k] =
          static_cast<float>(rng.Normal() + (shift.empty() ? 0.0 : shift[k]));
    }
  }
  return EmbeddingMatrix(n, d, std::move(values), "gauss-fixture");
}

Outcome SsimOracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  SsimParams params;
  double worst = 0.0;
  for (std::size_t size : {28, 64}) {
    for (int i = 0; i < 100; ++i) {
      const GrayImage a = testing::RandomImage(rng, size, size);
      const GrayImage b = i % 2 == 0 ? testing::Perturb(rng, a, 30.0)
                                     : testing::RandomImage(rng, size, size);
      worst = std::max(worst, std::abs(Ssim(a, b, params).value - testing::BruteSsim(a, b)));
      worst = std::max(worst, std::abs(MsSsim(a, b, params).value - testing::BruteMsSsim(a, b)));
    }
  }
  const double secs = Seconds(start);
  return {worst <= 1e-6 && secs < 60.0,
          "max |diff| " + Num(worst) + " over 200 pairs, " + Num(secs) + " s"};
}

Outcome MsSsimIdentitySymmetry() {
  std::mt19937_64 rng(77);
  std::vector<GrayImage> corpus;
  for (int i = 0; i < 100; ++i) {
    corpus.push_back(i % 2 == 0 ? testing::BlobImage(rng, 28, 28)
                                : testing::RandomImage(rng, 28, 28));
  }
  SsimParams params;
  double identity = 0.0;
  double symmetry = 0.0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    identity = std::max(identity, std::abs(MsSsim(corpus[i], corpus[i], params).value - 1.0));
    for (std::size_t j = i + 1; j < corpus.size(); ++j) {
      symmetry = std::max(symmetry, std::abs(MsSsim(corpus[i], corpus[j], params).value -
                                             MsSsim(corpus[j], corpus[i], params).value));
    }
  }
  return {identity <= 1e-9 && symmetry <= 1e-12,
          "identity err " + Num(identity) + ", symmetry err " + Num(symmetry)};
}

Outcome ConstantImages() {
  const GrayImage black(28, 28, std::vector<double>(28 * 28, 0.0));
  const GrayImage white(28, 28, std::vector<double>(28 * 28, 255.0));
  SsimParams params;
  const double expected = params.c1() / (255.0 * 255.0 + params.c1());
  const double got = Ssim(black, white, params).value;
  return {std::abs(got - expected) <= 1e-9,
          "ssim " + Num(got) + " vs " + Num(expected)};
}

Outcome FidClosedForms() {
  std::vector<std::string> failures;
  const GaussianStats base = Stats({0.3, -1.0, 2.0}, {1.0, 0.5, 2.0});
  const double identity = Fid(base, base).value;
  if (std::abs(identity) > 1e-8) failures.push_back("identity " + Num(identity));
  const double d1 = Fid(Stats({0.0}, {1.5}), Stats({2.0}, {1.5})).value;
  if (std::abs(d1 - 4.0) > 1e-8) failures.push_back("D=1 " + Num(d1));
  // mean shift (1,1) plus std (1,2) vs (2,1).
  const double d2 = Fid(Stats({0.0, 0.0}, {1.0, 4.0}), Stats({1.0, 1.0}, {4.0, 1.0})).value;
  if (std::abs(d2 - 4.0) > 1e-6) failures.push_back("D=2 " + Num(d2));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> mean(-3.0, 3.0);
  std::uniform_real_distribution<double> sd(0.1, 3.0);
  std::uniform_int_distribution<int> dim(1, 16);
  double worst = 0.0;
  for (int f = 0; f < 50; ++f) {
    const int d = dim(rng);
    std::vector<double> mr(d), ms(d), vr(d), vs(d);
    double expected = 0.0;
    for (int k = 0; k < d; ++k) {
      mr[k] = mean(rng);
      ms[k] = mean(rng);
      const double sr = sd(rng), ss = sd(rng);
      vr[k] = sr * sr;
      vs[k] = ss * ss;
      expected += (mr[k] - ms[k]) * (mr[k] - ms[k]) + (sr - ss) * (sr - ss);
    }
    worst = std::max(worst, std::abs(Fid(Stats(mr, vr), Stats(ms, vs)).value - expected));
  }
  if (worst > 1e-6) failures.push_back("random diagonal err " + Num(worst));
  std::string detail = "identity " + Num(identity) + ", D=1 " + Num(d1) + ", D=2 " + Num(d2) +
                       ", 50 diagonal max err " + Num(worst);
  return {failures.empty(), detail};
}

Outcome FidSamplingConsistency() {
  const auto start = Clock::now();
  int ok = 0;
  std::string worst;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Xoshiro256StarStar rng(seed);
    const GaussianStats a = FitGaussian(Normals(rng, 5000, 16));
    const GaussianStats b = FitGaussian(Normals(rng, 5000, 16));
    std::vector<double> shift(16, 0.25);  // ||shift|| = 1
    const GaussianStats c = FitGaussian(Normals(rng, 5000, 16, shift));
    const double same = Fid(a, b).value;
    const double shifted = Fid(a, c).value;
    if (same < shifted) ++ok;
    if (seed == 0) worst = "seed 0: " + Num(same) + " < " + Num(shifted);
  }
  const double secs = Seconds(start);
  return {ok == 10 && secs < 60.0,
          std::to_string(ok) + "/10 seeds, " + worst + ", " + Num(secs) + " s"};
}

Outcome CosineAnchors() {
  auto distance = [](std::vector<float> u, std::vector<float> v) {
    std::vector<float> values = u;
    values.insert(values.end(), v.begin(), v.end());
    EmbeddingMatrix m(2, u.size(), std::move(values), "anchor");
    return CosineDiversity(m, PairingSpec{}).value;
  };
  const double orthogonal = distance({1, 0, 0}, {0, 3, 0});
  const double antipodal = distance({1, -2, 3}, {-1, 2, -3});
  const double identical = distance({0.3f, 0.7f, -1.1f}, {0.3f, 0.7f, -1.1f});
  bool pass = orthogonal == 1.0 && antipodal == 2.0 && identical == 0.0;

  Xoshiro256StarStar rng(9);
  double lo = 2.0, hi = 0.0;
  for (std::size_t n : {2, 5, 40, 300}) {
    for (std::size_t d : {2, 3, 64}) {
      const EmbeddingMatrix m = Normals(rng, n, d);
      for (std::uint64_t s = 0; s < 5; ++s) {
        const double v = CosineDiversity(m, PairingSpec{100, s, 200}).value;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  // Clustered antipodal set pushes values toward the upper bound.
  std::vector<float> twin;
  for (int i = 0; i < 20; ++i) {
    const float sign = i % 2 == 0 ? 1.0f : -1.0f;
    twin.insert(twin.end(), {sign * 1.0f, sign * 2.0f, sign * 3.0f});
  }
  const double twin_value = CosineDiversity(EmbeddingMatrix(20, 3, twin, "anchor"), {}).value;
  lo = std::min(lo, twin_value);
  hi = std::max(hi, twin_value);
  pass = pass && lo >= 0.0 && hi <= 2.0;
  return {pass, "orthogonal " + Num(orthogonal) + ", antipodal " + Num(antipodal) +
                    ", identical " + Num(identical) + ", range [" + Num(lo) + ", " + Num(hi) +
                    "]"};
}

struct StabilityCount {
  int fid = 0;
  int cd = 0;
};

Outcome StabilityOnGaussians() {
  const auto start = Clock::now();
  SweepConfig config;
  config.metrics = {MetricId::kCosineDiversity, MetricId::kFid};
  StabilityCount stable, sensitive;
  const int reps = 20;
  for (int rep = 0; rep < reps; ++rep) {
    Xoshiro256StarStar rng(SubStream(1000 + rep, 0xACCE97));
    EvaluationSet real{"gauss", std::nullopt, Normals(rng, 2000, 16)};
    EvaluationSet synth{"gauss", std::nullopt, Normals(rng, 2000, 16)};
    config.base_seed = static_cast<std::uint64_t>(rep);
    SweepResult result = RunSweep(real, synth, config);
    for (const StabilityVerdict& v : AssessStability(result)) {
      if (!v.stable) continue;
      (v.metric == MetricId::kFid ? stable.fid : stable.cd) += 1;
    }

    // Shift every 25% trial by 10 trial standard deviations.
    for (const Aggregate& agg : result.aggregates) {
      if (agg.fraction != 0.25) continue;
      const double delta = 10.0 * std::max(agg.stddev, 1e-12);
      for (MetricReport& r : result.reports) {
        if (r.metric == agg.metric && r.provenance == agg.provenance && r.fraction == 0.25) {
          r.value += delta;
        }
      }
    }
    result.aggregates = Summarize(result.reports, result.config);
    for (const StabilityVerdict& v : AssessStability(result)) {
      const bool flagged = !v.stable && std::find(v.offending_fractions.begin(),
                                                  v.offending_fractions.end(),
                                                  0.25) != v.offending_fractions.end();
      if (flagged) (v.metric == MetricId::kFid ? sensitive.fid : sensitive.cd) += 1;
    }
  }
  const double secs = Seconds(start);
  const bool pass = stable.fid >= 19 && stable.cd >= 19 && sensitive.fid == reps &&
                    sensitive.cd == reps && secs < 300.0;
  return {pass, "stable fid " + std::to_string(stable.fid) + "/20, cd " +
                    std::to_string(stable.cd) + "/20; perturbed flagged fid " +
                    std::to_string(sensitive.fid) + "/20, cd " + std::to_string(sensitive.cd) +
                    "/20; " + Num(secs) + " s"};
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "syneval");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome SweepDeterminism() {
  testing::TempDir tmp;
  std::mt19937_64 rng(31);
  for (const char* prov : {"real", "synthetic"}) {
    std::vector<GrayImage> images;
    for (int i = 0; i < 120; ++i) images.push_back(testing::BlobImage(rng, 28, 28));
    WriteImageDir(testing::MakeSet(std::move(images)), tmp.path() / "digit" / prov);
  }
  std::ofstream(tmp.path() / "manifest.tsv")
      << "digit\treal\timage_dir\t-\ndigit\tsynthetic\timage_dir\t-\n";
  std::vector<int> codes;
  for (const char* name : {"a", "b"}) {
    codes.push_back(Cli({"sweep", "--manifest", (tmp.path() / "manifest.tsv").string(),
                         "--class", "digit", "--out", (tmp.path() / name).string()}));
  }
  const bool csv = Slurp(tmp.path() / "a" / "sweep.csv") == Slurp(tmp.path() / "b" / "sweep.csv");
  const bool json =
      Slurp(tmp.path() / "a" / "sweep.json") == Slurp(tmp.path() / "b" / "sweep.json");
  const bool nonempty = !Slurp(tmp.path() / "a" / "sweep.csv").empty();
  return {codes[0] == 0 && codes[1] == 0 && csv && json && nonempty,
          std::string("exit ") + std::to_string(codes[0]) + "/" + std::to_string(codes[1]) +
              ", csv " + (csv ? "identical" : "differs") + ", json " +
              (json ? "identical" : "differs")};
}

Outcome FormatRoundTrips() {
  testing::TempDir tmp;
  std::mt19937_64 rng(41);
  std::vector<GrayImage> images;
  for (int i = 0; i < 50; ++i) images.push_back(testing::RandomImage(rng, 28, 28));
  WriteIdx(testing::MakeSet(std::move(images)), tmp.path() / "set.idx");
  const ImageSet from_idx = LoadIdx(tmp.path() / "set.idx");
  WriteImageDir(from_idx, tmp.path() / "dir");
  const ImageSet from_dir = LoadImageDir(tmp.path() / "dir", "", Provenance::kReal);
  bool pixels = from_dir.size() == from_idx.size();
  for (std::size_t i = 0; pixels && i < from_idx.size(); ++i) {
    pixels = from_dir[i] == from_idx[i];
  }

  Xoshiro256StarStar erng(42);
  std::vector<float> values(37 * 19);
  for (float& v : values) v = static_cast<float>(erng.Normal() * 1e3);
  values[0] = std::numeric_limits<float>::denorm_min();
  values[1] = -0.0f;
  const EmbeddingMatrix m(37, 19, values, "roundtrip-id");
  WriteEmbeddings(m, tmp.path() / "m.emb");
  const EmbeddingMatrix back = ReadEmbeddings(tmp.path() / "m.emb");
  const bool bits = back.rows() == m.rows() && back.dims() == m.dims() &&
                    back.embedder_id() == m.embedder_id() &&
                    std::memcmp(back.values().data(), m.values().data(),
                                values.size() * sizeof(float)) == 0;
  const bool bytes = EncodeEmbeddings(back) == EncodeEmbeddings(m);
  return {pixels && bits && bytes, std::string("idx->dir ") + (pixels ? "identical" : "differs") +
                                       ", emb1 " + (bits && bytes ? "identical" : "differs")};
}

Outcome FractionArithmetic() {
  std::mt19937_64 rng(1214);
  std::vector<GrayImage> real, synth;
  for (int i = 0; i < 1214; ++i) real.push_back(testing::BlobImage(rng, 28, 28));
  for (int i = 0; i < 1214; ++i) synth.push_back(testing::BlobImage(rng, 28, 28));
  const SweepResult result =
      RunSweep(testing::MakeSet(real), testing::MakeSet(synth, "cls", Provenance::kSynthetic),
               SweepConfig{}, EmbedReference);
  std::vector<std::size_t> sizes;
  for (const MetricReport& r : result.reports) sizes.push_back(r.sample_count);
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  std::string detail = "sizes {";
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    detail += (i ? ", " : "") + std::to_string(sizes[i]);
  }
  detail += "}";
  return {sizes == std::vector<std::size_t>{303, 607, 910, 1214}, detail};
}

}  // namespace
}  // namespace syneval

int main() {
  using syneval::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"ssim_oracle_equivalence", syneval::SsimOracle},
      {"ms_ssim_identity_symmetry", syneval::MsSsimIdentitySymmetry},
      {"constant_image_ssim", syneval::ConstantImages},
      {"fid_closed_forms", syneval::FidClosedForms},
      {"fid_sampling_consistency", syneval::FidSamplingConsistency},
      {"cosine_bounds_anchors", syneval::CosineAnchors},
      {"stability_on_gaussians", syneval::StabilityOnGaussians},
      {"sweep_determinism", syneval::SweepDeterminism},
      {"format_round_trips", syneval::FormatRoundTrips},
      {"fraction_arithmetic", syneval::FractionArithmetic},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", outcome.pass ? "PASS" : "FAIL", name, outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
