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

#include "syneval/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "syneval/dataset.hpp"
#include "syneval/embed.hpp"
#include "syneval/error.hpp"
#include "syneval/metrics.hpp"
#include "syneval/sweep.hpp"

namespace syneval {
namespace {

namespace fs = std::filesystem;

// Usage-level failure (exit 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string manifest;
  std::string class_label;
  std::string out;
  std::uint64_t seed = kDefaultSeed;
  std::size_t pairs = 100;
  std::string embedder = "ref";
  std::size_t window_size = 11;
  int value_range = 255;
  int verbosity = 0;
};

struct SweepOptions {
  std::string fractions = "0.25,0.5,0.75,1.0";
  std::size_t trials = 10;
};

struct Inputs {
  EvaluationSet real;
  EvaluationSet synth;
  std::string embedder_id;
};

void AddCommon(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--manifest", opt.manifest, "Manifest file")->required();
  cmd->add_option("--class", opt.class_label, "Class label to evaluate")->required();
  cmd->add_option("--out", opt.out, "Output directory")->required();
  cmd->add_option("--seed", opt.seed, "Base seed")->capture_default_str();
  cmd->add_option("--pairs", opt.pairs, "Pairs sampled per diversity score")
      ->capture_default_str();
  cmd->add_option("--embedder", opt.embedder,
                  "Embedder: 'ref' or 'file:<dir>' with <dir>/<class>/<provenance>.emb")
      ->capture_default_str();
  cmd->add_option("--window-size", opt.window_size, "SSIM window size")
      ->capture_default_str();
  cmd->add_option("--value-range", opt.value_range, "Pixel range: 255 or 1")
      ->check(CLI::IsMember({255, 1}))
      ->capture_default_str();
  cmd->add_flag("-v,--verbose", opt.verbosity, "Verbose progress on stderr");
}

void EnsureWritableDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path probe = dir / ".syneval_write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw UsageError("output directory " + dir.string() + " is not writable");
  }
  fs::remove(probe, ec);
}

std::vector<double> ParseFractions(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("cannot parse fraction '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("--fractions is empty");
  return out;
}

ImageSet LoadClassSet(const Manifest& manifest, const std::string& class_label,
                      Provenance provenance, int value_range) {
  const ManifestEntry* entry = manifest.Find(class_label, provenance);
  if (entry == nullptr) {
    throw UsageError("manifest has no entry for (" + class_label + ", " +
                     std::string(ProvenanceName(provenance)) + ")");
  }
  ImageSet set = LoadEntry(*entry);
  if (value_range == 1) set = ConvertValueRange(set, ValueRange::kUnit);
  return set;
}

Inputs LoadInputs(const CommonOptions& opt, bool need_embeddings,
                  std::ostream& err) {
  const Manifest manifest = Manifest::Load(opt.manifest);
  Inputs in;
  in.real.class_label = opt.class_label;
  in.synth.class_label = opt.class_label;
  in.real.images = LoadClassSet(manifest, opt.class_label, Provenance::kReal, opt.value_range);
  in.synth.images =
      LoadClassSet(manifest, opt.class_label, Provenance::kSynthetic, opt.value_range);
  if (opt.verbosity > 0) {
    err << "loaded " << in.real.images->size() << " real and "
        << in.synth.images->size() << " synthetic images for " << opt.class_label
        << "\n";
  }
  if (opt.embedder == "ref") {
    in.embedder_id = kReferenceEmbedderId;
    if (need_embeddings) {
      in.real.embeddings = EmbedReference(*in.real.images);
      in.synth.embeddings = EmbedReference(*in.synth.images);
    }
  } else if (opt.embedder.rfind("file:", 0) == 0) {
    const fs::path dir = opt.embedder.substr(5);
    in.real.embeddings = ReadEmbeddings(dir / opt.class_label / "real.emb");
    in.synth.embeddings = ReadEmbeddings(dir / opt.class_label / "synthetic.emb");
    in.embedder_id = in.real.embeddings->embedder_id();
  } else {
    throw UsageError("unknown embedder '" + opt.embedder + "' (use ref or file:<dir>)");
  }
  return in;
}

SweepConfig BaseConfig(const CommonOptions& opt) {
  SweepConfig config;
  config.base_seed = opt.seed;
  config.pairing.pair_count = opt.pairs;
  config.ssim_params.window_size = opt.window_size;
  return config;
}

nlohmann::json Reproducibility(const std::string& command, const CommonOptions& opt,
                               const Inputs& in, const SweepConfig& config) {
  return {{"toolkit", "syneval"},
          {"version", kToolkitVersion},
          {"command", command},
          {"class", opt.class_label},
          {"seed", opt.seed},
          {"embedder", opt.embedder},
          {"embedder_id", in.embedder_id},
          {"value_range", opt.value_range},
          {"real_count", in.real.size()},
          {"synthetic_count", in.synth.size()},
          {"seed_derivation",
           "trial=Mix64(Mix64(Mix64(seed)^round(fraction*1e9))^trial); "
           "real=Mix64(trial^1), synthetic=Mix64(trial^2), pairs=Mix64(trial^3)"},
          {"config", ToJson(config)}};
}

void WriteFile(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  f << content;
  if (!f) throw Error(ErrorKind::kIo, "cannot write " + path.string());
}

int CmdEvaluate(const CommonOptions& opt, std::ostream& out, std::ostream& err) {
  EnsureWritableDir(opt.out);
  Inputs in = LoadInputs(opt, true, err);
  SweepConfig config = BaseConfig(opt);
  config.fractions = {1.0};
  const SweepResult result = RunSweep(in.real, in.synth, config);

  std::ostringstream csv;
  WriteReportsCsv(result.reports, csv);
  WriteFile(fs::path(opt.out) / "metrics.csv", csv.str());
  nlohmann::json run = {{"reproducibility", Reproducibility("evaluate", opt, in, config)}};
  WriteFile(fs::path(opt.out) / "run.json", run.dump(2) + "\n");
  for (const MetricReport& r : result.reports) {
    out << MetricName(r.metric) << " " << r.provenance << " " << FormatDouble(r.value)
        << "\n";
  }
  return kExitOk;
}

int CmdSweep(const CommonOptions& opt, const SweepOptions& sweep_opt,
             std::ostream& out, std::ostream& err) {
  SweepConfig config = BaseConfig(opt);
  config.fractions = ParseFractions(sweep_opt.fractions);
  config.trials_per_fraction = sweep_opt.trials;
  try {
    config.Validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  EnsureWritableDir(opt.out);
  Inputs in = LoadInputs(opt, true, err);
  const SweepResult result = RunSweep(in.real, in.synth, config);

  nlohmann::json doc;
  std::vector<StabilityVerdict> verdicts;
  try {
    verdicts = AssessStability(result);
  } catch (const Error& e) {
    doc["stability_error"] = e.what();
  }
  std::ostringstream csv;
  WriteSweepCsv(result, csv);
  WriteFile(fs::path(opt.out) / "sweep.csv", csv.str());
  doc.update(ToJson(result, verdicts));
  doc["reproducibility"] = Reproducibility("sweep", opt, in, config);
  WriteFile(fs::path(opt.out) / "sweep.json", doc.dump(2) + "\n");
  for (const StabilityVerdict& v : verdicts) {
    out << MetricName(v.metric) << ": " << (v.stable ? "stable" : "sensitive");
    for (double f : v.offending_fractions) out << " " << FormatDouble(f);
    out << "\n";
  }
  return kExitOk;
}

int CmdEmbed(const CommonOptions& opt, std::ostream& out) {
  if (opt.embedder != "ref") throw UsageError("embed only supports --embedder ref");
  const Manifest manifest = Manifest::Load(opt.manifest);
  EnsureWritableDir(fs::path(opt.out) / opt.class_label);
  bool any = false;
  for (Provenance p : {Provenance::kReal, Provenance::kSynthetic}) {
    if (manifest.Find(opt.class_label, p) == nullptr) continue;
    const ImageSet set = LoadClassSet(manifest, opt.class_label, p, opt.value_range);
    const fs::path target =
        fs::path(opt.out) / opt.class_label / (std::string(ProvenanceName(p)) + ".emb");
    WriteEmbeddings(EmbedReference(set), target);
    out << target.string() << "\n";
    any = true;
  }
  if (!any) throw UsageError("manifest has no entries for class " + opt.class_label);
  return kExitOk;
}

int CmdConvert(const std::string& idx, const std::string& dir,
               const std::string& class_label, std::ostream& out) {
  EnsureWritableDir(dir);
  const ImageSet set = LoadIdx(idx, class_label);
  WriteImageDir(set, dir);
  out << "wrote " << set.size() << " images to " << dir << "\n";
  return kExitOk;
}

int ExitCodeFor(ErrorKind kind) {
  return kind == ErrorKind::kManifest ? kExitUsage : kExitFailure;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Diversity and quality metrics for synthetic image sets", "syneval"};
  app.set_version_flag("--version", std::string(kToolkitVersion));
  app.require_subcommand(1);

  CommonOptions evaluate_opt;
  CLI::App* evaluate = app.add_subcommand("evaluate", "All metrics at fraction 1.0");
  AddCommon(evaluate, evaluate_opt);

  CommonOptions sweep_opt;
  SweepOptions sweep_extra;
  CLI::App* sweep = app.add_subcommand("sweep", "Sample-size sensitivity sweep");
  AddCommon(sweep, sweep_opt);
  sweep->add_option("--fractions", sweep_extra.fractions, "Comma-separated fractions")
      ->capture_default_str();
  sweep->add_option("--trials", sweep_extra.trials, "Trials per fraction below 1.0")
      ->capture_default_str();

  CommonOptions embed_opt;
  CLI::App* embed = app.add_subcommand("embed", "Write reference embeddings as EMB1");
  AddCommon(embed, embed_opt);

  std::string convert_in;
  std::string convert_out;
  std::string convert_class;
  CLI::App* convert = app.add_subcommand("convert", "IDX file to PNG directory");
  convert->add_option("--idx", convert_in, "IDX image file")->required()->check(CLI::ExistingFile);
  convert->add_option("--out", convert_out, "Output directory")->required();
  convert->add_option("--class", convert_class, "Class label");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (evaluate->parsed()) return CmdEvaluate(evaluate_opt, out, err);
    if (sweep->parsed()) return CmdSweep(sweep_opt, sweep_extra, out, err);
    if (embed->parsed()) return CmdEmbed(embed_opt, out);
    if (convert->parsed()) return CmdConvert(convert_in, convert_out, convert_class, out);
  } catch (const UsageError& e) {
    err << "syneval: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "syneval: " << ErrorKindName(e.kind()) << ": " << e.what() << "\n";
    return ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    err << "syneval: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace syneval
