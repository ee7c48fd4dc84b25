// Copyright 2026 The dkdrift Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// dkdrift command-line driver.
//
// Exit codes: 0 success, 1 configuration or fatal error, 2 data or parse
// error.

#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dkdrift/config.h"
#include "dkdrift/error.h"
#include "dkdrift/eval.h"
#include "dkdrift/file_util.h"
#include "dkdrift/knowledge.h"
#include "dkdrift/llm_gateway.h"
#include "dkdrift/pipeline.h"

namespace dkdrift {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitData = 2;

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyTurns:
    case ErrorCode::kNonContiguousIndices:
    case ErrorCode::kDuplicateId:
    case ErrorCode::kNoFencedBlock:
    case ErrorCode::kMalformedEntry:
    case ErrorCode::kEmptyExamples:
    case ErrorCode::kMalformedResponse:
    case ErrorCode::kAmbiguousVerdict:
    case ErrorCode::kNoVerdict:
    case ErrorCode::kNoClassMarker:
    case ErrorCode::kMissingGold:
    case ErrorCode::kMalformedRow:
    case ErrorCode::kUnknownLabel:
    case ErrorCode::kMalformedLine:
    case ErrorCode::kMalformedDocument:
      return kExitData;
    default:
      return kExitFatal;
  }
}

std::string OutputDir(const std::string &flag, const RunConfig *config) {
  std::string dir = flag;
  if (dir.empty() && config) dir = config->output_dir;
  if (dir.empty()) {
    throw Error(ErrorCode::kInvalidConfig,
                "no output directory (--out or [paths] output_dir)");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, dir + ": " + ec.message());
  return dir;
}

void WriteRunOutputs(const std::string &dir, const CorpusResult &result,
                     const EvalReport &report,
                     std::span<const ReferenceRow> references) {
  std::string lines;
  for (const Verdict &v : result.verdicts()) lines += VerdictToJsonLine(v) + "\n";
  const std::filesystem::path out(dir);
  internal::WriteFile((out / "verdicts.jsonl").string(), lines);
  internal::WriteFile((out / "report.json").string(), ReportToJson(report));
  const std::string text = RenderReportText(report, references);
  internal::WriteFile((out / "report.txt").string(), text);
  std::cout << text;
}

struct DiscoverArgs {
  std::string input, config, backend = "llm1", tmpl, out, domain = "reviews";
};

int RunDiscover(const DiscoverArgs &args) {
  const RunConfig config = LoadRunConfig(args.config);
  const BackendDescriptor *descriptor = nullptr;
  if (args.backend == config.llm1.id || args.backend == "llm1") {
    descriptor = &config.llm1;
  } else if (args.backend == config.llm2.id || args.backend == "llm2") {
    descriptor = &config.llm2;
  } else {
    throw Error(ErrorCode::kInvalidConfig, "unknown backend '" + args.backend + "'");
  }
  std::string tmpl_path = args.tmpl.empty() ? config.discovery_template : args.tmpl;
  const PromptTemplate tmpl = tmpl_path.empty()
                                  ? DefaultTemplate(TemplateKind::kDiscovery)
                                  : LoadTemplate(tmpl_path, TemplateKind::kDiscovery);
  const std::vector<Review> examples = LoadReviews(args.input);
  const std::string prompt = RenderDiscoveryPrompt(examples, tmpl);

  LlmBackend backend(*descriptor);
  const std::vector<ChatMessage> messages = {{ChatRole::kUser, prompt}};
  const std::string reply = backend.Complete(messages);
  PatternLibrary library;
  try {
    library = ParsePatternLibrary(reply, args.domain);
  } catch (const Error &e) {
    const std::string raw = args.out + ".raw.txt";
    internal::WriteFile(raw, reply);
    std::cerr << "error: " << e.what() << "\nraw reply written to " << raw << "\n";
    return ExitCodeFor(e.code());
  }
  SaveLibrary(library, args.out);
  std::cout << "wrote " << library.patterns.size() << " patterns ("
            << library.recommendations.size() << " recommendations), version "
            << library.version << " to " << args.out << "\n";
  return kExitOk;
}

struct RunArgs {
  std::string input, config, out;
  bool dk = false;
};

int RunClassifyReviews(const RunArgs &args) {
  const RunConfig config = LoadRunConfig(args.config);
  PipelineConfig pipeline_config = MakePipelineConfig(config, args.dk, true, false);
  const std::string dir = OutputDir(args.out, &config);
  const std::vector<Review> reviews = LoadReviews(args.input);

  std::map<std::string, Label> golds;
  for (const Review &r : reviews) {
    if (!r.gold_label) throw Error(ErrorCode::kMissingGold, r.id);
    golds[r.id] = *r.gold_label;
  }
  Pipeline pipeline(std::move(pipeline_config));
  const CorpusResult result = pipeline.RunReviews(reviews);
  if (!reviews.empty() && result.error_count() == reviews.size()) {
    std::cerr << "error: every review failed; first: " << result.items.front().error
              << "\n";
    return kExitFatal;
  }
  const EvalReport report =
      BuildReport(result, golds, "reviews", ConfigDigest(config),
                  DatasetDigest(reviews), config.llm1.id, config.llm2.id, args.dk);
  WriteRunOutputs(dir, result, report, ReportedReviewAccuracy());
  return kExitOk;
}

int RunAnalyze(const RunArgs &args, const std::string &model_out) {
  const RunConfig config = LoadRunConfig(args.config);
  PipelineConfig pipeline_config = MakePipelineConfig(config, args.dk, false, true);
  const std::string dir = OutputDir(args.out, &config);
  const std::vector<ConversationRecord> records = LoadConversations(args.input);

  std::vector<Conversation> all, train, test;
  for (const ConversationRecord &r : records) {
    all.push_back(r.conv);
    if (r.split == Split::kTrain) {
      if (r.conv.gold_label == Label::kReal) train.push_back(r.conv);
    } else {
      test.push_back(r.conv);
    }
  }
  if (train.empty()) {
    throw Error(ErrorCode::kEmptyTrainingSet, "no real conversations in the train split");
  }
  std::map<std::string, Label> golds;
  for (const Conversation &c : test) golds[c.id] = *c.gold_label;

  auto model = std::make_shared<const OcsvmModel>(
      TrainNormalModel(train, pipeline_config));
  for (const std::string &w : model->diagnostics.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  if (!model_out.empty()) internal::WriteFile(model_out, OcsvmModelToJson(*model));

  Pipeline pipeline(std::move(pipeline_config));
  const CorpusResult result = pipeline.RunCorpus(test, model);
  if (!test.empty() && result.error_count() == test.size()) {
    std::cerr << "error: every conversation failed; first: "
              << result.items.front().error << "\n";
    return kExitFatal;
  }
  const EvalReport report =
      BuildReport(result, golds, "conversations", ConfigDigest(config),
                  DatasetDigest(all), config.llm1.id, config.llm2.id, args.dk);
  WriteRunOutputs(dir, result, report, ReportedConversationResults());
  return kExitOk;
}

int RunCompare(const std::string &a_path, const std::string &b_path) {
  const EvalReport a = ReportFromJson(internal::ReadFile(a_path));
  const EvalReport b = ReportFromJson(internal::ReadFile(b_path));
  const auto refs = a.task == "reviews" ? ReportedReviewAccuracy()
                                        : ReportedConversationResults();
  std::cout << RenderComparison(a, b, refs);
  return kExitOk;
}

int RunSeedLibrary(const std::string &kind, const std::string &out, bool fenced) {
  const PatternLibrary &library =
      kind == "reviews" ? SeedReviewLibrary() : SeedConversationCues();
  if (fenced) {
    internal::WriteFile(out, RenderFencedLibrary(library));
  } else {
    SaveLibrary(library, out);
  }
  std::cout << "wrote " << kind << " library " << library.version << " to " << out
            << "\n";
  return kExitOk;
}

int RunConvert(const std::string &input, const std::string &out) {
  const std::vector<ConversationRecord> records =
      ConvertDialogueCsv(internal::ReadFile(input));
  internal::WriteFile(out, RenderConversationsJsonl(records));
  const SplitCounts c = CountSplits(records);
  std::cout << "train: fake " << c.train_fake << ", real " << c.train_real
            << "\ntest: fake " << c.test_fake << ", real " << c.test_real << "\n";
  return kExitOk;
}

int Main(int argc, char **argv) {
  CLI::App app{"Deception screening with drift detection and DK prompting"};
  app.require_subcommand(1);

  DiscoverArgs discover;
  auto *discover_cmd = app.add_subcommand(
      "discover-patterns", "Derive a pattern library from labeled reviews");
  discover_cmd->add_option("--input", discover.input, "Reviews CSV")->required();
  discover_cmd->add_option("--config", discover.config, "Run config")->required();
  discover_cmd->add_option("--backend", discover.backend, "llm1 or llm2 (or its id)");
  discover_cmd->add_option("--template", discover.tmpl, "Discovery prompt template");
  discover_cmd->add_option("--domain", discover.domain, "Library domain name");
  discover_cmd->add_option("--out", discover.out, "Library JSON to write")->required();

  RunArgs reviews;
  auto *reviews_cmd =
      app.add_subcommand("classify-reviews", "Classify reviews and score them");
  reviews_cmd->add_option("--input", reviews.input, "Reviews CSV")->required();
  reviews_cmd->add_option("--config", reviews.config, "Run config")->required();
  reviews_cmd->add_flag("--dk,!--no-dk", reviews.dk, "Inject the pattern library");
  reviews_cmd->add_option("--out", reviews.out, "Output directory");

  RunArgs analyze;
  std::string model_out;
  auto *analyze_cmd = app.add_subcommand(
      "analyze", "Screen conversations, detect drift and classify it");
  analyze_cmd->add_option("--input", analyze.input, "Conversations JSONL")->required();
  analyze_cmd->add_option("--config", analyze.config, "Run config")->required();
  analyze_cmd->add_flag("--dk,!--no-dk", analyze.dk, "Inject the cue library");
  analyze_cmd->add_option("--out", analyze.out, "Output directory");
  analyze_cmd->add_option("--model-out", model_out, "Write the trained model JSON");

  std::string a_path, b_path;
  auto *compare_cmd = app.add_subcommand("compare", "Side-by-side metric deltas");
  compare_cmd->add_option("--a", a_path, "Baseline report.json")->required();
  compare_cmd->add_option("--b", b_path, "Candidate report.json")->required();

  std::string seed_kind = "reviews", seed_out;
  bool seed_fenced = false;
  auto *seed_cmd = app.add_subcommand("seed-library", "Write a built-in library");
  seed_cmd->add_option("--kind", seed_kind, "reviews or conversations")
      ->check(CLI::IsMember({"reviews", "conversations"}));
  seed_cmd->add_option("--out", seed_out, "Output path")->required();
  seed_cmd->add_flag("--fenced", seed_fenced, "Write the fenced text form");

  std::string convert_in, convert_out;
  auto *convert_cmd = app.add_subcommand(
      "convert-conversations", "Convert a dialogue CSV export to JSONL");
  convert_cmd->add_option("--input", convert_in, "CSV with id,split,label,dialogue")
      ->required();
  convert_cmd->add_option("--out", convert_out, "JSONL to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitFatal;
  }

  try {
    if (*discover_cmd) return RunDiscover(discover);
    if (*reviews_cmd) return RunClassifyReviews(reviews);
    if (*analyze_cmd) return RunAnalyze(analyze, model_out);
    if (*compare_cmd) return RunCompare(a_path, b_path);
    if (*seed_cmd) return RunSeedLibrary(seed_kind, seed_out, seed_fenced);
    if (*convert_cmd) return RunConvert(convert_in, convert_out);
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitFatal;
}

}  // namespace
}  // namespace dkdrift

int main(int argc, char **argv) { return dkdrift::Main(argc, argv); }
