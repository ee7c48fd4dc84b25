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

#ifndef DKDRIFT_CONFIG_H_
#define DKDRIFT_CONFIG_H_

#include <cstdint>
#include <string>

#include "dkdrift/featurize.h"
#include "dkdrift/llm_gateway.h"
#include "dkdrift/ocdd.h"
#include "dkdrift/pipeline.h"

namespace dkdrift {

// File-backed run settings. The format is a flat INI-style document:
//
//   [llm1]
//   kind = mock
//   mock_rules = rules/llm1.json
//
// Sections: llm1, llm2, ocdd, featurizer, paths, run. Unknown sections and
// keys are rejected. Relative paths resolve against the config file's
// directory. Credentials never live in the file: api_key_env names the
// variable holding the key.
struct RunConfig {
  BackendDescriptor llm1;
  BackendDescriptor llm2;
  OcddConfig ocdd;
  FeaturizerConfig featurizer;

  std::string review_library;        // empty when unset
  std::string conversation_library;
  std::string discovery_template;
  std::string review_template;
  std::string conversation_template;
  std::string drift_template;
  std::string output_dir;

  int parallelism = 4;
  std::uint64_t seed = 0;

  // Throws kInvalidConfig.
  void Validate() const;
};

// Throws kInvalidConfig with "line N" context, or kIo.
RunConfig ParseRunConfig(const std::string &text, const std::string &base_dir = "");
RunConfig LoadRunConfig(const std::string &path);

// Canonical rendering of every setting (mock rules and file paths included);
// the DK switch is a run flag and is not part of it.
std::string CanonicalConfig(const RunConfig &config);
std::string ConfigDigest(const RunConfig &config);

// Builds backends, templates and, when dk_enabled, the libraries named in
// the config. require_review_library / require_conversation_library make a
// missing library path a kInvalidConfig error under DK.
PipelineConfig MakePipelineConfig(const RunConfig &config, bool dk_enabled,
                                  bool require_review_library,
                                  bool require_conversation_library);

}  // namespace dkdrift

#endif  // DKDRIFT_CONFIG_H_
