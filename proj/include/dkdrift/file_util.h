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

#ifndef DKDRIFT_FILE_UTIL_H_
#define DKDRIFT_FILE_UTIL_H_

#include <fstream>
#include <sstream>
#include <string>

#include "dkdrift/error.h"

namespace dkdrift::internal {

inline std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void WriteFile(const std::string &path, const std::string &contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << contents;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

}  // namespace dkdrift::internal

#endif  // DKDRIFT_FILE_UTIL_H_
