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

#include "dkdrift/eval.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "dkdrift/error.h"
#include "dkdrift/featurize.h"
#include "dkdrift/file_util.h"
#include "json.hpp"

namespace dkdrift {
namespace {

using nlohmann::ordered_json;

std::string Hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string Trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct CsvRecord {
  std::size_t line = 0;  // line where the record starts
  std::vector<std::string> fields;
};

// RFC 4180: quoted fields may hold commas, doubled quotes and newlines.
std::vector<CsvRecord> ParseCsv(const std::string &text) {
  std::vector<CsvRecord> records;
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    CsvRecord record;
    record.line = line;
    std::string field;
    bool record_done = false;
    while (!record_done) {
      field.clear();
      if (i < text.size() && text[i] == '"') {
        ++i;
        for (;;) {
          if (i >= text.size()) {
            throw Error(ErrorCode::kMalformedRow,
                        "line " + std::to_string(record.line) +
                            ": unterminated quoted field");
          }
          if (text[i] == '"') {
            if (i + 1 < text.size() && text[i + 1] == '"') {
              field.push_back('"');
              i += 2;
              continue;
            }
            ++i;
            break;
          }
          if (text[i] == '\n') ++line;
          field.push_back(text[i++]);
        }
      } else {
        while (i < text.size() && text[i] != ',' && text[i] != '\n' &&
               text[i] != '\r') {
          field.push_back(text[i++]);
        }
      }
      record.fields.push_back(field);
      if (i < text.size() && text[i] == ',') {
        ++i;
        continue;
      }
      if (i < text.size() && text[i] == '\r') ++i;
      if (i < text.size() && text[i] == '\n') {
        ++i;
        ++line;
      } else if (i < text.size()) {
        throw Error(ErrorCode::kMalformedRow,
                    "line " + std::to_string(record.line) +
                        ": unexpected character after quoted field");
      }
      record_done = true;
    }
    const bool blank = record.fields.size() == 1 && record.fields[0].empty();
    if (!blank) records.push_back(std::move(record));
  }
  return records;
}

std::string CsvField(const std::string &value) {
  if (value.find_first_of(",\"\r\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::map<std::string, std::size_t> HeaderIndex(const CsvRecord &header,
                                               std::initializer_list<const char *> required,
                                               std::initializer_list<const char *> optional) {
  std::map<std::string, std::size_t> index;
  for (std::size_t c = 0; c < header.fields.size(); ++c) {
    index[Lower(Trim(header.fields[c]))] = c;
  }
  for (const char *name : required) {
    if (!index.count(name)) {
      throw Error(ErrorCode::kMalformedRow,
                  "line 1: header lacks column '" + std::string(name) + "'");
    }
  }
  for (const auto &[name, col] : index) {
    bool known = false;
    for (const char *n : required) known |= name == n;
    for (const char *n : optional) known |= name == n;
    if (!known) {
      throw Error(ErrorCode::kMalformedRow,
                  "line 1: unknown column '" + name + "'");
    }
  }
  return index;
}

std::optional<Label> LabelCell(const std::string &cell, std::size_t line,
                               bool allow_empty) {
  const std::string value = Trim(cell);
  if (value.empty() && allow_empty) return std::nullopt;
  try {
    return LabelFromName(value);
  } catch (const Error &) {
    throw Error(ErrorCode::kUnknownLabel,
                "line " + std::to_string(line) + ": '" + value + "'");
  }
}

std::string Percent(double fraction) {
  return std::to_string(RoundPercent(fraction));
}

std::string Cell(int value) { return value < 0 ? "-" : std::to_string(value); }

std::string Pad(const std::string &s, std::size_t width, bool left = false) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return left ? s + fill : fill + s;
}

std::string MetricBlock(const std::array<std::string, 4> &cells) {
  std::string out;
  static const std::size_t kWidths[4] = {10, 11, 8, 10};
  for (int k = 0; k < 4; ++k) out += Pad(cells[k], kWidths[k]);
  return out;
}

std::array<std::string, 4> MetricCells(const Metrics &m) {
  return {Percent(m.accuracy), Percent(m.precision), Percent(m.recall),
          Percent(m.f1)};
}

std::array<std::string, 4> ReferenceCells(const std::optional<std::array<int, 4>> &v) {
  if (!v) return {"-", "-", "-", "-"};
  return {Cell((*v)[0]), Cell((*v)[1]), Cell((*v)[2]), Cell((*v)[3])};
}

const std::string kMetricHeader = MetricBlock({"Accuracy", "Precision", "Recall", "F1-Score"});

std::size_t NameWidth(std::span<const ReferenceRow> rows, std::size_t extra,
                      std::size_t floor) {
  std::size_t width = floor;
  for (const ReferenceRow &row : rows) width = std::max(width, row.model.size() + extra);
  return width;
}

std::string StripTrailingSpaces(const std::string &text) {
  std::string out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::size_t last = end;
    while (last > start && text[last - 1] == ' ') --last;
    out.append(text, start, last - start);
    if (end < text.size()) out.push_back('\n');
    start = end + 1;
  }
  return out;
}

std::string DkTitle(bool dk) { return dk ? "With DK (%)" : "Without DK (%)"; }

std::string SignedPoints(double delta) {
  // Percentage points, rounded half away from zero.
  const double points = delta * 100.0;
  const long long rounded = static_cast<long long>(
      std::floor(std::fabs(points) + 0.5 + 1e-9));
  if (rounded == 0) return "0";
  return (points < 0 ? "-" : "+") + std::to_string(rounded);
}

}  // namespace

ConfusionCounts Accumulate(std::span<const Verdict> verdicts,
                           const std::map<std::string, Label> &golds) {
  ConfusionCounts counts;
  for (const Verdict &v : verdicts) {
    const auto it = golds.find(v.conversation_id);
    if (it == golds.end()) throw Error(ErrorCode::kMissingGold, v.conversation_id);
    const bool predicted_fake = v.label == Label::kFake;
    const bool gold_fake = it->second == Label::kFake;
    if (predicted_fake && gold_fake) {
      ++counts.tp;
    } else if (predicted_fake) {
      ++counts.fp;
    } else if (gold_fake) {
      ++counts.fn;
    } else {
      ++counts.tn;
    }
  }
  return counts;
}

Metrics ComputeMetrics(const ConfusionCounts &c) {
  if (c.total() <= 0) throw Error(ErrorCode::kEmptyCounts, "no scored items");
  Metrics m;
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  m.precision = c.tp + c.fp == 0
                    ? 0.0
                    : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  m.recall = c.tp + c.fn == 0
                 ? 0.0
                 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  m.f1 = m.precision + m.recall == 0
             ? 0.0
             : 2 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

int RoundPercent(double fraction) {
  // The epsilon keeps values such as 0.285 (stored as 28.4999...) from
  // rounding down.
  return static_cast<int>(std::floor(fraction * 100.0 + 0.5 + 1e-9));
}

std::vector<Review> ParseReviewsCsv(const std::string &text) {
  const std::vector<CsvRecord> records = ParseCsv(text);
  if (records.empty()) throw Error(ErrorCode::kMalformedRow, "line 1: missing header");
  const auto col = HeaderIndex(records.front(), {"id", "text", "label"}, {});
  std::vector<Review> reviews;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const CsvRecord &rec = records[r];
    if (rec.fields.size() != records.front().fields.size()) {
      throw Error(ErrorCode::kMalformedRow,
                  "line " + std::to_string(rec.line) + ": expected " +
                      std::to_string(records.front().fields.size()) +
                      " fields, got " + std::to_string(rec.fields.size()));
    }
    Review review;
    review.id = Trim(rec.fields[col.at("id")]);
    review.text = rec.fields[col.at("text")];
    if (review.id.empty() || Trim(review.text).empty()) {
      throw Error(ErrorCode::kMalformedRow,
                  "line " + std::to_string(rec.line) + ": empty id or text");
    }
    review.gold_label = LabelCell(rec.fields[col.at("label")], rec.line, true);
    reviews.push_back(std::move(review));
  }
  return reviews;
}

std::vector<Review> LoadReviews(const std::string &path) {
  return ParseReviewsCsv(internal::ReadFile(path));
}

std::string RenderReviewsCsv(std::span<const Review> reviews) {
  std::string out = "id,text,label\n";
  for (const Review &r : reviews) {
    out += CsvField(r.id) + "," + CsvField(r.text) + "," +
           (r.gold_label ? std::string(LabelName(*r.gold_label)) : "") + "\n";
  }
  return out;
}

ReviewClassCounts CountReviewClasses(std::span<const Review> reviews) {
  ReviewClassCounts counts;
  for (const Review &r : reviews) {
    if (!r.gold_label) {
      ++counts.unlabeled;
    } else if (*r.gold_label == Label::kFake) {
      ++counts.fake;
    } else {
      ++counts.real;
    }
  }
  return counts;
}

std::vector<ConversationRecord> ParseConversationsJsonl(const std::string &text) {
  std::vector<ConversationRecord> records;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string line = Trim(std::string_view(text).substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;

    const std::string where = "line " + std::to_string(line_no);
    ConversationRecord record;
    std::string label_text, drift_text;
    bool has_drift = false;
    try {
      const auto doc = nlohmann::json::parse(line);
      record.conv.id = doc.at("id").get<std::string>();
      const std::string split = doc.at("split").get<std::string>();
      if (split == "train") {
        record.split = Split::kTrain;
      } else if (split == "test") {
        record.split = Split::kTest;
      } else {
        throw Error(ErrorCode::kMalformedLine, where + ": unknown split '" + split + "'");
      }
      label_text = doc.at("label").get<std::string>();
      for (const auto &t : doc.at("turns")) {
        Turn turn;
        turn.index = record.conv.turns.size();
        turn.speaker = t.at("speaker").get<std::string>();
        turn.text = t.at("text").get<std::string>();
        record.conv.turns.push_back(std::move(turn));
      }
      if (doc.contains("drift_class") && !doc.at("drift_class").is_null()) {
        drift_text = doc.at("drift_class").get<std::string>();
        has_drift = true;
      }
    } catch (const nlohmann::json::exception &e) {
      throw Error(ErrorCode::kMalformedLine, where + ": " + e.what());
    }
    if (record.conv.id.empty() || record.conv.turns.empty()) {
      throw Error(ErrorCode::kMalformedLine, where + ": empty id or turns");
    }
    record.conv.gold_label = LabelCell(label_text, line_no, false);
    if (has_drift) {
      try {
        record.conv.gold_drift_class = DriftClassFromName(drift_text);
      } catch (const Error &) {
        throw Error(ErrorCode::kUnknownLabel,
                    where + ": drift_class '" + drift_text + "'");
      }
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<ConversationRecord> LoadConversations(const std::string &path) {
  return ParseConversationsJsonl(internal::ReadFile(path));
}

std::string RenderConversationsJsonl(std::span<const ConversationRecord> records) {
  std::string out;
  for (const ConversationRecord &r : records) {
    ordered_json doc;
    doc["id"] = r.conv.id;
    doc["split"] = r.split == Split::kTrain ? "train" : "test";
    doc["label"] = r.conv.gold_label ? std::string(LabelName(*r.conv.gold_label)) : "";
    doc["turns"] = ordered_json::array();
    for (const Turn &t : r.conv.turns) {
      doc["turns"].push_back({{"speaker", t.speaker}, {"text", t.text}});
    }
    if (r.conv.gold_drift_class) {
      doc["drift_class"] = std::string(DriftClassName(*r.conv.gold_drift_class));
    }
    out += doc.dump() + "\n";
  }
  return out;
}

SplitCounts CountSplits(std::span<const ConversationRecord> records) {
  SplitCounts c;
  for (const ConversationRecord &r : records) {
    const bool fake = r.conv.gold_label == Label::kFake;
    if (r.split == Split::kTrain) {
      ++(fake ? c.train_fake : c.train_real);
    } else {
      ++(fake ? c.test_fake : c.test_real);
    }
  }
  return c;
}

std::vector<ConversationRecord> ConvertDialogueCsv(const std::string &text) {
  const std::vector<CsvRecord> rows = ParseCsv(text);
  if (rows.empty()) throw Error(ErrorCode::kMalformedRow, "line 1: missing header");
  const auto col = HeaderIndex(rows.front(), {"id", "split", "label", "dialogue"},
                               {"drift_class"});
  std::vector<ConversationRecord> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const CsvRecord &row = rows[r];
    const std::string where = "line " + std::to_string(row.line);
    if (row.fields.size() != rows.front().fields.size()) {
      throw Error(ErrorCode::kMalformedRow, where + ": wrong field count");
    }
    ordered_json doc;
    doc["id"] = Trim(row.fields[col.at("id")]);
    doc["split"] = Lower(Trim(row.fields[col.at("split")]));
    doc["label"] = Lower(Trim(row.fields[col.at("label")]));
    doc["turns"] = ordered_json::array();
    const std::string &dialogue = row.fields[col.at("dialogue")];
    std::size_t s = 0;
    while (s < dialogue.size()) {
      std::size_t e = dialogue.find('\n', s);
      if (e == std::string::npos) e = dialogue.size();
      const std::string turn = Trim(std::string_view(dialogue).substr(s, e - s));
      s = e + 1;
      if (turn.empty()) continue;
      const std::size_t colon = turn.find(':');
      if (colon == std::string::npos) {
        throw Error(ErrorCode::kMalformedRow,
                    where + ": dialogue line without 'speaker:' prefix");
      }
      doc["turns"].push_back({{"speaker", Trim(turn.substr(0, colon))},
                              {"text", Trim(turn.substr(colon + 1))}});
    }
    if (col.count("drift_class")) {
      const std::string drift = Lower(Trim(row.fields[col.at("drift_class")]));
      if (!drift.empty()) doc["drift_class"] = drift;
    }
    try {
      auto parsed = ParseConversationsJsonl(doc.dump());
      out.push_back(std::move(parsed.front()));
    } catch (const Error &e) {
      throw Error(e.code(), where + ": " + e.detail());
    }
  }
  return out;
}

std::string DatasetDigest(std::span<const Review> reviews) {
  std::string canonical;
  for (const Review &r : reviews) {
    canonical += r.id + '\x1e' + r.text + '\x1e' +
                 (r.gold_label ? std::string(LabelName(*r.gold_label)) : "") + '\x1d';
  }
  return Hex64(Fnv1a64(canonical));
}

std::string DatasetDigest(std::span<const Conversation> convs) {
  std::string canonical;
  for (const Conversation &c : convs) {
    canonical += c.id + '\x1e' +
                 (c.gold_label ? std::string(LabelName(*c.gold_label)) : "") + '\x1e';
    for (const Turn &t : c.turns) canonical += t.speaker + '\x1f' + t.text + '\x1e';
    canonical += '\x1d';
  }
  return Hex64(Fnv1a64(canonical));
}

std::string VerdictToJsonLine(const Verdict &v) {
  ordered_json doc;
  doc["conversation_id"] = v.conversation_id;
  doc["label"] = std::string(LabelName(v.label));
  doc["dk_enabled"] = v.dk_enabled;
  doc["drift_detected"] = v.drift_detected;
  doc["drift_turn_index"] = v.drift_turn_index ? ordered_json(*v.drift_turn_index)
                                               : ordered_json(nullptr);
  doc["drift_class"] = v.drift_class
                           ? ordered_json(std::string(DriftClassName(*v.drift_class)))
                           : ordered_json(nullptr);
  doc["rationale"] = v.rationale;
  doc["backend_ids"] = {v.backend_ids.first, v.backend_ids.second};
  return doc.dump();
}

Verdict VerdictFromJsonLine(const std::string &line) {
  try {
    const auto doc = nlohmann::json::parse(line);
    Verdict v;
    v.conversation_id = doc.at("conversation_id").get<std::string>();
    v.label = LabelFromName(doc.at("label").get<std::string>());
    v.dk_enabled = doc.at("dk_enabled").get<bool>();
    v.drift_detected = doc.at("drift_detected").get<bool>();
    if (!doc.at("drift_turn_index").is_null()) {
      v.drift_turn_index = doc.at("drift_turn_index").get<std::size_t>();
    }
    if (!doc.at("drift_class").is_null()) {
      v.drift_class = DriftClassFromName(doc.at("drift_class").get<std::string>());
    }
    v.rationale = doc.at("rationale").get<std::string>();
    v.backend_ids = {doc.at("backend_ids").at(0).get<std::string>(),
                     doc.at("backend_ids").at(1).get<std::string>()};
    return v;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kMalformedLine, std::string("verdict: ") + e.what());
  }
}

EvalReport BuildReport(const CorpusResult &result,
                       const std::map<std::string, Label> &golds,
                       const std::string &task, const std::string &config_digest,
                       const std::string &dataset_digest,
                       const std::string &llm1_id, const std::string &llm2_id,
                       bool dk_enabled) {
  EvalReport report;
  report.task = task;
  report.config_digest = config_digest;
  report.dataset_digest = dataset_digest;
  report.run_id = task + "-" + config_digest.substr(0, 8) + "-" +
                  dataset_digest.substr(0, 8);
  report.llm1_id = llm1_id;
  report.llm2_id = llm2_id;
  report.dk_enabled = dk_enabled;
  const std::vector<Verdict> verdicts = result.verdicts();
  report.counts = Accumulate(verdicts, golds);
  for (const CorpusItem &item : result.items) {
    if (!item.verdict) report.errors.push_back({item.id, item.error});
  }
  report.metrics = ComputeMetrics(report.counts);
  return report;
}

std::string ReportToJson(const EvalReport &r) {
  ordered_json doc;
  doc["run_id"] = r.run_id;
  doc["task"] = r.task;
  doc["config_digest"] = r.config_digest;
  doc["dataset_digest"] = r.dataset_digest;
  doc["backends"] = {{"llm1", r.llm1_id}, {"llm2", r.llm2_id}};
  doc["dk_enabled"] = r.dk_enabled;
  doc["counts"] = {{"tp", r.counts.tp}, {"fp", r.counts.fp},
                   {"fn", r.counts.fn}, {"tn", r.counts.tn},
                   {"total", r.counts.total()}};
  doc["metrics"] = {{"accuracy", r.metrics.accuracy},
                    {"precision", r.metrics.precision},
                    {"recall", r.metrics.recall},
                    {"f1", r.metrics.f1}};
  ordered_json items = ordered_json::array();
  for (const ErrorEntry &e : r.errors) {
    items.push_back({{"id", e.id}, {"error", e.message}});
  }
  doc["errors"] = {{"count", r.errors.size()},
                   {"excluded_from_counts", true},
                   {"items", std::move(items)}};
  return doc.dump(2) + "\n";
}

EvalReport ReportFromJson(const std::string &text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    EvalReport r;
    r.run_id = doc.at("run_id").get<std::string>();
    r.task = doc.value("task", std::string());
    r.config_digest = doc.at("config_digest").get<std::string>();
    r.dataset_digest = doc.at("dataset_digest").get<std::string>();
    r.llm1_id = doc.at("backends").at("llm1").get<std::string>();
    r.llm2_id = doc.at("backends").at("llm2").get<std::string>();
    r.dk_enabled = doc.at("dk_enabled").get<bool>();
    const auto &c = doc.at("counts");
    r.counts = {c.at("tp").get<long long>(), c.at("fp").get<long long>(),
                c.at("fn").get<long long>(), c.at("tn").get<long long>()};
    const auto &m = doc.at("metrics");
    r.metrics = {m.at("accuracy").get<double>(), m.at("precision").get<double>(),
                 m.at("recall").get<double>(), m.at("f1").get<double>()};
    for (const auto &e : doc.at("errors").at("items")) {
      r.errors.push_back({e.at("id").get<std::string>(),
                          e.at("error").get<std::string>()});
    }
    return r;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kMalformedDocument, std::string("report: ") + e.what());
  }
}

std::span<const ReferenceRow> ReportedConversationResults() {
  static const ReferenceRow kRows[] = {
      {"DeepSeek", std::array{75, 80, 67, 73}, std::array{76, 73, 88, 80}},
      {"Claude", std::array{54, 58, 57, 52}, std::array{67, 64, 70, 66}},
      {"ChatGPT", std::array{66, 80, 47, 59}, std::array{71, 76, 66, 71}},
      {"LLaMA", std::array{90, 92, 88, 90}, std::array{98, 98, 98, 98}},
      // Majority-vote kNN + SVM + ImpKmeans ensemble; no DK variant.
      {"Ensemble (kNN+SVM+ImpKmeans)", std::array{82, 83, 82, 82}, std::nullopt},
  };
  return kRows;
}

std::span<const ReferenceRow> ReportedReviewAccuracy() {
  static const ReferenceRow kRows[] = {
      {"LLaMA", std::array{52, -1, -1, -1}, std::array{58, -1, -1, -1}},
      {"DeepSeek", std::array{56, -1, -1, -1}, std::array{90, -1, -1, -1}},
      {"ChatGPT", std::array{54, -1, -1, -1}, std::array{56, -1, -1, -1}},
      {"Claude", std::array{87, -1, -1, -1}, std::array{95, -1, -1, -1}},
  };
  return kRows;
}

std::string RenderReportText(const EvalReport &r,
                             std::span<const ReferenceRow> references) {
  const std::size_t name_width = NameWidth(references, 2, 30);
  std::string out;
  out += "run " + r.run_id + " (" + r.task + ")\n";
  out += "backends: llm1=" + r.llm1_id + " llm2=" + r.llm2_id + "; " +
         (r.dk_enabled ? "with DK" : "without DK") + "\n";
  out += "config " + r.config_digest + "  dataset " + r.dataset_digest + "\n\n";
  out += Pad("", name_width, true) + Pad(DkTitle(r.dk_enabled), 39, true) + "\n";
  out += Pad("Model", name_width, true) + kMetricHeader + "\n";
  out += Pad("This run", name_width, true) + MetricBlock(MetricCells(r.metrics)) + "\n";
  out += "\ncounts: tp=" + std::to_string(r.counts.tp) +
         " fp=" + std::to_string(r.counts.fp) +
         " fn=" + std::to_string(r.counts.fn) +
         " tn=" + std::to_string(r.counts.tn) +
         " (total " + std::to_string(r.counts.total()) + ")\n";
  out += "errors: " + std::to_string(r.errors.size()) +
         (r.errors.empty() ? "\n" : " (excluded from counts)\n");
  for (const ErrorEntry &e : r.errors) out += "  " + e.id + ": " + e.message + "\n";
  if (!references.empty()) {
    out += "\nReported results for context (%)\n";
    out += Pad("Model", name_width, true) + Pad(DkTitle(false), 39, true) +
           DkTitle(true) + "\n";
    out += Pad("", name_width, true) + kMetricHeader + kMetricHeader + "\n";
    for (const ReferenceRow &row : references) {
      out += Pad(row.model, name_width, true) +
             MetricBlock(ReferenceCells(row.without_dk)) +
             MetricBlock(ReferenceCells(row.with_dk)) + "\n";
    }
  }
  return StripTrailingSpaces(out);
}

MetricDeltas CompareRuns(const EvalReport &a, const EvalReport &b) {
  if (a.dataset_digest != b.dataset_digest) {
    throw Error(ErrorCode::kDatasetMismatch,
                a.dataset_digest + " vs " + b.dataset_digest);
  }
  return {b.metrics.accuracy - a.metrics.accuracy,
          b.metrics.precision - a.metrics.precision,
          b.metrics.recall - a.metrics.recall, b.metrics.f1 - a.metrics.f1};
}

std::string RenderComparison(const EvalReport &a, const EvalReport &b,
                             std::span<const ReferenceRow> references) {
  const MetricDeltas d = CompareRuns(a, b);
  const std::size_t name_width = NameWidth(references, 13, 30);
  std::string out;
  out += "dataset " + a.dataset_digest + "\n";
  out += "a: " + a.run_id + " (" + a.llm1_id + ", " +
         (a.dk_enabled ? "with DK" : "without DK") + ")\n";
  out += "b: " + b.run_id + " (" + b.llm1_id + ", " +
         (b.dk_enabled ? "with DK" : "without DK") + ")\n\n";
  out += Pad("", name_width, true) + Pad("a: " + DkTitle(a.dk_enabled), 39, true) +
         Pad("b: " + DkTitle(b.dk_enabled), 39, true) + "Delta b-a (pp)\n";
  out += Pad("Model", name_width, true) + kMetricHeader + kMetricHeader +
         kMetricHeader + "\n";
  out += Pad(a.llm1_id == b.llm1_id ? a.llm1_id : a.llm1_id + " / " + b.llm1_id,
             name_width, true) +
         MetricBlock(MetricCells(a.metrics)) + MetricBlock(MetricCells(b.metrics)) +
         MetricBlock({SignedPoints(d.accuracy), SignedPoints(d.precision),
                      SignedPoints(d.recall), SignedPoints(d.f1)}) +
         "\n";
  for (const ReferenceRow &row : references) {
    std::array<std::string, 4> delta = {"-", "-", "-", "-"};
    if (row.without_dk && row.with_dk) {
      for (int k = 0; k < 4; ++k) {
        if ((*row.without_dk)[k] >= 0 && (*row.with_dk)[k] >= 0) {
          delta[k] = SignedPoints(((*row.with_dk)[k] - (*row.without_dk)[k]) / 100.0);
        }
      }
    }
    out += Pad(row.model + " (reported)", name_width, true) +
           MetricBlock(ReferenceCells(row.without_dk)) +
           MetricBlock(ReferenceCells(row.with_dk)) + MetricBlock(delta) + "\n";
  }
  return StripTrailingSpaces(out);
}

}  // namespace dkdrift
