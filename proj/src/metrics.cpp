// Copyright 2026 The nermrc Authors.
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

#include "nermrc/metrics.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"

#include "nermrc/corpus_io.hpp"
#include "nermrc/error.hpp"

namespace nermrc {

std::vector<EntitySpan> extract_spans(std::span<const std::string> tags, bool repair) {
  std::vector<EntitySpan> spans;
  std::string prev = "O";
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const std::string& tag = tags[i];
    if (!is_valid_tag(tag)) throw ParseError("invalid IOB tag '" + tag + "'", 0);
    if (tag == "O") {
      prev = tag;
      continue;
    }
    const std::string type = tag.substr(2);
    const bool continues = tag[0] == 'I' && prev != "O" && prev.substr(2) == type;
    if (continues) {
      spans.back().end = i + 1;
    } else {
      if (tag[0] == 'I' && !repair)
        throw ParseError("orphan '" + tag + "' at position " + std::to_string(i) +
                             " (enable IOB repair to accept it)",
                         0);
      spans.push_back({type, i, i + 1});
    }
    prev = tag;
  }
  return spans;
}

F1Report report_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  F1Report r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  r.recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

F1Report micro_f1(std::span<const TagSequence> gold, std::span<const TagSequence> pred,
                  bool repair) {
  if (gold.size() != pred.size())
    throw ShapeError("gold has " + std::to_string(gold.size()) + " sentences, prediction has " +
                     std::to_string(pred.size()));
  std::map<std::string, TypeCounts> per_type;
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != pred[s].size())
      throw ShapeError("sentence " + std::to_string(s) + ": gold has " +
                       std::to_string(gold[s].size()) + " tokens, prediction has " +
                       std::to_string(pred[s].size()));
    const auto g = extract_spans(gold[s], repair);
    const auto p = extract_spans(pred[s], repair);
    const std::set<EntitySpan> gs(g.begin(), g.end());
    const std::set<EntitySpan> ps(p.begin(), p.end());
    for (const auto& span : ps) {
      if (gs.count(span)) {
        ++tp;
        ++per_type[span.type_name].tp;
      } else {
        ++fp;
        ++per_type[span.type_name].fp;
      }
    }
    for (const auto& span : gs)
      if (!ps.count(span)) {
        ++fn;
        ++per_type[span.type_name].fn;
      }
  }
  F1Report r = report_from_counts(tp, fp, fn);
  r.per_type = std::move(per_type);
  return r;
}

std::string F1Report::to_json() const {
  nlohmann::ordered_json j;
  j["precision"] = precision;
  j["recall"] = recall;
  j["f1"] = f1;
  j["tp"] = tp;
  j["fp"] = fp;
  j["fn"] = fn;
  auto types = nlohmann::ordered_json::object();
  for (const auto& [name, c] : per_type) types[name] = {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}};
  j["per_type"] = types;
  return j.dump(2);
}

}  // namespace nermrc
