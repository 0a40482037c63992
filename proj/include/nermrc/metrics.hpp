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

#pragma once

// Exact-match span scoring, micro-averaged over all types and sentences.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace nermrc {

struct EntitySpan {
  std::string type_name;
  std::size_t start = 0;  // inclusive
  std::size_t end = 0;    // exclusive

  friend auto operator<=>(const EntitySpan&, const EntitySpan&) = default;
};

struct TypeCounts {
  std::size_t tp = 0, fp = 0, fn = 0;
};

struct F1Report {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0;
  std::map<std::string, TypeCounts> per_type;

  std::string to_json() const;
};

using TagSequence = std::vector<std::string>;

/// One span per maximal B-/I- run. Orphan "I-X" throws ParseError unless
/// `repair`, which treats it as "B-X".
std::vector<EntitySpan> extract_spans(std::span<const std::string> tags, bool repair = false);

/// Throws ShapeError when sentence counts or lengths differ.
F1Report micro_f1(std::span<const TagSequence> gold, std::span<const TagSequence> pred,
                  bool repair = false);

/// P, R and F1 from pooled counts; each is 0 when its denominator is 0.
F1Report report_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);

}  // namespace nermrc
