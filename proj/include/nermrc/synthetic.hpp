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

// Seeded templated corpus over three entity types (PER, LOC, ORG). Entities
// in a template are always separated by at least one outside token.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "nermrc/catalog.hpp"
#include "nermrc/corpus_io.hpp"

namespace nermrc {

struct SyntheticConfig {
  std::uint64_t seed = 7;
  std::size_t train = 50;
  std::size_t dev = 25;
  std::size_t test = 25;
};

struct SyntheticCorpus {
  std::vector<TaggedSentence> train, dev, test;
};

SyntheticCorpus generate_synthetic(const SyntheticConfig& config);

/// Catalog for the synthetic types. kInternetDefinition is not provided and
/// falls back to the annotation-guideline texts.
EntityCatalog synthetic_catalog(SourceKind kind = SourceKind::kAnnotationGuidelines);

/// Writes train.conll, dev.conll, test.conll and catalog.json into `dir`.
void write_synthetic(const std::filesystem::path& dir, const SyntheticConfig& config);

}  // namespace nermrc
