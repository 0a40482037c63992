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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nermrc {

/// Where the option descriptions came from.
enum class SourceKind { kAnnotationGuidelines, kInternetDefinition, kNameOnly };

std::string_view to_string(SourceKind kind);
std::optional<SourceKind> parse_source_kind(std::string_view text);

struct CatalogEntry {
  std::string type_name;
  std::string option_text;
};

/// Ordered entity types and their option descriptions. Entry order fixes the
/// option index used by label matrices, sub-heads and decoding.
class EntityCatalog {
 public:
  EntityCatalog() = default;
  /// Throws CatalogError on duplicate type names or empty texts.
  EntityCatalog(std::string dataset, SourceKind source, std::vector<CatalogEntry> entries);

  const std::string& dataset() const { return dataset_; }
  SourceKind source_kind() const { return source_; }
  const std::vector<CatalogEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const CatalogEntry& operator[](std::size_t i) const { return entries_[i]; }

  std::optional<std::size_t> index_of(std::string_view type_name) const;

  /// Parses `{"dataset", "source_kind", "options": [{"type","text"}...]}`.
  static EntityCatalog from_json(std::string_view text);
  static EntityCatalog load(const std::filesystem::path& path);
  std::string to_json() const;

  friend bool operator==(const EntityCatalog& a, const EntityCatalog& b);

 private:
  std::string dataset_;
  SourceKind source_ = SourceKind::kAnnotationGuidelines;
  std::vector<CatalogEntry> entries_;
};

/// Whitespace tokenisation used for option texts and raw passages.
std::vector<std::string> split_whitespace(std::string_view text);

}  // namespace nermrc
