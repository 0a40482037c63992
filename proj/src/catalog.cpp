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

#include "nermrc/catalog.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "nermrc/error.hpp"

namespace nermrc {

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::kAnnotationGuidelines: return "annotation_guidelines";
    case SourceKind::kInternetDefinition: return "internet_definition";
    case SourceKind::kNameOnly: return "name_only";
  }
  return "annotation_guidelines";
}

std::optional<SourceKind> parse_source_kind(std::string_view text) {
  if (text == "annotation_guidelines") return SourceKind::kAnnotationGuidelines;
  if (text == "internet_definition") return SourceKind::kInternetDefinition;
  if (text == "name_only") return SourceKind::kNameOnly;
  return std::nullopt;
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; };
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

EntityCatalog::EntityCatalog(std::string dataset, SourceKind source,
                             std::vector<CatalogEntry> entries)
    : dataset_(std::move(dataset)), source_(source), entries_(std::move(entries)) {
  std::set<std::string, std::less<>> names;
  for (const auto& e : entries_) {
    if (e.type_name.empty()) throw CatalogError("catalog entry with empty type name");
    if (split_whitespace(e.option_text).empty())
      throw CatalogError("empty option text for type '" + e.type_name + "'");
    if (!names.insert(e.type_name).second)
      throw CatalogError("duplicate type name '" + e.type_name + "'");
  }
}

std::optional<std::size_t> EntityCatalog::index_of(std::string_view type_name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (entries_[i].type_name == type_name) return i;
  return std::nullopt;
}

EntityCatalog EntityCatalog::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw CatalogError(std::string("catalog is not valid JSON: ") + e.what());
  }
  try {
    const auto kind_text = j.value("source_kind", std::string("annotation_guidelines"));
    const auto kind = parse_source_kind(kind_text);
    if (!kind) throw CatalogError("unknown source_kind '" + kind_text + "'");
    if (!j.contains("options") || !j["options"].is_array())
      throw CatalogError("catalog has no \"options\" array");
    std::vector<CatalogEntry> entries;
    for (const auto& o : j["options"]) {
      if (!o.contains("type") || !o.contains("text"))
        throw CatalogError("every option needs \"type\" and \"text\"");
      entries.push_back({o["type"].get<std::string>(), o["text"].get<std::string>()});
    }
    return EntityCatalog(j.value("dataset", std::string()), *kind, std::move(entries));
  } catch (const nlohmann::json::exception& e) {
    throw CatalogError(std::string("malformed catalog: ") + e.what());
  }
}

EntityCatalog EntityCatalog::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open catalog " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string EntityCatalog::to_json() const {
  nlohmann::ordered_json j;
  j["dataset"] = dataset_;
  j["source_kind"] = std::string(to_string(source_));
  j["options"] = nlohmann::ordered_json::array();
  for (const auto& e : entries_) j["options"].push_back({{"type", e.type_name}, {"text", e.option_text}});
  return j.dump();
}

bool operator==(const EntityCatalog& a, const EntityCatalog& b) {
  if (a.dataset_ != b.dataset_ || a.source_ != b.source_ || a.entries_.size() != b.entries_.size())
    return false;
  for (std::size_t i = 0; i < a.entries_.size(); ++i)
    if (a.entries_[i].type_name != b.entries_[i].type_name ||
        a.entries_[i].option_text != b.entries_[i].option_text)
      return false;
  return true;
}

}  // namespace nermrc
