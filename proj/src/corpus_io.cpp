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

#include "nermrc/corpus_io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "nermrc/error.hpp"

namespace nermrc {

namespace {

std::string_view type_of(std::string_view tag) { return tag.substr(2); }

bool is_orphan(std::string_view tag, std::string_view prev) {
  if (tag.size() < 2 || tag[0] != 'I') return false;
  if (prev.size() < 2 || prev[0] == 'O') return true;
  return type_of(prev) != type_of(tag);
}

}  // namespace

std::vector<std::string> TaggedSentence::surfaces() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.surface);
  return out;
}

std::vector<std::string> TaggedSentence::tags() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.tag);
  return out;
}

bool is_valid_tag(std::string_view tag) {
  if (tag == "O") return true;
  return tag.size() > 2 && (tag[0] == 'B' || tag[0] == 'I') && tag[1] == '-';
}

std::optional<std::string> strip_iob(std::string_view tag) {
  if (!is_valid_tag(tag)) throw ParseError("malformed IOB tag '" + std::string(tag) + "'", 0);
  if (tag == "O") return std::nullopt;
  return std::string(type_of(tag));
}

std::vector<TaggedSentence> parse_conll(std::istream& in, const ParseOptions& options) {
  std::vector<TaggedSentence> out;
  TaggedSentence current;
  std::string line;
  std::size_t line_no = 0;

  auto flush = [&] {
    if (current.tokens.empty()) return;
    auto tags = current.tags();
    for (std::size_t pos : validate_iob(tags)) {
      if (options.warnings)
        options.warnings->push_back(
            {out.size(), current.source_line + pos, pos, current.tokens[pos].tag});
      if (options.repair_iob) current.tokens[pos].tag[0] = 'B';
    }
    out.push_back(std::move(current));
    current = TaggedSentence{};
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto cols = split_whitespace(line);
    if (cols.empty()) {
      flush();
      continue;
    }
    if (cols.front() == "-DOCSTART-") continue;
    Token tok;
    tok.surface = cols.front();
    if (cols.size() < 2) {
      if (!options.allow_untagged) throw ParseError("missing tag for token '" + cols.front() + "'", line_no);
      tok.tag = "O";
    } else {
      tok.tag = cols.back();
      if (!is_valid_tag(tok.tag)) throw ParseError("invalid IOB tag '" + tok.tag + "'", line_no);
    }
    if (current.tokens.empty()) current.source_line = line_no;
    current.tokens.push_back(std::move(tok));
  }
  flush();
  return out;
}

std::vector<TaggedSentence> parse_conll(std::string_view text, const ParseOptions& options) {
  std::istringstream in{std::string(text)};
  return parse_conll(in, options);
}

std::vector<TaggedSentence> load_conll(const std::filesystem::path& path,
                                       const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file " + path.string());
  try {
    return parse_conll(in, options);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

std::string serialize_conll(std::span<const TaggedSentence> sentences) {
  std::string out;
  for (const auto& s : sentences) {
    for (const auto& t : s.tokens) {
      out += t.surface;
      out += ' ';
      out += t.tag;
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

void write_conll(const std::filesystem::path& path, std::span<const TaggedSentence> sentences) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << serialize_conll(sentences);
}

std::vector<std::size_t> validate_iob(std::span<const std::string> tags) {
  std::vector<std::size_t> bad;
  std::string_view prev = "O";
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (is_orphan(tags[i], prev)) bad.push_back(i);
    prev = tags[i];
  }
  return bad;
}

std::vector<std::size_t> validate_iob(const TaggedSentence& sentence) {
  const auto tags = sentence.tags();
  return validate_iob(tags);
}

std::size_t repair_iob(std::vector<std::string>& tags) {
  // Positions are found on the original sequence; a repaired B-X still opens
  // a run of X, so later checks are unaffected.
  const auto bad = validate_iob(tags);
  for (std::size_t i : bad) tags[i][0] = 'B';
  return bad.size();
}

std::size_t repair_iob(TaggedSentence& sentence) {
  auto tags = sentence.tags();
  const std::size_t n = repair_iob(tags);
  for (std::size_t i = 0; i < tags.size(); ++i) sentence.tokens[i].tag = tags[i];
  return n;
}

std::vector<CorpusSplit> load_corpus(const std::filesystem::path& path,
                                     const ParseOptions& options) {
  namespace fs = std::filesystem;
  if (!fs::exists(path)) throw IoError("corpus path does not exist: " + path.string());
  if (!fs::is_directory(path)) return {{path.stem().string(), load_conll(path, options)}};

  const std::vector<std::pair<std::string, std::vector<std::string>>> kinds = {
      {"train", {"train"}}, {"dev", {"dev", "valid"}}, {"test", {"test"}}};
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(path))
    if (e.is_regular_file() && e.path().extension() != ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  // Prefix match first (train.conll), then anywhere in the name
  // (wnut17train.conll, emerging.dev.conll).
  auto find = [&](const std::vector<std::string>& keys, bool prefix) -> const fs::path* {
    for (const auto& f : files) {
      const std::string name = f.filename().string();
      for (const auto& k : keys) {
        const auto pos = name.find(k);
        if (pos != std::string::npos && (!prefix || pos == 0)) return &f;
      }
    }
    return nullptr;
  };
  std::vector<CorpusSplit> out;
  for (const auto& [name, keys] : kinds) {
    const fs::path* f = find(keys, true);
    if (!f) f = find(keys, false);
    if (f) out.push_back({name, load_conll(*f, options)});
  }
  if (out.empty())
    throw IoError("no train/dev/test files found in " + path.string());
  return out;
}

std::vector<std::string> entity_types(std::span<const TaggedSentence> sentences) {
  std::vector<std::string> out;
  std::set<std::string, std::less<>> seen;
  for (const auto& s : sentences)
    for (const auto& t : s.tokens) {
      if (t.tag == "O") continue;
      std::string type(type_of(t.tag));
      if (seen.insert(type).second) out.push_back(std::move(type));
    }
  return out;
}

std::vector<std::string> catalog_coverage(std::span<const TaggedSentence> sentences,
                                          const EntityCatalog& catalog) {
  std::vector<std::string> out;
  for (const auto& type : entity_types(sentences))
    if (!catalog.index_of(type))
      out.push_back("entity type '" + type + "' is not in catalog '" + catalog.dataset() + "'");
  return out;
}

std::string CorpusStats::to_json() const {
  nlohmann::ordered_json j;
  nlohmann::ordered_json sizes = nlohmann::ordered_json::object();
  for (const auto& [name, n] : split_sizes) sizes[name] = n;
  j["split_sizes"] = sizes;
  j["n_entity_types"] = n_entity_types;
  j["avg_length"] = avg_length;
  j["avg_option_length"] = avg_option_length;
  return j.dump(2);
}

CorpusStats compute_stats(std::span<const CorpusSplit> splits, const EntityCatalog* catalog) {
  CorpusStats stats;
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  std::vector<TaggedSentence> all;
  for (const auto& split : splits) {
    stats.split_sizes.emplace_back(split.name, split.sentences.size());
    sentences += split.sentences.size();
    for (const auto& s : split.sentences) tokens += s.size();
    if (!catalog) all.insert(all.end(), split.sentences.begin(), split.sentences.end());
  }
  stats.avg_length = sentences ? static_cast<double>(tokens) / static_cast<double>(sentences) : 0.0;
  if (catalog) {
    stats.n_entity_types = catalog->size();
    std::size_t option_tokens = 0;
    for (const auto& e : catalog->entries()) option_tokens += split_whitespace(e.option_text).size();
    if (catalog->size())
      stats.avg_option_length =
          static_cast<double>(option_tokens) / static_cast<double>(catalog->size());
  } else {
    stats.n_entity_types = entity_types(all).size();
  }
  return stats;
}

}  // namespace nermrc
