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

#include "nermrc/synthetic.hpp"

#include <fstream>
#include <string>

#include "nermrc/error.hpp"
#include "nermrc/random.hpp"

namespace nermrc {

namespace {

struct Pools {
  std::vector<std::string> per = {"John Smith", "Maria",        "Ahmed Khan",  "Li Wei",
                                  "Olga",       "Peter Parker", "Anna Berg",   "Carlos"};
  std::vector<std::string> loc = {"Paris",  "New York", "Lake Tahoe", "Kenya",
                                  "Berlin", "Tokyo",    "Rio de Janeiro", "Oslo"};
  std::vector<std::string> org = {"Acme Corp",      "United Nations", "Google", "Red Cross",
                                  "Bank of Canada", "Siemens",        "NASA",   "Oxfam"};
};

// {P} person, {L} location, {G} organisation.
const std::vector<std::string>& templates() {
  static const std::vector<std::string> t = {
      "{P} visited {L} last summer .",
      "{G} opened a new office in {L} .",
      "yesterday {P} joined {G} as an engineer .",
      "the report from {G} was praised by {P} .",
      "{P} flew from {L} to {L} on monday .",
      "people in {L} rarely talk about {G} .",
      "{P} met {P} at the station .",
      "the weather in {L} was cold .",
      "{G} hired {P} after a long interview .",
      "nobody expected the announcement today .",
      "a spokesperson for {G} said prices will rise .",
      "{P} lives near {L} with two cats .",
  };
  return t;
}

void append_entity(TaggedSentence& s, const std::string& text, const std::string& type) {
  bool first = true;
  for (auto& w : split_whitespace(text)) {
    s.tokens.push_back({w, (first ? "B-" : "I-") + type});
    first = false;
  }
}

TaggedSentence sample(Rng& rng, const Pools& pools) {
  const std::string& tpl = rng.pick(templates());
  TaggedSentence s;
  for (const auto& w : split_whitespace(tpl)) {
    if (w == "{P}") append_entity(s, rng.pick(pools.per), "PER");
    else if (w == "{L}") append_entity(s, rng.pick(pools.loc), "LOC");
    else if (w == "{G}") append_entity(s, rng.pick(pools.org), "ORG");
    else s.tokens.push_back({w, "O"});
  }
  return s;
}

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticConfig& config) {
  Rng rng(config.seed);
  const Pools pools;
  SyntheticCorpus c;
  for (std::size_t i = 0; i < config.train; ++i) c.train.push_back(sample(rng, pools));
  for (std::size_t i = 0; i < config.dev; ++i) c.dev.push_back(sample(rng, pools));
  for (std::size_t i = 0; i < config.test; ++i) c.test.push_back(sample(rng, pools));
  return c;
}

EntityCatalog synthetic_catalog(SourceKind kind) {
  if (kind == SourceKind::kNameOnly)
    return EntityCatalog("synthetic", kind,
                         {{"PER", "Person"}, {"LOC", "Location"}, {"ORG", "Organization"}});
  return EntityCatalog(
      "synthetic", kind == SourceKind::kInternetDefinition ? SourceKind::kInternetDefinition : kind,
      {{"PER", "Names of people (e.g. John Smith). Fictional people can be included."},
       {"LOC", "Names that are locations (e.g. Paris). Include cities, countries and lakes."},
       {"ORG", "Names of organizations (e.g. Google). Include companies and agencies."}});
}

void write_synthetic(const std::filesystem::path& dir, const SyntheticConfig& config) {
  std::filesystem::create_directories(dir);
  const auto corpus = generate_synthetic(config);
  write_conll(dir / "train.conll", corpus.train);
  write_conll(dir / "dev.conll", corpus.dev);
  write_conll(dir / "test.conll", corpus.test);
  std::ofstream out(dir / "catalog.json", std::ios::binary);
  if (!out) throw IoError("cannot write " + (dir / "catalog.json").string());
  out << synthetic_catalog().to_json() << '\n';
}

}  // namespace nermrc
