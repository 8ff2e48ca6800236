#include "speechlabel/vocabulary.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "speechlabel/error.hpp"

namespace speechlabel {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

std::vector<std::string> split_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

std::optional<std::string> try_normalize(std::string_view name) {
  std::string out;
  for (std::string token : split_tokens(name)) {
    std::size_t b = 0;
    std::size_t e = token.size();
    while (b < e && is_punct(token[b])) ++b;
    while (e > b && is_punct(token[e - 1])) --e;
    if (b == e) continue;
    if (!out.empty()) out.push_back(' ');
    for (std::size_t k = b; k < e; ++k) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(token[k]))));
    }
  }
  if (out.empty()) return std::nullopt;
  return out;
}

std::string normalize(std::string_view name) {
  auto n = try_normalize(name);
  if (!n) throw ValidationError("name is empty after normalization: \"" + std::string(name) + "\"");
  return *std::move(n);
}

ClassName ClassName::from(std::string_view raw) {
  ClassName c;
  c.raw = std::string(raw);
  c.normalized = normalize(raw);
  c.tokens = split_tokens(c.normalized);
  return c;
}

Vocabulary::Vocabulary(std::string id, std::vector<Entry> entries)
    : id_(std::move(id)), entries_(std::move(entries)) {
  if (entries_.empty()) throw ValidationError("vocabulary '" + id_ + "' has no classes");
  std::vector<std::string> dupes;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    auto [it, inserted] = index_.emplace(entries_[i].name.normalized, i);
    if (!inserted) dupes.push_back("duplicate class name: " + entries_[i].name.normalized);
  }
  if (!dupes.empty()) throw ValidationError(std::move(dupes));
}

Vocabulary Vocabulary::from_names(std::string id, const std::vector<std::string>& names) {
  std::vector<Entry> entries;
  entries.reserve(names.size());
  for (const auto& n : names) entries.push_back({ClassName::from(n), std::nullopt});
  return Vocabulary(std::move(id), std::move(entries));
}

const ClassName* Vocabulary::find(std::string_view name) const {
  auto i = index_of(name);
  return i ? &entries_[*i].name : nullptr;
}

std::optional<std::size_t> Vocabulary::index_of(std::string_view name) const {
  auto n = try_normalize(name);
  if (!n) return std::nullopt;
  auto it = index_.find(*n);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> Vocabulary::phrase_hints() const {
  std::vector<std::string> hints;
  hints.reserve(entries_.size());
  for (const auto& e : entries_) hints.push_back(e.name.normalized);
  return hints;
}

Vocabulary parse_vocabulary(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("classes") || !doc["classes"].is_array()) {
    throw ParseError("vocabulary document needs a \"classes\" array");
  }
  std::string id = doc.value("name", std::string{});
  if (id.empty()) throw ValidationError("vocabulary document needs a non-empty \"name\"");
  std::vector<Vocabulary::Entry> entries;
  for (const auto& c : doc["classes"]) {
    if (!c.is_object() || !c.contains("name") || !c["name"].is_string()) {
      throw ParseError("vocabulary class entry needs a string \"name\"");
    }
    Vocabulary::Entry e{ClassName::from(c["name"].get<std::string>()), std::nullopt};
    if (c.contains("symbol_uri") && c["symbol_uri"].is_string()) {
      e.symbol_uri = c["symbol_uri"].get<std::string>();
    }
    entries.push_back(std::move(e));
  }
  return Vocabulary(std::move(id), std::move(entries));
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open vocabulary file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return parse_vocabulary(doc);
}

nlohmann::json to_json(const Vocabulary& vocab) {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& e : vocab.entries()) {
    nlohmann::json c{{"name", e.name.raw}};
    if (e.symbol_uri) c["symbol_uri"] = *e.symbol_uri;
    classes.push_back(std::move(c));
  }
  return {{"name", vocab.id()}, {"classes", std::move(classes)}};
}

}  // namespace speechlabel
