#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace speechlabel {

// Canonical form used for every name comparison in the system: ASCII
// lowercase, surrounding punctuation stripped from each token, whitespace
// collapsed. Internal punctuation ("ping-pong") is kept.
// Throws ValidationError when nothing is left.
std::string normalize(std::string_view name);

// As normalize(), but returns nullopt instead of throwing.
std::optional<std::string> try_normalize(std::string_view name);

struct ClassName {
  std::string raw;
  std::string normalized;
  std::vector<std::string> tokens;

  static ClassName from(std::string_view raw);

  friend bool operator==(const ClassName& a, const ClassName& b) {
    return a.normalized == b.normalized;
  }
};

// Closed, immutable set of annotatable classes.
class Vocabulary {
 public:
  struct Entry {
    ClassName name;
    std::optional<std::string> symbol_uri;
  };

  Vocabulary(std::string id, std::vector<Entry> entries);
  static Vocabulary from_names(std::string id, const std::vector<std::string>& names);

  const std::string& id() const noexcept { return id_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  const ClassName& operator[](std::size_t i) const { return entries_.at(i).name; }

  // Class whose normalized form equals normalize(name); nullptr otherwise.
  const ClassName* find(std::string_view name) const;
  std::optional<std::size_t> index_of(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }

  // All normalized class names in vocabulary order.
  std::vector<std::string> phrase_hints() const;

 private:
  std::string id_;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

Vocabulary parse_vocabulary(const nlohmann::json& doc);
Vocabulary load_vocabulary(const std::filesystem::path& path);
nlohmann::json to_json(const Vocabulary& vocab);

}  // namespace speechlabel
