#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace speechlabel {

// Token -> vector table loaded from a word2vec-style text file:
//   "V D" header, then V lines "token f1 ... fD".
// Tokens are stored normalized; immutable once loaded.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dimension);

  static EmbeddingTable parse(std::istream& in);
  static EmbeddingTable load(const std::filesystem::path& path);
  void write(std::ostream& out) const;

  void add(std::string_view token, std::vector<float> vector);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return order_.size(); }
  const std::vector<float>* lookup(std::string_view token) const;
  const std::vector<std::string>& tokens() const noexcept { return order_; }

 private:
  std::size_t dimension_;
  std::unordered_map<std::string, std::vector<float>> vectors_;
  std::vector<std::string> order_;
};

// Unweighted mean of the vectors of the phrase's in-table tokens; nullopt when
// no token is in the table or the phrase normalizes to nothing.
std::optional<std::vector<double>> embed_phrase(std::string_view phrase, const EmbeddingTable& table);

// nullopt when either vector has zero norm.
std::optional<double> cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace speechlabel
