#include "speechlabel/embeddings.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "speechlabel/error.hpp"
#include "speechlabel/vocabulary.hpp"

namespace speechlabel {

EmbeddingTable::EmbeddingTable(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw ValidationError("embedding dimension must be >= 1");
}

EmbeddingTable EmbeddingTable::parse(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t count = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  {
    std::istringstream header(line);
    if (!(header >> count >> dim) || dim == 0) throw ParseError("embedding header must be \"V D\"", line_no);
  }
  EmbeddingTable table(dim);
  std::size_t read = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    std::string token;
    row >> token;
    std::vector<float> v;
    v.reserve(dim);
    double x = 0.0;
    while (row >> x) v.push_back(static_cast<float>(x));
    if (!row.eof()) throw ParseError("non-numeric embedding component", line_no);
    if (v.size() != dim) {
      throw ParseError("expected " + std::to_string(dim) + " components, got " + std::to_string(v.size()), line_no);
    }
    table.add(token, std::move(v));
    ++read;
  }
  if (read != count) {
    throw ParseError("header declares " + std::to_string(count) + " vectors, file has " + std::to_string(read));
  }
  return table;
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embedding file " + path.string());
  try {
    return parse(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void EmbeddingTable::write(std::ostream& out) const {
  out << order_.size() << ' ' << dimension_ << '\n';
  for (const auto& token : order_) {
    out << token;
    for (float f : vectors_.at(token)) out << ' ' << std::setprecision(6) << f;
    out << '\n';
  }
}

void EmbeddingTable::add(std::string_view token, std::vector<float> vector) {
  if (vector.size() != dimension_) throw ValidationError("embedding vector has the wrong dimension");
  auto key = try_normalize(token);
  if (!key) throw ValidationError("embedding token is empty after normalization");
  auto [it, inserted] = vectors_.insert_or_assign(*key, std::move(vector));
  if (inserted) order_.push_back(it->first);
}

const std::vector<float>* EmbeddingTable::lookup(std::string_view token) const {
  auto it = vectors_.find(std::string(token));
  return it == vectors_.end() ? nullptr : &it->second;
}

std::optional<std::vector<double>> embed_phrase(std::string_view phrase, const EmbeddingTable& table) {
  auto normalized = try_normalize(phrase);
  if (!normalized) return std::nullopt;
  std::vector<double> sum(table.dimension(), 0.0);
  std::size_t found = 0;
  std::istringstream tokens(*normalized);
  std::string token;
  while (tokens >> token) {
    const auto* v = table.lookup(token);
    if (v == nullptr) continue;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += (*v)[i];
    ++found;
  }
  if (found == 0) return std::nullopt;
  for (double& x : sum) x /= static_cast<double>(found);
  return sum;
}

std::optional<double> cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("cosine similarity of vectors with different dimensions");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return std::nullopt;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace speechlabel
