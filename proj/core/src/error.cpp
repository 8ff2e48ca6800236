#include "speechlabel/error.hpp"

#include <utility>

namespace speechlabel {
namespace {

std::string join_reasons(const std::vector<std::string>& reasons) {
  std::string out;
  for (const auto& r : reasons) {
    if (!out.empty()) out += "; ";
    out += r;
  }
  return out.empty() ? std::string("validation failed") : out;
}

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t line)
    : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

ValidationError::ValidationError(std::string reason)
    : ValidationError(std::vector<std::string>{std::move(reason)}) {}

ValidationError::ValidationError(std::vector<std::string> reasons)
    : Error(join_reasons(reasons)), reasons_(std::move(reasons)) {}

}  // namespace speechlabel
