#include "patent_rent/errors.hpp"

namespace patent_rent {

ValidationError::ValidationError(std::vector<std::string> violations)
    : ValidationError("validation failed", std::move(violations)) {}

namespace {
std::string join_violations(const std::string& context, const std::vector<std::string>& v) {
  std::string out = context;
  for (const auto& s : v) {
    out += "\n  - ";
    out += s;
  }
  return out;
}
}  // namespace

ValidationError::ValidationError(const std::string& context, std::vector<std::string> violations)
    : InputError(join_violations(context, violations)), violations_(std::move(violations)) {}

}  // namespace patent_rent
