#include "acr/errors.hpp"

namespace acr {

namespace {

std::string summarize(const std::vector<std::string>& violations) {
  std::string msg = "transition model failed validation (" + std::to_string(violations.size()) +
                    " violation" + (violations.size() == 1 ? "" : "s") + ")";
  for (const auto& v : violations) msg += "\n  " + v;
  return msg;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::runtime_error(summarize(violations)), violations_(std::move(violations)) {}

}  // namespace acr
