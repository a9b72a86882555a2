#include "jrc/errors.hpp"

namespace jrc {

namespace {

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::string list_ues(const std::vector<std::size_t>& ues) {
  std::string out;
  for (std::size_t i = 0; i < ues.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(ues[i]);
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error("invalid configuration: " + join(problems, "; ")), problems_(std::move(problems)) {}

UnsatisfiableLosError::UnsatisfiableLosError(std::vector<std::size_t> ues, const std::string& what)
    : Error(what + " (UEs: " + list_ues(ues) + ")"), ues_(std::move(ues)) {}

}  // namespace jrc
