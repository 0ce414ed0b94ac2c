#include "kamtori/errors.hpp"

#include <sstream>

namespace kamtori {

namespace {

std::string resonance_message(const std::vector<int>& k, double divisor) {
  std::ostringstream os;
  os << "resonant mode k = (";
  for (std::size_t i = 0; i < k.size(); ++i) os << (i ? "," : "") << k[i];
  os << "): |k.omega| = " << divisor;
  return os.str();
}

std::string join(const std::vector<std::string>& v) {
  std::string s = "invalid configuration";
  for (const auto& x : v) s += "\n  - " + x;
  return s;
}

}  // namespace

ResonanceError::ResonanceError(std::vector<int> k, double divisor)
    : KamError(resonance_message(k, divisor)), k_(std::move(k)), divisor_(divisor) {}

ConfigError::ConfigError(std::vector<std::string> violations)
    : KamError(join(violations)), violations_(std::move(violations)) {}

}  // namespace kamtori
