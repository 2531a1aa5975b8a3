#include "npm/core/types.hpp"

#include <cstring>

namespace npm {

std::string observation_key(const Observation& obs) {
  std::string key(obs.size() * sizeof(double), '\0');
  if (!obs.empty()) std::memcpy(key.data(), obs.data(), key.size());
  return key;
}

}  // namespace npm
