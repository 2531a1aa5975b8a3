#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace npm {

/// Environment observation: a fixed-length feature vector.
using Observation = std::vector<double>;

/// Index into the discrete action set, in [0, |A|).
using ActionId = int;

/// Byte-exact key of an observation; used for caches and visit counts.
std::string observation_key(const Observation& obs);

}  // namespace npm
