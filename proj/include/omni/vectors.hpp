#pragma once

#include <string>
#include <utility>
#include <vector>

namespace omni {

/// Named codec outputs for fixed inputs, as lowercase hex. The frozen
/// expected values live in tests/fixtures/golden_vectors.txt.
std::vector<std::pair<std::string, std::string>> codecVectors();

} // namespace omni
