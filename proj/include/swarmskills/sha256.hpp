#pragma once

#include <string>
#include <string_view>

namespace swarmskills {

// Lowercase hex digest. Used for archive manifests and tree comparisons.
std::string sha256_hex(std::string_view data);

} // namespace swarmskills
