#include "omni/stack.hpp"

#include <algorithm>
#include <iterator>

namespace omni {

std::string LibraryRef::str() const
{
    return std::to_string(libId) + "@" + std::to_string(major) + "." + std::to_string(minor);
}

std::string stackViolation(const SecurityStack& s)
{
    if (s.isDefaultOptIn) return {};
    std::vector<WorkerId> overlap;
    std::set_intersection(s.requiredDvns.begin(), s.requiredDvns.end(), s.optionalDvns.begin(),
                          s.optionalDvns.end(), std::back_inserter(overlap));
    if (!overlap.empty()) return "a DVN is both required and optional";
    if (s.optionalThreshold > s.optionalDvns.size()) return "optional threshold exceeds optional DVN count";
    const std::size_t total = s.requiredDvns.size() + s.optionalDvns.size();
    if (total == 0) return "at least one DVN is required";
    if (total > kMaxDvns) return "more than 254 DVNs";
    return {};
}

} // namespace omni
