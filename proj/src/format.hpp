#pragma once

#include <cstdio>
#include <string>

namespace vinerisk::detail {

// Round-trip-exact float formatting shared by every text emitter, so reruns
// of the same computation produce byte-identical files.
inline std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace vinerisk::detail
