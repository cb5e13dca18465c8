#pragma once

#include <string_view>

namespace cph {

// The 8-edge, 5-node circuit used throughout the documentation and selftest.
inline constexpr std::string_view kRunningExampleNetlist =
    "R1 1 2 0.8666\n"
    "V2 1 3 cos(t)\n"
    "C3 1 4 0.50689\n"
    "L4 1 5 0.91901\n"
    "R5 2 3 0.58256\n"
    "C6 3 4 0.48617\n"
    "L7 4 5 0.57219\n"
    "I8 5 2 2*sin(3*t)\n";

}  // namespace cph
