#pragma once

namespace gapwave {

inline constexpr const char* version_string = "0.1.0";

}
