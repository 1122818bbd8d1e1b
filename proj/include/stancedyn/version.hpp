#pragma once

namespace stancedyn {
inline constexpr const char* version = "0.1.0";
}
