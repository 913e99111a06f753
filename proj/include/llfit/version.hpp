#pragma once

namespace llfit {
inline constexpr const char* version = "1.0.0";
}
