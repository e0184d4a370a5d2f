#pragma once

namespace bellbox {
inline constexpr const char* kVersion = "0.1.0";
}
