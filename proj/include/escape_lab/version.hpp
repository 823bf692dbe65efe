#pragma once

namespace escape_lab {
inline constexpr const char* kVersion = "0.1.0";
}
