#pragma once

namespace fsdet {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace fsdet
