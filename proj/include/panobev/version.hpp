#pragma once

namespace panobev {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace panobev
