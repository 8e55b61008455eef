#pragma once

namespace patchtrack {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace patchtrack
