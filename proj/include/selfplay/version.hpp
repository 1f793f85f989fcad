#pragma once

namespace selfplay {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace selfplay
