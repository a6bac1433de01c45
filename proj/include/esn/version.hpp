#pragma once

namespace esn {

inline constexpr const char* kLibraryVersion = "0.1.0";

}  // namespace esn
