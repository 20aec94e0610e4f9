#pragma once

namespace qqm {

inline constexpr const char* kToolkitVersion = "0.1.0";

}  // namespace qqm
