#pragma once

namespace pinchsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pinchsim
