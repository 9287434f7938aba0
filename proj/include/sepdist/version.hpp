#pragma once

namespace sepdist {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sepdist
