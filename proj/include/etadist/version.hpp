#pragma once

namespace etadist {

inline constexpr const char* version = "0.1.0";

} // namespace etadist
