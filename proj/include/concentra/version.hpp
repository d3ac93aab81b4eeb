#pragma once

namespace concentra {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace concentra
