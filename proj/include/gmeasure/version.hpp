#pragma once

namespace gmeasure {

inline constexpr const char* kArtifactName = "gmeasure";
inline constexpr const char* kVersion = "1.0.0";

}  // namespace gmeasure
