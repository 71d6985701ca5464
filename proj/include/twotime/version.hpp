#pragma once

namespace twotime {

inline constexpr const char* kVersion = "0.1.0";
// Bumped whenever the checkpoint layout changes; readers reject other values.
inline constexpr int kCheckpointVersion = 1;

}  // namespace twotime
