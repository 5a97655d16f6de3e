#pragma once

#include <string>
#include <string_view>

namespace emosteer {

/// Hex-encoded SHA-256 of `data`. Used for content-addressed cache keys and
/// prompt digests; stable across platforms and runs.
std::string sha256_hex(std::string_view data);

} // namespace emosteer
