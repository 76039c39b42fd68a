#pragma once

#include <cstdint>
#include <string>

namespace hdim {

// Hex-encoded SHA-256, used for cache checksums and report fingerprints.
std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_hex(const std::string& s);

} // namespace hdim
