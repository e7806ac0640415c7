#pragma once

#include <string>
#include <string_view>

namespace tracerec {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// First 16 hex digits of the SHA-256; used as a short content fingerprint.
std::string short_hash(std::string_view data);

}  // namespace tracerec
