#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pml {

// 16 hex digit FNV-1a digest, used for content-addressed caches and metadata.
std::string content_hash(std::string_view text);
std::string to_hex(std::uint64_t value);

}  // namespace pml
