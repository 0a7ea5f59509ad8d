#include "pml/hash.hpp"

#include "pml/random.hpp"

namespace pml {

std::string to_hex(std::uint64_t value) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xf];
        value >>= 4;
    }
    return out;
}

std::string content_hash(std::string_view text) {
    return to_hex(hash_string(text));
}

}  // namespace pml
