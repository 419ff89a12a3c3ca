#include "fedsim/bytes.hpp"

namespace fedsim {

static const char* kHexDigits = "0123456789abcdef";

std::string to_hex(std::span<const uint8_t> b) {
    std::string s;
    s.reserve(b.size() * 2);
    for (uint8_t c : b) {
        s.push_back(kHexDigits[c >> 4]);
        s.push_back(kHexDigits[c & 0xf]);
    }
    return s;
}

std::string to_hex(const Digest32& d) { return to_hex(std::span<const uint8_t>(d)); }

static int hex_val(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw DeserializeError("bad hex digit");
}

Bytes from_hex(const std::string& s) {
    if (s.size() % 2 != 0) throw DeserializeError("odd hex length");
    Bytes out(s.size() / 2);
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = uint8_t(hex_val(s[2 * i]) << 4 | hex_val(s[2 * i + 1]));
    return out;
}

}  // namespace fedsim
