#include "fedsim/hash.hpp"

#include <sodium.h>

namespace fedsim {

static void absorb_domain(crypto_generichash_state& st, std::string_view domain) {
    uint8_t len[4];
    for (int i = 0; i < 4; ++i) len[i] = uint8_t(domain.size() >> (8 * i));
    crypto_generichash_update(&st, len, sizeof(len));
    crypto_generichash_update(&st, reinterpret_cast<const uint8_t*>(domain.data()),
                              domain.size());
}

Digest32 hash32(std::string_view domain, std::span<const uint8_t> data) {
    crypto_generichash_state st;
    crypto_generichash_init(&st, nullptr, 0, 32);
    absorb_domain(st, domain);
    crypto_generichash_update(&st, data.data(), data.size());
    Digest32 out;
    crypto_generichash_final(&st, out.data(), out.size());
    return out;
}

std::array<uint8_t, 64> hash64(std::string_view domain, std::span<const uint8_t> data) {
    crypto_generichash_state st;
    crypto_generichash_init(&st, nullptr, 0, 64);
    absorb_domain(st, domain);
    crypto_generichash_update(&st, data.data(), data.size());
    std::array<uint8_t, 64> out;
    crypto_generichash_final(&st, out.data(), out.size());
    return out;
}

}  // namespace fedsim
