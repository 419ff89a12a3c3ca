#include "fedsim/scalar.hpp"

#include "fedsim/hash.hpp"

#include <sodium.h>

#include <stdexcept>

namespace fedsim {

Scalar Scalar::from_u64(uint64_t v) {
    Scalar s;
    for (int i = 0; i < 8; ++i) s.bytes_[i] = uint8_t(v >> (8 * i));
    return s;
}

Scalar Scalar::reduce_wide(const std::array<uint8_t, 64>& wide) {
    Scalar s;
    crypto_core_ristretto255_scalar_reduce(s.bytes_.data(), wide.data());
    return s;
}

Scalar Scalar::random(DetRng& rng) {
    std::array<uint8_t, 64> wide;
    Scalar s;
    do {
        rng.fill(wide);
        s = reduce_wide(wide);
    } while (s.is_zero());
    return s;
}

Scalar Scalar::hash_to_scalar(std::string_view domain, std::span<const uint8_t> data) {
    return reduce_wide(hash64(domain, data));
}

Scalar Scalar::from_bytes(const std::array<uint8_t, kSize>& b) {
    // canonical iff reducing is a no-op
    std::array<uint8_t, 64> wide{};
    std::copy(b.begin(), b.end(), wide.begin());
    Scalar reduced = reduce_wide(wide);
    if (reduced.bytes_ != b) throw DeserializeError("non-canonical scalar");
    return reduced;
}

Scalar Scalar::operator+(const Scalar& o) const {
    Scalar r;
    crypto_core_ristretto255_scalar_add(r.bytes_.data(), bytes_.data(), o.bytes_.data());
    return r;
}

Scalar Scalar::operator-(const Scalar& o) const {
    Scalar r;
    crypto_core_ristretto255_scalar_sub(r.bytes_.data(), bytes_.data(), o.bytes_.data());
    return r;
}

Scalar Scalar::operator*(const Scalar& o) const {
    Scalar r;
    crypto_core_ristretto255_scalar_mul(r.bytes_.data(), bytes_.data(), o.bytes_.data());
    return r;
}

Scalar Scalar::negate() const {
    Scalar r;
    crypto_core_ristretto255_scalar_negate(r.bytes_.data(), bytes_.data());
    return r;
}

Scalar Scalar::invert() const {
    if (is_zero()) throw std::invalid_argument("inverse of zero scalar");
    Scalar r;
    crypto_core_ristretto255_scalar_invert(r.bytes_.data(), bytes_.data());
    return r;
}

bool Scalar::is_zero() const {
    uint8_t acc = 0;
    for (uint8_t b : bytes_) acc |= b;
    return acc == 0;
}

Scalar Scalar::deserialize(ByteReader& r) {
    std::array<uint8_t, kSize> b;
    r.raw(b);
    return from_bytes(b);
}

}  // namespace fedsim
