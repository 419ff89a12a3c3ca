#include "fedsim/group.hpp"

#include <sodium.h>

namespace fedsim {

namespace {
struct SodiumInit {
    SodiumInit() { sodium_init(); }
};
const SodiumInit init_once;
}  // namespace

const GroupElement& GroupElement::generator() {
    static const GroupElement g = base_mul(Scalar::one());
    return g;
}

GroupElement GroupElement::from_hash(const std::array<uint8_t, 64>& wide) {
    GroupElement p;
    crypto_core_ristretto255_from_hash(p.bytes_.data(), wide.data());
    return p;
}

GroupElement GroupElement::from_bytes(const std::array<uint8_t, kSize>& b) {
    GroupElement p;
    p.bytes_ = b;
    if (p.is_identity()) return p;
    if (crypto_core_ristretto255_is_valid_point(b.data()) != 1)
        throw DeserializeError("invalid group element encoding");
    return p;
}

GroupElement GroupElement::operator+(const GroupElement& o) const {
    if (is_identity()) return o;
    if (o.is_identity()) return *this;
    GroupElement r;
    if (crypto_core_ristretto255_add(r.bytes_.data(), bytes_.data(), o.bytes_.data()) != 0)
        throw std::invalid_argument("group add on invalid element");
    return r;
}

GroupElement GroupElement::operator-(const GroupElement& o) const {
    if (o.is_identity()) return *this;
    GroupElement r;
    if (crypto_core_ristretto255_sub(r.bytes_.data(), bytes_.data(), o.bytes_.data()) != 0)
        throw std::invalid_argument("group sub on invalid element");
    return r;
}

GroupElement GroupElement::operator*(const Scalar& s) const {
    if (s.is_zero() || is_identity()) return identity();
    GroupElement r;
    // fails only when the result is the identity, which cannot happen for a
    // nonzero scalar on a prime-order group unless the input is the identity
    if (crypto_scalarmult_ristretto255(r.bytes_.data(), s.bytes().data(), bytes_.data()) != 0)
        return identity();
    return r;
}

GroupElement GroupElement::base_mul(const Scalar& s) {
    if (s.is_zero()) return identity();
    GroupElement r;
    crypto_scalarmult_ristretto255_base(r.bytes_.data(), s.bytes().data());
    return r;
}

bool GroupElement::is_identity() const {
    uint8_t acc = 0;
    for (uint8_t b : bytes_) acc |= b;
    return acc == 0;
}

GroupElement GroupElement::deserialize(ByteReader& r) {
    std::array<uint8_t, kSize> b;
    r.raw(b);
    return from_bytes(b);
}

}  // namespace fedsim
