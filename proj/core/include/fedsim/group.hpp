#pragma once

#include "fedsim/scalar.hpp"

namespace fedsim {

/// Element of a prime-order cyclic group with a fixed canonical generator
/// and byte-exact 32-byte encoding (ristretto255). The identity encodes as
/// all zero bytes.
class GroupElement {
public:
    static constexpr size_t kSize = 32;

    GroupElement() : bytes_{} {}  // identity

    static GroupElement identity() { return GroupElement(); }
    static const GroupElement& generator();
    /// Hash-to-group over 64 uniform bytes.
    static GroupElement from_hash(const std::array<uint8_t, 64>& wide);
    /// Parses a canonical encoding; throws DeserializeError on invalid points.
    static GroupElement from_bytes(const std::array<uint8_t, kSize>& b);

    GroupElement operator+(const GroupElement& o) const;
    GroupElement operator-(const GroupElement& o) const;
    GroupElement negate() const { return identity() - *this; }
    /// Scalar multiplication; handles zero scalar and identity input.
    GroupElement operator*(const Scalar& s) const;
    /// s * generator.
    static GroupElement base_mul(const Scalar& s);

    bool is_identity() const;
    bool operator==(const GroupElement& o) const { return bytes_ == o.bytes_; }
    bool operator<(const GroupElement& o) const { return bytes_ < o.bytes_; }

    const std::array<uint8_t, kSize>& bytes() const { return bytes_; }

    void serialize(ByteWriter& w) const { w.raw(bytes_); }
    static GroupElement deserialize(ByteReader& r);

private:
    std::array<uint8_t, kSize> bytes_;
};

struct Keypair {
    Scalar secret;
    GroupElement pub;

    static Keypair generate(DetRng& rng) {
        Scalar sk = Scalar::random(rng);
        return {sk, GroupElement::base_mul(sk)};
    }
};

}  // namespace fedsim
