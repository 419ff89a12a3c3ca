#pragma once

#include "fedsim/bytes.hpp"
#include "fedsim/rng.hpp"

#include <string_view>

namespace fedsim {

/// Element of the scalar field of the group (integers mod the prime group
/// order q). Canonical 32-byte little-endian encoding.
class Scalar {
public:
    static constexpr size_t kSize = 32;

    Scalar() : bytes_{} {}  // zero

    static Scalar zero() { return Scalar(); }
    static Scalar one() { return from_u64(1); }
    static Scalar from_u64(uint64_t v);
    /// Wide reduction of 64 uniform bytes mod q.
    static Scalar reduce_wide(const std::array<uint8_t, 64>& wide);
    /// Uniform nonzero scalar from a deterministic stream.
    static Scalar random(DetRng& rng);
    /// Domain-separated hash of arbitrary bytes to a scalar.
    static Scalar hash_to_scalar(std::string_view domain, std::span<const uint8_t> data);
    /// Parses a canonical encoding; throws DeserializeError if not reduced.
    static Scalar from_bytes(const std::array<uint8_t, kSize>& b);

    Scalar operator+(const Scalar& o) const;
    Scalar operator-(const Scalar& o) const;
    Scalar operator*(const Scalar& o) const;
    Scalar negate() const;
    /// Multiplicative inverse; throws std::invalid_argument on zero.
    Scalar invert() const;

    bool is_zero() const;
    bool operator==(const Scalar& o) const { return bytes_ == o.bytes_; }

    const std::array<uint8_t, kSize>& bytes() const { return bytes_; }

    void serialize(ByteWriter& w) const { w.raw(bytes_); }
    static Scalar deserialize(ByteReader& r);

private:
    std::array<uint8_t, kSize> bytes_;
};

}  // namespace fedsim
