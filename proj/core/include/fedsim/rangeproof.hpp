#pragma once

#include "fedsim/pedersen.hpp"
#include "fedsim/ringsig.hpp"

namespace fedsim {

/// Bit-decomposition range proof: one commitment per bit plus a 1-of-2 ring
/// signature per bit proving the bit commitment hides 0 or 2^i. The bit
/// commitments sum to the committed total, which binds the proof to the
/// specific commitment. Proves value in [0, 2^bits).
struct RangeProof {
    uint8_t bits = 0;
    std::vector<Commitment> bit_commitments;
    std::vector<RingSignature> bit_proofs;

    void serialize(ByteWriter& w) const;
    static RangeProof deserialize(ByteReader& r);
    bool operator==(const RangeProof&) const = default;
};

inline constexpr uint8_t kDefaultRangeBits = 16;

/// Throws std::range_error when value >= 2^bits.
RangeProof range_prove(uint64_t value, const Scalar& blinder, const AssetId& asset,
                       uint8_t bits = kDefaultRangeBits);

bool range_verify(const Commitment& commitment, const AssetId& asset,
                  const RangeProof& proof);

}  // namespace fedsim
