#pragma once

#include "fedsim/group.hpp"

#include <vector>

namespace fedsim {

/// Fiat-Shamir 1-of-n discrete-log ring signature (AOS style). The
/// transcript is a challenge seed plus one response per ring member and
/// carries no field identifying the signer's index. Verification is bound
/// to the exact ordered ring and the message.
struct RingSignature {
    Scalar seed;                   // e_0, challenge at ring position 0
    std::vector<Scalar> responses;  // one per ring member

    void serialize(ByteWriter& w) const;
    static RingSignature deserialize(ByteReader& r);
    bool operator==(const RingSignature&) const = default;
};

/// Signs at `signer_index`; requires signer_secret * G == ring[signer_index].
/// Fully deterministic: nonce and decoy responses are derived from
/// (secret, ring, message). Throws std::invalid_argument on a mismatched
/// secret or an empty ring.
RingSignature ring_sign(std::span<const GroupElement> ring, size_t signer_index,
                        const Scalar& signer_secret, std::span<const uint8_t> message);

bool ring_verify(std::span<const GroupElement> ring, std::span<const uint8_t> message,
                 const RingSignature& sig);

}  // namespace fedsim
