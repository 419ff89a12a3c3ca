#pragma once

#include "fedsim/group.hpp"

namespace fedsim {

/// Schnorr signature (R, s) with deterministic nonce derivation from
/// (secret, message): signing the same message twice yields identical bytes.
struct SchnorrSignature {
    GroupElement nonce_point;  // R
    Scalar response;           // s

    void serialize(ByteWriter& w) const {
        nonce_point.serialize(w);
        response.serialize(w);
    }
    static SchnorrSignature deserialize(ByteReader& r) {
        SchnorrSignature sig;
        sig.nonce_point = GroupElement::deserialize(r);
        sig.response = Scalar::deserialize(r);
        return sig;
    }
    bool operator==(const SchnorrSignature&) const = default;
};

SchnorrSignature schnorr_sign(const Scalar& secret, std::span<const uint8_t> message);
bool schnorr_verify(const GroupElement& pub, std::span<const uint8_t> message,
                    const SchnorrSignature& sig);

}  // namespace fedsim
