#include "fedsim/schnorr.hpp"

namespace fedsim {

static Scalar challenge(const GroupElement& nonce_point, const GroupElement& pub,
                        std::span<const uint8_t> message) {
    ByteWriter w;
    nonce_point.serialize(w);
    pub.serialize(w);
    w.var_bytes(message);
    return Scalar::hash_to_scalar("fedsim/schnorr-challenge", w.bytes());
}

SchnorrSignature schnorr_sign(const Scalar& secret, std::span<const uint8_t> message) {
    ByteWriter nw;
    secret.serialize(nw);
    nw.var_bytes(message);
    Scalar k = Scalar::hash_to_scalar("fedsim/schnorr-nonce", nw.bytes());
    GroupElement r = GroupElement::base_mul(k);
    GroupElement pub = GroupElement::base_mul(secret);
    Scalar e = challenge(r, pub, message);
    return {r, k + e * secret};
}

bool schnorr_verify(const GroupElement& pub, std::span<const uint8_t> message,
                    const SchnorrSignature& sig) {
    if (pub.is_identity()) return false;
    Scalar e = challenge(sig.nonce_point, pub, message);
    return GroupElement::base_mul(sig.response) == sig.nonce_point + pub * e;
}

}  // namespace fedsim
