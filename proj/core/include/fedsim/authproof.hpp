#pragma once

#include "fedsim/ringsig.hpp"

namespace fedsim {

/// Withdrawal-destination authorization: a ring signature over keys derived
/// from every federation member's online/offline keypairs, proving the
/// destination key W was authorized by some member without revealing which.
struct AuthorizationProof {
    GroupElement whitelist_key;      // W
    std::vector<GroupElement> ring;  // L_1..L_n, derived, kept for inspection
    RingSignature signature;

    void serialize(ByteWriter& w) const;
    static AuthorizationProof deserialize(ByteReader& r);
    bool operator==(const AuthorizationProof&) const = default;
};

/// L_j = P_j + H(W + Q_j) * (W + Q_j), H a domain-separated hash to scalars.
GroupElement derive_auth_key(const GroupElement& online_pub,
                             const GroupElement& offline_pub, const GroupElement& w);

/// Produces the proof for participant `index`. `online_secret` is p_i;
/// `offline_sum_secret` is the discrete log of W + Q_i (the offline key
/// never needs to come online). Throws std::invalid_argument when either
/// secret fails to match the public inputs.
AuthorizationProof authorize_key(size_t index, const Scalar& online_secret,
                                 const Scalar& offline_sum_secret, const GroupElement& w,
                                 std::span<const GroupElement> all_online,
                                 std::span<const GroupElement> all_offline);

/// Recomputes the ring from (all_online, all_offline, proof.W) and verifies
/// the ring signature over the message binding the full key lists and W.
bool authorize_verify(const AuthorizationProof& proof,
                      std::span<const GroupElement> all_online,
                      std::span<const GroupElement> all_offline);

}  // namespace fedsim
