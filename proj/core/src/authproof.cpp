#include "fedsim/authproof.hpp"

#include <stdexcept>

namespace fedsim {

void AuthorizationProof::serialize(ByteWriter& w) const {
    whitelist_key.serialize(w);
    w.u32(uint32_t(ring.size()));
    for (const auto& l : ring) l.serialize(w);
    signature.serialize(w);
}

AuthorizationProof AuthorizationProof::deserialize(ByteReader& r) {
    AuthorizationProof p;
    p.whitelist_key = GroupElement::deserialize(r);
    uint32_t n = r.seq_len();
    p.ring.reserve(n);
    for (uint32_t i = 0; i < n; ++i) p.ring.push_back(GroupElement::deserialize(r));
    p.signature = RingSignature::deserialize(r);
    return p;
}

GroupElement derive_auth_key(const GroupElement& online_pub,
                             const GroupElement& offline_pub, const GroupElement& w) {
    GroupElement sum = w + offline_pub;
    Scalar h = Scalar::hash_to_scalar("fedsim/auth-key", sum.bytes());
    return online_pub + sum * h;
}

// message = the full list of online and offline keys plus W
static Bytes auth_message(std::span<const GroupElement> all_online,
                          std::span<const GroupElement> all_offline,
                          const GroupElement& w) {
    ByteWriter bw;
    bw.u32(uint32_t(all_online.size()));
    for (const auto& p : all_online) p.serialize(bw);
    bw.u32(uint32_t(all_offline.size()));
    for (const auto& q : all_offline) q.serialize(bw);
    w.serialize(bw);
    return bw.take();
}

static std::vector<GroupElement> derive_ring(std::span<const GroupElement> all_online,
                                             std::span<const GroupElement> all_offline,
                                             const GroupElement& w) {
    std::vector<GroupElement> ring;
    ring.reserve(all_online.size());
    for (size_t j = 0; j < all_online.size(); ++j)
        ring.push_back(derive_auth_key(all_online[j], all_offline[j], w));
    return ring;
}

AuthorizationProof authorize_key(size_t index, const Scalar& online_secret,
                                 const Scalar& offline_sum_secret, const GroupElement& w,
                                 std::span<const GroupElement> all_online,
                                 std::span<const GroupElement> all_offline) {
    if (all_online.size() != all_offline.size() || index >= all_online.size())
        throw std::invalid_argument("bad participant index or key lists");
    if (!(GroupElement::base_mul(online_secret) == all_online[index]))
        throw std::invalid_argument("online secret mismatch");
    if (!(GroupElement::base_mul(offline_sum_secret) == w + all_offline[index]))
        throw std::invalid_argument("offline sum secret mismatch");

    AuthorizationProof proof;
    proof.whitelist_key = w;
    proof.ring = derive_ring(all_online, all_offline, w);

    GroupElement sum = w + all_offline[index];
    Scalar h = Scalar::hash_to_scalar("fedsim/auth-key", sum.bytes());
    Scalar ring_secret = online_secret + h * offline_sum_secret;

    proof.signature = ring_sign(proof.ring, index, ring_secret,
                                auth_message(all_online, all_offline, w));
    return proof;
}

bool authorize_verify(const AuthorizationProof& proof,
                      std::span<const GroupElement> all_online,
                      std::span<const GroupElement> all_offline) {
    if (all_online.size() != all_offline.size() || all_online.empty()) return false;
    std::vector<GroupElement> ring =
        derive_ring(all_online, all_offline, proof.whitelist_key);
    return ring_verify(ring, auth_message(all_online, all_offline, proof.whitelist_key),
                       proof.signature);
}

}  // namespace fedsim
