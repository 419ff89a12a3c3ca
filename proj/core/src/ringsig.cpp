#include "fedsim/ringsig.hpp"

#include "fedsim/hash.hpp"

#include <stdexcept>

namespace fedsim {

void RingSignature::serialize(ByteWriter& w) const {
    seed.serialize(w);
    w.u32(uint32_t(responses.size()));
    for (const auto& s : responses) s.serialize(w);
}

RingSignature RingSignature::deserialize(ByteReader& r) {
    RingSignature sig;
    sig.seed = Scalar::deserialize(r);
    uint32_t n = r.seq_len();
    sig.responses.reserve(n);
    for (uint32_t i = 0; i < n; ++i) sig.responses.push_back(Scalar::deserialize(r));
    return sig;
}

// Binds every challenge to the full ordered ring and the message, so a
// transcript never verifies against a permuted ring or altered message.
static Digest32 ring_context(std::span<const GroupElement> ring,
                             std::span<const uint8_t> message) {
    ByteWriter w;
    w.u32(uint32_t(ring.size()));
    for (const auto& p : ring) p.serialize(w);
    w.var_bytes(message);
    return hash32("fedsim/ring-context", w.bytes());
}

static Scalar link_challenge(const Digest32& ctx, const GroupElement& point) {
    ByteWriter w;
    w.digest(ctx);
    point.serialize(w);
    return Scalar::hash_to_scalar("fedsim/ring-challenge", w.bytes());
}

RingSignature ring_sign(std::span<const GroupElement> ring, size_t signer_index,
                        const Scalar& signer_secret, std::span<const uint8_t> message) {
    const size_t n = ring.size();
    if (n == 0) throw std::invalid_argument("empty ring");
    if (signer_index >= n) throw std::invalid_argument("signer index out of range");
    if (!(GroupElement::base_mul(signer_secret) == ring[signer_index]))
        throw std::invalid_argument("secret does not match ring member");

    Digest32 ctx = ring_context(ring, message);

    // deterministic nonce and decoy responses from (secret, context)
    ByteWriter seed_w;
    signer_secret.serialize(seed_w);
    seed_w.digest(ctx);
    DetRng tape(hash32("fedsim/ring-tape", seed_w.bytes()));

    Scalar nonce = Scalar::random(tape);
    std::vector<Scalar> s(n);
    std::vector<Scalar> c(n);

    // walk the ring from the slot after the signer back around to it
    Scalar next = link_challenge(ctx, GroupElement::base_mul(nonce));
    for (size_t step = 1; step < n; ++step) {
        size_t j = (signer_index + step) % n;
        c[j] = next;
        s[j] = Scalar::random(tape);
        next = link_challenge(ctx, GroupElement::base_mul(s[j]) + ring[j] * c[j]);
    }
    c[signer_index] = next;
    s[signer_index] = nonce - c[signer_index] * signer_secret;

    return {c[0], std::move(s)};
}

bool ring_verify(std::span<const GroupElement> ring, std::span<const uint8_t> message,
                 const RingSignature& sig) {
    const size_t n = ring.size();
    if (n == 0 || sig.responses.size() != n) return false;
    Digest32 ctx = ring_context(ring, message);
    Scalar c = sig.seed;
    for (size_t j = 0; j < n; ++j)
        c = link_challenge(ctx, GroupElement::base_mul(sig.responses[j]) + ring[j] * c);
    return c == sig.seed;
}

}  // namespace fedsim
