#include "fedsim/rangeproof.hpp"

#include "fedsim/hash.hpp"

#include <stdexcept>

namespace fedsim {

void RangeProof::serialize(ByteWriter& w) const {
    w.u8(bits);
    for (const auto& c : bit_commitments) c.serialize(w);
    for (const auto& p : bit_proofs) p.serialize(w);
}

RangeProof RangeProof::deserialize(ByteReader& r) {
    RangeProof p;
    p.bits = r.u8();
    if (p.bits == 0 || p.bits > kMaxValueBits) throw DeserializeError("bad bit width");
    for (unsigned i = 0; i < p.bits; ++i)
        p.bit_commitments.push_back(Commitment::deserialize(r));
    for (unsigned i = 0; i < p.bits; ++i)
        p.bit_proofs.push_back(RingSignature::deserialize(r));
    return p;
}

// message binding each bit proof to the total commitment and bit position
static Bytes bit_message(const Commitment& total, uint8_t bits, unsigned index) {
    ByteWriter w;
    total.serialize(w);
    w.u8(bits);
    w.u32(index);
    return w.take();
}

RangeProof range_prove(uint64_t value, const Scalar& blinder, const AssetId& asset,
                       uint8_t bits) {
    if (bits == 0 || bits > kMaxValueBits) throw std::range_error("bad bit width");
    if (bits < 64 && value >= (uint64_t(1) << bits))
        throw std::range_error("value exceeds range");

    GroupElement h = asset_generator(asset);
    Commitment total = commit(value, blinder, asset);

    // per-bit blinders derived deterministically, constrained to sum to the
    // total blinder so the bit commitments add up to the commitment itself
    ByteWriter seed_w;
    blinder.serialize(seed_w);
    seed_w.u64(value);
    seed_w.digest(asset);
    DetRng tape(hash32("fedsim/rangeproof-tape", seed_w.bytes()));

    std::vector<Scalar> r(bits);
    Scalar sum = Scalar::zero();
    for (unsigned i = 0; i + 1 < bits; ++i) {
        r[i] = Scalar::random(tape);
        sum = sum + r[i];
    }
    r[bits - 1] = blinder - sum;

    RangeProof proof;
    proof.bits = bits;
    for (unsigned i = 0; i < bits; ++i) {
        uint64_t bit_value = (value >> i) & 1 ? (uint64_t(1) << i) : 0;
        Commitment ci = commit(bit_value, r[i], asset);
        proof.bit_commitments.push_back(ci);

        // ring = [C_i, C_i - 2^i * H]; the prover knows the discrete log of
        // exactly one member: index 0 when the bit is 0, index 1 when it is 1
        GroupElement shifted = ci.point - h * Scalar::from_u64(uint64_t(1) << i);
        std::array<GroupElement, 2> ring = {ci.point, shifted};
        size_t known = (value >> i) & 1 ? 1 : 0;
        proof.bit_proofs.push_back(
            ring_sign(ring, known, r[i], bit_message(total, bits, i)));
    }
    return proof;
}

bool range_verify(const Commitment& commitment, const AssetId& asset,
                  const RangeProof& proof) {
    if (proof.bits == 0 || proof.bits > kMaxValueBits) return false;
    if (proof.bit_commitments.size() != proof.bits ||
        proof.bit_proofs.size() != proof.bits)
        return false;

    GroupElement h = asset_generator(asset);
    GroupElement sum;
    for (const auto& c : proof.bit_commitments) sum = sum + c.point;
    if (!(sum == commitment.point)) return false;

    for (unsigned i = 0; i < proof.bits; ++i) {
        const Commitment& ci = proof.bit_commitments[i];
        GroupElement shifted = ci.point - h * Scalar::from_u64(uint64_t(1) << i);
        std::array<GroupElement, 2> ring = {ci.point, shifted};
        if (!ring_verify(ring, bit_message(commitment, proof.bits, i), proof.bit_proofs[i]))
            return false;
    }
    return true;
}

}  // namespace fedsim
