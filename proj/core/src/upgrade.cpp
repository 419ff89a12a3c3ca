#include "fedsim/upgrade.hpp"

#include "fedsim/hash.hpp"

#include <set>
#include <stdexcept>

namespace fedsim {

Bytes UpgradePackage::signing_message() const {
    ByteWriter w;
    w.u64(version);
    w.digest(image_digest);
    Digest32 d = hash32("fedsim/upgrade", w.bytes());
    return Bytes(d.begin(), d.end());
}

void UpgradePackage::serialize(ByteWriter& w) const {
    w.u64(version);
    w.digest(image_digest);
    usp_sig.serialize(w);
    w.u8(auditor_sig ? 1 : 0);
    if (auditor_sig) auditor_sig->serialize(w);
    w.u32(uint32_t(functionary_sigs.size()));
    for (const auto& [idx, sig] : functionary_sigs) {
        w.u8(idx);
        sig.serialize(w);
    }
}

UpgradePackage UpgradePackage::deserialize(ByteReader& r) {
    UpgradePackage p;
    p.version = r.u64();
    p.image_digest = r.digest();
    p.usp_sig = SchnorrSignature::deserialize(r);
    if (r.u8()) p.auditor_sig = SchnorrSignature::deserialize(r);
    uint32_t n = r.seq_len();
    for (uint32_t i = 0; i < n; ++i) {
        uint8_t idx = r.u8();
        p.functionary_sigs.emplace_back(idx, SchnorrSignature::deserialize(r));
    }
    return p;
}

const char* upgrade_outcome_name(UpgradeOutcome o) {
    switch (o) {
        case UpgradeOutcome::accepted: return "accepted";
        case UpgradeOutcome::rejected_signature: return "rejected(signature)";
        case UpgradeOutcome::rejected_quorum: return "rejected(quorum)";
    }
    return "?";
}

UpgradeOutcome upgrade_apply(const UpgradePackage& package,
                             const GroupElement& usp_key,
                             std::span<const GroupElement> functionary_keys,
                             uint32_t supermajority) {
    if (supermajority > functionary_keys.size())
        throw std::invalid_argument("supermajority exceeds functionary count");
    Bytes msg = package.signing_message();
    if (!schnorr_verify(usp_key, msg, package.usp_sig))
        return UpgradeOutcome::rejected_signature;
    std::set<uint8_t> seen;
    for (const auto& [idx, sig] : package.functionary_sigs) {
        if (idx >= functionary_keys.size() ||
            !schnorr_verify(functionary_keys[idx], msg, sig))
            return UpgradeOutcome::rejected_signature;
        seen.insert(idx);
    }
    if (seen.size() < supermajority) return UpgradeOutcome::rejected_quorum;
    return UpgradeOutcome::accepted;
}

UpgradePackage upgrade_build(uint64_t version, const Digest32& image_digest,
                             const Keypair& usp_key,
                             std::span<const Keypair> functionaries,
                             std::span<const uint32_t> signers) {
    UpgradePackage p;
    p.version = version;
    p.image_digest = image_digest;
    Bytes msg = p.signing_message();
    p.usp_sig = schnorr_sign(usp_key.secret, msg);
    for (uint32_t idx : signers) {
        if (idx >= functionaries.size()) throw std::invalid_argument("bad signer index");
        p.functionary_sigs.emplace_back(uint8_t(idx),
                                        schnorr_sign(functionaries[idx].secret, msg));
    }
    return p;
}

}  // namespace fedsim
