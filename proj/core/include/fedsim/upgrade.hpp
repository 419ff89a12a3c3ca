#pragma once

#include "fedsim/schnorr.hpp"

#include <optional>

namespace fedsim {

/// Signed software-update announcement. Accepted only once enough distinct
/// functionaries have countersigned the (version, image digest) pair on top
/// of the publisher's signature.
struct UpgradePackage {
    uint64_t version = 0;
    Digest32 image_digest{};
    SchnorrSignature usp_sig;                       // update-signing-party key
    std::optional<SchnorrSignature> auditor_sig;    // informational
    std::vector<std::pair<uint8_t, SchnorrSignature>> functionary_sigs;

    /// The bytes every signature covers.
    Bytes signing_message() const;

    void serialize(ByteWriter& w) const;
    static UpgradePackage deserialize(ByteReader& r);
};

enum class UpgradeOutcome : uint8_t {
    accepted,
    rejected_signature,  // publisher or a listed functionary signature is bad
    rejected_quorum,     // fewer than `supermajority` distinct valid signers
};

const char* upgrade_outcome_name(UpgradeOutcome o);

/// Throws std::invalid_argument when supermajority exceeds the key count.
UpgradeOutcome upgrade_apply(const UpgradePackage& package,
                             const GroupElement& usp_key,
                             std::span<const GroupElement> functionary_keys,
                             uint32_t supermajority);

/// Builds a fully signed package from the signing functionary subset.
UpgradePackage upgrade_build(uint64_t version, const Digest32& image_digest,
                             const Keypair& usp_key,
                             std::span<const Keypair> functionaries,
                             std::span<const uint32_t> signers);

}  // namespace fedsim
