#pragma once

#include "fedsim/transaction.hpp"

namespace fedsim {

/// Modeled proof-of-work stamp: identifies the miner; no real hashing.
struct WorkStamp {
    uint32_t miner = 0;
    uint64_t nonce = 0;
    bool operator==(const WorkStamp&) const = default;
};

/// k-of-n blocksigner multisignature over the header digest.
struct MultisigStamp {
    std::vector<std::pair<uint8_t, SchnorrSignature>> signatures;
    bool operator==(const MultisigStamp&) const = default;
};

using BlockStamp = std::variant<WorkStamp, MultisigStamp>;

struct BlockHeader {
    uint64_t height = 0;
    Digest32 prev{};
    Digest32 merkle_root{};
    uint64_t timestamp = 0;  // simulated seconds
    BlockStamp stamp = WorkStamp{};

    bool operator==(const BlockHeader&) const = default;

    /// Digest over everything except the stamp; the value blocksigners sign
    /// and fork proofs compare.
    Digest32 digest() const;

    void serialize(ByteWriter& w) const;
    static BlockHeader deserialize(ByteReader& r);
};

struct Block {
    BlockHeader header;
    std::vector<Transaction> txs;

    bool operator==(const Block&) const = default;

    /// Merkle root of this block's transaction ids (empty blocks use a
    /// fixed empty-list digest).
    Digest32 compute_merkle_root() const;

    void serialize(ByteWriter& w) const;
    static Block deserialize(ByteReader& r);
};

/// Signature message bound to a header digest.
Bytes header_signing_message(const Digest32& header_digest);

}  // namespace fedsim
