#include "fedsim/block.hpp"

#include "fedsim/hash.hpp"
#include "fedsim/merkle.hpp"

namespace fedsim {

static void serialize_header_body(ByteWriter& w, const BlockHeader& h) {
    w.u64(h.height);
    w.digest(h.prev);
    w.digest(h.merkle_root);
    w.u64(h.timestamp);
}

Digest32 BlockHeader::digest() const {
    ByteWriter w;
    serialize_header_body(w, *this);
    return hash32("fedsim/header", w.bytes());
}

void BlockHeader::serialize(ByteWriter& w) const {
    serialize_header_body(w, *this);
    if (const auto* work = std::get_if<WorkStamp>(&stamp)) {
        w.u8(0);
        w.u32(work->miner);
        w.u64(work->nonce);
    } else {
        const auto& multi = std::get<MultisigStamp>(stamp);
        w.u8(1);
        w.u32(uint32_t(multi.signatures.size()));
        for (const auto& [idx, sig] : multi.signatures) {
            w.u8(idx);
            sig.serialize(w);
        }
    }
}

BlockHeader BlockHeader::deserialize(ByteReader& r) {
    BlockHeader h;
    h.height = r.u64();
    h.prev = r.digest();
    h.merkle_root = r.digest();
    h.timestamp = r.u64();
    switch (r.u8()) {
        case 0: {
            WorkStamp s;
            s.miner = r.u32();
            s.nonce = r.u64();
            h.stamp = s;
            break;
        }
        case 1: {
            MultisigStamp s;
            uint32_t n = r.seq_len(256);
            for (uint32_t i = 0; i < n; ++i) {
                uint8_t idx = r.u8();
                s.signatures.emplace_back(idx, SchnorrSignature::deserialize(r));
            }
            h.stamp = std::move(s);
            break;
        }
        default:
            throw DeserializeError("unknown stamp tag");
    }
    return h;
}

Digest32 Block::compute_merkle_root() const {
    if (txs.empty()) return hash32("fedsim/empty-merkle", {});
    std::vector<Digest32> ids;
    ids.reserve(txs.size());
    for (const auto& tx : txs) ids.push_back(tx.txid());
    return merkle_root(ids);
}

void Block::serialize(ByteWriter& w) const {
    header.serialize(w);
    w.u32(uint32_t(txs.size()));
    for (const auto& tx : txs) tx.serialize(w);
}

Block Block::deserialize(ByteReader& r) {
    Block b;
    b.header = BlockHeader::deserialize(r);
    uint32_t n = r.seq_len(1u << 16);
    b.txs.reserve(n);
    for (uint32_t i = 0; i < n; ++i) b.txs.push_back(Transaction::deserialize(r));
    return b;
}

Bytes header_signing_message(const Digest32& header_digest) {
    ByteWriter w;
    w.digest(header_digest);
    return w.take();
}

}  // namespace fedsim
